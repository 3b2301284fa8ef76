"""Individual rationality audits.

Participation is compared against the no-communication baseline in which
Alice plays her best response to the prior. Four notions are supported:
ex-ante (before Bob learns his type), interim (conditional on his type),
ex-post (conditional on his type and the realized signal or transcript)
and non-committed interim, where at every node of a conversation Bob must
prefer continuing to quitting, after which Alice best responds to her
belief at that node.

All audits run for Bob by default; `agent='alice'` audits the analogous
conditions for Alice, which hold for every protocol.
"""

from collections import OrderedDict
from dataclasses import dataclass, field
from enum import Enum
from typing import List
import numpy as np
from parley.conversations import (
    ConversationProtocol, DEFAULT_TRANSCRIPT_BUDGET, history_label,
    history_tree)
from parley.games import best_response, no_comm_profile
from parley.mediators import MediatorProtocol
from parley.beliefs import Belief, product_posterior
from parley.utils import as_rational, zeros, ZERO


class IRNotion(str, Enum):
    """Individual rationality notions, from weakest to strongest."""

    EX_ANTE = 'exante'
    INTERIM = 'interim'
    EX_POST = 'expost'
    NON_COMMITTED = 'noncommitted'


@dataclass(frozen=True)
class Comparison:
    """Single participation inequality `lhs >= rhs`.

    `context` names the signal, transcript or node (empty for ex-ante
    comparisons) and `type_label` the agent type conditioned on, if any.
    """

    context: str
    type_label: str
    lhs: object
    rhs: object

    @property
    def holds(self):
        return self.lhs >= self.rhs


@dataclass
class IRReport:
    """Result of an individual rationality audit.

    `baseline` maps Alice's types to her no-communication actions.
    """

    notion: IRNotion
    agent: str
    comparisons: List[Comparison]
    baseline: OrderedDict = field(default_factory=OrderedDict)

    @property
    def violations(self):
        return [c for c in self.comparisons if not c.holds]

    @property
    def passed(self):
        return not self.violations


@dataclass
class _Context:
    label: str
    matrix: object
    actions: list


def _alice_actions(game, matrix):
    """Alice's action per type at a context (`None` for absent types)."""
    actions = []
    for i, x in enumerate(game.types_a):
        row = matrix[i, :]
        mass = sum(row, ZERO)
        actions.append(
            None if mass == 0 else best_response(
                game, x, Belief(game.types_b, [v / mass for v in row])))
    return actions


def _check_types(game, protocol):
    if not isinstance(protocol, (MediatorProtocol, ConversationProtocol)):
        raise TypeError(f'Unsupported protocol type {type(protocol)}.')
    if (protocol.types_a != game.types_a or
            protocol.types_b != game.types_b):
        raise ValueError(
            f'Protocol type spaces {protocol.types_a}, {protocol.types_b} do '
            f'not match the game {game.types_a}, {game.types_b}.')


def outcome_contexts(game, protocol, budget=DEFAULT_TRANSCRIPT_BUDGET):
    """Final public information states of a protocol.

    Returns:
        List[_Context]: One context per positive-probability signal (for
        mediators) or complete transcript (for conversations), each with
        its joint type-and-context probability matrix and Alice's resulting
        action per type.
    """
    _check_types(game, protocol)
    contexts = []
    if isinstance(protocol, MediatorProtocol):
        prior = product_posterior(game.prior_a, game.prior_b).matrix
        for s in protocol.signals:
            matrix = zeros(prior.shape)
            for i, x in enumerate(game.types_a):
                for j, y in enumerate(game.types_b):
                    matrix[i, j] = prior[i, j] * protocol.prob(s, x, y)
            if any(v > 0 for v in matrix.reshape(-1)):
                contexts.append(_Context(
                    f'signal {s}', matrix, _alice_actions(game, matrix)))
    else:
        root = history_tree(protocol, game.prior_a, game.prior_b, budget)
        for leaf in root.leaves():
            contexts.append(_Context(
                history_label(leaf.history) or '<root>', leaf.matrix,
                _alice_actions(game, leaf.matrix)))
    return contexts


def _utility(game, agent):
    if agent == 'bob':
        return game.utility_b
    if agent == 'alice':
        return game.utility_a
    raise ValueError(f'Agent must be "alice" or "bob", got {agent!r}.')


def _payoffs(game, matrix, actions, agent):
    """Matrix of `P(x, y, context) u(x, y, action_x)`."""
    utility = _utility(game, agent)
    payoffs = zeros(matrix.shape)
    for i, action in enumerate(actions):
        if action is None:
            continue
        k = game.action_index(action)
        for j in range(matrix.shape[1]):
            payoffs[i, j] = matrix[i, j] * utility[i, j, k]
    return payoffs


def _own_types(game, agent):
    return game.types_b if agent == 'bob' else game.types_a


def _baseline_payoffs(game, matrix, agent):
    baseline = list(no_comm_profile(game).values())
    return _payoffs(game, matrix, baseline, agent)


def _per_type(matrix, agent):
    """Sum a type-pair matrix down to the audited agent's own types."""
    return matrix.sum(axis=0 if agent == 'bob' else 1)


def exante_ir(game, protocol, agent='bob', budget=DEFAULT_TRANSCRIPT_BUDGET):
    """Ex-ante individual rationality of a mediator or conversation.

    Compares the expected utility of following the protocol, with Alice best
    responding to her final belief, against the expected utility of the
    no-communication baseline under the priors.

    Returns:
        IRReport: Report with a single comparison.
    """
    contexts = outcome_contexts(game, protocol, budget)
    prior = product_posterior(game.prior_a, game.prior_b).matrix
    lhs = sum((sum(_payoffs(game, c.matrix, c.actions, agent).reshape(-1),
                   ZERO) for c in contexts), ZERO)
    rhs = sum(_baseline_payoffs(game, prior, agent).reshape(-1), ZERO)
    return IRReport(IRNotion.EX_ANTE, agent, [Comparison('', '', lhs, rhs)],
                    no_comm_profile(game))


def _interim_comparisons(game, contexts, agent, context_label=''):
    prior = product_posterior(game.prior_a, game.prior_b).matrix
    types = _own_types(game, agent)
    mass = _per_type(prior, agent)
    lhs = zeros(len(types))
    for c in contexts:
        lhs = lhs + _per_type(_payoffs(game, c.matrix, c.actions, agent), agent)
    rhs = _per_type(_baseline_payoffs(game, prior, agent), agent)
    return [
        Comparison(context_label, t, lhs[k] / mass[k], rhs[k] / mass[k])
        for k, t in enumerate(types) if mass[k] > 0]


def interim_ir(game, protocol, agent='bob', budget=DEFAULT_TRANSCRIPT_BUDGET):
    """Interim individual rationality: the ex-ante comparison conditional on
    each of the audited agent's types with positive prior probability."""
    contexts = outcome_contexts(game, protocol, budget)
    return IRReport(IRNotion.INTERIM, agent,
                    _interim_comparisons(game, contexts, agent),
                    no_comm_profile(game))


def expost_ir(game, protocol, agent='bob', budget=DEFAULT_TRANSCRIPT_BUDGET):
    """Ex-post individual rationality.

    For every positive-probability signal or transcript and every type `y`
    of Bob consistent with it, compares Bob's expected utility under Alice's
    informed action with his expected utility had Alice played her
    no-communication action, both under Bob's final belief about Alice.

    Returns:
        IRReport: One comparison per `(context, type)` pair.
    """
    contexts = outcome_contexts(game, protocol, budget)
    types = _own_types(game, agent)
    comparisons = []
    for c in contexts:
        mass = _per_type(c.matrix, agent)
        lhs = _per_type(_payoffs(game, c.matrix, c.actions, agent), agent)
        rhs = _per_type(_baseline_payoffs(game, c.matrix, agent), agent)
        for k, t in enumerate(types):
            if mass[k] > 0:
                comparisons.append(Comparison(
                    c.label, t, lhs[k] / mass[k], rhs[k] / mass[k]))
    return IRReport(IRNotion.EX_POST, agent, comparisons,
                    no_comm_profile(game))


def quit_values(game, node, agent='bob'):
    """Value to each type of quitting at a conversation node.

    On quitting Alice best responds to her current belief `q_B` at the
    node, so every Alice type present plays `best_response(x, q_B)`.

    Returns:
        OrderedDict[str, Fraction]: Conditional quit value for each of the
        audited agent's types with positive mass at the node.
    """
    actions = _alice_actions(game, node.matrix)
    payoffs = _per_type(_payoffs(game, node.matrix, actions, agent), agent)
    mass = _per_type(node.matrix, agent)
    return OrderedDict(
        (t, payoffs[k] / mass[k])
        for k, t in enumerate(_own_types(game, agent)) if mass[k] > 0)


def continue_values(game, node, agent='bob'):
    """Value to each type of following the conversation from a node."""
    total = zeros(node.matrix.shape)
    for leaf in node.leaves():
        total = total + _payoffs(
            game, leaf.matrix, _alice_actions(game, leaf.matrix), agent)
    payoffs = _per_type(total, agent)
    mass = _per_type(node.matrix, agent)
    return OrderedDict(
        (t, payoffs[k] / mass[k])
        for k, t in enumerate(_own_types(game, agent)) if mass[k] > 0)


def noncommitted_interim_ir(game, protocol, agent='bob',
                            budget=DEFAULT_TRANSCRIPT_BUDGET):
    """Interim individual rationality for agents who may quit at any time.

    At every positive-probability node of a conversation, including the
    root and nodes where Alice moves next, each surviving type compares
    continuing (Alice acts on her final belief) with quitting (Alice acts on
    her current belief). Mediator protocols have a single message, so the
    notion coincides with interim individual rationality.

    Returns:
        IRReport: One comparison per `(node, type)` pair.
    """
    if isinstance(protocol, MediatorProtocol):
        report = interim_ir(game, protocol, agent, budget)
        report.notion = IRNotion.NON_COMMITTED
        return report
    _check_types(game, protocol)
    root = history_tree(protocol, game.prior_a, game.prior_b, budget)
    comparisons = []
    for node in root.walk():
        label = history_label(node.history) or '<root>'
        continuing = continue_values(game, node, agent)
        for t, quitting in quit_values(game, node, agent).items():
            comparisons.append(Comparison(label, t, continuing[t], quitting))
    return IRReport(IRNotion.NON_COMMITTED, agent, comparisons,
                    no_comm_profile(game))


AUDITS = OrderedDict([
    (IRNotion.EX_ANTE, exante_ir),
    (IRNotion.INTERIM, interim_ir),
    (IRNotion.EX_POST, expost_ir),
    (IRNotion.NON_COMMITTED, noncommitted_interim_ir),
])


def audit(game, protocol, notion, agent='bob',
          budget=DEFAULT_TRANSCRIPT_BUDGET):
    """Run the audit of the given notion (name or `IRNotion`)."""
    return AUDITS[IRNotion(notion)](game, protocol, agent, budget)


def outcome_distribution(game, protocol, budget=DEFAULT_TRANSCRIPT_BUDGET):
    """Distribution of `(type_a, type_b, action)` outcomes.

    Returns:
        OrderedDict[Tuple[str, str, str], Fraction]: Positive-probability
        outcomes in type and action order.
    """
    totals = {}
    for c in outcome_contexts(game, protocol, budget):
        for i, x in enumerate(game.types_a):
            for j, y in enumerate(game.types_b):
                if c.matrix[i, j] > 0:
                    key = (x, y, c.actions[i])
                    totals[key] = totals.get(key, ZERO) + c.matrix[i, j]
    return OrderedDict(
        (key, totals[key]) for key in sorted(totals, key=lambda k: (
            game.types_a.index(k[0]), game.types_b.index(k[1]),
            game.actions.index(k[2]))))


def objective_array(game, objective):
    """Object array `[x, y, r]` of an objective given as a callable of
    `(type_a, type_b, action)`, a mapping or an array."""
    if isinstance(objective, np.ndarray):
        return objective
    shape = (len(game.types_a), len(game.types_b), len(game.actions))
    array = np.empty(shape, dtype=object)
    lookup = objective if callable(objective) else (
        lambda x, y, r: objective[x, y, r])
    for i, x in enumerate(game.types_a):
        for j, y in enumerate(game.types_b):
            for k, r in enumerate(game.actions):
                array[i, j, k] = as_rational(lookup(x, y, r))
    return array


def expected_objective(game, protocol, objective,
                       budget=DEFAULT_TRANSCRIPT_BUDGET):
    """Expected value of an objective `u(θ_A, θ_B, r)` under a protocol."""
    array = objective_array(game, objective)
    total = ZERO
    for (x, y, r), prob in outcome_distribution(
            game, protocol, budget).items():
        total += prob * array[game.type_a_index(x), game.type_b_index(y),
                              game.action_index(r)]
    return total


def expected_utilities(game, protocol, budget=DEFAULT_TRANSCRIPT_BUDGET):
    """Expected utilities `(E[u_A], E[u_B])` under a protocol."""
    return (expected_objective(game, protocol, game.utility_a, budget),
            expected_objective(game, protocol, game.utility_b, budget))
