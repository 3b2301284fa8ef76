"""Bayesian conversations.

In each of `n_rounds` rounds Alice first sends a signal drawn from a kernel
depending on her type and the public history, then Bob replies with a
signal depending on his type and the history. The probability of a history
jointly with the types is tracked as a reach matrix: starting from the prior
product, each Alice signal rescales the rows and each Bob signal rescales
the columns. At every positive-probability history the normalized reach
matrix is therefore the product of the two public beliefs.
"""

import logging
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import List
import numpy as np
from parley.beliefs import (
    Atom, Belief, JointPosteriorDistribution, ObserverPosterior,
    product_posterior)
from parley.errors import (
    BudgetExceededError, ProtocolError, ZeroProbabilityError)
from parley.utils import (
    as_rational, check_distribution, zeros, ZERO, ONE)

logger = logging.getLogger(__name__)

DEFAULT_TRANSCRIPT_BUDGET = 100_000
"""Maximum number of complete transcripts enumerated by `simulate`."""

HISTORY_SEPARATOR = ';'
PASS_SIGNAL = 'pass'


def history_label(history):
    """Canonical text label of a history, e.g. `'down;left'`."""
    return HISTORY_SEPARATOR.join(history)


def parse_history(label):
    """Inverse of `history_label`."""
    return tuple(label.split(HISTORY_SEPARATOR)) if label else ()


@dataclass(frozen=True)
class Round:
    """Signal sets available to Alice and Bob in one round."""

    alice_signals: tuple
    bob_signals: tuple


class ConversationProtocol(object):
    """Finite-round conversation with extensional signalling kernels.

    Kernels are stored per reachable history: `alice_kernels[t]` maps a
    history of length `2 t` to `{type_a: {signal: prob}}` and
    `bob_kernels[t]` maps a history of length `2 t + 1` to
    `{type_b: {signal: prob}}`. Alice's kernels never see Bob's type and
    vice versa, which is what makes the protocol a conversation rather than
    a mediator.
    """

    def __init__(self, types_a, types_b, rounds, alice_kernels, bob_kernels):
        """
        Args:
            types_a (Sequence[str]): Alice's type labels.
            types_b (Sequence[str]): Bob's type labels.
            rounds (Sequence[Round]): Signal sets per round.
            alice_kernels (Sequence[Dict[Tuple[str], Dict]]): Alice's
                kernels per round keyed by history tuples.
            bob_kernels (Sequence[Dict[Tuple[str], Dict]]): Bob's kernels
                per round keyed by history tuples.
        """
        self.types_a = tuple(types_a)
        self.types_b = tuple(types_b)
        self.rounds = tuple(
            Round(tuple(r.alice_signals), tuple(r.bob_signals))
            for r in rounds)
        if len(alice_kernels) != len(self.rounds) or len(bob_kernels) != len(
                self.rounds):
            raise ProtocolError('One Alice and one Bob kernel per round.')
        self.alice_kernels = tuple(
            self._check_kernels(k, t, 'A') for t, k in enumerate(alice_kernels))
        self.bob_kernels = tuple(
            self._check_kernels(k, t, 'B') for t, k in enumerate(bob_kernels))

    @property
    def n_rounds(self):
        return len(self.rounds)

    @property
    def n_moves(self):
        return 2 * len(self.rounds)

    def signals_at(self, position):
        """Signal set of the move at history length `position`."""
        round_ = self.rounds[position // 2]
        return round_.alice_signals if position % 2 == 0 else \
            round_.bob_signals

    def _check_kernels(self, kernels, t, side):
        types = self.types_a if side == 'A' else self.types_b
        signals = (self.rounds[t].alice_signals if side == 'A'
                   else self.rounds[t].bob_signals)
        if not signals:
            raise ProtocolError(f'Round {t + 1} has an empty signal set.')
        for s in signals:
            if HISTORY_SEPARATOR in s:
                raise ProtocolError(
                    f'Signal {s!r} contains {HISTORY_SEPARATOR!r}.')
        length = 2 * t + (0 if side == 'A' else 1)
        checked = {}
        for history, rows in kernels.items():
            history = tuple(history)
            if len(history) != length:
                raise ProtocolError(
                    f'{side} kernel of round {t + 1} keyed by history '
                    f'{history} of length {len(history)}, expected {length}.')
            for position, signal in enumerate(history):
                if signal not in self.signals_at(position):
                    raise ProtocolError(
                        f'Signal {signal!r} at position {position} of '
                        f'history {history} is not allowed.')
            unknown_types = set(rows) - set(types)
            if unknown_types:
                raise ProtocolError(
                    f'Unknown types {sorted(unknown_types)} in {side} kernel.')
            checked_rows = OrderedDict()
            for type_label in (label for label in types if label in rows):
                row = {s: as_rational(p) for s, p in rows[type_label].items()}
                unknown = set(row) - set(signals)
                if unknown:
                    raise ProtocolError(
                        f'Signals {sorted(unknown)} not in round {t + 1} '
                        f'set for {side}.')
                check_distribution(
                    row.values(),
                    f'{side} kernel row at {history} for {type_label}')
                checked_rows[type_label] = OrderedDict(
                    (s, row.get(s, ZERO)) for s in signals)
            checked[history] = checked_rows
        return checked

    def kernel_row(self, history, type_label):
        """Signal distribution of the mover at `history` with given type.

        Raises:
            `parley.errors.ProtocolError` if the kernel has no such row.
        """
        position = len(history)
        t, side = position // 2, 'A' if position % 2 == 0 else 'B'
        kernels = self.alice_kernels[t] if side == 'A' else self.bob_kernels[t]
        try:
            return kernels[tuple(history)][type_label]
        except KeyError:
            raise ProtocolError(
                f'No {side} kernel row at history {tuple(history)} for type '
                f'{type_label!r}.')

    def __eq__(self, other):
        if not isinstance(other, ConversationProtocol):
            return NotImplemented
        return (self.types_a == other.types_a and
                self.types_b == other.types_b and
                self.rounds == other.rounds and
                self.alice_kernels == other.alice_kernels and
                self.bob_kernels == other.bob_kernels)

    def __repr__(self):
        return (f'ConversationProtocol(n_rounds={self.n_rounds}, '
                f'types_a={self.types_a}, types_b={self.types_b})')


def _apply_move(matrix, protocol, history, signal):
    """Reach matrix after `signal` is sent at `history`."""
    position = len(history)
    new = matrix.copy()
    if position % 2 == 0:
        for i, x in enumerate(protocol.types_a):
            if any(v != 0 for v in matrix[i, :]):
                new[i, :] = matrix[i, :] * protocol.kernel_row(
                    history, x)[signal]
    else:
        for j, y in enumerate(protocol.types_b):
            if any(v != 0 for v in matrix[:, j]):
                new[:, j] = matrix[:, j] * protocol.kernel_row(
                    history, y)[signal]
    return new


def reach_matrix(protocol, history, prior_a, prior_b):
    """Joint probability of types and a (possibly partial) history.

    Args:
        protocol (ConversationProtocol): Conversation.
        history (Sequence[str]): Signals sent so far.
        prior_a (Belief): Prior over Alice's types.
        prior_b (Belief): Prior over Bob's types.

    Returns:
        ObserverPosterior: Unnormalized matrix with entry `(x, y)` equal to
        `P(θ_A = x, θ_B = y, history)`; zero for unreachable histories.
    """
    history = tuple(history)
    if len(history) > protocol.n_moves:
        raise ProtocolError(f'History {history} longer than protocol.')
    matrix = product_posterior(prior_a, prior_b).matrix.copy()
    for position, signal in enumerate(history):
        if signal not in protocol.signals_at(position):
            raise ProtocolError(
                f'Signal {signal!r} not allowed at position {position}.')
        if all(v == 0 for v in matrix.reshape(-1)):
            break
        matrix = _apply_move(matrix, protocol, history[:position], signal)
    return ObserverPosterior(
        protocol.types_a, protocol.types_b, matrix, normalized=False)


def _beliefs_from_matrix(labels_a, labels_b, matrix):
    total = sum(matrix.reshape(-1), ZERO)
    if total == 0:
        raise ZeroProbabilityError('History has zero probability.')
    belief_a = Belief(labels_a, [w / total for w in matrix.sum(axis=1)])
    belief_b = Belief(labels_b, [w / total for w in matrix.sum(axis=0)])
    return belief_a, belief_b


def posteriors_at(protocol, history, prior_a, prior_b):
    """Public beliefs after a history.

    Returns:
        Tuple[Belief, Belief]: Bob's belief over Alice's types `q_A` and
        Alice's belief over Bob's types `q_B`.

    Raises:
        `parley.errors.ZeroProbabilityError` if the history has zero
        probability.
    """
    matrix = reach_matrix(protocol, history, prior_a, prior_b).matrix
    return _beliefs_from_matrix(protocol.types_a, protocol.types_b, matrix)


@dataclass
class HistoryNode:
    """Positive-probability node of a conversation's history tree."""

    history: tuple
    matrix: object
    prob: object
    belief_a: Belief
    belief_b: Belief
    edge_prob: object = ONE
    parent: 'HistoryNode' = None
    children: List['HistoryNode'] = field(default_factory=list)

    @property
    def is_leaf(self):
        return not self.children

    @property
    def mover(self):
        return 'A' if len(self.history) % 2 == 0 else 'B'

    def leaves(self):
        """Complete-transcript nodes below (or equal to) this node."""
        if self.is_leaf:
            return [self]
        return [leaf for child in self.children for leaf in child.leaves()]

    def walk(self):
        """Nodes of the subtree in depth-first canonical order."""
        yield self
        for child in self.children:
            yield from child.walk()


def history_tree(protocol, prior_a, prior_b,
                 budget=DEFAULT_TRANSCRIPT_BUDGET):
    """Enumerate all positive-probability histories of a conversation.

    Args:
        protocol (ConversationProtocol): Conversation.
        prior_a (Belief): Prior over Alice's types.
        prior_b (Belief): Prior over Bob's types.
        budget (int): Maximum number of complete transcripts.

    Returns:
        HistoryNode: Root node; children are ordered by signal order.

    Raises:
        `parley.errors.BudgetExceededError` if more than `budget` complete
        transcripts have positive probability.
    """
    if (prior_a.labels != protocol.types_a or
            prior_b.labels != protocol.types_b):
        raise ProtocolError('Prior labels do not match protocol type spaces.')
    root_matrix = product_posterior(prior_a, prior_b).matrix.copy()
    root = HistoryNode((), root_matrix, ONE, prior_a, prior_b)
    n_leaves = 0
    stack = [root]
    while stack:
        node = stack.pop()
        position = len(node.history)
        if position == protocol.n_moves:
            n_leaves += 1
            continue
        for signal in protocol.signals_at(position):
            matrix = _apply_move(node.matrix, protocol, node.history, signal)
            prob = sum(matrix.reshape(-1), ZERO)
            if prob == 0:
                continue
            belief_a, belief_b = _beliefs_from_matrix(
                protocol.types_a, protocol.types_b, matrix)
            node.children.append(HistoryNode(
                node.history + (signal,), matrix, prob, belief_a, belief_b,
                prob / node.prob, node))
        stack.extend(reversed(node.children))
        # Each pending node leads to at least one transcript.
        if n_leaves + len(stack) > budget:
            raise BudgetExceededError(
                f'More than {budget} transcripts have positive '
                f'probability.')
    if n_leaves > budget:
        raise BudgetExceededError(
            f'More than {budget} transcripts have positive probability.')
    logger.debug(f'Enumerated {n_leaves} transcripts.')
    return root


@dataclass(frozen=True)
class Transcript:
    """Complete transcript with its probability and reach matrix."""

    history: tuple
    prob: object
    reach: ObserverPosterior


def simulate(protocol, prior_a, prior_b, budget=DEFAULT_TRANSCRIPT_BUDGET):
    """Exhaustively enumerate positive-probability complete transcripts.

    Returns:
        List[Transcript]: Transcripts in canonical (signal order) sequence;
        probabilities sum to one.
    """
    root = history_tree(protocol, prior_a, prior_b, budget)
    return [
        Transcript(leaf.history, leaf.prob, ObserverPosterior(
            protocol.types_a, protocol.types_b, leaf.matrix,
            normalized=False))
        for leaf in root.leaves()]


def induced_joint_posterior(protocol, prior_a, prior_b,
                            budget=DEFAULT_TRANSCRIPT_BUDGET):
    """Joint distribution of types and final public beliefs.

    Returns:
        JointPosteriorDistribution: Atoms grouped by `(θ_A, θ_B, q_B, q_A)`
        across transcripts.
    """
    root = history_tree(protocol, prior_a, prior_b, budget)
    atoms = []
    for leaf in root.leaves():
        for i, x in enumerate(protocol.types_a):
            for j, y in enumerate(protocol.types_b):
                if leaf.matrix[i, j] > 0:
                    atoms.append(Atom(
                        x, y, leaf.belief_b, leaf.belief_a, leaf.matrix[i, j]))
    return JointPosteriorDistribution(
        protocol.types_a, protocol.types_b, atoms)


def transcript_kernel(protocol, prior_a, prior_b,
                      budget=DEFAULT_TRANSCRIPT_BUDGET):
    """Distribution of complete transcripts conditional on each type pair.

    Type pairs with zero prior probability are assigned the first
    transcript with certainty.

    Returns:
        Tuple[List[Tuple[str]], Dict[Tuple[str, str], Dict]]: Transcripts in
        canonical order and the kernel `{(x, y): {transcript: prob}}`.
    """
    leaves = history_tree(protocol, prior_a, prior_b, budget).leaves()
    transcripts = [leaf.history for leaf in leaves]
    kernel = {}
    for i, x in enumerate(protocol.types_a):
        for j, y in enumerate(protocol.types_b):
            mass = prior_a.weights[i] * prior_b.weights[j]
            if mass == 0:
                kernel[x, y] = {transcripts[0]: ONE}
            else:
                kernel[x, y] = OrderedDict(
                    (leaf.history, leaf.matrix[i, j] / mass)
                    for leaf in leaves if leaf.matrix[i, j] > 0)
    return transcripts, kernel


@dataclass
class TraceNode:
    """Beliefs and final-belief forecast at one history."""

    history: tuple
    prob: object
    belief_a: Belief
    belief_b: Belief
    gamma: OrderedDict
    parent: int = None
    edge_prob: object = ONE
    mover: str = None


@dataclass
class DimartingaleTrace:
    """Belief process of a conversation and the result of auditing it.

    `nodes` are in depth-first order with `parent` indices; `failures` is
    empty exactly when every check passed.
    """

    nodes: List[TraceNode]
    failures: List[str]

    @property
    def passed(self):
        return not self.failures


def _forecast(node):
    gamma = OrderedDict()
    for leaf in node.leaves():
        point = (leaf.belief_b, leaf.belief_a)
        gamma[point] = gamma.get(point, ZERO) + leaf.prob / node.prob
    return gamma


def dimartingale_audit(protocol, prior_a, prior_b,
                       budget=DEFAULT_TRANSCRIPT_BUDGET):
    """Check the belief process of a conversation is a dimartingale.

    For every move this verifies that probability is conserved (children
    reach matrices sum to the parent's), that the normalized reach matrix
    factorizes as `q_A ⊗ q_B`, that only the mover's belief changes, and
    that `q_A`, `q_B` and the forecast `γ` of final beliefs are each
    preserved in expectation across the move. Leaves must forecast their
    own belief point with certainty.

    Returns:
        DimartingaleTrace: Per-node values and any failures.
    """
    root = history_tree(protocol, prior_a, prior_b, budget)
    nodes, failures, index = [], [], {}
    gammas = {}
    for node in root.walk():
        gammas[node.history] = _forecast(node)
    for node in root.walk():
        label = history_label(node.history) or '<root>'
        parent = None if node.parent is None else index[node.parent.history]
        index[node.history] = len(nodes)
        nodes.append(TraceNode(
            node.history, node.prob, node.belief_a, node.belief_b,
            gammas[node.history], parent, node.edge_prob,
            None if node.parent is None else node.parent.mover))
        normalized = node.matrix / node.prob
        if not (np.outer(node.belief_a.array, node.belief_b.array) ==
                normalized).all():
            failures.append(f'{label}: reach matrix is not a product.')
        if node.is_leaf:
            point = (node.belief_b, node.belief_a)
            if gammas[node.history] != {point: ONE}:
                failures.append(f'{label}: leaf forecast is not a point.')
            continue
        total = zeros(node.matrix.shape)
        mean_a = zeros(len(node.belief_a))
        mean_b = zeros(len(node.belief_b))
        mean_gamma = OrderedDict()
        for child in node.children:
            total = total + child.matrix
            mean_a = mean_a + child.edge_prob * child.belief_a.array
            mean_b = mean_b + child.edge_prob * child.belief_b.array
            for point, p in gammas[child.history].items():
                mean_gamma[point] = mean_gamma.get(point, ZERO) + \
                    child.edge_prob * p
            fixed_ok = (child.belief_b == node.belief_b if node.mover == 'A'
                        else child.belief_a == node.belief_a)
            if not fixed_ok:
                failures.append(
                    f'{label}: non-mover belief changed by '
                    f'{child.history[-1]!r}.')
        if not (total == node.matrix).all():
            failures.append(f'{label}: probability not conserved.')
        if not (mean_a == node.belief_a.array).all():
            failures.append(f'{label}: q_A is not preserved in expectation.')
        if not (mean_b == node.belief_b.array).all():
            failures.append(f'{label}: q_B is not preserved in expectation.')
        if {k: v for k, v in mean_gamma.items() if v} != dict(
                gammas[node.history]):
            failures.append(
                f'{label}: forecast is not preserved in expectation.')
    return DimartingaleTrace(nodes, failures)


@dataclass
class BeliefNode:
    """Node of a belief-splitting tree to be realized as a conversation.

    Internal nodes split the belief of `mover` (`'A'` splits `belief_a`,
    `'B'` splits `belief_b`) into `children`, given as `(weight, node)`
    pairs whose weights sum to one and whose beliefs average to this
    node's. Leaves have no children.
    """

    belief_b: Belief
    belief_a: Belief
    mover: str = None
    children: list = field(default_factory=list)
    labels: list = None


def _split_rows(node, types):
    """Kernel rows realizing `node`'s split for every sender type."""
    parent = node.belief_a if node.mover == 'A' else node.belief_b
    labels = node.labels or [
        f'{node.mover.lower()}{k + 1}' for k in range(len(node.children))]
    rows = OrderedDict()
    for type_label in types:
        mass = parent[type_label]
        if mass == 0:
            rows[type_label] = OrderedDict([(labels[0], ONE)])
            continue
        row = OrderedDict()
        for label, (weight, child) in zip(labels, node.children):
            child_belief = (child.belief_a if node.mover == 'A'
                            else child.belief_b)
            prob = as_rational(weight) * child_belief[type_label] / mass
            if prob:
                row[label] = row.get(label, ZERO) + prob
        rows[type_label] = row
    return labels, rows


def protocol_from_belief_tree(root, types_a, types_b, n_rounds):
    """Realize a belief-splitting tree as a conversation.

    The tree is laid out on the fixed move schedule Alice, Bob, Alice, ...:
    a node whose `mover` matches the move at its position splits, every
    other position is filled with a `'pass'` signal sent with certainty.
    An Alice split with weights `w_k` into beliefs `q_A^k` uses the kernel
    `f(k | x) = w_k q_A^k(x) / q_A(x)`, and analogously for Bob.

    Args:
        root (BeliefNode): Root of the tree, at the prior beliefs.
        types_a (Sequence[str]): Alice's type labels.
        types_b (Sequence[str]): Bob's type labels.
        n_rounds (int): Number of rounds of the resulting protocol.

    Returns:
        ConversationProtocol: Protocol whose public beliefs follow the tree.

    Raises:
        `parley.errors.ProtocolError` if the tree needs more moves than
        `n_rounds` provides.
    """
    n_moves = 2 * n_rounds
    signals = [[] for _ in range(n_moves)]
    kernels = [OrderedDict() for _ in range(n_moves)]

    def add_signal(position, label):
        if label not in signals[position]:
            signals[position].append(label)

    stack = [(root, 0, ())]
    while stack:
        node, position, history = stack.pop()
        if position == n_moves:
            if node.children:
                raise ProtocolError(
                    f'Belief tree does not fit in {n_rounds} rounds.')
            continue
        mover = 'A' if position % 2 == 0 else 'B'
        types = types_a if mover == 'A' else types_b
        if node.children and node.mover == mover:
            if any(as_rational(w) <= 0 for w, _ in node.children):
                raise ProtocolError('Split weights must be positive.')
            labels, rows = _split_rows(node, types)
            for label in labels:
                add_signal(position, label)
            kernels[position][history] = rows
            successors = [
                (child, position + 1, history + (label,))
                for label, (weight, child) in zip(labels, node.children)]
            stack.extend(reversed(successors))
        else:
            add_signal(position, PASS_SIGNAL)
            kernels[position][history] = OrderedDict(
                (t, OrderedDict([(PASS_SIGNAL, ONE)])) for t in types)
            stack.append((node, position + 1, history + (PASS_SIGNAL,)))
    rounds = [Round(tuple(signals[2 * t]), tuple(signals[2 * t + 1]))
              for t in range(n_rounds)]
    return ConversationProtocol(
        types_a, types_b, rounds, kernels[0::2], kernels[1::2])


def uninformative_conversation(types_a, types_b):
    """Zero-round conversation."""
    return ConversationProtocol(types_a, types_b, (), (), ())


def alice_reveals_conversation(types_a, types_b):
    """One round in which Alice announces her type and Bob stays silent."""
    return ConversationProtocol(
        types_a, types_b, [Round(tuple(types_a), (PASS_SIGNAL,))],
        [{(): {x: {x: ONE} for x in types_a}}],
        [{(x,): {y: {PASS_SIGNAL: ONE} for y in types_b} for x in types_a}])


def bob_reveals_conversation(types_a, types_b):
    """One round in which Alice stays silent and Bob announces his type."""
    return ConversationProtocol(
        types_a, types_b, [Round((PASS_SIGNAL,), tuple(types_b))],
        [{(): {x: {PASS_SIGNAL: ONE} for x in types_a}}],
        [{(PASS_SIGNAL,): {y: {y: ONE} for y in types_b}}])
