"""Feasibility of joint posterior distributions.

A joint posterior distribution can be induced by a mediator exactly when
some family of observer posteriors reproduces it and averages to the prior
product. It can be induced by a `T`-round conversation exactly when every
belief point's type distribution is the product of its two beliefs and the
root `(prior_b, prior_a, P(q_B, q_A))` is reachable from the base points by
at most `2T` alternating rounds of convex combinations, first along `q_A`
with `q_B` held fixed and then along `q_B` with `q_A` held fixed. The
latter is certified by a `SplitWitness` tree.
"""

import itertools
import logging
from collections import OrderedDict
from dataclasses import dataclass, field
from enum import Enum
from typing import List
import numpy as np
from parley.beliefs import (
    Belief, ObserverPosterior, joint_from_observer, product_posterior)
from parley.conversations import BeliefNode, protocol_from_belief_tree
from parley.errors import WitnessError, DistributionError
from parley.solvers import LinearProgram, solve_linear_program
from parley.utils import as_rational, zeros, ZERO, ONE

logger = logging.getLogger(__name__)

DEFAULT_WITNESS_BUDGET = 20_000
"""Maximum number of flow variables (and tree nodes) in `search_witness`."""

DEFAULT_PROFILE_LIMIT = 4096
"""Maximum number of signal profiles in `check_mediator_feasibility`."""


class FeasibilityStatus(str, Enum):
    """Three-valued outcome of a feasibility check."""

    FEASIBLE = 'feasible'
    INFEASIBLE = 'infeasible'
    UNKNOWN = 'unknown'


@dataclass
class SplitNode:
    """Node `(q_B, q_A, z)` of a split witness.

    `kind` is `'A'` when the children share `belief_b` and combine along
    `belief_a`, `'B'` when they share `belief_a`, and `None` at leaves.
    `z` is a distribution over the witness support points.
    """

    belief_b: Belief
    belief_a: Belief
    z: tuple
    kind: str = None
    children: list = field(default_factory=list)

    @property
    def point(self):
        return (self.belief_b, self.belief_a)

    def walk(self):
        yield self
        for _, child in self.children:
            yield from child.walk()


@dataclass
class SplitWitness:
    """Alternating convex decomposition tree certifying conversation
    feasibility of a joint posterior distribution."""

    support: tuple
    root: SplitNode

    def n_nodes(self):
        return sum(1 for _ in self.root.walk())

    def schedule_length(self):
        """Moves needed to realize the deepest path on the A, B schedule."""
        return _schedule_length(self.root, 0)


def _schedule_length(node, position):
    if not node.children:
        return position
    while _mover(position) != node.kind:
        position += 1
    return max(_schedule_length(child, position + 1)
               for _, child in node.children)


def _mover(position):
    return 'A' if position % 2 == 0 else 'B'


@dataclass
class FeasibilityVerdict:
    """Outcome of a feasibility decision.

    Feasible verdicts of the conversation search carry a `witness`; those of
    the mediator check carry the reconstructed observer posterior `family`.
    Infeasible verdicts name the violated `condition` and carry a
    `certificate` that can be re-evaluated on the input.
    """

    status: FeasibilityStatus
    witness: SplitWitness = None
    family: list = None
    condition: str = None
    certificate: object = None
    detail: str = ''

    @property
    def is_feasible(self):
        return self.status is FeasibilityStatus.FEASIBLE


def _infeasible(condition, certificate, detail):
    return FeasibilityVerdict(
        FeasibilityStatus.INFEASIBLE, condition=condition,
        certificate=certificate, detail=detail)


def _unknown(detail):
    return FeasibilityVerdict(FeasibilityStatus.UNKNOWN, detail=detail)


def product_condition_violations(dist):
    """Belief points whose type distribution is not `q_A ⊗ q_B`."""
    violations = []
    for point in dist.point_distribution():
        belief_b, belief_a = point
        conditional = dist.conditional_types(point)
        if not (np.outer(belief_a.array, belief_b.array) ==
                conditional.matrix).all():
            violations.append(point)
    return violations


def check_product_condition(dist):
    """Whether every belief point's type distribution is `q_A ⊗ q_B`.

    Args:
        dist (JointPosteriorDistribution): Distribution to check.

    Returns:
        bool: `True` iff `P(θ_A, θ_B | q_B, q_A) = q_A(θ_A) q_B(θ_B)` for
        every point in the support.
    """
    return not product_condition_violations(dist)


def _observed_beliefs(dist):
    by_a = OrderedDict((x, []) for x in dist.labels_a)
    by_b = OrderedDict((y, []) for y in dist.labels_b)
    for atom in dist:
        if atom.belief_b not in by_a[atom.type_a]:
            by_a[atom.type_a].append(atom.belief_b)
        if atom.belief_a not in by_b[atom.type_b]:
            by_b[atom.type_b].append(atom.belief_a)
    return by_a, by_b


def _grouped_family(dist):
    """Observer posteriors of the belief point groups, if self-consistent."""
    family = []
    for point, prob in dist.point_distribution().items():
        q = dist.conditional_types(point)
        for i, x in enumerate(q.labels_a):
            for j, y in enumerate(q.labels_b):
                if q.matrix[i, j] == 0:
                    continue
                row = q.matrix[i, :] / sum(q.matrix[i, :], ZERO)
                column = q.matrix[:, j] / sum(q.matrix[:, j], ZERO)
                if (tuple(row) != point[0].weights or
                        tuple(column) != point[1].weights):
                    return None
        family.append((prob, q))
    return family


def _consistent_profile(profile_a, profile_b, labels_a, labels_b):
    if all(b is None for b in profile_a) or all(a is None for a in profile_b):
        return False
    for i in range(len(labels_a)):
        for j in range(len(labels_b)):
            left = profile_a[i] is not None and profile_a[i].weights[j] > 0
            right = profile_b[j] is not None and profile_b[j].weights[i] > 0
            if left != right:
                return False
    return True


def check_mediator_feasibility(dist, prior_a, prior_b,
                               profile_limit=DEFAULT_PROFILE_LIMIT):
    """Decide whether a mediator protocol induces a joint distribution.

    First the type marginal is compared with the prior product. If every
    belief point's conditional type distribution is consistent with its own
    beliefs these conditionals already form the required observer family.
    Otherwise an exact LP searches over signal profiles: a profile assigns
    each Alice type one of her observed beliefs (or absence) and each Bob
    type one of his, and carries masses `a_x σ_x(y) = b_y τ_y(x)` which
    must add up to the atom probabilities. Every mediator merges into such
    profiles, so LP infeasibility proves the distribution infeasible.

    Args:
        dist (JointPosteriorDistribution): Target distribution.
        prior_a (Belief): Prior over Alice's types.
        prior_b (Belief): Prior over Bob's types.
        profile_limit (int): Maximum number of profiles to enumerate before
            giving up with an unknown verdict.

    Returns:
        FeasibilityVerdict: Feasible verdicts carry the observer posterior
        `family`; infeasible verdicts name the `'mean-condition'` (with the
        type marginal as certificate) or `'mediator-consistency'`.
    """
    prior = product_posterior(prior_a, prior_b)
    marginal = dist.type_marginal()
    if marginal != prior:
        return _infeasible(
            'mean-condition', marginal,
            f'Type marginal {marginal!r} does not equal the prior product '
            f'{prior!r}.')
    family = _grouped_family(dist)
    if family is not None:
        return FeasibilityVerdict(FeasibilityStatus.FEASIBLE, family=family)
    by_a, by_b = _observed_beliefs(dist)
    options_a = [[None] + beliefs for beliefs in by_a.values()]
    options_b = [[None] + beliefs for beliefs in by_b.values()]
    n_raw = np.prod([len(o) for o in options_a + options_b], dtype=object)
    if n_raw > profile_limit:
        return _unknown(
            f'{n_raw} signal profiles exceed the limit of {profile_limit}.')
    labels_a, labels_b = dist.labels_a, dist.labels_b
    profiles = [
        (pa, pb) for pa in itertools.product(*options_a)
        for pb in itertools.product(*options_b)
        if _consistent_profile(pa, pb, labels_a, labels_b)]
    n_a, n_b = len(labels_a), len(labels_b)
    n_var = len(profiles) * (n_a + n_b)

    def var_a(p, i):
        return p * (n_a + n_b) + i

    def var_b(p, j):
        return p * (n_a + n_b) + n_a + j

    program = LinearProgram(n_var)
    atom_rows = OrderedDict()
    for atom in dist:
        key = (atom.type_a, atom.type_b, atom.belief_b, atom.belief_a)
        atom_rows[key] = ({}, atom.prob)
    for p, (pa, pb) in enumerate(profiles):
        for i, x in enumerate(labels_a):
            if pa[i] is None:
                program.add_constraint({var_a(p, i): ONE}, '==', ZERO)
        for j, y in enumerate(labels_b):
            if pb[j] is None:
                program.add_constraint({var_b(p, j): ONE}, '==', ZERO)
        for i, x in enumerate(labels_a):
            for j, y in enumerate(labels_b):
                if pa[i] is None or pb[j] is None:
                    continue
                sigma, tau = pa[i].weights[j], pb[j].weights[i]
                if sigma == 0:
                    continue
                program.add_constraint(
                    {var_a(p, i): sigma, var_b(p, j): -tau}, '==', ZERO)
                key = (x, y, pa[i], pb[j])
                if key in atom_rows:
                    atom_rows[key][0][var_a(p, i)] = sigma
                else:
                    program.add_constraint({var_a(p, i): ONE}, '==', ZERO)
    for coefficients, prob in atom_rows.values():
        program.add_constraint(coefficients, '==', prob)
    logger.debug(
        f'Mediator feasibility program with {len(profiles)} profiles and '
        f'{len(program.constraints)} rows.')
    solution = solve_linear_program(program)
    if not solution.is_optimal:
        return _infeasible(
            'mediator-consistency', None,
            'No family of observer posteriors reproduces the atoms.')
    family = []
    for p, (pa, pb) in enumerate(profiles):
        matrix = zeros((n_a, n_b))
        for i in range(n_a):
            if pa[i] is not None:
                a = solution.point[var_a(p, i)]
                for j in range(n_b):
                    matrix[i, j] = a * pa[i].weights[j]
        mass = sum(matrix.reshape(-1), ZERO)
        if mass > 0:
            family.append((mass, ObserverPosterior(
                labels_a, labels_b, matrix / mass)))
    if joint_from_observer(family, prior_a, prior_b) != dist:
        return _unknown('Reconstructed observer family failed verification.')
    return FeasibilityVerdict(FeasibilityStatus.FEASIBLE, family=family)


def _support_index(dist, witness):
    points = list(dist.point_distribution())
    if set(points) != set(witness.support) or len(points) != len(
            witness.support):
        return None
    return [witness.support.index(point) for point in points]


def verify_witness(dist, witness, n_rounds, prior_a, prior_b):
    """Check that a split witness certifies a distribution.

    Args:
        dist (JointPosteriorDistribution): Target distribution.
        witness (SplitWitness): Candidate certificate.
        n_rounds (int): Number of conversation rounds `T`.
        prior_a (Belief): Prior over Alice's types.
        prior_b (Belief): Prior over Bob's types.

    Returns:
        bool: `True` iff the root is `(prior_b, prior_a, P(q_B, q_A))`,
        every internal node is the exact convex combination of its children
        along its designated coordinate, every leaf is a base point, and
        every path fits in `2 n_rounds` alternating moves.

    Raises:
        `parley.errors.WitnessError` if the tree is structurally malformed.
    """
    n_support = len(witness.support)
    for node in witness.root.walk():
        if len(node.z) != n_support:
            raise WitnessError(
                f'Node z has {len(node.z)} entries for {n_support} support '
                f'points.')
        if node.children and node.kind not in ('A', 'B'):
            raise WitnessError(f'Unknown split kind {node.kind!r}.')
    order = _support_index(dist, witness)
    if order is None:
        return False
    root = witness.root
    if root.belief_b != prior_b or root.belief_a != prior_a:
        return False
    target = list(dist.point_distribution().values())
    if [root.z[k] for k in order] != target:
        return False
    if witness.schedule_length() > 2 * n_rounds:
        return False
    for node in root.walk():
        if not _node_is_valid(node, witness.support):
            return False
    return True


def _node_is_valid(node, support):
    if any(z < 0 for z in node.z) or sum(node.z, ZERO) != ONE:
        return False
    if not node.children:
        if node.point not in support:
            return False
        unit = tuple(ONE if p == node.point else ZERO for p in support)
        return tuple(node.z) == unit
    weights = [as_rational(w) for w, _ in node.children]
    if any(w <= 0 for w in weights) or sum(weights, ZERO) != ONE:
        return False
    mean_a = zeros(len(node.belief_a))
    mean_b = zeros(len(node.belief_b))
    mean_z = zeros(len(node.z))
    for w, (_, child) in zip(weights, node.children):
        if node.kind == 'A' and child.belief_b != node.belief_b:
            return False
        if node.kind == 'B' and child.belief_a != node.belief_a:
            return False
        mean_a = mean_a + w * child.belief_a.array
        mean_b = mean_b + w * child.belief_b.array
        mean_z = mean_z + w * np.array(child.z, dtype=object)
    return ((mean_a == node.belief_a.array).all() and
            (mean_b == node.belief_b.array).all() and
            (mean_z == np.array(node.z, dtype=object)).all())


def grid_beliefs(labels, grid):
    """Binary beliefs `(c, 1 - c)` for each `c` in `grid` (empty otherwise)."""
    if len(labels) != 2 or not grid:
        return []
    beliefs = []
    for value in grid:
        value = as_rational(value)
        if not ZERO <= value <= ONE:
            raise DistributionError(f'Grid value {value} outside [0, 1].')
        beliefs.append(Belief(labels, (value, ONE - value)))
    return beliefs


def _unique(items):
    seen = []
    for item in items:
        if item not in seen:
            seen.append(item)
    return seen


def candidate_beliefs(dist, prior_a, prior_b, grid=None):
    """Coordinates available to intermediate split points.

    Returns:
        Tuple[List[Belief], List[Belief]]: Candidate `q_B` and `q_A`
        beliefs: those in the target's support, the priors and, for binary
        type spaces, the beliefs `(c, 1 - c)` for `c` in `grid`.
    """
    points = list(dist.point_distribution())
    beliefs_b = _unique(
        [prior_b] + [p[0] for p in points] +
        grid_beliefs(prior_b.labels, grid))
    beliefs_a = _unique(
        [prior_a] + [p[1] for p in points] +
        grid_beliefs(prior_a.labels, grid))
    return beliefs_b, beliefs_a


def _successors(state, position, beliefs_b, beliefs_a):
    belief_b, belief_a = state
    if _mover(position) == 'A':
        return [(belief_b, a) for a in beliefs_a
                if a.is_absolutely_continuous(belief_a)]
    return [(b, belief_a) for b in beliefs_b
            if b.is_absolutely_continuous(belief_b)]


def search_witness(dist, n_rounds, prior_a, prior_b,
                   budget=DEFAULT_WITNESS_BUDGET, grid=None):
    """Search for a split witness of conversation feasibility.

    Intermediate points are restricted to a finite grid of candidate
    beliefs (see `candidate_beliefs`). The search is a single exact LP over
    a layered graph: layer `ℓ` holds the candidate points reachable after
    `ℓ` moves of the schedule Alice, Bob, Alice, ..., each edge carries
    probability mass, every point's outflow must preserve its mass and its
    mover's belief in expectation, and the final layer must carry exactly
    the target marginal over belief points. A feasible flow unfolds into a
    witness tree.

    Args:
        dist (JointPosteriorDistribution): Target distribution.
        n_rounds (int): Number of rounds `T`.
        prior_a (Belief): Prior over Alice's types.
        prior_b (Belief): Prior over Bob's types.
        budget (int): Maximum number of flow variables and witness nodes.
        grid (Sequence[Rational]): Extra candidate coordinates for binary
            type spaces.

    Returns:
        FeasibilityVerdict: Feasible with a verified witness, Infeasible
        when a necessary condition fails, or Unknown when the grid or
        budget is exhausted.
    """
    violations = product_condition_violations(dist)
    if violations:
        return _infeasible(
            'product-condition', violations,
            f'{len(violations)} belief points have correlated types.')
    mediator_verdict = check_mediator_feasibility(dist, prior_a, prior_b)
    if not mediator_verdict.is_feasible:
        return mediator_verdict
    targets = dist.point_distribution()
    support = tuple(targets)
    beliefs_b, beliefs_a = candidate_beliefs(dist, prior_a, prior_b, grid)
    n_moves = 2 * n_rounds
    layers = [[(prior_b, prior_a)]]
    for position in range(n_moves):
        reachable = []
        for state in layers[-1]:
            for succ in _successors(state, position, beliefs_b, beliefs_a):
                if succ not in reachable:
                    reachable.append(succ)
        layers.append(reachable)
    layers[-1] = [s for s in layers[-1] if s in targets]
    for position in reversed(range(n_moves)):
        following = set(layers[position + 1])
        layers[position] = [
            s for s in layers[position]
            if following.intersection(
                _successors(s, position, beliefs_b, beliefs_a))]
    if not layers[0] or set(layers[-1]) != set(support):
        return _unknown(
            'Target points are not reachable through the candidate grid.')
    if n_moves == 0:
        return _feasible_witness(
            dist, SplitNode(prior_b, prior_a, (ONE,)), support, n_rounds,
            prior_a, prior_b)
    edges = []
    for position in range(n_moves):
        following = set(layers[position + 1])
        for state in layers[position]:
            for succ in _successors(state, position, beliefs_b, beliefs_a):
                if succ in following:
                    edges.append((position, state, succ))
    if len(edges) > budget:
        return _unknown(
            f'{len(edges)} flow variables exceed the budget of {budget}.')
    logger.debug(
        f'Witness search over {sum(map(len, layers))} points and '
        f'{len(edges)} edges.')
    program = LinearProgram(len(edges), [
        ONE if state == succ else ZERO for _, state, succ in edges])
    out_edges, in_edges = {}, {}
    for e, (position, state, succ) in enumerate(edges):
        out_edges.setdefault((position, state), []).append(e)
        in_edges.setdefault((position + 1, succ), []).append(e)
    for position in range(n_moves):
        for state in layers[position]:
            outs = out_edges.get((position, state), [])
            ins = in_edges.get((position, state), [])
            moving = 1 if _mover(position) == 'A' else 0
            coefficients = {e: ONE for e in outs}
            for e in ins:
                coefficients[e] = coefficients.get(e, ZERO) - ONE
            rhs = ONE if position == 0 else ZERO
            program.add_constraint(coefficients, '==', rhs)
            parent_belief = state[moving]
            for k in range(len(parent_belief)):
                coefficients = {}
                for e in outs:
                    child = edges[e][2][moving]
                    coefficients[e] = child.weights[k]
                for e in ins:
                    coefficients[e] = coefficients.get(e, ZERO) - \
                        parent_belief.weights[k]
                program.add_constraint(
                    coefficients, '==',
                    parent_belief.weights[k] if position == 0 else ZERO)
    for point in support:
        program.add_constraint(
            {e: ONE for e in in_edges.get((n_moves, point), [])}, '==',
            targets[point])
    solution = solve_linear_program(program)
    if not solution.is_optimal:
        return _unknown('No witness within the candidate grid.')
    flows = solution.point
    root = _unfold_flow(edges, flows, support, n_moves, budget)
    if root is None:
        return _unknown(f'Witness tree exceeds the budget of {budget}.')
    return _feasible_witness(dist, root, support, n_rounds, prior_a, prior_b)


def _feasible_witness(dist, root, support, n_rounds, prior_a, prior_b):
    witness = SplitWitness(support, root)
    if not verify_witness(dist, witness, n_rounds, prior_a, prior_b):
        return _unknown('Extracted witness failed verification.')
    return FeasibilityVerdict(FeasibilityStatus.FEASIBLE, witness=witness)


def _unfold_flow(edges, flows, support, n_moves, budget):
    """Unfold a layered flow into a witness tree, collapsing pass moves."""
    outgoing = {}
    for (position, state, succ), flow in zip(edges, flows):
        if flow > 0:
            outgoing.setdefault((position, state), []).append((succ, flow))
    forecasts = {}

    def forecast(position, state):
        key = (position, state)
        if key not in forecasts:
            if position == n_moves:
                forecasts[key] = tuple(
                    ONE if p == state else ZERO for p in support)
            else:
                outs = outgoing[key]
                mass = sum((f for _, f in outs), ZERO)
                z = zeros(len(support))
                for succ, flow in outs:
                    z = z + (flow / mass) * np.array(
                        forecast(position + 1, succ), dtype=object)
                forecasts[key] = tuple(z)
        return forecasts[key]

    count = [0]

    def unfold(position, state):
        count[0] += 1
        if count[0] > budget:
            raise _BudgetSignal()
        while position < n_moves:
            outs = outgoing[position, state]
            if len(outs) > 1:
                break
            position += 1
        if position == n_moves:
            return SplitNode(state[0], state[1], forecast(position, state))
        outs = outgoing[position, state]
        mass = sum((f for _, f in outs), ZERO)
        children = [(flow / mass, unfold(position + 1, succ))
                    for succ, flow in outs]
        return SplitNode(state[0], state[1], forecast(position, state),
                         _mover(position), children)

    root_state = edges[0][1]
    try:
        return unfold(0, root_state)
    except _BudgetSignal:
        return None


class _BudgetSignal(Exception):
    pass


def witness_to_conversation(witness, types_a, types_b, n_rounds=None):
    """Realize a split witness as a Bayesian conversation.

    Each A-split node becomes an Alice move sending one signal per child
    with kernel `f(k | x) = w_k q_A^k(x) / q_A(x)`, each B-split a Bob move
    defined analogously, and positions of the schedule not used by a split
    are filled with a certain `'pass'` signal.

    Args:
        witness (SplitWitness): Verified witness.
        types_a (Sequence[str]): Alice's type labels.
        types_b (Sequence[str]): Bob's type labels.
        n_rounds (int): Optional number of rounds; defaults to the fewest
            that fit the witness schedule.

    Returns:
        ConversationProtocol: Protocol inducing the witnessed distribution.
    """
    if n_rounds is None:
        n_rounds = (witness.schedule_length() + 1) // 2

    def convert(node):
        return BeliefNode(
            node.belief_b, node.belief_a, node.kind,
            [(w, convert(child)) for w, child in node.children])

    return protocol_from_belief_tree(
        convert(witness.root), types_a, types_b, n_rounds)
