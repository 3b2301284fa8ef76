"""Optimal protocol design.

Expected utilities implementable by mediators (equivalently, by one-round
conversations in which Alice reveals her type) are characterized by direct
recommendation schemes `x(θ_A, r, θ_B)`: joint probabilities of the types
and the action recommended to Alice, subject to consistency with the prior
and to Alice being willing to follow the recommendation. Optimizing an
objective over such schemes is an exact linear program. Ties in Alice's
obedience constraints are resolved in the designer's favour.

Ex-post and non-committed individual rationality do not admit such a
reduction; `search_expost_conversation` instead optimizes over conversations
whose intermediate beliefs lie on a finite grid, which gives lower bounds on
what those notions allow.
"""

import logging
from collections import OrderedDict, namedtuple
from dataclasses import dataclass
import numpy as np
from parley.beliefs import Belief
from parley.conversations import (
    BeliefNode, ConversationProtocol, Round, protocol_from_belief_tree)
from parley.errors import DesignError
from parley.feasibility import grid_beliefs
from parley.games import best_response, no_comm_profile
from parley.mediators import MediatorProtocol
from parley.rationality import (
    IRNotion, audit, expected_objective, objective_array, outcome_contexts)
from parley.solvers import LinearProgram, Relation, solve_linear_program
from parley.utils import as_rational, l1_distance, zeros, ZERO, ONE

# Pool from multiprocess when installed, else from multiprocessing.
try:
    from multiprocess import Pool
    MULTIPROCESS_AVAILABLE = True
except ImportError:
    from multiprocessing import Pool
    MULTIPROCESS_AVAILABLE = False

logger = logging.getLogger(__name__)

DEFAULT_SEARCH_BUDGET = 5_000
"""Maximum number of belief tree nodes in `search_expost_conversation`."""

DESIGN_NOTIONS = (IRNotion.EX_ANTE, IRNotion.INTERIM)
SEARCH_NOTIONS = (IRNotion.EX_POST, IRNotion.NON_COMMITTED)


def welfare_objective(game):
    """Social welfare `u_A + u_B` as an objective array."""
    return game.utility_a + game.utility_b


def alice_objective(game):
    return game.utility_a


def bob_objective(game):
    return game.utility_b


def weighted_objective(game, weight):
    """Weighted objective `λ u_A + (1 - λ) u_B`."""
    weight = as_rational(weight)
    return weight * game.utility_a + (ONE - weight) * game.utility_b


OBJECTIVES = OrderedDict([
    ('welfare', welfare_objective),
    ('alice', alice_objective),
    ('bob', bob_objective),
])


def _design_notion(ir):
    if ir is None:
        return None
    ir = IRNotion(ir)
    if ir not in DESIGN_NOTIONS:
        raise ValueError(
            f'Design LP supports ex-ante and interim IR only, got '
            f'{ir.value}; use search_expost_conversation.')
    return ir


@dataclass
class DesignProblem:
    """Objective maximization over protocols satisfying an IR notion.

    `ir` is `None` (no participation constraint), ex-ante or interim; the
    objective defaults to welfare and may be given in any form accepted by
    `parley.rationality.objective_array`.
    """

    game: object
    ir: IRNotion = None
    objective: object = None

    def __post_init__(self):
        self.ir = _design_notion(self.ir)
        if self.objective is None:
            self.objective = welfare_objective(self.game)
        self.objective = objective_array(self.game, self.objective)


class RecommendationScheme(object):
    """Joint distribution of types and recommended actions.

    Probabilities are stored in an object array indexed
    `[type_a, action, type_b]`.
    """

    def __init__(self, types_a, types_b, actions, probabilities):
        """
        Args:
            types_a (Sequence[str]): Alice's type labels.
            types_b (Sequence[str]): Bob's type labels.
            actions (Sequence[str]): Alice's action labels.
            probabilities (Union[array, Dict[Tuple[str, str, str], Rational]]):
                Either a `[type_a, action, type_b]` array or a mapping from
                `(type_a, action, type_b)` triples, missing triples being 0.
        """
        self.types_a = tuple(types_a)
        self.types_b = tuple(types_b)
        self.actions = tuple(actions)
        shape = (len(self.types_a), len(self.actions), len(self.types_b))
        if isinstance(probabilities, np.ndarray):
            if probabilities.shape != shape:
                raise ValueError(
                    f'Scheme array has shape {probabilities.shape}, expected '
                    f'{shape}.')
            array = zeros(shape)
            for index, value in np.ndenumerate(probabilities):
                array[index] = as_rational(value)
        else:
            array = zeros(shape)
            for (x, r, y), value in probabilities.items():
                array[self.types_a.index(x), self.actions.index(r),
                      self.types_b.index(y)] = as_rational(value)
        if any(v < 0 for v in array.reshape(-1)):
            raise DesignError('Recommendation probabilities must be >= 0.')
        array.flags.writeable = False
        self.array = array

    def prob(self, type_a, action, type_b):
        """Probability `x(type_a, action, type_b)`."""
        return self.array[self.types_a.index(type_a),
                          self.actions.index(action),
                          self.types_b.index(type_b)]

    def recommendation_prob(self, type_a, action):
        """Probability that `type_a` is recommended `action`."""
        return sum(self.array[self.types_a.index(type_a),
                              self.actions.index(action)], ZERO)

    def posterior(self, type_a, action):
        """Alice's belief about Bob after being recommended `action`.

        Returns:
            Belief: Normalized `x(type_a, action, .)`, or `None` if the
            recommendation has probability zero.
        """
        row = self.array[self.types_a.index(type_a),
                         self.actions.index(action)]
        mass = sum(row, ZERO)
        if mass == 0:
            return None
        return Belief(self.types_b, [v / mass for v in row])

    def items(self):
        """Positive-probability `((type_a, action, type_b), prob)` pairs."""
        for (i, k, j), value in np.ndenumerate(self.array):
            if value > 0:
                yield (self.types_a[i], self.actions[k], self.types_b[j]), value

    def __eq__(self, other):
        if not isinstance(other, RecommendationScheme):
            return NotImplemented
        return (self.types_a == other.types_a and
                self.types_b == other.types_b and
                self.actions == other.actions and
                bool((self.array == other.array).all()))

    def __repr__(self):
        return f'RecommendationScheme({dict(self.items())})'


def uninformative_scheme(game):
    """Scheme recommending the no-communication action to every type."""
    profile = no_comm_profile(game)
    return RecommendationScheme(
        game.types_a, game.types_b, game.actions,
        {(x, profile[x], y): game.prior_a[x] * game.prior_b[y]
         for x in game.types_a for y in game.types_b})


def _check_compatible(scheme, game):
    if (scheme.types_a, scheme.types_b, scheme.actions) != (
            game.types_a, game.types_b, game.actions):
        raise ValueError('Scheme labels do not match the game.')


def check_scheme(scheme, game):
    """Check prior consistency and obedience of a scheme exactly.

    Raises:
        `parley.errors.DesignError` naming the first violated constraint.
    """
    _check_compatible(scheme, game)
    for i, x in enumerate(game.types_a):
        for j, y in enumerate(game.types_b):
            total = sum(scheme.array[i, :, j], ZERO)
            expected = game.prior_a[x] * game.prior_b[y]
            if total != expected:
                raise DesignError(
                    f'Scheme assigns {total} to types ({x}, {y}) with prior '
                    f'probability {expected}.')
        for k, r in enumerate(game.actions):
            row = scheme.array[i, k]
            for k_dev, r_dev in enumerate(game.actions):
                gain = sum(
                    (row[j] * (game.utility_a[i, j, k] -
                               game.utility_a[i, j, k_dev])
                     for j in range(len(game.types_b))), ZERO)
                if gain < 0:
                    raise DesignError(
                        f'Type {x} recommended {r!r} prefers {r_dev!r}.')


def scheme_outcomes(scheme):
    """Outcome distribution `{(type_a, type_b, action): prob}` when Alice
    follows every recommendation."""
    return OrderedDict(((x, y, r), p) for (x, r, y), p in scheme.items())


def scheme_value(scheme, game, objective):
    """Expected objective of a scheme under obedient play."""
    _check_compatible(scheme, game)
    array = objective_array(game, objective)
    return sum((p * array[i, j, k]
                for (i, k, j), p in np.ndenumerate(scheme.array)), ZERO)


def _variable(game, i, k, j):
    return (i * len(game.actions) + k) * len(game.types_b) + j


def _objective_coefficients(game, objective, rows=None):
    """Dense coefficients of `Σ x u` with `u` an objective, optionally
    restricted to Bob type indices `rows`."""
    objective = objective_array(game, objective)
    rows = range(len(game.types_b)) if rows is None else rows
    coefficients = [ZERO] * (
        len(game.types_a) * len(game.actions) * len(game.types_b))
    for i in range(len(game.types_a)):
        for k in range(len(game.actions)):
            for j in rows:
                coefficients[_variable(game, i, k, j)] = objective[i, j, k]
    return coefficients


def _design_program(game, objective, ir=None):
    """Direct recommendation LP for `game` with an optional IR row set."""
    n_a, n_b, n_r = (
        len(game.types_a), len(game.types_b), len(game.actions))
    program = LinearProgram(n_a * n_r * n_b)
    for i, x in enumerate(game.types_a):
        for j, y in enumerate(game.types_b):
            program.add_constraint(
                {_variable(game, i, k, j): ONE for k in range(n_r)},
                Relation.EQ, game.prior_a[x] * game.prior_b[y])
    for i in range(n_a):
        for k in range(n_r):
            for k_dev in range(n_r):
                if k_dev == k:
                    continue
                program.add_constraint(
                    {_variable(game, i, k, j): game.utility_a[i, j, k] -
                     game.utility_a[i, j, k_dev] for j in range(n_b)},
                    Relation.GE, ZERO)
    if ir is not None:
        baseline = [game.action_index(r)
                    for r in no_comm_profile(game).values()]
        groups = ([list(range(n_b))] if ir is IRNotion.EX_ANTE
                  else [[j] for j in range(n_b)])
        for rows in groups:
            rhs = sum((game.prior_a[x] * game.prior_b.weights[j] *
                       game.utility_b[i, j, baseline[i]]
                       for i, x in enumerate(game.types_a) for j in rows),
                      ZERO)
            program.add_constraint(
                _objective_coefficients(game, game.utility_b, rows),
                Relation.GE, rhs)
    program.objective = _objective_coefficients(game, objective)
    return program


def _scheme_from_point(game, point):
    array = zeros((len(game.types_a), len(game.actions), len(game.types_b)))
    for i in range(len(game.types_a)):
        for k in range(len(game.actions)):
            for j in range(len(game.types_b)):
                array[i, k, j] = point[_variable(game, i, k, j)]
    return RecommendationScheme(game.types_a, game.types_b, game.actions, array)


def _solve_lexicographic(game, objectives, ir):
    """Maximize `objectives` in turn, fixing each optimum before the next.

    Returns:
        Tuple[List[Fraction], RecommendationScheme]: Optimal value of each
        objective and the final optimal scheme.
    """
    program = _design_program(game, objectives[0], ir)
    values, solution = [], None
    for objective in objectives:
        if values:
            program.add_constraint(
                dict(enumerate(program.objective)), Relation.GE, values[-1])
            program.objective = _objective_coefficients(game, objective)
        solution = solve_linear_program(program)
        if not solution.is_optimal:
            raise DesignError(
                f'Design LP is {solution.status.value} although the '
                f'uninformative scheme is always feasible.')
        values.append(solution.value)
    return values, _scheme_from_point(game, solution.point)


def optimize(problem):
    """Maximize an objective over implementable outcomes.

    Solves the exact linear program over recommendation schemes with prior
    consistency, obedience and the problem's IR constraints: the ex-ante
    row compares Bob's expected utility with his no-communication value, the
    interim rows do so separately for each of Bob's types.

    Args:
        problem (DesignProblem): Game, IR notion and objective.

    Returns:
        Tuple[Fraction, RecommendationScheme]: Optimal value and a scheme
        attaining it.

    Raises:
        `parley.errors.DesignError` if the program is not solved to
        optimality, which would contradict feasibility of the uninformative
        scheme.
    """
    values, scheme = _solve_lexicographic(
        problem.game, [problem.objective], problem.ir)
    logger.debug(
        'Design optimum %s with IR %s.', values[0],
        None if problem.ir is None else problem.ir.value)
    return values[0], scheme


def scheme_to_mediator(scheme, game):
    """Mediator recommending actions: `π(r | x, y) = x(x, r, y) / P(x) P(y)`.

    Rows of zero-probability type pairs recommend the first action.

    Raises:
        `parley.errors.DesignError` if a zero-probability type pair has
        positive recommendation probability.
    """
    _check_compatible(scheme, game)
    kernel = {}
    for i, x in enumerate(game.types_a):
        for j, y in enumerate(game.types_b):
            mass = game.prior_a[x] * game.prior_b[y]
            kernel[x, y] = _recommendation_row(
                scheme.array[i, :, j], mass, game.actions, (x, y))
    return MediatorProtocol(game.types_a, game.types_b, game.actions, kernel)


def _recommendation_row(values, mass, actions, types):
    if mass == 0:
        if any(v > 0 for v in values):
            raise DesignError(
                f'Positive recommendation probability for zero-probability '
                f'types {types}.')
        return OrderedDict([(actions[0], ONE)])
    return OrderedDict((r, v / mass) for r, v in zip(actions, values))


def scheme_to_one_round_conversation(scheme, game):
    """One-round conversation realizing a scheme.

    Alice reveals her type, then Bob of type `y` sends the action label `r`
    with probability `x(θ_A, r, y) / (P(θ_A) P(y))`, after which Alice's
    belief about Bob is the scheme's posterior for that recommendation.

    Returns:
        ConversationProtocol: Protocol with Alice signals equal to her type
        labels and Bob signals equal to the actions.
    """
    _check_compatible(scheme, game)
    bob_kernels = OrderedDict()
    for i, x in enumerate(game.types_a):
        rows = OrderedDict()
        for j, y in enumerate(game.types_b):
            rows[y] = _recommendation_row(
                scheme.array[i, :, j], game.prior_a[x] * game.prior_b[y],
                game.actions, (x, y))
        bob_kernels[(x,)] = rows
    return ConversationProtocol(
        game.types_a, game.types_b, [Round(game.types_a, game.actions)],
        [{(): {x: {x: ONE} for x in game.types_a}}], [bob_kernels])


def mediator_to_scheme(mediator, game):
    """Merge the signals of a mediator by the action Alice takes.

    Returns:
        RecommendationScheme: Scheme with the mediator's `(θ_A, θ_B, r)`
        outcome distribution; it is obedient and has the same expected
        utilities and ex-ante and interim IR verdicts.
    """
    if not isinstance(mediator, MediatorProtocol):
        raise TypeError(f'Expected a MediatorProtocol, got {type(mediator)}.')
    array = zeros((len(game.types_a), len(game.actions), len(game.types_b)))
    for context in outcome_contexts(game, mediator):
        for i, action in enumerate(context.actions):
            if action is None:
                continue
            k = game.action_index(action)
            for j in range(len(game.types_b)):
                array[i, k, j] += context.matrix[i, j]
    return RecommendationScheme(game.types_a, game.types_b, game.actions, array)


FrontierPoint = namedtuple('FrontierPoint', ['weight', 'utility_a', 'utility_b'])


def _support_point(args):
    game, ir, direction = args
    d_a, d_b = direction
    _, scheme = _solve_lexicographic(
        game, [d_a * game.utility_a + d_b * game.utility_b,
               welfare_objective(game)], ir)
    return (scheme_value(scheme, game, game.utility_a),
            scheme_value(scheme, game, game.utility_b))


def _map(function, jobs, n_process):
    if n_process > 1 and len(jobs) > 1:
        if not MULTIPROCESS_AVAILABLE:
            logger.debug(
                'multiprocess not available; using multiprocessing Pool.')
        with Pool(n_process) as pool:
            return pool.map(function, jobs)
    return [function(job) for job in jobs]


def utility_range(game, ir=None, directions=((ONE, ZERO), (ZERO, ONE)),
                  n_process=1):
    """Support points of the implementable `(E[u_A], E[u_B])` set.

    For each direction `(d_A, d_B)` maximizes `d_A E[u_A] + d_B E[u_B]` and,
    among maximizers, welfare.

    Args:
        game (Game): Base game.
        ir (IRNotion): Optional ex-ante or interim IR constraint.
        directions (Sequence[Tuple[Rational, Rational]]): Directions.
        n_process (int): Number of worker processes for the independent
            programs; 1 solves them sequentially.

    Returns:
        List[Tuple[Fraction, Fraction]]: One utility pair per direction.
    """
    ir = _design_notion(ir)
    jobs = [(game, ir, (as_rational(d_a), as_rational(d_b)))
            for d_a, d_b in directions]
    return _map(_support_point, jobs, n_process)


def pareto_frontier(game, ir=None, weights=(ZERO, ONE / 2, ONE), n_process=1):
    """Frontier points maximizing `λ u_A + (1 - λ) u_B` for each weight.

    Args:
        game (Game): Base game.
        ir (IRNotion): Optional ex-ante or interim IR constraint.
        weights (Sequence[Rational]): Sorted weights `λ` in `[0, 1]`.
        n_process (int): Number of worker processes.

    Returns:
        List[FrontierPoint]: `(λ, E[u_A], E[u_B])` per weight; `E[u_A]` is
        non-decreasing and `E[u_B]` non-increasing along the list.
    """
    weights = [as_rational(w) for w in weights]
    if any(not ZERO <= w <= ONE for w in weights):
        raise ValueError('Pareto weights must lie in [0, 1].')
    if weights != sorted(weights):
        raise ValueError('Pareto weights must be sorted.')
    points = utility_range(
        game, ir, [(w, ONE - w) for w in weights], n_process)
    return [FrontierPoint(w, u_a, u_b) for w, (u_a, u_b) in zip(weights, points)]


@dataclass
class _TreeNode:
    belief_b: Belief
    belief_a: Belief
    index: int
    mover: str = None
    children: list = None
    parent: object = None


@dataclass
class SearchResult:
    """Best conversation found by `search_expost_conversation`.

    `value` is a lower bound on the best objective attainable under the
    searched IR notion. `budget_exceeded` flags that the tree had to be
    built with fewer than the requested rounds.
    """

    value: object
    protocol: ConversationProtocol
    n_rounds: int
    n_nodes: int
    budget_exceeded: bool
    report: object


class _BudgetSignal(Exception):
    pass


def _split_options(current, candidates, branching):
    others = [c for c in candidates
              if c != current and c.is_absolutely_continuous(current)]
    if len(others) > branching:
        order = sorted(range(len(others)), key=lambda k: (
            -l1_distance(others[k].weights, current.weights), k))
        keep = sorted(order[:branching])
        others = [others[k] for k in keep]
    return others


def _universal_tree(beliefs_b, beliefs_a, prior_b, prior_a, n_moves,
                    branching, budget):
    """All belief trees on the candidate beliefs within `n_moves` moves.

    A mover without split options passes without creating a node; every
    split node's children include a copy of the current belief.
    """
    root = _TreeNode(prior_b, prior_a, 0)
    nodes = [root]
    stack = [(root, 0)]
    while stack:
        node, position = stack.pop()
        while position < n_moves:
            mover = 'A' if position % 2 == 0 else 'B'
            current = node.belief_a if mover == 'A' else node.belief_b
            options = _split_options(
                current, beliefs_a if mover == 'A' else beliefs_b, branching)
            if options:
                break
            position += 1
        if position == n_moves:
            continue
        node.mover, node.children = mover, []
        for belief in [current] + options:
            child = _TreeNode(
                node.belief_b if mover == 'A' else belief,
                belief if mover == 'A' else node.belief_a,
                len(nodes), parent=node)
            nodes.append(child)
            node.children.append(child)
            stack.append((child, position + 1))
        if len(nodes) > budget:
            raise _BudgetSignal()
    return nodes


def _bob_conditional(game, belief_b, belief_a, actions, j):
    """Bob type `j`'s expected utility when Alice type `i` plays
    `actions[i]` and Bob believes `belief_a`."""
    return sum((belief_a.weights[i] * game.utility_b[
        i, j, game.action_index(actions[i])]
        for i in range(len(game.types_a)) if belief_a.weights[i] > 0), ZERO)


def _node_actions(game, node):
    return [best_response(game, x, node.belief_b) for x in game.types_a]


def _leaf_value(game, objective, node, actions):
    return sum((node.belief_a.weights[i] * node.belief_b.weights[j] *
                objective[i, j, game.action_index(actions[i])]
                for i in range(len(game.types_a))
                for j in range(len(game.types_b))), ZERO)


def _search_program(game, objective, nodes, ir):
    leaves = [n for n in nodes if not n.children]
    actions = {n.index: _node_actions(game, n) for n in nodes}
    program = LinearProgram(len(nodes))
    for leaf in leaves:
        program.objective[leaf.index] = _leaf_value(
            game, objective, leaf, actions[leaf.index])
    program.add_constraint({0: ONE}, Relation.EQ, ONE)
    for node in nodes:
        if not node.children:
            continue
        current = node.belief_a if node.mover == 'A' else node.belief_b
        for k, weight in enumerate(current.weights):
            row = {node.index: -weight}
            for child in node.children:
                child_belief = (child.belief_a if node.mover == 'A'
                                else child.belief_b)
                row[child.index] = child_belief.weights[k]
            program.add_constraint(row, Relation.EQ, ZERO)
    baseline = list(no_comm_profile(game).values())
    informed = {
        leaf.index: [_bob_conditional(game, leaf.belief_b, leaf.belief_a,
                                      actions[leaf.index], j)
                     for j in range(len(game.types_b))]
        for leaf in leaves}
    if ir is IRNotion.EX_POST:
        for leaf in leaves:
            for j, weight in enumerate(leaf.belief_b.weights):
                if weight > 0 and informed[leaf.index][j] < _bob_conditional(
                        game, leaf.belief_b, leaf.belief_a, baseline, j):
                    program.add_constraint(
                        {leaf.index: ONE}, Relation.EQ, ZERO)
                    break
    elif ir is IRNotion.NON_COMMITTED:
        below = {n.index: [] for n in nodes}
        for leaf in leaves:
            node = leaf
            while node is not None:
                below[node.index].append(leaf)
                node = node.parent
        for node in nodes:
            for j, weight in enumerate(node.belief_b.weights):
                if weight == 0:
                    continue
                quit = _bob_conditional(
                    game, node.belief_b, node.belief_a, actions[node.index], j)
                row = {leaf.index: leaf.belief_b.weights[j] *
                       informed[leaf.index][j] for leaf in below[node.index]}
                row[node.index] = row.get(node.index, ZERO) - weight * quit
                program.add_constraint(row, Relation.GE, ZERO)
    return program


def _belief_tree(node, point):
    """Belief tree of the positive-probability part of a search solution."""
    children = [c for c in (node.children or []) if point[c.index] > 0]
    if len(children) == 1:
        return _belief_tree(children[0], point)
    return BeliefNode(
        node.belief_b, node.belief_a, node.mover if children else None,
        [(point[c.index] / point[node.index], _belief_tree(c, point))
         for c in children])


def _search_candidates(labels, prior, grid):
    beliefs = [prior] + [Belief.point_mass(labels, lbl) for lbl in labels]
    for belief in grid_beliefs(labels, grid):
        if belief not in beliefs:
            beliefs.append(belief)
    return beliefs


def search_expost_conversation(game, objective=None, max_rounds=1,
                               branching=3, budget=DEFAULT_SEARCH_BUDGET,
                               grid=None, ir=IRNotion.EX_POST):
    """Best conversation on a belief grid subject to a strong IR notion.

    Every conversation is described by the tree of public beliefs it
    induces. This enumerates all trees of at most `2 max_rounds`
    alternating splits whose beliefs lie in a candidate set (the priors,
    the point masses and, for binary type spaces, the beliefs
    `(c, 1 - c)` for `c` in `grid`) and solves one linear program over the
    node probabilities. Ex-post IR excludes leaves at which some type of
    Bob loses relative to the no-communication action profile; non-committed
    IR adds, for every node and type of Bob, the constraint that continuing
    is worth at least quitting.

    Args:
        game (Game): Base game.
        objective: Objective in any form accepted by
            `parley.rationality.objective_array`; defaults to welfare.
        max_rounds (int): Maximum number of conversation rounds.
        branching (int): Maximum number of split targets per node other
            than staying put; the targets farthest from the current belief
            are kept.
        budget (int): Maximum number of tree nodes. If exceeded the search
            is repeated with fewer rounds and the result flagged.
        grid (Sequence[Rational]): Grid of coordinates for binary types.
        ir (IRNotion): `expost` or `noncommitted`.

    Returns:
        SearchResult: Best value, a protocol attaining it and its audit.
    """
    ir = IRNotion(ir)
    if ir not in SEARCH_NOTIONS:
        raise ValueError(
            f'Search supports ex-post and non-committed IR, got {ir.value}.')
    if max_rounds < 0 or branching < 1:
        raise ValueError('max_rounds must be >= 0 and branching >= 1.')
    objective = objective_array(
        game, welfare_objective(game) if objective is None else objective)
    beliefs_b = _search_candidates(game.types_b, game.prior_b, grid)
    beliefs_a = _search_candidates(game.types_a, game.prior_a, grid)
    n_rounds, budget_exceeded = max_rounds, False
    while True:
        try:
            nodes = _universal_tree(
                beliefs_b, beliefs_a, game.prior_b, game.prior_a,
                2 * n_rounds, branching, budget)
            break
        except _BudgetSignal:
            logger.warning(
                'Belief tree for %d rounds exceeds budget of %d nodes; '
                'retrying with fewer rounds.', n_rounds, budget)
            n_rounds -= 1
            budget_exceeded = True
    logger.debug('Searching %d node belief tree over %d rounds.',
                 len(nodes), n_rounds)
    solution = solve_linear_program(_search_program(game, objective, nodes, ir))
    if not solution.is_optimal:
        raise DesignError(
            f'Search LP is {solution.status.value} although staying silent '
            f'is always feasible.')
    tree = _belief_tree(nodes[0], solution.point)
    protocol = protocol_from_belief_tree(
        tree, game.types_a, game.types_b, n_rounds)
    value = expected_objective(game, protocol, objective)
    if value != solution.value:
        raise DesignError(
            f'Realized conversation value {value} differs from search '
            f'optimum {solution.value}.')
    return SearchResult(value, protocol, n_rounds, len(nodes),
                        budget_exceeded, audit(game, protocol, ir))
