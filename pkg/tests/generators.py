"""Random instances shared by the test modules."""

import itertools
from fractions import Fraction
import numpy as np
from parley.beliefs import Belief, ObserverPosterior
from parley.conversations import ConversationProtocol, Round
from parley.games import Game
from parley.mediators import MediatorProtocol
from parley.solvers import LinearProgram, Relation

DENOMINATOR = 12


def _generate_counts(rng, n, total, positive):
    if positive:
        return rng.multinomial(total - n, [1. / n] * n) + 1
    return rng.multinomial(total, [1. / n] * n)


def generate_distribution(rng, n, positive=False, denominator=DENOMINATOR):
    """Random exact probability vector of length `n`."""
    counts = _generate_counts(rng, n, denominator, positive)
    return [Fraction(int(c), denominator) for c in counts]


def generate_belief(rng, labels, positive=False):
    return Belief(labels, generate_distribution(rng, len(labels), positive))


def generate_observer_posterior(rng, labels_a, labels_b, positive=False):
    weights = generate_distribution(
        rng, len(labels_a) * len(labels_b), positive)
    matrix = np.array(weights, dtype=object).reshape(
        len(labels_a), len(labels_b))
    return ObserverPosterior(labels_a, labels_b, matrix)


def generate_labels(rng, prefix, max_size=3):
    return tuple(f'{prefix}{i}' for i in range(rng.randint(2, max_size + 1)))


def generate_game(rng, types_a=None, types_b=None, n_action=None,
                  max_utility=5):
    """Random game with positive priors and small integer utilities."""
    types_a = generate_labels(rng, 'a') if types_a is None else types_a
    types_b = generate_labels(rng, 'b') if types_b is None else types_b
    n_action = rng.randint(2, 4) if n_action is None else n_action
    actions = tuple(f'r{k}' for k in range(n_action))
    shape = (len(types_a), len(types_b), n_action)
    table_a = rng.randint(-max_utility, max_utility + 1, size=shape)
    table_b = rng.randint(-max_utility, max_utility + 1, size=shape)
    return Game(
        types_a, types_b, generate_belief(rng, types_a, True),
        generate_belief(rng, types_b, True), actions,
        lambda x, y, r: int(table_a[types_a.index(x), types_b.index(y),
                                    actions.index(r)]),
        lambda y, x, r: int(table_b[types_a.index(x), types_b.index(y),
                                    actions.index(r)]))


def _generate_signals(rng, prefix, max_signals):
    return tuple(f'{prefix}{k}' for k in range(rng.randint(1, max_signals + 1)))


def _generate_rows(rng, types, signals):
    return {t: dict(zip(signals, generate_distribution(rng, len(signals))))
            for t in types}


def generate_conversation(rng, types_a, types_b, n_rounds, max_signals=2):
    """Random conversation with kernels at every history of each round."""
    rounds, alice_kernels, bob_kernels = [], [], []
    for t in range(n_rounds):
        rounds.append(Round(_generate_signals(rng, f'x{t}', max_signals),
                            _generate_signals(rng, f'y{t}', max_signals)))
    for t, round_ in enumerate(rounds):
        moves = [s for r in rounds[:t]
                 for s in (r.alice_signals, r.bob_signals)]
        alice_kernels.append({
            history: _generate_rows(rng, types_a, round_.alice_signals)
            for history in itertools.product(*moves)})
        bob_kernels.append({
            history: _generate_rows(rng, types_b, round_.bob_signals)
            for history in itertools.product(
                *(moves + [round_.alice_signals]))})
    return ConversationProtocol(
        types_a, types_b, rounds, alice_kernels, bob_kernels)


def generate_mediator(rng, types_a, types_b, max_signals=3):
    signals = _generate_signals(rng, 's', max_signals)
    return MediatorProtocol(types_a, types_b, signals, {
        (x, y): dict(zip(signals, generate_distribution(rng, len(signals))))
        for x in types_a for y in types_b})


def generate_linear_program(rng, max_var=4, max_constraint=4, bound=5):
    """Random bounded program: each variable also has an upper bound."""
    n_var = rng.randint(1, max_var + 1)
    program = LinearProgram(
        n_var, [int(c) for c in rng.randint(-3, 4, size=n_var)])
    relations = [Relation.LE, Relation.GE, Relation.EQ]
    for _ in range(rng.randint(1, max_constraint + 1)):
        program.add_constraint(
            [int(c) for c in rng.randint(-3, 4, size=n_var)],
            relations[rng.choice(3, p=[0.6, 0.25, 0.15])],
            int(rng.randint(0, 6)))
    for i in range(n_var):
        program.add_constraint({i: 1}, Relation.LE, bound)
    return program


def solve_square(matrix, rhs):
    """Exact solution of a square linear system, `None` if singular."""
    n = len(matrix)
    rows = [[Fraction(v) for v in row] + [Fraction(b)]
            for row, b in zip(matrix, rhs)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if rows[r][col] != 0), None)
        if pivot is None:
            return None
        rows[col], rows[pivot] = rows[pivot], rows[col]
        for r in range(n):
            if r != col and rows[r][col] != 0:
                factor = rows[r][col] / rows[col][col]
                rows[r] = [a - factor * b for a, b in zip(rows[r], rows[col])]
    return [rows[i][n] / rows[i][i] for i in range(n)]


def enumerate_vertices(program):
    """Best feasible vertex of a bounded nonnegative program by brute force.

    Returns:
        Optional[Fraction]: Optimal value, or `None` if infeasible.
    """
    n = program.n_var
    rows = [(list(c.coefficients), c.rhs, c.relation is Relation.EQ)
            for c in program.constraints]
    rows += [([1 if j == i else 0 for j in range(n)], 0, False)
             for i in range(n)]
    best = None
    for active in itertools.combinations(range(len(rows)), n):
        point = solve_square([rows[k][0] for k in active],
                             [rows[k][1] for k in active])
        if point is None or not program.is_feasible_point(point):
            continue
        value = program.objective_value(point)
        if best is None or value > best:
            best = value
    return best
