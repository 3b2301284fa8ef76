"""Exact linear program solver.

Programs are solved with a two-phase tableau simplex over `Fraction` values
using Bland's rule, so results are exact and identical inputs always give
identical optimal bases.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Sequence
from parley.utils import as_rational, ZERO, ONE

logger = logging.getLogger(__name__)


class Relation(str, Enum):
    """Relation between the left and right hand sides of a constraint."""

    LE = '<='
    EQ = '=='
    GE = '>='


class LPStatus(str, Enum):
    """Termination status of `solve_linear_program`."""

    OPTIMAL = 'optimal'
    INFEASIBLE = 'infeasible'
    UNBOUNDED = 'unbounded'


@dataclass(frozen=True)
class Constraint:
    """Single linear constraint `coefficients · x (relation) rhs`."""

    coefficients: tuple
    relation: Relation
    rhs: object


@dataclass
class LinearProgram:
    """Linear program `max (or min) objective · x` over linear constraints.

    Variables are nonnegative unless flagged otherwise in `nonnegative`.
    Constraints are usually added through `add_constraint` which accepts
    sparse `{index: coefficient}` mappings as well as dense sequences.
    """

    n_var: int
    objective: list = None
    constraints: List[Constraint] = field(default_factory=list)
    nonnegative: list = None
    maximize: bool = True

    def __post_init__(self):
        if self.objective is None:
            self.objective = [ZERO] * self.n_var
        self.objective = [as_rational(c) for c in self.objective]
        if len(self.objective) != self.n_var:
            raise ValueError(
                f'Objective has {len(self.objective)} coefficients but '
                f'program has {self.n_var} variables.')
        if self.nonnegative is None:
            self.nonnegative = [True] * self.n_var
        if len(self.nonnegative) != self.n_var:
            raise ValueError('One nonnegativity flag required per variable.')
        for constraint in self.constraints:
            self._check_row(constraint.coefficients)

    def _check_row(self, coefficients):
        if len(coefficients) != self.n_var:
            raise ValueError(
                f'Constraint has {len(coefficients)} coefficients but '
                f'program has {self.n_var} variables.')

    def add_constraint(self, coefficients, relation, rhs):
        """Append a constraint.

        Args:
            coefficients (Union[Sequence, Dict[int, Rational]]): Dense
                coefficient sequence or sparse mapping from variable index
                to coefficient.
            relation (Union[Relation, str]): One of `<=`, `==` or `>=`.
            rhs (Rational): Right hand side.
        """
        if isinstance(coefficients, dict):
            dense = [ZERO] * self.n_var
            for index, value in coefficients.items():
                dense[index] += as_rational(value)
        else:
            dense = [as_rational(c) for c in coefficients]
        self._check_row(dense)
        self.constraints.append(
            Constraint(tuple(dense), Relation(relation), as_rational(rhs)))

    def is_feasible_point(self, point):
        """Check whether `point` satisfies every constraint exactly."""
        for value, nonneg in zip(point, self.nonnegative):
            if nonneg and value < 0:
                return False
        for constraint in self.constraints:
            lhs = sum(
                (c * x for c, x in zip(constraint.coefficients, point)), ZERO)
            if constraint.relation is Relation.LE and lhs > constraint.rhs:
                return False
            if constraint.relation is Relation.GE and lhs < constraint.rhs:
                return False
            if constraint.relation is Relation.EQ and lhs != constraint.rhs:
                return False
        return True

    def objective_value(self, point):
        """Objective evaluated at `point`."""
        return sum((c * x for c, x in zip(self.objective, point)), ZERO)


@dataclass(frozen=True)
class LPSolution:
    """Result of solving a linear program.

    When `status` is optimal `point` satisfies every constraint exactly and
    attains `value`; otherwise `value` is `None` and `point` empty.
    """

    status: LPStatus
    value: object = None
    point: tuple = ()

    @property
    def is_optimal(self):
        return self.status is LPStatus.OPTIMAL


class _Tableau:
    """Dense simplex tableau with sparse row updates on pivots."""

    def __init__(self, rows, rhs, basis, n_col):
        self.rows = rows
        self.rhs = rhs
        self.basis = basis
        self.n_col = n_col
        self.n_pivot = 0

    def reduced_costs(self, costs, allowed):
        basic_costs = [costs[b] for b in self.basis]
        reduced = list(costs)
        value = ZERO
        for i, row in enumerate(self.rows):
            cb = basic_costs[i]
            if cb == 0:
                continue
            value += cb * self.rhs[i]
            for j, a in enumerate(row):
                if a:
                    reduced[j] -= cb * a
        for j in range(self.n_col):
            if not allowed[j]:
                reduced[j] = ZERO
        return reduced, value

    def pivot(self, i, j, reduced):
        row = self.rows[i]
        piv = row[j]
        nonzero = [k for k, a in enumerate(row) if a]
        for k in nonzero:
            row[k] /= piv
        self.rhs[i] /= piv
        for r, other in enumerate(self.rows):
            if r == i:
                continue
            factor = other[j]
            if factor:
                for k in nonzero:
                    other[k] -= factor * row[k]
                self.rhs[r] -= factor * self.rhs[i]
        factor = reduced[j]
        value_change = ZERO
        if factor:
            for k in nonzero:
                reduced[k] -= factor * row[k]
            value_change = factor * self.rhs[i]
        self.basis[i] = j
        self.n_pivot += 1
        return value_change

    def run(self, costs, allowed):
        """Maximize `costs · x` from the current basis with Bland's rule.

        Returns:
            Tuple[bool, Fraction]: Whether the program is bounded and the
            objective value at the final basis.
        """
        reduced, value = self.reduced_costs(costs, allowed)
        while True:
            entering = next(
                (j for j in range(self.n_col)
                 if allowed[j] and reduced[j] > 0), None)
            if entering is None:
                return True, value
            leaving, best_ratio = None, None
            for i, row in enumerate(self.rows):
                a = row[entering]
                if a > 0:
                    ratio = self.rhs[i] / a
                    if (best_ratio is None or ratio < best_ratio or (
                            ratio == best_ratio and
                            self.basis[i] < self.basis[leaving])):
                        leaving, best_ratio = i, ratio
            if leaving is None:
                return False, value
            value += self.pivot(leaving, entering, reduced)


def solve_linear_program(program):
    """Solve a linear program exactly.

    Free variables are split into differences of nonnegative variables and
    constraints are brought to equality form with slack, surplus and
    artificial columns. Phase one drives the artificial columns to zero and
    phase two optimizes the original objective. Both phases pivot with
    Bland's smallest-index rule which guarantees termination.

    Args:
        program (LinearProgram): Program to solve.

    Returns:
        LPSolution: Exact optimal basic solution or an infeasible / unbounded
        status.
    """
    n = program.n_var
    # Column map: original variable -> (positive column, negative column).
    columns = []
    n_col = 0
    for nonneg in program.nonnegative:
        if nonneg:
            columns.append((n_col, None))
            n_col += 1
        else:
            columns.append((n_col, n_col + 1))
            n_col += 2
    n_struct = n_col
    rows, rhs, relations = [], [], []
    for constraint in program.constraints:
        row = [ZERO] * n_struct
        for index, coefficient in enumerate(constraint.coefficients):
            if coefficient:
                pos, neg = columns[index]
                row[pos] += coefficient
                if neg is not None:
                    row[neg] -= coefficient
        b, relation = constraint.rhs, constraint.relation
        if b < 0:
            row = [-a for a in row]
            b = -b
            relation = {
                Relation.LE: Relation.GE, Relation.GE: Relation.LE,
                Relation.EQ: Relation.EQ}[relation]
        rows.append(row)
        rhs.append(b)
        relations.append(relation)
    m = len(rows)
    n_slack = sum(r is not Relation.EQ for r in relations)
    n_artificial = sum(r is not Relation.LE for r in relations)
    total = n_struct + n_slack + n_artificial
    basis = [None] * m
    slack_col, art_col = n_struct, n_struct + n_slack
    artificial = [False] * total
    for i, relation in enumerate(relations):
        rows[i].extend([ZERO] * (total - n_struct))
        if relation is Relation.LE:
            rows[i][slack_col] = ONE
            basis[i] = slack_col
            slack_col += 1
        else:
            if relation is Relation.GE:
                rows[i][slack_col] = -ONE
                slack_col += 1
            rows[i][art_col] = ONE
            basis[i] = art_col
            artificial[art_col] = True
            art_col += 1
    tableau = _Tableau(rows, rhs, basis, total)
    if n_artificial > 0:
        phase_one_costs = [-ONE if a else ZERO for a in artificial]
        _, value = tableau.run(phase_one_costs, [True] * total)
        if value < 0:
            logger.debug(
                f'Program infeasible after {tableau.n_pivot} pivots.')
            return LPSolution(LPStatus.INFEASIBLE)
        _drive_out_artificials(tableau, artificial)
    costs = [ZERO] * total
    sign = ONE if program.maximize else -ONE
    for index, coefficient in enumerate(program.objective):
        pos, neg = columns[index]
        costs[pos] += sign * coefficient
        if neg is not None:
            costs[neg] -= sign * coefficient
    allowed = [not a for a in artificial]
    bounded, value = tableau.run(costs, allowed)
    logger.debug(f'Simplex finished after {tableau.n_pivot} pivots.')
    if not bounded:
        return LPSolution(LPStatus.UNBOUNDED)
    solution = [ZERO] * total
    for i, column in enumerate(tableau.basis):
        solution[column] = tableau.rhs[i]
    point = []
    for pos, neg in columns:
        point.append(solution[pos] - (solution[neg] if neg is not None
                                      else ZERO))
    return LPSolution(
        LPStatus.OPTIMAL, program.objective_value(point), tuple(point))


def _drive_out_artificials(tableau, artificial):
    """Pivot zero-level artificial columns out of the basis.

    Rows whose only nonzero entries are in artificial columns are redundant
    and are removed from the tableau.
    """
    dummy = [ZERO] * tableau.n_col
    i = 0
    while i < len(tableau.rows):
        if artificial[tableau.basis[i]]:
            row = tableau.rows[i]
            column = next(
                (j for j, a in enumerate(row) if a and not artificial[j]),
                None)
            if column is None:
                del tableau.rows[i]
                del tableau.rhs[i]
                del tableau.basis[i]
                continue
            tableau.pivot(i, column, dummy)
        i += 1


def maximize(objective, constraints, nonnegative=None):
    """Convenience wrapper building and solving a maximization program.

    Args:
        objective (Sequence[Rational]): Objective coefficients.
        constraints (Sequence[Tuple[Sequence, str, Rational]]): Constraint
            rows as `(coefficients, relation, rhs)` triples.
        nonnegative (Sequence[bool]): Optional per variable sign flags.

    Returns:
        LPSolution: Solution of the program.
    """
    program = LinearProgram(len(objective), list(objective),
                            nonnegative=nonnegative)
    for coefficients, relation, rhs in constraints:
        program.add_constraint(coefficients, relation, rhs)
    return solve_linear_program(program)
