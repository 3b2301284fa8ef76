from fractions import Fraction
import numpy as np
import pytest
from parley.solvers import (
    LinearProgram, LPStatus, Relation, maximize, solve_linear_program)
from generators import enumerate_vertices, generate_linear_program

SEED = 2213874419
N_PROGRAM = 200


class TestSmallPrograms(object):

    def test_textbook_optimum(self):
        solution = maximize(
            [3, 5], [([1, 0], '<=', 4), ([0, 2], '<=', 12),
                     ([3, 2], '<=', 18)])
        assert solution.status is LPStatus.OPTIMAL
        assert solution.value == 36
        assert solution.point == (2, 6)

    def test_fractional_optimum(self):
        solution = maximize([1, 1], [([3, 1], '<=', 1), ([1, 3], '<=', 1)])
        assert solution.value == Fraction(1, 2)
        assert solution.point == (Fraction(1, 4), Fraction(1, 4))

    def test_infeasible(self):
        solution = maximize([1], [([1], '<=', 1), ([1], '>=', 2)])
        assert solution.status is LPStatus.INFEASIBLE
        assert solution.value is None and solution.point == ()

    def test_unbounded(self):
        solution = maximize([1, 1], [([1, -1], '<=', 1)])
        assert solution.status is LPStatus.UNBOUNDED

    def test_equality_and_negative_rhs(self):
        solution = maximize(
            [1, 2], [([1, 1], '==', 1), ([-1, 0], '<=', Fraction(-1, 3))])
        assert solution.value == Fraction(5, 3)
        assert solution.point == (Fraction(1, 3), Fraction(2, 3))

    def test_free_variable(self):
        program = LinearProgram(2, [-1, 0], nonnegative=[False, True])
        program.add_constraint({0: 1, 1: 1}, Relation.GE, -3)
        program.add_constraint({1: 1}, Relation.LE, 2)
        solution = solve_linear_program(program)
        assert solution.value == 5
        assert solution.point == (-5, 2)

    def test_minimize(self):
        program = LinearProgram(2, [1, 1], maximize=False)
        program.add_constraint([1, 2], '>=', 2)
        program.add_constraint([2, 1], '>=', 2)
        solution = solve_linear_program(program)
        assert solution.value == Fraction(4, 3)

    def test_redundant_equalities(self):
        solution = maximize(
            [1, 1], [([1, 1], '==', 1), ([2, 2], '==', 2), ([1, 0], '<=', 1)])
        assert solution.value == 1

    def test_degenerate_program_terminates(self):
        solution = maximize(
            [10, -57, -9, -24],
            [([Fraction(1, 2), Fraction(-11, 2), Fraction(-5, 2), 9], '<=', 0),
             ([Fraction(1, 2), Fraction(-3, 2), Fraction(-1, 2), 1], '<=', 0),
             ([1, 0, 0, 0], '<=', 1)])
        assert solution.value == 1

    def test_wrong_row_length_rejected(self):
        program = LinearProgram(2)
        with pytest.raises(ValueError):
            program.add_constraint([1, 2, 3], '<=', 1)


class TestRandomPrograms(object):

    def setup_method(self):
        rng = np.random.RandomState(SEED)
        self.programs = [generate_linear_program(rng)
                         for _ in range(N_PROGRAM)]

    def test_matches_vertex_enumeration(self):
        for program in self.programs:
            solution = solve_linear_program(program)
            expected = enumerate_vertices(program)
            if expected is None:
                assert solution.status is LPStatus.INFEASIBLE, (
                    f'program without feasible vertex solved as '
                    f'{solution.status}.')
            else:
                assert solution.status is LPStatus.OPTIMAL
                assert solution.value == expected, (
                    f'simplex value {solution.value} differs from best '
                    f'vertex {expected}.')

    def test_optimal_points_feasible(self):
        for program in self.programs:
            solution = solve_linear_program(program)
            if solution.is_optimal:
                assert program.is_feasible_point(solution.point)
                assert program.objective_value(
                    solution.point) == solution.value

    def test_deterministic(self):
        for program in self.programs[:20]:
            assert solve_linear_program(program) == solve_linear_program(
                program)

    def test_agrees_with_scipy(self):
        optimize = pytest.importorskip('scipy.optimize')
        for program in self.programs:
            solution = solve_linear_program(program)
            a_ub, b_ub, a_eq, b_eq = [], [], [], []
            for c in program.constraints:
                row = [float(v) for v in c.coefficients]
                if c.relation is Relation.EQ:
                    a_eq.append(row)
                    b_eq.append(float(c.rhs))
                elif c.relation is Relation.LE:
                    a_ub.append(row)
                    b_ub.append(float(c.rhs))
                else:
                    a_ub.append([-v for v in row])
                    b_ub.append(-float(c.rhs))
            result = optimize.linprog(
                [-float(v) for v in program.objective],
                A_ub=a_ub or None, b_ub=b_ub or None,
                A_eq=a_eq or None, b_eq=b_eq or None,
                bounds=[(0, None)] * program.n_var, method='highs')
            if solution.is_optimal:
                assert result.status == 0
                assert abs(-result.fun - float(solution.value)) < 1e-7
            else:
                assert result.status == 2
