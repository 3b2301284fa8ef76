from fractions import Fraction
import numpy as np
import pytest
from parley.beliefs import Belief
from parley.design import (
    DesignProblem, FrontierPoint, RecommendationScheme, alice_objective,
    bob_objective, check_scheme, mediator_to_scheme, optimize,
    pareto_frontier, scheme_outcomes, scheme_to_mediator,
    scheme_to_one_round_conversation, scheme_value,
    search_expost_conversation, uninformative_scheme, utility_range,
    welfare_objective)
from parley.errors import DesignError
from parley.fixtures import employer_game, employer_signal_mediator
from parley.games import no_comm_profile
from parley.rationality import (
    IRNotion, audit, expected_utilities, outcome_distribution)
from generators import generate_game

SEED = 2871146025
N_GAME = 20


class TestEmployerDesign(object):

    def setup_method(self):
        self.game = employer_game()

    def test_interim_welfare_optimum(self):
        value, scheme = optimize(DesignProblem(self.game, 'interim'))
        assert value == Fraction(22, 5)
        assert dict(scheme.items()) == {
            ('Prog', 'hire', 'Prog'): Fraction(3, 10),
            ('Prog', 'not hire', 'Comm'): Fraction(1, 5),
            ('Comm', 'hire', 'Prog'): Fraction(1, 5),
            ('Comm', 'not hire', 'Prog'): Fraction(1, 10),
            ('Comm', 'hire', 'Comm'): Fraction(1, 5)}
        assert scheme == mediator_to_scheme(
            employer_signal_mediator(), self.game)

    def test_constraints_weaken_value(self):
        values = [optimize(DesignProblem(self.game, ir))[0]
                  for ir in (None, 'exante', 'interim')]
        assert values[0] >= values[1] >= values[2] == Fraction(22, 5), (
            f'design values {values} are not monotone.')

    def test_expost_rejected(self):
        with pytest.raises(ValueError):
            DesignProblem(self.game, 'expost')
        with pytest.raises(ValueError):
            utility_range(self.game, IRNotion.NON_COMMITTED)

    def test_optimal_scheme_is_valid(self):
        _, scheme = optimize(DesignProblem(self.game, 'interim'))
        check_scheme(scheme, self.game)
        assert scheme_value(
            scheme, self.game, welfare_objective(self.game)) == Fraction(22, 5)
        assert scheme.recommendation_prob('Comm', 'hire') == Fraction(2, 5)
        assert scheme.posterior('Comm', 'hire') == Belief.uniform(
            self.game.types_b)
        assert scheme.posterior('Prog', 'not hire') == Belief.point_mass(
            self.game.types_b, 'Comm')

    def test_scheme_realizations(self):
        _, scheme = optimize(DesignProblem(self.game, 'interim'))
        mediator = scheme_to_mediator(scheme, self.game)
        assert mediator.signals == self.game.actions
        assert expected_utilities(self.game, mediator) == (3, Fraction(7, 5))
        conversation = scheme_to_one_round_conversation(scheme, self.game)
        assert dict(outcome_distribution(self.game, conversation)) == dict(
            scheme_outcomes(scheme))
        assert audit(self.game, mediator, 'interim').passed
        assert not audit(self.game, conversation, 'expost').passed

    def test_objective_forms(self):
        table = {(x, y, r): self.game.u_b(y, x, r)
                 for x in self.game.types_a for y in self.game.types_b
                 for r in self.game.actions}
        by_table, _ = optimize(DesignProblem(self.game, None, table))
        by_array, _ = optimize(
            DesignProblem(self.game, None, bob_objective(self.game)))
        assert by_table == by_array == Fraction(9, 5)
        by_alice, _ = optimize(
            DesignProblem(self.game, None, alice_objective(self.game)))
        assert by_alice == Fraction(16, 5)


class TestSchemes(object):

    def setup_method(self):
        self.game = employer_game()

    def test_uninformative_scheme(self):
        scheme = uninformative_scheme(self.game)
        check_scheme(scheme, self.game)
        assert scheme_value(
            scheme, self.game, welfare_objective(self.game)) == 2
        assert scheme.posterior('Comm', 'hire') is None
        assert scheme.prob('Prog', 'hire', 'Comm') == Fraction(1, 5)

    def test_disobedient_scheme(self):
        half = Fraction(1, 2)
        scheme = RecommendationScheme(
            self.game.types_a, self.game.types_b, self.game.actions,
            {(x, 'hire', y): half * self.game.prior_b[y]
             for x in self.game.types_a for y in self.game.types_b})
        with pytest.raises(DesignError):
            check_scheme(scheme, self.game)

    def test_inconsistent_scheme(self):
        scheme = RecommendationScheme(
            self.game.types_a, self.game.types_b, self.game.actions,
            {('Prog', 'hire', 'Prog'): 1})
        with pytest.raises(DesignError):
            check_scheme(scheme, self.game)

    def test_negative_probability(self):
        with pytest.raises(DesignError):
            RecommendationScheme(('x',), ('y',), ('r',), {('x', 'r', 'y'): -1})

    def test_array_shape_checked(self):
        with pytest.raises(ValueError):
            RecommendationScheme(('x',), ('y',), ('r', 's'),
                                 np.zeros((1, 1, 1), dtype=object))

    def test_mediator_required(self):
        with pytest.raises(TypeError):
            mediator_to_scheme(object(), self.game)


class TestParetoFrontier(object):

    def setup_method(self):
        self.game = employer_game()

    def test_extreme_points(self):
        for ir in (None, 'interim'):
            frontier = pareto_frontier(self.game, ir)
            assert frontier[0] == FrontierPoint(0, 1, Fraction(9, 5))
            assert frontier[-1] == FrontierPoint(1, Fraction(16, 5), 1)

    def test_monotone_along_weights(self):
        weights = [Fraction(k, 10) for k in range(11)]
        frontier = pareto_frontier(self.game, 'interim', weights)
        for left, right in zip(frontier, frontier[1:]):
            assert left.utility_a <= right.utility_a
            assert left.utility_b >= right.utility_b

    def test_invalid_weights(self):
        with pytest.raises(ValueError):
            pareto_frontier(self.game, weights=[1, 0])
        with pytest.raises(ValueError):
            pareto_frontier(self.game, weights=[0, Fraction(3, 2)])

    def test_parallel_matches_sequential(self):
        weights = [0, Fraction(1, 4), Fraction(1, 2), 1]
        assert pareto_frontier(
            self.game, 'interim', weights, n_process=2) == pareto_frontier(
            self.game, 'interim', weights)


class TestConversationSearch(object):

    def setup_method(self):
        self.game = employer_game()

    def test_expost_search_bounds(self):
        result = search_expost_conversation(self.game, max_rounds=1)
        assert 2 <= result.value <= Fraction(22, 5)
        assert result.report.notion is IRNotion.EX_POST
        assert result.report.passed, result.report.violations
        assert not result.budget_exceeded

    def test_noncommitted_search(self):
        result = search_expost_conversation(
            self.game, max_rounds=1, ir='noncommitted')
        assert 2 <= result.value <= Fraction(22, 5)
        assert result.report.passed, result.report.violations

    def test_two_round_grid_search_below_interim_optimum(self):
        grid = [0, Fraction(1, 2), Fraction(3, 5), 1]
        for ir in ('expost', 'noncommitted'):
            result = search_expost_conversation(
                self.game, max_rounds=2, branching=3, grid=grid, ir=ir)
            assert not result.budget_exceeded
            assert result.n_rounds == 2
            assert 2 <= result.value < Fraction(22, 5), (
                f'{ir} search value {result.value} reaches the interim '
                f'optimum.')
            assert result.value == Fraction(21, 5)
            assert audit(self.game, result.protocol, 'expost').passed
            assert result.report.passed, result.report.violations

    def test_budget_falls_back_to_silence(self):
        result = search_expost_conversation(self.game, max_rounds=2, budget=1)
        assert result.budget_exceeded
        assert result.n_rounds == 0 and result.n_nodes == 1
        assert result.value == 2

    def test_invalid_arguments(self):
        with pytest.raises(ValueError):
            search_expost_conversation(self.game, ir='interim')
        with pytest.raises(ValueError):
            search_expost_conversation(self.game, max_rounds=-1)
        with pytest.raises(ValueError):
            search_expost_conversation(self.game, branching=0)


class TestRandomGames(object):

    def setup_method(self):
        rng = np.random.RandomState(SEED)
        self.games = [generate_game(rng) for _ in range(N_GAME)]

    def test_optimal_schemes_valid_and_monotone(self):
        for game in self.games:
            values = []
            for ir in (None, 'exante', 'interim'):
                value, scheme = optimize(DesignProblem(game, ir))
                check_scheme(scheme, game)
                assert scheme_value(
                    scheme, game, welfare_objective(game)) == value
                values.append(value)
            baseline = scheme_value(
                uninformative_scheme(game), game, welfare_objective(game))
            assert values[0] >= values[1] >= values[2] >= baseline, (
                f'design values {values} below baseline {baseline}.')

    def test_interim_optimum_respects_bob_baseline(self):
        for game in self.games:
            _, scheme = optimize(DesignProblem(game, 'interim'))
            baseline = no_comm_profile(game)
            for y in game.types_b:
                informed = sum(p * game.u_b(y, x, r)
                               for (x, r, y_), p in scheme.items() if y_ == y)
                silent = sum(game.prior_a[x] * game.prior_b[y] *
                             game.u_b(y, x, baseline[x]) for x in game.types_a)
                assert informed >= silent, (
                    f'type {y} gains {informed} < {silent} under the optimum.')
