from fractions import Fraction
import numpy as np
import pytest
from parley.beliefs import Belief, ObserverPosterior, product_posterior
from parley.conversations import induced_joint_posterior
from parley.errors import DistributionError, MeanConditionError, ProtocolError
from parley.fixtures import (
    employer_game, employer_signal_mediator, mediator_only_distribution,
    two_way_conversation, uniform_priors)
from parley.games import best_response
from parley.mediators import (
    MediatorProtocol, construct_from_posterior_family,
    conversation_to_mediator, full_revelation_mediator,
    induced_observer_distribution, mediator_joint_posterior,
    reveal_b_mediator, uninformative_mediator)
from parley.rationality import expected_utilities
from generators import (
    generate_belief, generate_conversation, generate_labels,
    generate_mediator)

SEED = 2750129386
N_MEDIATOR = 100
N_CONVERSATION = 100


def _enumerated_utilities(game, mediator):
    """Expected utilities by direct enumeration of types and signals."""
    utility_a = utility_b = Fraction(0)
    for s in mediator.signals:
        mass = {(x, y): game.prior_a[x] * game.prior_b[y] *
                mediator.prob(s, x, y)
                for x in game.types_a for y in game.types_b}
        for x in game.types_a:
            row = [mass[x, y] for y in game.types_b]
            if sum(row) == 0:
                continue
            action = best_response(
                game, x, Belief(game.types_b, [v / sum(row) for v in row]))
            for y in game.types_b:
                utility_a += mass[x, y] * game.u_a(x, y, action)
                utility_b += mass[x, y] * game.u_b(y, x, action)
    return utility_a, utility_b


class TestEmployerSignalMediator(object):

    def setup_method(self):
        self.game = employer_game()
        self.mediator = employer_signal_mediator()

    def test_induced_observer_distribution(self):
        splits = induced_observer_distribution(
            self.mediator, self.game.prior_a, self.game.prior_b)
        third = Fraction(1, 3)
        assert [(s, p) for s, p, _ in splits] == [
            ('s1', Fraction(3, 5)), ('s2', Fraction(2, 5))]
        assert splits[0][2] == ObserverPosterior(
            self.game.types_a, self.game.types_b, [[0, third], [third, third]])
        assert splits[1][2] == ObserverPosterior(
            self.game.types_a, self.game.types_b,
            [[Fraction(3, 4), 0], [Fraction(1, 4), 0]])

    def test_expected_utilities(self):
        assert expected_utilities(self.game, self.mediator) == (
            3, Fraction(7, 5))
        assert _enumerated_utilities(self.game, self.mediator) == (
            3, Fraction(7, 5))

    def test_joint_posterior_matches_relabelled_fixture(self):
        dist = mediator_joint_posterior(
            self.mediator, self.game.prior_a, self.game.prior_b)
        expected = mediator_only_distribution()
        relabel = {'Prog': 'H', 'Comm': 'L'}
        assert len(dist) == len(expected)
        for atom in dist:
            belief_b = Belief(('H', 'L'), atom.belief_b.weights)
            belief_a = Belief(('H', 'L'), atom.belief_a.weights)
            assert expected.probability(
                relabel[atom.type_a], relabel[atom.type_b], belief_b,
                belief_a) == atom.prob

    def test_prob_lookup(self):
        assert self.mediator.prob('s1', 'Comm', 'Prog') == Fraction(2, 3)
        assert self.mediator.prob('s2', 'Prog', 'Comm') == 0


class TestMediatorValidation(object):

    def test_missing_row(self):
        with pytest.raises(ProtocolError):
            MediatorProtocol(('a',), ('b', 'c'), ('s',), {('a', 'b'): {'s': 1}})

    def test_unknown_signal(self):
        with pytest.raises(ProtocolError):
            MediatorProtocol(('a',), ('b',), ('s',), {('a', 'b'): {'t': 1}})

    def test_duplicate_signals(self):
        with pytest.raises(ProtocolError):
            MediatorProtocol(('a',), ('b',), ('s', 's'), {('a', 'b'): {'s': 1}})

    def test_row_not_distribution(self):
        with pytest.raises(DistributionError):
            MediatorProtocol(('a',), ('b',), ('s', 't'),
                             {('a', 'b'): {'s': Fraction(1, 2)}})

    def test_rows_for_unknown_types(self):
        with pytest.raises(ProtocolError):
            MediatorProtocol(('a',), ('b',), ('s',),
                             {('a', 'b'): {'s': 1}, ('z', 'b'): {'s': 1}})


class TestReferenceMediators(object):

    def setup_method(self):
        self.prior_a, self.prior_b = uniform_priors()
        self.types = self.prior_a.labels

    def test_uninformative(self):
        splits = induced_observer_distribution(
            uninformative_mediator(self.types, self.types), self.prior_a,
            self.prior_b)
        assert len(splits) == 1
        assert splits[0][1] == 1
        assert splits[0][2] == product_posterior(self.prior_a, self.prior_b)

    def test_full_revelation(self):
        splits = induced_observer_distribution(
            full_revelation_mediator(self.types, self.types), self.prior_a,
            self.prior_b)
        assert [s for s, _, _ in splits] == ['H|H', 'H|L', 'L|H', 'L|L']
        for _, prob, q in splits:
            assert prob == Fraction(1, 4)
            assert sorted(q.matrix.reshape(-1)) == [0, 0, 0, 1]

    def test_reveal_b_to_some_types(self):
        mediator = reveal_b_mediator(self.types, self.types, informed=['H'])
        assert mediator.signals == ('H', 'L', 'none')
        assert mediator.prob('none', 'L', 'H') == 1
        assert mediator.prob('L', 'H', 'L') == 1


class TestRandomMediators(object):

    def setup_method(self):
        self.rng = np.random.RandomState(SEED)

    def test_construction_round_trip(self):
        for _ in range(N_MEDIATOR):
            types_a = generate_labels(self.rng, 'a')
            types_b = generate_labels(self.rng, 'b')
            prior_a = generate_belief(self.rng, types_a, positive=True)
            prior_b = generate_belief(self.rng, types_b, positive=True)
            mediator = generate_mediator(self.rng, types_a, types_b)
            splits = induced_observer_distribution(mediator, prior_a, prior_b)
            rebuilt = construct_from_posterior_family(
                [(p, q) for _, p, q in splits], prior_a, prior_b,
                [s for s, _, _ in splits])
            assert induced_observer_distribution(
                rebuilt, prior_a, prior_b) == splits, (
                'constructed mediator does not induce its target family.')

    def test_construction_requires_mean_condition(self):
        prior_a, prior_b = uniform_priors()
        q = ObserverPosterior(prior_a.labels, prior_b.labels,
                              [[Fraction(1, 2), 0], [0, Fraction(1, 2)]])
        with pytest.raises(MeanConditionError):
            construct_from_posterior_family([(1, q)], prior_a, prior_b)

    def test_conversation_as_mediator(self):
        for _ in range(N_CONVERSATION):
            types_a = generate_labels(self.rng, 'a')
            types_b = generate_labels(self.rng, 'b')
            prior_a = generate_belief(self.rng, types_a, positive=True)
            prior_b = generate_belief(self.rng, types_b, positive=True)
            conversation = generate_conversation(
                self.rng, types_a, types_b, self.rng.randint(1, 3))
            mediator = conversation_to_mediator(conversation, prior_a, prior_b)
            assert mediator_joint_posterior(
                mediator, prior_a, prior_b) == induced_joint_posterior(
                conversation, prior_a, prior_b), (
                'transcript mediator induces a different joint posterior.')

    def test_two_way_transcript_signals(self):
        prior_a, prior_b = uniform_priors()
        mediator = conversation_to_mediator(
            two_way_conversation(), prior_a, prior_b)
        assert mediator.signals == (
            'down;left;stay;skip', 'down;right;stay;skip',
            'up;left;stay;skip', 'up;right;H;skip', 'up;right;L;skip')
