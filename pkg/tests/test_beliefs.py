from fractions import Fraction
import numpy as np
import pytest
from parley.beliefs import (
    Atom, Belief, JointPosteriorDistribution, ObserverPosterior,
    condition_on_type, joint_from_observer, mean_posterior, product_factorize,
    product_posterior, split_posterior)
from parley.errors import (
    DistributionError, MeanConditionError, ZeroProbabilityError)
from generators import (
    generate_belief, generate_distribution, generate_labels,
    generate_observer_posterior)

SEED = 1170594528
N_SPLIT = 100
HL = ('H', 'L')
HALF, QUARTER = Fraction(1, 2), Fraction(1, 4)


def _generate_kernel(rng, q, signals):
    return {(x, y): dict(zip(signals, generate_distribution(rng, len(signals))))
            for x in q.labels_a for y in q.labels_b}


class TestBelief(object):

    def test_validation(self):
        with pytest.raises(DistributionError):
            Belief(HL, (HALF, QUARTER))
        with pytest.raises(DistributionError):
            Belief(HL, (1,))
        with pytest.raises(DistributionError):
            Belief(('H', 'H'), (HALF, HALF))
        with pytest.raises(DistributionError):
            Belief(HL, (Fraction(3, 2), -HALF))

    def test_constructors(self):
        assert Belief.uniform(HL) == Belief(HL, (HALF, HALF))
        assert Belief.point_mass(HL, 'L').weights == (0, 1)
        assert Belief.from_mapping(HL, {'H': 1}) == Belief.point_mass(HL, 'H')
        with pytest.raises(DistributionError):
            Belief.from_mapping(HL, {'M': 1})

    def test_accessors(self):
        belief = Belief(('a', 'b', 'c'), (QUARTER, 0, Fraction(3, 4)))
        assert belief['c'] == Fraction(3, 4)
        assert belief.support == ('a', 'c')
        assert not belief.is_point_mass
        assert dict(belief.to_mapping()) == {
            'a': '1/4', 'b': '0/1', 'c': '3/4'}
        assert str(belief) == '(1/4, 0/1, 3/4)'
        with pytest.raises(KeyError):
            belief['d']

    def test_equality_and_hash(self):
        first = Belief(HL, ('1/2', '2/4'))
        second = Belief(HL, (HALF, HALF))
        assert first == second and hash(first) == hash(second)
        assert first != Belief(('L', 'H'), (HALF, HALF))
        assert len({first, second}) == 1

    def test_absolute_continuity(self):
        point = Belief.point_mass(HL, 'H')
        assert point.is_absolutely_continuous(Belief.uniform(HL))
        assert not Belief.uniform(HL).is_absolutely_continuous(point)


class TestObserverPosterior(object):

    def test_validation(self):
        with pytest.raises(DistributionError):
            ObserverPosterior(HL, HL, [[HALF, HALF]])
        with pytest.raises(DistributionError):
            ObserverPosterior(HL, HL, [[HALF, 0], [0, QUARTER]])
        with pytest.raises(DistributionError):
            ObserverPosterior(HL, HL, [[-HALF, 0], [0, 0]], normalized=False)

    def test_marginals_and_normalization(self):
        reach = ObserverPosterior(
            HL, HL, [[Fraction(1, 8), 0], [Fraction(1, 8), QUARTER]],
            normalized=False)
        assert reach.total == HALF
        q = reach.normalized()
        assert q.matrix[1, 1] == HALF
        assert q.marginal_a() == Belief(HL, (QUARTER, Fraction(3, 4)))
        assert q.marginal_b() == Belief(HL, (HALF, HALF))
        with pytest.raises(ZeroProbabilityError):
            ObserverPosterior(HL, HL, [[0, 0], [0, 0]],
                              normalized=False).normalized()

    def test_product_posterior(self):
        prior_a = Belief(HL, (QUARTER, Fraction(3, 4)))
        prior_b = Belief.uniform(HL)
        q = product_posterior(prior_a, prior_b)
        assert q.entry('L', 'H') == Fraction(3, 8)
        assert product_factorize(q) == (prior_a, prior_b)

    def test_non_product_not_factorized(self):
        q = ObserverPosterior(HL, HL, [[HALF, 0], [0, HALF]])
        assert product_factorize(q) is None

    def test_condition_on_type(self):
        q = ObserverPosterior(
            HL, HL, [[Fraction(1, 8), Fraction(3, 8)], [HALF, 0]])
        assert condition_on_type(q, 'A', 'H') == Belief(
            HL, (QUARTER, Fraction(3, 4)))
        assert condition_on_type(q, 'B', 'L') == Belief.point_mass(HL, 'H')
        with pytest.raises(ValueError):
            condition_on_type(q, 'C', 'H')
        zero = ObserverPosterior(HL, HL, [[1, 0], [0, 0]])
        with pytest.raises(ZeroProbabilityError):
            condition_on_type(zero, 'A', 'L')


class TestSplitting(object):

    def setup_method(self):
        self.rng = np.random.RandomState(SEED)

    def test_split_preserves_mean(self):
        for _ in range(N_SPLIT):
            labels_a = generate_labels(self.rng, 'a')
            labels_b = generate_labels(self.rng, 'b')
            q = generate_observer_posterior(self.rng, labels_a, labels_b)
            signals = [f's{k}' for k in range(self.rng.randint(1, 4))]
            splits = split_posterior(
                q, _generate_kernel(self.rng, q, signals), signals)
            assert sum(p for _, p, _ in splits) == 1
            assert all(p > 0 for _, p, _ in splits)
            assert mean_posterior([(p, q_s) for _, p, q_s in splits]) == q, (
                'split posteriors do not average to the split posterior.')

    def test_split_of_product_by_alice_signal_stays_product(self):
        for _ in range(N_SPLIT):
            prior_a = generate_belief(self.rng, HL, positive=True)
            prior_b = generate_belief(self.rng, ('x', 'y', 'z'), True)
            q = product_posterior(prior_a, prior_b)
            rows = {x: generate_distribution(self.rng, 2) for x in HL}
            kernel = {(x, y): dict(zip(('u', 'v'), rows[x]))
                      for x in HL for y in prior_b.labels}
            for _, _, q_s in split_posterior(q, kernel, ('u', 'v')):
                factors = product_factorize(q_s)
                assert factors is not None
                assert factors[1] == prior_b, (
                    'Alice signal changed the belief about Bob.')

    def test_missing_kernel_row(self):
        q = product_posterior(Belief.uniform(HL), Belief.uniform(HL))
        with pytest.raises(DistributionError):
            split_posterior(q, {('H', 'H'): {'s': 1}})

    def test_unknown_signal(self):
        q = ObserverPosterior(HL, HL, [[1, 0], [0, 0]])
        with pytest.raises(DistributionError):
            split_posterior(q, {('H', 'H'): {'t': 1}}, ['s'])

    def test_zero_mass_pairs_may_be_omitted(self):
        q = ObserverPosterior(HL, HL, [[HALF, 0], [0, HALF]])
        splits = split_posterior(
            q, {('H', 'H'): {'s': 1}, ('L', 'L'): {'s': HALF, 't': HALF}})
        assert [(s, p) for s, p, _ in splits] == [
            ('s', Fraction(3, 4)), ('t', QUARTER)]


class TestJointPosteriorDistribution(object):

    def setup_method(self):
        self.high = Belief.point_mass(HL, 'H')
        self.low = Belief.point_mass(HL, 'L')

    def test_merging_and_canonical_order(self):
        atoms = [Atom('H', 'L', self.high, self.low, QUARTER),
                 Atom('L', 'H', self.low, self.high, HALF),
                 Atom('H', 'L', self.high, self.low, QUARTER),
                 Atom('L', 'L', self.low, self.low, 0)]
        dist = JointPosteriorDistribution(HL, HL, atoms)
        reordered = JointPosteriorDistribution(
            HL, HL, [atoms[1], Atom('H', 'L', self.high, self.low, HALF)])
        assert dist == reordered
        assert len(dist) == 2
        assert dist.probability('H', 'L', self.high, self.low) == HALF
        assert dist.probability('L', 'L', self.low, self.low) == 0

    def test_probabilities_must_sum_to_one(self):
        with pytest.raises(DistributionError):
            JointPosteriorDistribution(
                HL, HL, [Atom('H', 'H', self.high, self.high, HALF)])

    def test_unknown_types(self):
        with pytest.raises(DistributionError):
            JointPosteriorDistribution(
                HL, HL, [Atom('M', 'H', self.high, self.high, 1)])

    def test_from_observer_posteriors(self):
        diagonal = ObserverPosterior(HL, HL, [[HALF, 0], [0, HALF]])
        anti = ObserverPosterior(HL, HL, [[0, HALF], [HALF, 0]])
        prior = Belief.uniform(HL)
        dist = joint_from_observer([(HALF, diagonal), (HALF, anti)],
                                   prior, prior)
        assert len(dist) == 4
        assert dist.probability('H', 'H', self.high, self.high) == QUARTER
        assert dist.probability('H', 'L', self.low, self.high) == QUARTER
        assert dist.type_marginal() == product_posterior(prior, prior)
        point = (self.high, self.high)
        assert dist.point_distribution()[point] == QUARTER
        assert dist.conditional_types(point).entry('H', 'H') == 1

    def test_mean_condition_enforced(self):
        diagonal = ObserverPosterior(HL, HL, [[HALF, 0], [0, HALF]])
        prior = Belief.uniform(HL)
        with pytest.raises(MeanConditionError):
            joint_from_observer([(1, diagonal)], prior, prior)
