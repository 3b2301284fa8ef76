"""Beliefs, observer posteriors and joint posterior distributions.

A `Belief` is a distribution over one agent's type labels. An
`ObserverPosterior` is the joint distribution over both agents' types held
by an outsider who sees only the public signals; its rows are indexed by
Alice's types and its columns by Bob's types. Splitting an observer
posterior by a signal kernel is mean preserving, and conditioning it on one
agent's actual type gives that agent's belief about the other.
"""

from collections import OrderedDict
from dataclasses import dataclass
import numpy as np
from parley.errors import (
    DistributionError, MeanConditionError, ZeroProbabilityError)
from parley.utils import (
    as_rational, check_distribution, format_rational, zeros, ZERO, ONE)


class Belief(object):
    """Probability distribution over a fixed, ordered list of type labels.

    Beliefs are immutable and hashable; two beliefs compare equal exactly
    when they have the same labels in the same order and identical weights.
    """

    __slots__ = ('_labels', '_weights', '_hash')

    def __init__(self, labels, weights):
        """
        Args:
            labels (Sequence[str]): Type labels, in canonical order.
            weights (Sequence[Rational]): One weight per label, nonnegative
                and summing exactly to one.
        """
        labels = tuple(labels)
        weights = tuple(as_rational(w) for w in weights)
        if len(labels) != len(weights):
            raise DistributionError(
                f'{len(labels)} labels but {len(weights)} weights.')
        if len(set(labels)) != len(labels):
            raise DistributionError(f'Duplicate labels in {labels}.')
        check_distribution(weights, f'belief over {labels}')
        self._labels = labels
        self._weights = weights
        self._hash = hash((labels, weights))

    @classmethod
    def point_mass(cls, labels, label):
        """Belief putting all mass on `label`."""
        return cls(labels, [ONE if lbl == label else ZERO for lbl in labels])

    @classmethod
    def uniform(cls, labels):
        """Uniform belief over all labels."""
        labels = tuple(labels)
        return cls(labels, [ONE / len(labels)] * len(labels))

    @classmethod
    def from_mapping(cls, labels, mapping):
        """Belief from a `{label: weight}` mapping; missing labels get 0."""
        unknown = set(mapping) - set(labels)
        if unknown:
            raise DistributionError(f'Unknown labels {sorted(unknown)}.')
        return cls(labels, [mapping.get(lbl, ZERO) for lbl in labels])

    @classmethod
    def from_array(cls, labels, array):
        """Belief from an object array of weights."""
        return cls(labels, list(array))

    @property
    def labels(self):
        return self._labels

    @property
    def weights(self):
        return self._weights

    @property
    def support(self):
        """Labels with positive weight."""
        return tuple(
            lbl for lbl, w in zip(self._labels, self._weights) if w > 0)

    @property
    def array(self):
        """Weights as an object array of `Fraction`."""
        return np.array(self._weights, dtype=object)

    @property
    def is_point_mass(self):
        return len(self.support) == 1

    def index(self, label):
        return self._labels.index(label)

    def __getitem__(self, label):
        try:
            return self._weights[self._labels.index(label)]
        except ValueError:
            raise KeyError(f'Unknown label {label!r}.')

    def __iter__(self):
        return iter(zip(self._labels, self._weights))

    def __len__(self):
        return len(self._labels)

    def __eq__(self, other):
        if not isinstance(other, Belief):
            return NotImplemented
        return (self._labels == other._labels and
                self._weights == other._weights)

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return self._weights < other._weights

    def is_absolutely_continuous(self, other):
        """Whether the support of this belief lies inside `other`'s."""
        return all(o > 0 for w, o in zip(self._weights, other._weights)
                   if w > 0)

    def to_mapping(self):
        """`{label: "p/q"}` mapping of the weights."""
        return OrderedDict(
            (lbl, format_rational(w)) for lbl, w in self)

    def __str__(self):
        return '(' + ', '.join(format_rational(w) for w in self._weights) + ')'

    def __repr__(self):
        return f'Belief({dict(self.to_mapping())})'


class ObserverPosterior(object):
    """Joint distribution over (Alice type, Bob type) pairs.

    Entry `(x, y)` of `matrix` is the observer's probability that Alice has
    type `labels_a[x]` and Bob has type `labels_b[y]`.
    """

    __slots__ = ('_labels_a', '_labels_b', '_matrix', '_hash')

    def __init__(self, labels_a, labels_b, matrix, normalized=True):
        """
        Args:
            labels_a (Sequence[str]): Alice's type labels (rows).
            labels_b (Sequence[str]): Bob's type labels (columns).
            matrix (array): `len(labels_a) x len(labels_b)` rationals.
            normalized (bool): Whether to require the entries to sum to one.
                Reach matrices of partial histories are built with
                `normalized=False`.
        """
        self._labels_a = tuple(labels_a)
        self._labels_b = tuple(labels_b)
        array = np.array(
            [[as_rational(v) for v in row] for row in matrix], dtype=object)
        if array.shape != (len(self._labels_a), len(self._labels_b)):
            raise DistributionError(
                f'Matrix shape {array.shape} does not match type spaces of '
                f'sizes {len(self._labels_a)} and {len(self._labels_b)}.')
        if normalized:
            check_distribution(array.reshape(-1), 'observer posterior')
        elif any(v < 0 for v in array.reshape(-1)):
            raise DistributionError('Negative entry in matrix.')
        array.flags.writeable = False
        self._matrix = array
        self._hash = hash(
            (self._labels_a, self._labels_b, tuple(array.reshape(-1))))

    @property
    def labels_a(self):
        return self._labels_a

    @property
    def labels_b(self):
        return self._labels_b

    @property
    def matrix(self):
        return self._matrix

    @property
    def total(self):
        return sum(self._matrix.reshape(-1), ZERO)

    def entry(self, type_a, type_b):
        return self._matrix[
            self._labels_a.index(type_a), self._labels_b.index(type_b)]

    def marginal_a(self):
        """Belief over Alice's types (row sums, normalized)."""
        return _normalized_belief(self._labels_a, self._matrix.sum(axis=1))

    def marginal_b(self):
        """Belief over Bob's types (column sums, normalized)."""
        return _normalized_belief(self._labels_b, self._matrix.sum(axis=0))

    def normalized(self):
        """Copy of this matrix rescaled to total mass one."""
        total = self.total
        if total == 0:
            raise ZeroProbabilityError('Cannot normalize a zero matrix.')
        return ObserverPosterior(
            self._labels_a, self._labels_b, self._matrix / total)

    def is_zero(self):
        return all(v == 0 for v in self._matrix.reshape(-1))

    def __eq__(self, other):
        if not isinstance(other, ObserverPosterior):
            return NotImplemented
        return (self._labels_a == other._labels_a and
                self._labels_b == other._labels_b and
                bool((self._matrix == other._matrix).all()))

    def __hash__(self):
        return self._hash

    def __repr__(self):
        rows = ', '.join(
            '[' + ', '.join(format_rational(v) for v in row) + ']'
            for row in self._matrix)
        return f'ObserverPosterior([{rows}])'


def _normalized_belief(labels, weights):
    total = sum(weights, ZERO)
    if total == 0:
        raise ZeroProbabilityError('Cannot normalize a zero-mass vector.')
    return Belief(labels, [w / total for w in weights])


def product_posterior(prior_a, prior_b):
    """Observer posterior `prior_a ⊗ prior_b` of independent types."""
    return ObserverPosterior(
        prior_a.labels, prior_b.labels, np.outer(prior_a.array, prior_b.array))


def _kernel_signals(kernel, signals=None):
    if signals is not None:
        return list(signals)
    ordered = []
    for row in kernel.values():
        for signal in row:
            if signal not in ordered:
                ordered.append(signal)
    return ordered


def split_posterior(q, kernel, signals=None):
    """Split an observer posterior by a public signal kernel.

    Args:
        q (ObserverPosterior): Posterior before the signal.
        kernel (Dict[Tuple[str, str], Dict[str, Rational]]): Signal
            distribution for every `(type_a, type_b)` pair. Pairs with zero
            mass under `q` may be omitted.
        signals (Sequence[str]): Optional signal order for the output;
            defaults to the order of first appearance in `kernel`.

    Returns:
        List[Tuple[str, Fraction, ObserverPosterior]]: Positive-probability
        signals with their probabilities and the updated posteriors.

    Raises:
        `parley.errors.DistributionError` if a kernel row is not a
        distribution or a positive-mass pair has no row.
    """
    signals = _kernel_signals(kernel, signals)
    n_a, n_b = len(q.labels_a), len(q.labels_b)
    joint = {s: zeros((n_a, n_b)) for s in signals}
    for i, x in enumerate(q.labels_a):
        for j, y in enumerate(q.labels_b):
            row = kernel.get((x, y))
            if row is None:
                if q.matrix[i, j] > 0:
                    raise DistributionError(
                        f'No kernel row for positive-mass pair ({x}, {y}).')
                continue
            row = {s: as_rational(p) for s, p in row.items()}
            check_distribution(row.values(), f'kernel row ({x}, {y})')
            for signal, prob in row.items():
                if signal not in joint:
                    raise DistributionError(f'Unknown signal {signal!r}.')
                joint[signal][i, j] = q.matrix[i, j] * prob
    splits = []
    for signal in signals:
        mass = sum(joint[signal].reshape(-1), ZERO)
        if mass > 0:
            splits.append((signal, mass, ObserverPosterior(
                q.labels_a, q.labels_b, joint[signal] / mass)))
    return splits


def mean_posterior(splits):
    """Probability weighted mean of observer posteriors.

    Args:
        splits (Sequence[Tuple[Rational, ObserverPosterior]]): Weights and
            posteriors; weights must sum to one.

    Returns:
        ObserverPosterior: Entrywise weighted mean.
    """
    splits = [(as_rational(p), q) for p, q in splits]
    check_distribution([p for p, _ in splits], 'split probabilities')
    first = splits[0][1]
    total = zeros(first.matrix.shape)
    for prob, posterior in splits:
        total = total + prob * posterior.matrix
    return ObserverPosterior(first.labels_a, first.labels_b, total)


def condition_on_type(q, side, type_label):
    """Condition an observer posterior on one agent's actual type.

    Args:
        q (ObserverPosterior): Observer posterior.
        side (str): `'A'` to condition on Alice's type (giving Alice's belief
            over Bob's types) or `'B'` to condition on Bob's type (giving
            Bob's belief over Alice's types).
        type_label (str): The conditioning type.

    Returns:
        Belief: Normalized row (side A) or column (side B).

    Raises:
        `parley.errors.ZeroProbabilityError` if the conditioning row or
        column has zero mass.
    """
    if side == 'A':
        weights = q.matrix[q.labels_a.index(type_label), :]
        labels = q.labels_b
    elif side == 'B':
        weights = q.matrix[:, q.labels_b.index(type_label)]
        labels = q.labels_a
    else:
        raise ValueError(f'Side must be "A" or "B", got {side!r}.')
    try:
        return _normalized_belief(labels, weights)
    except ZeroProbabilityError:
        raise ZeroProbabilityError(
            f'Type {type_label!r} on side {side} has zero mass.')


def product_factorize(q):
    """Factorize an observer posterior as a product of marginals if exact.

    Returns:
        Optional[Tuple[Belief, Belief]]: `(marginal_a, marginal_b)` when
        `q` equals their outer product exactly, otherwise `None`.
    """
    if q.total == 0:
        return None
    q = q.normalized()
    marginal_a, marginal_b = q.marginal_a(), q.marginal_b()
    if (np.outer(marginal_a.array, marginal_b.array) == q.matrix).all():
        return marginal_a, marginal_b
    return None


@dataclass(frozen=True)
class Atom:
    """Single support point of a joint posterior distribution.

    `belief_b` is Alice's final belief over Bob's types and `belief_a` is
    Bob's final belief over Alice's types.
    """

    type_a: str
    type_b: str
    belief_b: Belief
    belief_a: Belief
    prob: object

    @property
    def point(self):
        return (self.belief_b, self.belief_a)


class JointPosteriorDistribution(object):
    """Finite-support distribution over `(θ_A, θ_B, q_B, q_A)`.

    Atoms with equal keys are merged, zero-probability atoms dropped and the
    remaining atoms sorted into a canonical order, so two distributions are
    equal exactly when they assign the same probability to every key.
    """

    def __init__(self, labels_a, labels_b, atoms):
        """
        Args:
            labels_a (Sequence[str]): Alice's type labels.
            labels_b (Sequence[str]): Bob's type labels.
            atoms (Iterable[Atom]): Atoms, possibly with repeated keys.
        """
        self.labels_a = tuple(labels_a)
        self.labels_b = tuple(labels_b)
        merged = OrderedDict()
        for atom in atoms:
            if atom.type_a not in self.labels_a:
                raise DistributionError(f'Unknown Alice type {atom.type_a}.')
            if atom.type_b not in self.labels_b:
                raise DistributionError(f'Unknown Bob type {atom.type_b}.')
            key = (atom.type_a, atom.type_b, atom.belief_b, atom.belief_a)
            merged[key] = merged.get(key, ZERO) + as_rational(atom.prob)
        check_distribution(merged.values(), 'joint posterior atoms')
        self.atoms = tuple(
            Atom(*key, prob) for key, prob in sorted(
                merged.items(), key=lambda item: self._sort_key(item[0]))
            if prob > 0)

    def _sort_key(self, key):
        type_a, type_b, belief_b, belief_a = key
        return (belief_b.weights, belief_a.weights,
                self.labels_a.index(type_a), self.labels_b.index(type_b))

    def __eq__(self, other):
        if not isinstance(other, JointPosteriorDistribution):
            return NotImplemented
        return (self.labels_a == other.labels_a and
                self.labels_b == other.labels_b and
                self.atoms == other.atoms)

    def __len__(self):
        return len(self.atoms)

    def __iter__(self):
        return iter(self.atoms)

    def probability(self, type_a, type_b, belief_b, belief_a):
        """Probability of a single `(θ_A, θ_B, q_B, q_A)` key."""
        for atom in self.atoms:
            if (atom.type_a, atom.type_b, atom.belief_b, atom.belief_a) == (
                    type_a, type_b, belief_b, belief_a):
                return atom.prob
        return ZERO

    def point_distribution(self):
        """Marginal over final belief points `(q_B, q_A)`.

        Returns:
            OrderedDict[Tuple[Belief, Belief], Fraction]: Probabilities in
            canonical point order.
        """
        marginal = OrderedDict()
        for atom in self.atoms:
            marginal[atom.point] = marginal.get(atom.point, ZERO) + atom.prob
        return marginal

    def type_marginal(self):
        """Marginal over type pairs as an observer posterior."""
        matrix = zeros((len(self.labels_a), len(self.labels_b)))
        for atom in self.atoms:
            matrix[self.labels_a.index(atom.type_a),
                   self.labels_b.index(atom.type_b)] += atom.prob
        return ObserverPosterior(self.labels_a, self.labels_b, matrix)

    def conditional_types(self, point):
        """Type-pair distribution conditional on a belief point.

        Args:
            point (Tuple[Belief, Belief]): `(q_B, q_A)` in the support.

        Returns:
            ObserverPosterior: `P(θ_A, θ_B | q_B, q_A)`.
        """
        matrix = zeros((len(self.labels_a), len(self.labels_b)))
        for atom in self.atoms:
            if atom.point == point:
                matrix[self.labels_a.index(atom.type_a),
                       self.labels_b.index(atom.type_b)] += atom.prob
        return ObserverPosterior(
            self.labels_a, self.labels_b, matrix, normalized=False
        ).normalized()


def joint_from_observer(dist, prior_a, prior_b):
    """Recover the joint posterior distribution from observer posteriors.

    Args:
        dist (Sequence[Tuple[Rational, ObserverPosterior]]): Distribution of
            observer posteriors.
        prior_a (Belief): Prior over Alice's types.
        prior_b (Belief): Prior over Bob's types.

    Returns:
        JointPosteriorDistribution: One atom per posterior and positive-mass
        type pair, with each agent's belief found by conditioning the
        observer posterior on their own type.

    Raises:
        `parley.errors.MeanConditionError` if the posteriors do not average
        to `prior_a ⊗ prior_b`.
    """
    dist = [(as_rational(p), q) for p, q in dist]
    mean = mean_posterior(dist)
    prior = product_posterior(prior_a, prior_b)
    if mean != prior:
        raise MeanConditionError(
            f'Mean posterior {mean!r} does not equal prior product '
            f'{prior!r}.')
    atoms = []
    for prob, q in dist:
        if prob == 0:
            continue
        for i, x in enumerate(q.labels_a):
            for j, y in enumerate(q.labels_b):
                if q.matrix[i, j] > 0:
                    atoms.append(Atom(
                        x, y, condition_on_type(q, 'A', x),
                        condition_on_type(q, 'B', y), prob * q.matrix[i, j]))
    return JointPosteriorDistribution(q.labels_a, q.labels_b, atoms)
