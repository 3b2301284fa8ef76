"""Mediator protocols.

Both agents privately report their types to a trusted mediator which then
broadcasts a single public signal drawn from a kernel `π(s | θ_A, θ_B)`.
"""

from collections import OrderedDict
from parley.beliefs import (
    split_posterior, product_posterior, mean_posterior, joint_from_observer)
from parley.errors import MeanConditionError, ProtocolError
from parley.utils import as_rational, check_distribution, ZERO, ONE


class MediatorProtocol(object):
    """Public signal kernel over a finite signal set.

    The kernel is total: every `(type_a, type_b)` pair has a row which is a
    distribution over `signals`.
    """

    def __init__(self, types_a, types_b, signals, kernel):
        """
        Args:
            types_a (Sequence[str]): Alice's type labels.
            types_b (Sequence[str]): Bob's type labels.
            signals (Sequence[str]): Signal labels.
            kernel (Dict[Tuple[str, str], Dict[str, Rational]]): Signal
                distribution for every type pair; omitted signals have
                probability zero.
        """
        self.types_a = tuple(types_a)
        self.types_b = tuple(types_b)
        self.signals = tuple(signals)
        if len(set(self.signals)) != len(self.signals):
            raise ProtocolError(f'Duplicate signals in {self.signals}.')
        self.kernel = OrderedDict()
        for x in self.types_a:
            for y in self.types_b:
                if (x, y) not in kernel:
                    raise ProtocolError(f'Kernel has no row for ({x}, {y}).')
                row = {s: as_rational(p) for s, p in kernel[x, y].items()}
                unknown = set(row) - set(self.signals)
                if unknown:
                    raise ProtocolError(
                        f'Kernel row ({x}, {y}) uses unknown signals '
                        f'{sorted(unknown)}.')
                check_distribution(row.values(), f'kernel row ({x}, {y})')
                self.kernel[x, y] = OrderedDict(
                    (s, row.get(s, ZERO)) for s in self.signals)
        extra = set(kernel) - set(self.kernel)
        if extra:
            raise ProtocolError(f'Kernel rows for unknown types {extra}.')

    def prob(self, signal, type_a, type_b):
        """Probability `π(signal | type_a, type_b)`."""
        return self.kernel[type_a, type_b][signal]

    def __eq__(self, other):
        if not isinstance(other, MediatorProtocol):
            return NotImplemented
        return (self.types_a == other.types_a and
                self.types_b == other.types_b and
                self.signals == other.signals and
                self.kernel == other.kernel)

    def __repr__(self):
        return f'MediatorProtocol(signals={self.signals})'


def induced_observer_distribution(protocol, prior_a, prior_b):
    """Distribution of observer posteriors induced by a mediator.

    Returns:
        List[Tuple[str, Fraction, ObserverPosterior]]: One entry per signal
        with positive probability, in the protocol's signal order.
    """
    return split_posterior(
        product_posterior(prior_a, prior_b), protocol.kernel,
        protocol.signals)


def mediator_joint_posterior(protocol, prior_a, prior_b):
    """Joint posterior distribution induced by a mediator protocol."""
    return joint_from_observer(
        [(prob, q) for _, prob, q in induced_observer_distribution(
            protocol, prior_a, prior_b)], prior_a, prior_b)


def construct_from_posterior_family(targets, prior_a, prior_b, signals=None):
    """Build a mediator inducing a given family of observer posteriors.

    The kernel is `π(s | x, y) = q_s(x, y) P(q_s) / (P(x) P(y))`; rows of
    type pairs with zero prior probability are set uniform.

    Args:
        targets (Sequence[Tuple[Rational, ObserverPosterior]]): Target
            posteriors with their probabilities.
        prior_a (Belief): Prior over Alice's types.
        prior_b (Belief): Prior over Bob's types.
        signals (Sequence[str]): Optional signal labels, one per target;
            defaults to `s1, s2, ...`.

    Returns:
        MediatorProtocol: Protocol whose induced observer distribution is
        `targets` (zero-probability targets are dropped).

    Raises:
        `parley.errors.MeanConditionError` if the targets do not average to
        the prior product.
    """
    targets = [(as_rational(p), q) for p, q in targets]
    prior = product_posterior(prior_a, prior_b)
    if mean_posterior(targets) != prior:
        raise MeanConditionError(
            'Target posteriors do not average to the prior product.')
    if signals is None:
        signals = [f's{i + 1}' for i in range(len(targets))]
    if len(signals) != len(targets):
        raise ValueError('One signal label required per target.')
    kept = [(s, p, q) for s, (p, q) in zip(signals, targets) if p > 0]
    kernel = {}
    for i, x in enumerate(prior_a.labels):
        for j, y in enumerate(prior_b.labels):
            mass = prior.matrix[i, j]
            if mass == 0:
                kernel[x, y] = {s: ONE / len(kept) for s, _, _ in kept}
            else:
                kernel[x, y] = {
                    s: q.matrix[i, j] * p / mass for s, p, q in kept}
    return MediatorProtocol(
        prior_a.labels, prior_b.labels, [s for s, _, _ in kept], kernel)


def uninformative_mediator(types_a, types_b, signal='none'):
    """Mediator sending the same signal for every type pair."""
    return MediatorProtocol(
        types_a, types_b, (signal,),
        {(x, y): {signal: ONE} for x in types_a for y in types_b})


def full_revelation_mediator(types_a, types_b):
    """Mediator publicly announcing both types."""
    signals = [f'{x}|{y}' for x in types_a for y in types_b]
    return MediatorProtocol(
        types_a, types_b, signals,
        {(x, y): {f'{x}|{y}': ONE} for x in types_a for y in types_b})


def reveal_b_mediator(types_a, types_b, informed=None):
    """Mediator revealing Bob's type, optionally only to some Alice types.

    Args:
        types_a (Sequence[str]): Alice's types.
        types_b (Sequence[str]): Bob's types.
        informed (Collection[str]): Alice types for which Bob's type is
            announced; the others receive a constant signal. Defaults to all.
    """
    informed = set(types_a if informed is None else informed)
    signals = list(types_b) + ([] if informed >= set(types_a) else ['none'])
    kernel = {}
    for x in types_a:
        for y in types_b:
            kernel[x, y] = {y if x in informed else 'none': ONE}
    return MediatorProtocol(types_a, types_b, signals, kernel)


def conversation_to_mediator(conversation, prior_a, prior_b, budget=None):
    """Mediator whose public signal is a conversation's full transcript.

    The kernel row of each type pair is the distribution of complete
    transcripts of the conversation given those types, so the mediator
    induces exactly the conversation's joint posterior distribution.

    Args:
        conversation (ConversationProtocol): Conversation to simulate.
        prior_a (Belief): Prior over Alice's types.
        prior_b (Belief): Prior over Bob's types.
        budget (int): Optional transcript budget for the simulation.

    Returns:
        MediatorProtocol: Mediator with one signal per transcript.
    """
    from parley.conversations import (
        transcript_kernel, history_label, DEFAULT_TRANSCRIPT_BUDGET)
    budget = DEFAULT_TRANSCRIPT_BUDGET if budget is None else budget
    transcripts, kernel = transcript_kernel(
        conversation, prior_a, prior_b, budget)
    signals = [history_label(h) for h in transcripts]
    labelled = {
        pair: {history_label(h): p for h, p in row.items()}
        for pair, row in kernel.items()}
    return MediatorProtocol(
        conversation.types_a, conversation.types_b, signals, labelled)
