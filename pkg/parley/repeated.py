"""Repeated play of a conversation.

Alice and Bob play infinitely many independent copies of a base game, each
preceded by the same conversation, with Bob discounting copy `i` by
`δ^(i-1)`. A Bob who quits a conversation gets the value of Alice acting
on her belief at that node and, depending on the punishment semantics,
either nothing or no-communication play in every later copy. If Bob values
the protocol at `u* > 0` and at most `ū` from quitting at any node, he
never quits once `δ` is large enough, so a committed protocol becomes
individually rational for a non-committed Bob.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from parley.conversations import (
    ConversationProtocol, DEFAULT_TRANSCRIPT_BUDGET, history_label,
    history_tree)
from parley.games import Game
from parley.rationality import (
    Comparison, IRNotion, IRReport, exante_ir, expected_utilities,
    quit_values)
from parley.errors import BudgetExceededError
from parley.utils import as_rational, ZERO, ONE

logger = logging.getLogger(__name__)

DEFAULT_REPEATED_BUDGET = 100_000
"""Maximum number of node comparisons in `audit_repeated_ir`."""


class Punishment(str, Enum):
    """Bob's payoff stream in the copies after he quits."""

    ZERO_FUTURE = 'zero'
    NO_COMM_FUTURE = 'nocomm'


@dataclass
class RepeatedSpec:
    """Repeated game built from a base game and a conversation.

    `horizon` is the number of copies whose nodes are audited; copies
    beyond it are identical up to the discount factor.
    """

    base: Game
    protocol: ConversationProtocol
    delta: object
    punishment: Punishment = Punishment.ZERO_FUTURE
    horizon: int = 2

    def __post_init__(self):
        self.delta = as_rational(self.delta)
        if not ZERO <= self.delta < ONE:
            raise ValueError(f'Discount {self.delta} outside [0, 1).')
        if self.horizon < 1:
            raise ValueError(f'Horizon must be >= 1, got {self.horizon}.')
        self.punishment = Punishment(self.punishment)


def committed_value(game, protocol, budget=DEFAULT_TRANSCRIPT_BUDGET):
    """Bob's expected utility `u*` in one copy when nobody quits."""
    return expected_utilities(game, protocol, budget)[1]


def no_comm_value(game):
    """Bob's expected utility `u⁰` of one copy without communication."""
    return exante_ir(game, _empty_protocol(game)).comparisons[0].rhs


def _empty_protocol(game):
    return ConversationProtocol(game.types_a, game.types_b, (), (), ())


def quit_ceiling(game, protocol, budget=DEFAULT_TRANSCRIPT_BUDGET):
    """Highest value `ū` any type of Bob can get by quitting at some node.

    Every positive-probability node of the conversation is considered,
    including the root and the leaves; at a node Alice best responds to her
    belief there. The maximum is over types and the nodes each type reaches.
    """
    root = history_tree(protocol, game.prior_a, game.prior_b, budget)
    return max(max(quit_values(game, node).values()) for node in root.walk())


def _check_committed(u_star):
    if u_star <= 0:
        raise ValueError(
            f'Committed value {u_star} must be positive for a discount '
            f'threshold to exist.')


def delta_threshold(game, protocol, punishment=Punishment.ZERO_FUTURE,
                    budget=DEFAULT_TRANSCRIPT_BUDGET):
    """Smallest discount factor at which Bob never prefers to quit.

    Continuing is worth `u* / (1 - δ)` against `ū` for quitting when later
    copies give nothing, giving `δ* = 1 - u* / ū`, and against
    `ū + δ u⁰ / (1 - δ)` when later copies are played without
    communication, giving `δ* = (ū - u*) / (ū - u⁰)`.

    Returns:
        Fraction: Threshold clamped to be nonnegative.

    Raises:
        `ValueError` if `u* <= 0`, or with no-communication punishment if
        no threshold below one exists.
    """
    punishment = Punishment(punishment)
    u_star = committed_value(game, protocol, budget)
    _check_committed(u_star)
    u_bar = quit_ceiling(game, protocol, budget)
    if u_bar <= u_star:
        return ZERO
    if punishment is Punishment.ZERO_FUTURE:
        return ONE - u_star / u_bar
    u_zero = no_comm_value(game)
    if u_zero >= u_star:
        raise ValueError(
            f'Committed value {u_star} does not exceed the no-communication '
            f'value {u_zero}; no discount factor deters quitting.')
    return (u_bar - u_star) / (u_bar - u_zero)


def _tail(spec, u_zero):
    """Value of later copies after quitting, seen from the quitting copy."""
    if spec.punishment is Punishment.ZERO_FUTURE:
        return ZERO
    return spec.delta / (ONE - spec.delta) * u_zero


def audit_repeated_ir(spec, budget=DEFAULT_REPEATED_BUDGET,
                      transcript_budget=DEFAULT_TRANSCRIPT_BUDGET):
    """Non-committed interim audit of the repeated protocol.

    At every positive-probability node of the first `spec.horizon` copies
    and every type of Bob reaching it, compares continuing forever,
    `δ^(i-1) u* / (1 - δ)`, with quitting, `δ^(i-1) (q + tail)` where `q`
    is the node's quit value and `tail` the discounted punishment stream.

    Returns:
        IRReport: Report with non-committed notion and one comparison per
        `(copy, node, type)`.

    Raises:
        `parley.errors.BudgetExceededError` if more than `budget`
        comparisons would be needed.
    """
    game, delta = spec.base, spec.delta
    root = history_tree(spec.protocol, game.prior_a, game.prior_b,
                        transcript_budget)
    nodes = list(root.walk())
    if spec.horizon * len(nodes) > budget:
        raise BudgetExceededError(
            f'{spec.horizon} copies of {len(nodes)} nodes exceed the budget '
            f'of {budget} comparisons.')
    u_star = committed_value(game, spec.protocol, transcript_budget)
    tail = _tail(spec, no_comm_value(game))
    quits = [(history_label(node.history) or '<root>', quit_values(game, node))
             for node in nodes]
    comparisons = []
    for copy in range(1, spec.horizon + 1):
        scale = delta ** (copy - 1)
        continuing = scale * u_star / (ONE - delta)
        for label, values in quits:
            for type_label, quitting in values.items():
                comparisons.append(Comparison(
                    f'copy {copy} {label}', type_label, continuing,
                    scale * (quitting + tail)))
    logger.debug('Checked %d repeated-play comparisons.', len(comparisons))
    return IRReport(IRNotion.NON_COMMITTED, 'bob', comparisons)


def committed_super_value(spec, budget=DEFAULT_TRANSCRIPT_BUDGET):
    """Bob's discounted value of the repeated protocol when he never quits.

    Sums the first `spec.horizon` copies explicitly and adds the remaining
    geometric tail in closed form; the result equals `u* / (1 - δ)`.
    """
    u_star = committed_value(spec.base, spec.protocol, budget)
    delta = spec.delta
    head = sum((delta ** (i - 1) * u_star
                for i in range(1, spec.horizon + 1)), ZERO)
    return head + delta ** spec.horizon * u_star / (ONE - delta)
