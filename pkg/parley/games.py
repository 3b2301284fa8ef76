"""Base games played after communication ends.

Alice (the action taker) and Bob each privately know their own type, drawn
independently from commonly known priors. After communication Alice picks
an action from a finite set to maximize her expected utility under her
belief about Bob's type; ties are broken by an explicit preference order
stored in the game.
"""

from collections import OrderedDict
import numpy as np
from parley.beliefs import Belief
from parley.errors import DistributionError
from parley.utils import as_rational, ZERO, ONE


class Game(object):
    """Finite two-agent Bayesian game with a single action taker.

    Utilities are stored as object arrays indexed `[type_a, type_b, action]`
    for both agents, so Bob's utility `u_B(θ_B, θ_A, r)` is looked up as
    `utility_b[θ_A, θ_B, r]` internally.
    """

    def __init__(self, types_a, types_b, prior_a, prior_b, actions,
                 utility_a, utility_b, tie_break=None):
        """
        Args:
            types_a (Sequence[str]): Alice's type labels.
            types_b (Sequence[str]): Bob's type labels.
            prior_a (Union[Belief, Sequence[Rational], Dict[str, Rational]]):
                Prior over Alice's types.
            prior_b (Union[Belief, Sequence[Rational], Dict[str, Rational]]):
                Prior over Bob's types.
            actions (Sequence[str]): Alice's action labels.
            utility_a (Union[Callable, Dict]): Alice's utility as a function
                or mapping of `(type_a, type_b, action)`.
            utility_b (Union[Callable, Dict]): Bob's utility as a function or
                mapping of `(type_b, type_a, action)`.
            tie_break (Sequence[str]): Optional preference order over all
                actions used to resolve ties; defaults to `actions` order.
        """
        self.types_a = tuple(types_a)
        self.types_b = tuple(types_b)
        self.actions = tuple(actions)
        for name, labels in (('Alice types', self.types_a),
                             ('Bob types', self.types_b),
                             ('actions', self.actions)):
            if len(labels) == 0:
                raise ValueError(f'Game needs at least one of {name}.')
            if len(set(labels)) != len(labels):
                raise ValueError(f'Duplicate labels in {name}.')
        self.prior_a = _as_belief(self.types_a, prior_a)
        self.prior_b = _as_belief(self.types_b, prior_b)
        self.tie_break = (
            self.actions if tie_break is None else tuple(tie_break))
        if sorted(self.tie_break) != sorted(self.actions):
            raise ValueError(
                f'Tie break order {self.tie_break} is not a permutation of '
                f'actions {self.actions}.')
        self._rank = {r: i for i, r in enumerate(self.tie_break)}
        shape = (len(self.types_a), len(self.types_b), len(self.actions))
        self.utility_a = np.empty(shape, dtype=object)
        self.utility_b = np.empty(shape, dtype=object)
        lookup_a = _as_lookup(utility_a, 'Alice utility')
        lookup_b = _as_lookup(utility_b, 'Bob utility')
        for i, x in enumerate(self.types_a):
            for j, y in enumerate(self.types_b):
                for k, r in enumerate(self.actions):
                    self.utility_a[i, j, k] = as_rational(lookup_a(x, y, r))
                    self.utility_b[i, j, k] = as_rational(lookup_b(y, x, r))
        self.utility_a.flags.writeable = False
        self.utility_b.flags.writeable = False

    def u_a(self, type_a, type_b, action):
        """Alice's utility `u_A(θ_A, θ_B, r)`."""
        return self.utility_a[self.type_a_index(type_a),
                              self.types_b.index(type_b),
                              self.actions.index(action)]

    def u_b(self, type_b, type_a, action):
        """Bob's utility `u_B(θ_B, θ_A, r)`."""
        return self.utility_b[self.type_a_index(type_a),
                              self.types_b.index(type_b),
                              self.actions.index(action)]

    def type_a_index(self, type_a):
        try:
            return self.types_a.index(type_a)
        except ValueError:
            raise KeyError(f'Unknown Alice type {type_a!r}.')

    def type_b_index(self, type_b):
        try:
            return self.types_b.index(type_b)
        except ValueError:
            raise KeyError(f'Unknown Bob type {type_b!r}.')

    def action_index(self, action):
        try:
            return self.actions.index(action)
        except ValueError:
            raise KeyError(f'Unknown action {action!r}.')

    def preferred(self, candidates):
        """Most preferred action among `candidates` by the tie-break order."""
        return min(candidates, key=self._rank.__getitem__)

    def expected_utilities_a(self, type_a, belief_b):
        """Alice's expected utility of each action under a belief.

        Returns:
            array: Object array with one expected utility per action.
        """
        weights = _weights_over(self.types_b, belief_b)
        return weights @ self.utility_a[self.type_a_index(type_a)]

    def __eq__(self, other):
        if not isinstance(other, Game):
            return NotImplemented
        return (self.types_a == other.types_a and
                self.types_b == other.types_b and
                self.actions == other.actions and
                self.prior_a == other.prior_a and
                self.prior_b == other.prior_b and
                self.tie_break == other.tie_break and
                bool((self.utility_a == other.utility_a).all()) and
                bool((self.utility_b == other.utility_b).all()))

    def __repr__(self):
        return (f'Game(types_a={self.types_a}, types_b={self.types_b}, '
                f'actions={self.actions})')


def _as_belief(labels, prior):
    if isinstance(prior, Belief):
        if prior.labels != labels:
            raise DistributionError(
                f'Prior labels {prior.labels} do not match types {labels}.')
        return prior
    if isinstance(prior, dict):
        return Belief.from_mapping(labels, prior)
    return Belief(labels, prior)


def _as_lookup(utility, name):
    if callable(utility):
        return utility

    def lookup(*key):
        try:
            return utility[key]
        except KeyError:
            raise KeyError(f'{name} table has no entry for {key}.')

    return lookup


def _weights_over(labels, belief):
    if isinstance(belief, Belief):
        if belief.labels != labels:
            raise DistributionError(
                f'Belief labels {belief.labels} do not match {labels}.')
        return belief.array
    return np.array([as_rational(w) for w in belief], dtype=object)


def best_response(game, type_a, belief_b):
    """Alice's optimal action given her type and belief about Bob's type.

    Args:
        game (Game): Base game.
        type_a (str): Alice's type.
        belief_b (Union[Belief, Sequence[Rational]]): Alice's belief over
            Bob's types.

    Returns:
        str: Expected utility maximizing action; ties are resolved by
        `game.tie_break`.

    Raises:
        `KeyError` if `type_a` is not one of the game's Alice types.
    """
    values = game.expected_utilities_a(type_a, belief_b)
    best = max(values)
    return game.preferred(
        [r for r, v in zip(game.actions, values) if v == best])


def no_comm_profile(game):
    """Alice's best actions without communication, keyed by her type."""
    return OrderedDict(
        (x, best_response(game, x, game.prior_b)) for x in game.types_a)


def from_stackelberg(payoff_a, payoff_b, actions_a, actions_b, types_a,
                     types_b, prior_a, prior_b, bob_tie_break=None,
                     tie_break=None):
    """Reduce a two-player Stackelberg game to a single action-taker game.

    Alice leads with an action `r_A` and Bob best replies with `r_B`; the
    reduced game's utilities are evaluated at Bob's best reply.

    Args:
        payoff_a (Union[Callable, Dict]): `G_A(r_A, r_B, θ_A)`.
        payoff_b (Union[Callable, Dict]): `G_B(r_A, r_B, θ_B)`.
        actions_a (Sequence[str]): Alice's (leader's) actions.
        actions_b (Sequence[str]): Bob's (follower's) actions.
        types_a (Sequence[str]): Alice's types.
        types_b (Sequence[str]): Bob's types.
        prior_a: Prior over Alice's types.
        prior_b: Prior over Bob's types.
        bob_tie_break (Sequence[str]): Bob's preference order over his
            actions for ties; defaults to `actions_b` order.
        tie_break (Sequence[str]): Alice's tie-break order in the reduced
            game.

    Returns:
        Game: Game with `u_A(θ_A, θ_B, r) = G_A(r, r_B(r, θ_B), θ_A)` and
        `u_B(θ_B, θ_A, r) = G_B(r, r_B(r, θ_B), θ_B)`.
    """
    g_a = _as_lookup(payoff_a, 'leader payoff')
    g_b = _as_lookup(payoff_b, 'follower payoff')
    order = tuple(actions_b) if bob_tie_break is None else tuple(bob_tie_break)
    rank = {r: i for i, r in enumerate(order)}

    def reply(r_a, type_b):
        values = {r_b: as_rational(g_b(r_a, r_b, type_b)) for r_b in actions_b}
        best = max(values.values())
        return min((r_b for r_b, v in values.items() if v == best),
                   key=rank.__getitem__)

    return Game(
        types_a, types_b, prior_a, prior_b, actions_a,
        lambda x, y, r: g_a(r, reply(r, y), x),
        lambda y, x, r: g_b(r, reply(r, y), y),
        tie_break=tie_break)


def builtin_employer_candidate():
    """Employer (Alice) deciding whether to hire a candidate (Bob).

    Each agent is either a programmer (`Prog`) or a communicator (`Comm`).
    The candidate only wants to be hired; ties are broken in favour of
    hiring, which is more favourable for the candidate.
    """
    hire_value = {
        ('Prog', 'Prog'): 10, ('Prog', 'Comm'): -10,
        ('Comm', 'Prog'): -1, ('Comm', 'Comm'): 1,
    }

    def utility_a(x, y, r):
        return hire_value[x, y] if r == 'hire' else 0

    def utility_b(y, x, r):
        return 2 if r == 'hire' else 0

    return Game(
        ('Prog', 'Comm'), ('Prog', 'Comm'),
        (ONE / 2, ONE / 2), (as_rational('3/5'), as_rational('2/5')),
        ('hire', 'not hire'), utility_a, utility_b,
        tie_break=('hire', 'not hire'))


def value_label(value):
    """Type or price label of a grid value, e.g. `'1/2'`."""
    value = as_rational(value)
    return str(value.numerator) if value.denominator == 1 else str(value)


def builtin_bilateral_trade(grid_a, grid_b, prior_a=None, prior_b=None):
    """Bilateral trade where Alice posts a take-it-or-leave-it price.

    Alice (seller) values the item at `θ_A` and Bob (buyer) at `θ_B`; Bob
    accepts a price `r` iff `r ≤ θ_B`. Prices range over the union of both
    value grids. Ties between prices are broken towards lower prices.

    Args:
        grid_a (Sequence[Rational]): Alice's possible values in [0, 1].
        grid_b (Sequence[Rational]): Bob's possible values in [0, 1].
        prior_a (Sequence[Rational]): Optional prior over `grid_a`;
            defaults to uniform.
        prior_b (Sequence[Rational]): Optional prior over `grid_b`;
            defaults to uniform.

    Returns:
        Game: Game with labels formatted by `value_label`.
    """
    grid_a = [as_rational(v) for v in grid_a]
    grid_b = [as_rational(v) for v in grid_b]
    for value in grid_a + grid_b:
        if not ZERO <= value <= ONE:
            raise ValueError(f'Value {value} outside [0, 1].')
    if not grid_a or not grid_b:
        raise ValueError('Value grids must be nonempty.')
    prices = sorted(set(grid_a) | set(grid_b))
    values_a = {value_label(v): v for v in grid_a}
    values_b = {value_label(v): v for v in grid_b}
    price_values = {value_label(p): p for p in prices}
    if prior_a is None:
        prior_a = [ONE / len(grid_a)] * len(grid_a)
    if prior_b is None:
        prior_b = [ONE / len(grid_b)] * len(grid_b)

    def utility_a(x, y, r):
        price = price_values[r]
        return price - values_a[x] if price <= values_b[y] else ZERO

    def utility_b(y, x, r):
        price = price_values[r]
        return values_b[y] - price if price <= values_b[y] else ZERO

    labels = list(price_values)
    return Game(
        list(values_a), list(values_b), prior_a, prior_b, labels,
        utility_a, utility_b, tie_break=labels)


def single_action_game(types_a, types_b, prior_a, prior_b, utility_a,
                       utility_b, action='act'):
    """Game in which Alice has a single action, so information is moot."""
    return Game(types_a, types_b, prior_a, prior_b, (action,),
                lambda x, y, r: utility_a(x, y),
                lambda y, x, r: utility_b(y, x))
