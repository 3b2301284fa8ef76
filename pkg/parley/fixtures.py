"""Bundled example games, protocols, distributions and witnesses.

Each fixture is available both from a builder function and as a JSON
document under `parley/data`, addressable by name from the command line.
"""

from importlib import resources
from parley.beliefs import Atom, Belief, JointPosteriorDistribution
from parley.conversations import ConversationProtocol, Round
from parley.feasibility import SplitNode, SplitWitness
from parley.games import builtin_bilateral_trade, builtin_employer_candidate
from parley.mediators import MediatorProtocol
from parley.utils import as_rational, ZERO, ONE

HL = ('H', 'L')


def _q(*weights):
    return tuple(as_rational(w) for w in weights)


def employer_game():
    """Employer and candidate game with programmer and communicator types."""
    return builtin_employer_candidate()


def employer_signal_mediator():
    """Two-signal mediator attaining the highest welfare in the employer
    game: a programmer employer hires exactly when told `s2`, a
    communicator employer exactly when told `s1`."""
    kernel = {
        ('Prog', 'Prog'): {'s2': ONE},
        ('Prog', 'Comm'): {'s1': ONE},
        ('Comm', 'Prog'): {'s1': as_rational('2/3'), 's2': as_rational('1/3')},
        ('Comm', 'Comm'): {'s1': ONE},
    }
    return MediatorProtocol(
        ('Prog', 'Comm'), ('Prog', 'Comm'), ('s1', 's2'), kernel)


def employer_one_round_conversation():
    """Employer reveals her type and the candidate recommends an action.

    Equivalent to `employer_signal_mediator` for committed agents, but a
    communicator candidate hearing that the employer is a programmer is
    better off stopping the conversation.
    """
    return ConversationProtocol(
        ('Prog', 'Comm'), ('Prog', 'Comm'),
        [Round(('Prog', 'Comm'), ('hire', 'not hire'))],
        [{(): {'Prog': {'Prog': ONE}, 'Comm': {'Comm': ONE}}}],
        [{('Prog',): {'Prog': {'hire': ONE}, 'Comm': {'not hire': ONE}},
          ('Comm',): {'Prog': {'hire': as_rational('2/3'),
                               'not hire': as_rational('1/3')},
                      'Comm': {'hire': ONE}}}])


def two_way_conversation():
    """Two-round conversation in which both agents reveal information.

    Alice signals `down` or `up`, Bob replies `left` or `right`, and after
    `up`, `right` Alice announces her type; the remaining moves are silent.
    """
    third, two_thirds = as_rational('1/3'), as_rational('2/3')
    quarter, three_quarters = as_rational('1/4'), as_rational('3/4')
    round_two = [('down', 'left'), ('down', 'right'), ('up', 'left')]
    alice_two = {h: {x: {'stay': ONE} for x in HL} for h in round_two}
    alice_two['up', 'right'] = {'H': {'H': ONE}, 'L': {'L': ONE}}
    bob_two = {h + ('stay',): {y: {'skip': ONE} for y in HL}
               for h in round_two}
    for x in HL:
        bob_two['up', 'right', x] = {y: {'skip': ONE} for y in HL}
    return ConversationProtocol(
        HL, HL,
        [Round(('down', 'up'), ('left', 'right')),
         Round(('H', 'L', 'stay'), ('skip',))],
        [{(): {'H': {'down': quarter, 'up': three_quarters},
               'L': {'down': three_quarters, 'up': quarter}}},
         alice_two],
        [{('down',): {'H': {'right': ONE},
                      'L': {'left': two_thirds, 'right': third}},
          ('up',): {'H': {'left': as_rational('2/5'),
                          'right': as_rational('3/5')},
                    'L': {'left': as_rational('14/15'),
                          'right': as_rational('1/15')}}},
         bob_two])


def uniform_priors():
    return Belief.uniform(HL), Belief.uniform(HL)


def _atoms(points):
    atoms = []
    for (q_b, q_a), masses in points:
        for (x, y), prob in masses.items():
            atoms.append(Atom(x, y, Belief(HL, q_b), Belief(HL, q_a),
                              as_rational(prob)))
    return JointPosteriorDistribution(HL, HL, atoms)


def split_distribution():
    """Four-point distribution reachable by a two-round conversation."""
    return _atoms([
        ((_q('1/4', '3/4'), _q(0, 1)),
         {('L', 'H'): '13/192', ('L', 'L'): '13/64'}),
        ((_q('1/4', '3/4'), _q(1, 0)),
         {('H', 'H'): '5/64', ('H', 'L'): '15/64'}),
        ((_q(1, 0), _q('3/4', '1/4')),
         {('H', 'H'): '1/8', ('L', 'H'): '1/24'}),
        ((_q('3/4', '1/4'), _q('1/4', '3/4')),
         {('H', 'H'): '3/64', ('H', 'L'): '1/64', ('L', 'H'): '9/64',
          ('L', 'L'): '3/64'}),
    ])


def split_witness():
    """Split witness of `split_distribution` fitting in two rounds.

    The root splits Alice's belief evenly; each half then splits Bob's
    belief, and one branch of each splits Alice's belief once more.
    """
    support = tuple(
        (Belief(HL, b), Belief(HL, a)) for b, a in [
            (_q('1/4', '3/4'), _q(0, 1)), (_q('1/4', '3/4'), _q(1, 0)),
            (_q('3/4', '1/4'), _q('1/4', '3/4')),
            (_q(1, 0), _q('3/4', '1/4'))])

    def leaf(k):
        belief_b, belief_a = support[k]
        return SplitNode(belief_b, belief_a,
                         tuple(ONE if i == k else ZERO for i in range(4)))

    def node(q_b, q_a, z, kind, children):
        return SplitNode(Belief(HL, q_b), Belief(HL, q_a), _q(*z), kind,
                         [(as_rational(w), c) for w, c in children])

    upper = node(('1/4', '3/4'), ('3/4', '1/4'), ('1/4', '3/4', 0, 0), 'A',
                 [('1/4', leaf(0)), ('3/4', leaf(1))])
    lower = node(('1/4', '3/4'), ('1/4', '3/4'), ('3/4', '1/4', 0, 0), 'A',
                 [('3/4', leaf(0)), ('1/4', leaf(1))])
    high = node(('1/2', '1/2'), ('3/4', '1/4'), ('1/6', '1/2', 0, '1/3'), 'B',
                [('2/3', upper), ('1/3', leaf(3))])
    low = node(('1/2', '1/2'), ('1/4', '3/4'), ('3/8', '1/8', '1/2', 0), 'B',
               [('1/2', lower), ('1/2', leaf(2))])
    root = node(('1/2', '1/2'), ('1/2', '1/2'),
                ('13/48', '5/16', '1/4', '1/6'), 'A',
                [('1/2', high), ('1/2', low)])
    return SplitWitness(support, root)


def impossible_distribution():
    """Two-point distribution whose type marginal is not a product."""
    return _atoms([
        ((_q('3/4', '1/4'), _q('3/4', '1/4')),
         {('H', 'H'): '9/32', ('H', 'L'): '3/32', ('L', 'H'): '3/32',
          ('L', 'L'): '1/32'}),
        ((_q('1/4', '3/4'), _q('1/4', '3/4')),
         {('H', 'H'): '1/32', ('H', 'L'): '3/32', ('L', 'H'): '3/32',
          ('L', 'L'): '9/32'}),
    ])


def mediator_only_distribution():
    """Distribution induced by the employer signal mediator (types relabelled
    `H`, `L`) which no conversation induces."""
    return _atoms([
        ((_q(0, 1), _q('1/2', '1/2')), {('H', 'L'): '1/5'}),
        ((_q('1/2', '1/2'), _q(0, 1)), {('L', 'H'): '1/5'}),
        ((_q('1/2', '1/2'), _q('1/2', '1/2')), {('L', 'L'): '1/5'}),
        ((_q(1, 0), _q('3/4', '1/4')),
         {('H', 'H'): '3/10', ('L', 'H'): '1/10'}),
    ])


def bilateral_trade_game():
    """Bilateral trade with values and prices on `{0, 1/2, 1}`."""
    grid = [0, as_rational('1/2'), 1]
    return builtin_bilateral_trade(grid, grid)


FIXTURES = {
    'employer': employer_game,
    'employer-signal': employer_signal_mediator,
    'employer-one-round': employer_one_round_conversation,
    'two-way': two_way_conversation,
    'split-distribution': split_distribution,
    'split-witness': split_witness,
    'impossible-distribution': impossible_distribution,
    'mediator-only-distribution': mediator_only_distribution,
    'bilateral-trade': bilateral_trade_game,
}


def fixture_path(name):
    """Path of the JSON document of a bundled fixture."""
    if name not in FIXTURES:
        raise KeyError(
            f'Unknown fixture {name!r}; available: {sorted(FIXTURES)}.')
    return resources.files('parley') / 'data' / f'{name}.json'


def load_fixture(name):
    """Load a bundled fixture from its JSON document."""
    from parley.documents import loads
    return loads(fixture_path(name).read_text(encoding='utf-8'))
