"""JSON documents for games, protocols, distributions and witnesses.

Every document is a JSON object with top level `schema` and `version`
fields. All numbers are canonical `"p/q"` strings so no precision is lost,
and documents are written with sorted keys so loading and saving is an
identity on canonical files. Type, action and signal orders are carried by
explicit lists; mappings keyed by labels are looked up, never iterated for
order.
"""

import json
from pathlib import Path
from typing import Annotated, Dict, List, Literal, Optional, Union
from pydantic import (
    AfterValidator, BaseModel, ConfigDict, Field, TypeAdapter,
    ValidationError)
from parley.beliefs import Atom, Belief, JointPosteriorDistribution
from parley.conversations import (
    ConversationProtocol, Round, history_label, parse_history)
from parley.errors import DocumentError, ParleyError
from parley.feasibility import SplitNode, SplitWitness
from parley.games import Game
from parley.mediators import MediatorProtocol
from parley.rationality import objective_array
from parley.utils import format_matrix, format_rational, rational_parse

DOCUMENT_VERSION = 1


def _canonical_rational(text):
    return format_rational(rational_parse(text))


RationalStr = Annotated[str, AfterValidator(_canonical_rational)]
"""String holding an exact rational, canonicalized to `p/q` on load."""

RationalMap = Dict[str, RationalStr]


class _Model(BaseModel):
    model_config = ConfigDict(extra='forbid', populate_by_name=True)


class GameDocument(_Model):
    """Base game; utilities of both agents are keyed `[θ_A][θ_B][r]`."""

    schema_name: Literal['parley.game'] = Field('parley.game', alias='schema')
    version: Literal[1] = DOCUMENT_VERSION
    types_a: List[str]
    types_b: List[str]
    prior_a: RationalMap
    prior_b: RationalMap
    actions: List[str]
    tie_break: List[str]
    utility_a: Dict[str, Dict[str, RationalMap]]
    utility_b: Dict[str, Dict[str, RationalMap]]


class MediatorDocument(_Model):
    """Mediator protocol with kernel keyed `[θ_A][θ_B][s]`."""

    schema_name: Literal['parley.mediator'] = Field(
        'parley.mediator', alias='schema')
    version: Literal[1] = DOCUMENT_VERSION
    types_a: List[str]
    types_b: List[str]
    signals: List[str]
    kernel: Dict[str, Dict[str, RationalMap]]


class RoundModel(_Model):
    alice_signals: List[str]
    bob_signals: List[str]


class ConversationDocument(_Model):
    """Conversation with kernels keyed `[history label][type][signal]`,
    the empty label denoting the empty history."""

    schema_name: Literal['parley.conversation'] = Field(
        'parley.conversation', alias='schema')
    version: Literal[1] = DOCUMENT_VERSION
    types_a: List[str]
    types_b: List[str]
    rounds: List[RoundModel]
    alice_kernels: List[Dict[str, Dict[str, RationalMap]]]
    bob_kernels: List[Dict[str, Dict[str, RationalMap]]]


class AtomModel(_Model):
    type_a: str
    type_b: str
    belief_b: RationalMap
    belief_a: RationalMap
    prob: RationalStr


class DistributionDocument(_Model):
    """Joint posterior distribution as a list of atoms."""

    schema_name: Literal['parley.distribution'] = Field(
        'parley.distribution', alias='schema')
    version: Literal[1] = DOCUMENT_VERSION
    types_a: List[str]
    types_b: List[str]
    atoms: List[AtomModel]


class PointModel(_Model):
    belief_b: RationalMap
    belief_a: RationalMap


class SplitChildModel(_Model):
    weight: RationalStr
    node: 'SplitNodeModel'


class SplitNodeModel(_Model):
    belief_b: RationalMap
    belief_a: RationalMap
    z: List[RationalStr]
    kind: Optional[Literal['A', 'B']] = None
    children: List[SplitChildModel] = []


SplitChildModel.model_rebuild()


class WitnessDocument(_Model):
    """Split witness: support points and the recursive decomposition tree."""

    schema_name: Literal['parley.witness'] = Field(
        'parley.witness', alias='schema')
    version: Literal[1] = DOCUMENT_VERSION
    types_a: List[str]
    types_b: List[str]
    support: List[PointModel]
    root: SplitNodeModel


class ObjectiveDocument(_Model):
    """Design objective `u(θ_A, θ_B, r)` keyed `[θ_A][θ_B][r]`."""

    schema_name: Literal['parley.objective'] = Field(
        'parley.objective', alias='schema')
    version: Literal[1] = DOCUMENT_VERSION
    values: Dict[str, Dict[str, RationalMap]]


AnyDocument = Annotated[
    Union[GameDocument, MediatorDocument, ConversationDocument,
          DistributionDocument, WitnessDocument, ObjectiveDocument],
    Field(discriminator='schema_name')]

_ADAPTER = TypeAdapter(AnyDocument)


def _belief(labels, mapping, name):
    try:
        return Belief.from_mapping(labels, mapping)
    except ParleyError as e:
        raise DocumentError(f'Invalid {name}: {e}')


def _nested(outer, inner, lookup):
    return {a: {b: lookup(a, b) for b in inner} for a in outer}


def _rationals(row):
    return {key: format_rational(value) for key, value in row.items()}


def game_to_document(game):
    return GameDocument(
        types_a=list(game.types_a), types_b=list(game.types_b),
        prior_a=dict(game.prior_a.to_mapping()),
        prior_b=dict(game.prior_b.to_mapping()),
        actions=list(game.actions), tie_break=list(game.tie_break),
        utility_a=_nested(game.types_a, game.types_b, lambda x, y: {
            r: format_rational(game.u_a(x, y, r)) for r in game.actions}),
        utility_b=_nested(game.types_a, game.types_b, lambda x, y: {
            r: format_rational(game.u_b(y, x, r)) for r in game.actions}))


def _table_lookup(table, name):
    def lookup(*key):
        try:
            return table[key[0]][key[1]][key[2]]
        except KeyError:
            raise DocumentError(f'{name} has no entry for {key}.')
    return lookup


def document_to_game(doc):
    u_a = _table_lookup(doc.utility_a, 'utility_a')
    u_b = _table_lookup(doc.utility_b, 'utility_b')
    return Game(
        doc.types_a, doc.types_b,
        _belief(doc.types_a, doc.prior_a, 'prior_a'),
        _belief(doc.types_b, doc.prior_b, 'prior_b'),
        doc.actions, lambda x, y, r: u_a(x, y, r),
        lambda y, x, r: u_b(x, y, r), tie_break=doc.tie_break)


def mediator_to_document(mediator):
    return MediatorDocument(
        types_a=list(mediator.types_a), types_b=list(mediator.types_b),
        signals=list(mediator.signals),
        kernel=_nested(mediator.types_a, mediator.types_b,
                       lambda x, y: _rationals(mediator.kernel[x, y])))


def document_to_mediator(doc):
    kernel = {}
    for x in doc.types_a:
        for y in doc.types_b:
            try:
                kernel[x, y] = doc.kernel[x][y]
            except KeyError:
                raise DocumentError(f'Kernel has no row for ({x}, {y}).')
    return MediatorProtocol(doc.types_a, doc.types_b, doc.signals, kernel)


def _kernels_to_model(kernels):
    return [
        {history_label(history): {t: _rationals(row) for t, row in rows.items()}
         for history, rows in round_kernels.items()}
        for round_kernels in kernels]


def _model_to_kernels(kernels):
    return [
        {parse_history(label): rows for label, rows in round_kernels.items()}
        for round_kernels in kernels]


def conversation_to_document(conversation):
    return ConversationDocument(
        types_a=list(conversation.types_a),
        types_b=list(conversation.types_b),
        rounds=[RoundModel(alice_signals=list(r.alice_signals),
                           bob_signals=list(r.bob_signals))
                for r in conversation.rounds],
        alice_kernels=_kernels_to_model(conversation.alice_kernels),
        bob_kernels=_kernels_to_model(conversation.bob_kernels))


def document_to_conversation(doc):
    return ConversationProtocol(
        doc.types_a, doc.types_b,
        [Round(r.alice_signals, r.bob_signals) for r in doc.rounds],
        _model_to_kernels(doc.alice_kernels),
        _model_to_kernels(doc.bob_kernels))


def distribution_to_document(dist):
    return DistributionDocument(
        types_a=list(dist.labels_a), types_b=list(dist.labels_b),
        atoms=[AtomModel(
            type_a=atom.type_a, type_b=atom.type_b,
            belief_b=dict(atom.belief_b.to_mapping()),
            belief_a=dict(atom.belief_a.to_mapping()),
            prob=format_rational(atom.prob)) for atom in dist])


def document_to_distribution(doc):
    return JointPosteriorDistribution(doc.types_a, doc.types_b, [
        Atom(atom.type_a, atom.type_b,
             _belief(doc.types_b, atom.belief_b, 'belief_b'),
             _belief(doc.types_a, atom.belief_a, 'belief_a'),
             rational_parse(atom.prob))
        for atom in doc.atoms])


def _node_to_model(node):
    return SplitNodeModel(
        belief_b=dict(node.belief_b.to_mapping()),
        belief_a=dict(node.belief_a.to_mapping()),
        z=[format_rational(z) for z in node.z], kind=node.kind,
        children=[SplitChildModel(weight=format_rational(w),
                                  node=_node_to_model(child))
                  for w, child in node.children])


def _model_to_node(model, types_a, types_b):
    return SplitNode(
        _belief(types_b, model.belief_b, 'belief_b'),
        _belief(types_a, model.belief_a, 'belief_a'),
        tuple(rational_parse(z) for z in model.z), model.kind,
        [(rational_parse(child.weight),
          _model_to_node(child.node, types_a, types_b))
         for child in model.children])


def witness_to_document(witness):
    belief_b, belief_a = witness.support[0] if witness.support else (
        witness.root.belief_b, witness.root.belief_a)
    return WitnessDocument(
        types_a=list(belief_a.labels), types_b=list(belief_b.labels),
        support=[PointModel(belief_b=dict(b.to_mapping()),
                            belief_a=dict(a.to_mapping()))
                 for b, a in witness.support],
        root=_node_to_model(witness.root))


def document_to_witness(doc):
    support = tuple(
        (_belief(doc.types_b, p.belief_b, 'belief_b'),
         _belief(doc.types_a, p.belief_a, 'belief_a'))
        for p in doc.support)
    return SplitWitness(
        support, _model_to_node(doc.root, doc.types_a, doc.types_b))


def objective_to_document(game, objective):
    array = objective_array(game, objective)
    return ObjectiveDocument(values=_nested(
        game.types_a, game.types_b, lambda x, y: {
            r: format_rational(array[game.type_a_index(x),
                                     game.type_b_index(y), k])
            for k, r in enumerate(game.actions)}))


def document_to_objective(doc, game):
    """Objective array of a document, checked against a game's labels.

    Raises:
        `parley.errors.DocumentError` if an entry for some
        `(type_a, type_b, action)` of the game is missing.
    """
    lookup = _table_lookup(doc.values, 'values')
    return objective_array(
        game, lambda x, y, r: rational_parse(lookup(x, y, r)))


_CONVERTERS = [
    (Game, GameDocument, game_to_document, document_to_game),
    (MediatorProtocol, MediatorDocument, mediator_to_document,
     document_to_mediator),
    (ConversationProtocol, ConversationDocument, conversation_to_document,
     document_to_conversation),
    (JointPosteriorDistribution, DistributionDocument,
     distribution_to_document, document_to_distribution),
    (SplitWitness, WitnessDocument, witness_to_document, document_to_witness),
]


def to_document(obj):
    """Document model of a game, protocol, distribution or witness."""
    for cls, _, encode, _ in _CONVERTERS:
        if isinstance(obj, cls):
            return encode(obj)
    raise TypeError(f'No document type for {type(obj)}.')


def from_document(doc):
    """In-memory object described by a document model.

    Raises:
        `parley.errors.DocumentError` if the document is inconsistent, for
        example with kernel rows not summing to one.
    """
    if isinstance(doc, ObjectiveDocument):
        raise DocumentError(
            'Objective documents are read against a game; use '
            'document_to_objective.')
    for _, model, _, decode in _CONVERTERS:
        if isinstance(doc, model):
            try:
                return decode(doc)
            except DocumentError:
                raise
            except (ParleyError, KeyError, ValueError) as e:
                raise DocumentError(
                    f'Invalid {doc.schema_name} document: {e}')
    raise TypeError(f'Unknown document model {type(doc)}.')


def dumps(obj):
    """Canonical JSON text of an object or document model."""
    doc = obj if isinstance(obj, BaseModel) else to_document(obj)
    return json.dumps(doc.model_dump(by_alias=True), sort_keys=True,
                      indent=2, ensure_ascii=False) + '\n'


def parse_document(text):
    """Parse and validate JSON text into a document model.

    Raises:
        `parley.errors.DocumentError` on malformed JSON, unknown schemas or
        validation failures.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise DocumentError(f'Malformed JSON: {e}')
    try:
        return _ADAPTER.validate_python(data)
    except ValidationError as e:
        raise DocumentError(f'Invalid document: {e}')


def loads(text):
    """Object described by JSON document text."""
    return from_document(parse_document(text))


def load(path):
    """Object described by the JSON document at `path`."""
    try:
        text = Path(path).read_text(encoding='utf-8')
    except OSError as e:
        raise DocumentError(f'Cannot read {path}: {e}')
    return loads(text)


def save(obj, path):
    Path(path).write_text(dumps(obj), encoding='utf-8')


def ir_report_to_dict(report):
    """JSON-ready summary of an `IRReport`."""
    return {
        'notion': report.notion.value,
        'agent': report.agent,
        'passed': report.passed,
        'baseline': dict(report.baseline),
        'comparisons': [
            {'context': c.context, 'type': c.type_label,
             'lhs': format_rational(c.lhs), 'rhs': format_rational(c.rhs),
             'holds': c.holds}
            for c in report.comparisons],
    }


def verdict_to_dict(verdict):
    """JSON-ready summary of a `FeasibilityVerdict`."""
    result = {'status': verdict.status.value, 'detail': verdict.detail}
    if verdict.condition is not None:
        result['condition'] = verdict.condition
    if isinstance(verdict.certificate, list):
        result['certificate'] = [
            {'belief_b': dict(b.to_mapping()), 'belief_a': dict(a.to_mapping())}
            for b, a in verdict.certificate]
    elif verdict.certificate is not None:
        result['certificate'] = format_matrix(verdict.certificate.matrix)
    if verdict.family is not None:
        result['family'] = [
            {'prob': format_rational(p), 'posterior': format_matrix(q.matrix)}
            for p, q in verdict.family]
    if verdict.witness is not None:
        result['witness_nodes'] = verdict.witness.n_nodes()
    return result


def scheme_to_dict(scheme):
    """JSON-ready `{type_a: {action: {type_b: "p/q"}}}` of a scheme."""
    return {
        x: {r: {y: format_rational(scheme.prob(x, r, y))
                for y in scheme.types_b} for r in scheme.actions}
        for x in scheme.types_a}
