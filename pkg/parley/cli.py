"""Command line interface.

Documents are given as paths to JSON files or as names of bundled fixtures
(see `parley.fixtures.FIXTURES`). Reports are printed as text, or as JSON
with the global `--json` flag. The exit status is 0 on success, 1 when a
check fails, 2 on usage or document errors and 3 when a budget is exceeded
or a feasibility verdict is unknown.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from parley import design, documents, export, fixtures, repeated
from parley.beliefs import Belief, JointPosteriorDistribution
from parley.conversations import (
    ConversationProtocol, DEFAULT_TRANSCRIPT_BUDGET, dimartingale_audit,
    history_label, induced_joint_posterior, simulate)
from parley.errors import BudgetExceededError, DocumentError, ParleyError
from parley.feasibility import (
    DEFAULT_WITNESS_BUDGET, FeasibilityStatus, SplitWitness,
    check_mediator_feasibility, check_product_condition, search_witness,
    verify_witness)
from parley.games import Game, no_comm_profile
from parley.mediators import MediatorProtocol, mediator_joint_posterior
from parley.rationality import AUDITS, IRNotion, audit, expected_utilities
from parley.utils import format_rational, rational_parse

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3


class _UsageError(ParleyError, ValueError):
    """Error raised when command line arguments are inconsistent."""


def _load(source, expected, what):
    """Load a document given by path or fixture name and check its kind."""
    path = Path(source)
    if path.is_file():
        obj = documents.load(path)
    elif source in fixtures.FIXTURES:
        obj = fixtures.load_fixture(source)
    else:
        raise DocumentError(
            f'{source!r} is neither a file nor a bundled fixture.')
    if not isinstance(obj, expected):
        raise DocumentError(
            f'{source!r} holds a {type(obj).__name__}, expected a {what}.')
    return obj


def _rationals(text):
    return [rational_parse(item) for item in text.split(',') if item.strip()]


def _prior(text, labels, name):
    try:
        return Belief(labels, _rationals(text))
    except ParleyError as e:
        raise _UsageError(f'Invalid {name}: {e}')


def _priors(args, types_a, types_b, default=None):
    """Priors from `--game`, then `--prior-a` / `--prior-b`, else default.

    `default` is a pair of beliefs used for whichever prior is not given;
    without it unspecified priors are uniform.
    """
    prior_a = prior_b = None
    if args.game is not None:
        game = _load(args.game, Game, 'game')
        prior_a, prior_b = game.prior_a, game.prior_b
    if args.prior_a is not None:
        prior_a = _prior(args.prior_a, types_a, '--prior-a')
    if args.prior_b is not None:
        prior_b = _prior(args.prior_b, types_b, '--prior-b')
    default_a, default_b = default or (
        Belief.uniform(types_a), Belief.uniform(types_b))
    prior_a = default_a if prior_a is None else prior_a
    prior_b = default_b if prior_b is None else prior_b
    if prior_a.labels != tuple(types_a) or prior_b.labels != tuple(types_b):
        raise _UsageError('Prior type labels do not match the document.')
    return prior_a, prior_b


def _emit(args, report, lines):
    if args.json:
        print(json.dumps(report, sort_keys=True, indent=2,
                         ensure_ascii=False))
    else:
        for line in lines:
            print(line)


def _write(path, text):
    Path(path).write_text(text, encoding='utf-8')
    logger.info('Wrote %s.', path)


def _game_validate(args):
    game = _load(args.game_document, Game, 'game')
    profile = no_comm_profile(game)
    report = {
        'valid': True,
        'types_a': list(game.types_a),
        'types_b': list(game.types_b),
        'actions': list(game.actions),
        'no_comm_profile': dict(profile),
    }
    _emit(args, report, [
        f'valid game: {len(game.types_a)} Alice types, '
        f'{len(game.types_b)} Bob types, {len(game.actions)} actions'] + [
        f'  without communication {x} plays {r!r}'
        for x, r in profile.items()])
    return EXIT_OK


def _simulate(args):
    protocol = _load(args.conversation, ConversationProtocol, 'conversation')
    prior_a, prior_b = _priors(args, protocol.types_a, protocol.types_b)
    transcripts = simulate(protocol, prior_a, prior_b, args.budget)
    rows = []
    for transcript in transcripts:
        reach = transcript.reach.normalized()
        rows.append({
            'transcript': history_label(transcript.history),
            'prob': format_rational(transcript.prob),
            'belief_a': dict(reach.marginal_a().to_mapping()),
            'belief_b': dict(reach.marginal_b().to_mapping()),
        })
    _emit(args, {'transcripts': rows}, [
        f'{row["transcript"] or "<root>"}: prob {row["prob"]}, '
        f'q_A {_mapping_text(row["belief_a"])}, '
        f'q_B {_mapping_text(row["belief_b"])}' for row in rows])
    return EXIT_OK


def _mapping_text(mapping):
    return '(' + ', '.join(f'{k}: {v}' for k, v in mapping.items()) + ')'


def _induce(args):
    protocol = _load(
        args.protocol, (MediatorProtocol, ConversationProtocol), 'protocol')
    prior_a, prior_b = _priors(args, protocol.types_a, protocol.types_b)
    if isinstance(protocol, MediatorProtocol):
        dist = mediator_joint_posterior(protocol, prior_a, prior_b)
    else:
        dist = induced_joint_posterior(protocol, prior_a, prior_b, args.budget)
    text = documents.dumps(dist)
    if args.out is not None:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _verdict_exit(status):
    return {
        FeasibilityStatus.FEASIBLE: EXIT_OK,
        FeasibilityStatus.INFEASIBLE: EXIT_FAILED,
        FeasibilityStatus.UNKNOWN: EXIT_BUDGET,
    }[status]


def _feasible(args):
    dist = _load(args.distribution, JointPosteriorDistribution,
                 'distribution')
    marginal = dist.type_marginal()
    prior_a, prior_b = _priors(
        args, dist.labels_a, dist.labels_b,
        (marginal.marginal_a(), marginal.marginal_b()))
    product = check_product_condition(dist)
    if args.witness is not None:
        if args.rounds is None:
            raise _UsageError('--witness requires --rounds.')
        witness = _load(args.witness, SplitWitness, 'witness')
        verified = verify_witness(dist, witness, args.rounds, prior_a,
                                  prior_b)
        _emit(args, {'verified': verified, 'product_condition': product},
              [f'witness {"verified" if verified else "rejected"} for '
               f'{args.rounds} rounds'])
        return EXIT_OK if verified else EXIT_FAILED
    if args.rounds is None:
        verdict = check_mediator_feasibility(dist, prior_a, prior_b)
        scope = 'mediator'
    else:
        grid = None if args.grid is None else _rationals(args.grid)
        verdict = search_witness(
            dist, args.rounds, prior_a, prior_b, args.budget, grid)
        scope = f'{args.rounds}-round conversation'
    report = documents.verdict_to_dict(verdict)
    report['scope'] = scope
    report['product_condition'] = product
    lines = [f'{scope}: {verdict.status.value}',
             f'product condition: {"holds" if product else "fails"}']
    if verdict.condition is not None:
        lines.append(f'violated condition: {verdict.condition}')
    if verdict.detail:
        lines.append(verdict.detail)
    if 'certificate' in report:
        lines.append(f'certificate: {report["certificate"]}')
    if verdict.witness is not None and args.witness_out is not None:
        _write(args.witness_out, documents.dumps(verdict.witness))
        report['witness_out'] = str(args.witness_out)
        lines.append(f'witness written to {args.witness_out}')
    _emit(args, report, lines)
    return _verdict_exit(verdict.status)


def _report_lines(report):
    lines = [f'{report.notion.value} IR for {report.agent}: '
             f'{"pass" if report.passed else "fail"}']
    for c in report.comparisons:
        where = ' '.join(part for part in (c.context, c.type_label) if part)
        lines.append(
            f'  {where or "overall"}: {format_rational(c.lhs)} >= '
            f'{format_rational(c.rhs)} {"ok" if c.holds else "VIOLATED"}')
    return lines


def _ir_check(args):
    game = _load(args.game_document, Game, 'game')
    protocol = _load(
        args.protocol, (MediatorProtocol, ConversationProtocol), 'protocol')
    notions = list(AUDITS) if args.notion == 'all' else [args.notion]
    reports = [audit(game, protocol, notion, args.agent, args.budget)
               for notion in notions]
    lines = [line for report in reports for line in _report_lines(report)]
    _emit(args, {'passed': all(r.passed for r in reports),
                 'reports': [documents.ir_report_to_dict(r)
                             for r in reports]}, lines)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAILED


def _objective(source, game):
    if source in design.OBJECTIVES:
        return design.OBJECTIVES[source](game)
    path = Path(source)
    if not path.is_file():
        raise _UsageError(
            f'Objective {source!r} is neither one of '
            f'{list(design.OBJECTIVES)} nor a file.')
    doc = documents.parse_document(path.read_text(encoding='utf-8'))
    if not isinstance(doc, documents.ObjectiveDocument):
        raise DocumentError(f'{source!r} is not an objective document.')
    return documents.document_to_objective(doc, game)


def _ir_option(value):
    return None if value == 'none' else IRNotion(value)


def _optimize(args):
    game = _load(args.game_document, Game, 'game')
    problem = design.DesignProblem(
        game, _ir_option(args.ir), _objective(args.objective, game))
    value, scheme = design.optimize(problem)
    utility_a, utility_b = (design.scheme_value(scheme, game, game.utility_a),
                            design.scheme_value(scheme, game, game.utility_b))
    report = {
        'value': format_rational(value),
        'ir': args.ir,
        'objective': args.objective,
        'utility_a': format_rational(utility_a),
        'utility_b': format_rational(utility_b),
        'scheme': documents.scheme_to_dict(scheme),
    }
    lines = [f'value: {format_rational(value)}',
             f'E[u_A] = {format_rational(utility_a)}, '
             f'E[u_B] = {format_rational(utility_b)}']
    lines += [f'  x({x}, {r!r}, {y}) = {format_rational(p)}'
              for (x, r, y), p in scheme.items()]
    if args.mediator_out is not None:
        _write(args.mediator_out,
               documents.dumps(design.scheme_to_mediator(scheme, game)))
    if args.conversation_out is not None:
        _write(args.conversation_out, documents.dumps(
            design.scheme_to_one_round_conversation(scheme, game)))
    _emit(args, report, lines)
    return EXIT_OK


def _frontier(args, game):
    return design.pareto_frontier(
        game, _ir_option(args.ir), _rationals(args.weights), args.processes)


def _pareto(args):
    game = _load(args.game_document, Game, 'game')
    points = _frontier(args, game)
    if args.csv is not None:
        _write(args.csv, export.export_frontier_csv(points))
    _emit(args, {'frontier': [
        {'weight': format_rational(p.weight),
         'utility_a': format_rational(p.utility_a),
         'utility_b': format_rational(p.utility_b)} for p in points]}, [
        f'λ = {format_rational(p.weight)}: E[u_A] = '
        f'{format_rational(p.utility_a)}, E[u_B] = '
        f'{format_rational(p.utility_b)}' for p in points])
    return EXIT_OK


def _repeat(args):
    game = _load(args.game_document, Game, 'game')
    protocol = _load(args.conversation, ConversationProtocol, 'conversation')
    spec = repeated.RepeatedSpec(
        game, protocol, rational_parse(args.delta), args.punishment,
        args.horizon)
    try:
        threshold = format_rational(repeated.delta_threshold(
            game, protocol, spec.punishment))
    except ValueError as e:
        logger.info('No discount threshold: %s', e)
        threshold = None
    report = repeated.audit_repeated_ir(spec)
    result = documents.ir_report_to_dict(report)
    result.update({
        'delta': format_rational(spec.delta),
        'punishment': spec.punishment.value,
        'threshold': threshold,
        'committed_value': format_rational(
            repeated.committed_value(game, protocol)),
        'super_value': format_rational(repeated.committed_super_value(spec)),
    })
    lines = [f'discount threshold: {threshold or "none"}',
             f'committed super-value: {result["super_value"]}']
    _emit(args, result, lines + _report_lines(report))
    return EXIT_OK if report.passed else EXIT_FAILED


def _export(args):
    if args.kind == 'frontier-csv':
        game = _load(args.document, Game, 'game')
        text = export.export_frontier_csv(_frontier(args, game))
    else:
        protocol = _load(args.document, ConversationProtocol, 'conversation')
        prior_a, prior_b = _priors(args, protocol.types_a, protocol.types_b)
        trace = dimartingale_audit(protocol, prior_a, prior_b, args.budget)
        if args.kind == 'walk-svg':
            axes = None if args.axes is None else tuple(args.axes.split(','))
            if axes is not None and len(axes) != 2:
                raise _UsageError('--axes takes a Bob type and an Alice type.')
            text = export.export_belief_walk_svg(trace, axes)
        else:
            text = export.export_trace_csv(trace)
    if args.out is not None:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _search(args):
    game = _load(args.game_document, Game, 'game')
    result = design.search_expost_conversation(
        game, _objective(args.objective, game), args.rounds, args.branching,
        args.budget, None if args.grid is None else _rationals(args.grid),
        args.ir)
    utility_a, utility_b = expected_utilities(game, result.protocol)
    if args.out is not None:
        _write(args.out, documents.dumps(result.protocol))
    _emit(args, {
        'value': format_rational(result.value),
        'ir': args.ir,
        'rounds': result.n_rounds,
        'nodes': result.n_nodes,
        'budget_exceeded': result.budget_exceeded,
        'utility_a': format_rational(utility_a),
        'utility_b': format_rational(utility_b),
        'audit': documents.ir_report_to_dict(result.report),
    }, [f'value: {format_rational(result.value)}',
        f'rounds: {result.n_rounds} ({result.n_nodes} tree nodes)'
        f'{", reduced to fit the budget" if result.budget_exceeded else ""}',
        f'E[u_A] = {format_rational(utility_a)}, '
        f'E[u_B] = {format_rational(utility_b)}',
        f'{args.ir} audit: {"pass" if result.report.passed else "fail"}'])
    return EXIT_BUDGET if result.budget_exceeded else EXIT_OK


def _add_prior_options(parser):
    parser.add_argument(
        '--game', help='game whose priors are used (path or fixture name)')
    parser.add_argument(
        '--prior-a', help='comma separated prior over Alice\'s types')
    parser.add_argument(
        '--prior-b', help='comma separated prior over Bob\'s types')


def _add_budget_option(parser, default):
    parser.add_argument(
        '--budget', type=int, default=default,
        help=f'enumeration budget (default: {default})')


def build_parser():
    """Argument parser of the `parley` command."""
    parser = argparse.ArgumentParser(
        prog='parley',
        description='Exact analysis of mediated and unmediated Bayesian '
                    'communication between two agents.')
    parser.add_argument('--json', action='store_true',
                        help='print machine readable JSON reports')
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument('-v', '--verbose', action='store_true',
                           help='log debug messages')
    verbosity.add_argument('-q', '--quiet', action='store_true',
                           help='log warnings and errors only')
    commands = parser.add_subparsers(dest='command', required=True)

    game = commands.add_parser('game', help='game documents')
    game_commands = game.add_subparsers(dest='game_command', required=True)
    validate = game_commands.add_parser('validate', help='validate a game')
    validate.add_argument('game_document')
    validate.set_defaults(handler=_game_validate)

    sim = commands.add_parser(
        'simulate', help='enumerate transcripts of a conversation')
    sim.add_argument('conversation')
    _add_prior_options(sim)
    _add_budget_option(sim, DEFAULT_TRANSCRIPT_BUDGET)
    sim.set_defaults(handler=_simulate)

    induce = commands.add_parser(
        'induce', help='joint posterior distribution of a protocol')
    induce.add_argument('protocol')
    _add_prior_options(induce)
    _add_budget_option(induce, DEFAULT_TRANSCRIPT_BUDGET)
    induce.add_argument('--out', help='distribution document to write')
    induce.set_defaults(handler=_induce)

    feasible = commands.add_parser(
        'feasible', help='decide feasibility of a joint distribution')
    feasible.add_argument('distribution')
    _add_prior_options(feasible)
    feasible.add_argument(
        '--rounds', type=int,
        help='number of conversation rounds; mediator feasibility if absent')
    _add_budget_option(feasible, DEFAULT_WITNESS_BUDGET)
    feasible.add_argument(
        '--grid', help='comma separated extra coordinates for binary types')
    feasible.add_argument('--witness', help='witness to verify')
    feasible.add_argument('--witness-out', help='witness document to write')
    feasible.set_defaults(handler=_feasible)

    ir = commands.add_parser('ir-check', help='audit individual rationality')
    ir.add_argument('game_document')
    ir.add_argument('protocol')
    ir.add_argument('--notion', default='all',
                    choices=['all'] + [n.value for n in IRNotion])
    ir.add_argument('--agent', default='bob', choices=['alice', 'bob'])
    _add_budget_option(ir, DEFAULT_TRANSCRIPT_BUDGET)
    ir.set_defaults(handler=_ir_check)

    optimize = commands.add_parser(
        'optimize', help='optimal mediator under ex-ante or interim IR')
    optimize.add_argument('game_document')
    optimize.add_argument('--ir', default='interim',
                          choices=['none', 'exante', 'interim'])
    optimize.add_argument(
        '--objective', default='welfare',
        help='welfare, alice, bob or an objective document')
    optimize.add_argument('--mediator-out', help='mediator document to write')
    optimize.add_argument(
        '--conversation-out', help='one-round conversation document to write')
    optimize.set_defaults(handler=_optimize)

    frontier_options = argparse.ArgumentParser(add_help=False)
    frontier_options.add_argument('--ir', default='none',
                                  choices=['none', 'exante', 'interim'])
    frontier_options.add_argument(
        '--weights', default='0,1/2,1',
        help='comma separated sorted weights on Alice\'s utility')
    frontier_options.add_argument(
        '--processes', type=int, default=1,
        help='worker processes for the frontier programs')

    pareto = commands.add_parser(
        'pareto', parents=[frontier_options], help='Pareto frontier')
    pareto.add_argument('game_document')
    pareto.add_argument('--csv', help='frontier CSV to write')
    pareto.set_defaults(handler=_pareto)

    repeat = commands.add_parser(
        'repeat', help='audit repeated play of a conversation')
    repeat.add_argument('game_document')
    repeat.add_argument('conversation')
    repeat.add_argument('--delta', required=True, help='discount factor')
    repeat.add_argument('--horizon', type=int, default=2,
                        help='number of audited copies')
    repeat.add_argument('--punishment', default='zero',
                        choices=[p.value for p in repeated.Punishment])
    repeat.set_defaults(handler=_repeat)

    exporter = commands.add_parser(
        'export', parents=[frontier_options],
        help='belief walk SVG or CSV, frontier CSV')
    exporter.add_argument('kind',
                          choices=['walk-svg', 'walk-csv', 'frontier-csv'])
    exporter.add_argument(
        'document', help='conversation, or game for frontier-csv')
    _add_prior_options(exporter)
    _add_budget_option(exporter, DEFAULT_TRANSCRIPT_BUDGET)
    exporter.add_argument(
        '--axes', help='Bob type and Alice type of the walk axes, e.g. H,H')
    exporter.add_argument('--out', help='file to write')
    exporter.set_defaults(handler=_export)

    search = commands.add_parser(
        'search', help='best conversation under ex-post or non-committed IR')
    search.add_argument('game_document')
    search.add_argument('--ir', default='expost',
                        choices=[n.value for n in design.SEARCH_NOTIONS])
    search.add_argument('--objective', default='welfare',
                        help='welfare, alice, bob or an objective document')
    search.add_argument('--rounds', type=int, default=1)
    search.add_argument('--branching', type=int, default=3)
    _add_budget_option(search, design.DEFAULT_SEARCH_BUDGET)
    search.add_argument(
        '--grid', help='comma separated belief coordinates for binary types')
    search.add_argument('--out', help='conversation document to write')
    search.set_defaults(handler=_search)
    return parser


def _configure_logging(args):
    level = (logging.DEBUG if args.verbose else
             logging.WARNING if args.quiet else logging.INFO)
    logging.basicConfig(
        level=level, format='%(levelname)s %(name)s: %(message)s')
    logging.getLogger('parley').setLevel(level)


def run(argv=None):
    """Run the command line interface.

    Args:
        argv (Sequence[str]): Arguments without the program name; defaults
            to `sys.argv[1:]`.

    Returns:
        int: Exit status.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    _configure_logging(args)
    try:
        return args.handler(args)
    except BudgetExceededError as e:
        print(f'error: {e}', file=sys.stderr)
        return EXIT_BUDGET
    except (ParleyError, ValueError, KeyError) as e:
        print(f'error: {e}', file=sys.stderr)
        return EXIT_USAGE


def main():
    sys.exit(run())
