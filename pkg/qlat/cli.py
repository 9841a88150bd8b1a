"""Command-line entry point

Every command writes one JSON document (sorted keys) or a table to stdout.
Exit codes: 0 success, 1 usage or input error, 2 a cap, precision or search
budget was hit, 3 a negative answer (not representable, not isometric, k
not found).
"""
import sys
import json
import argparse

from pathlib import Path
from typing import Any, List, NamedTuple, Optional, Sequence, Tuple

import pandas as pd

from . import heights, padic
from .corpus import corpus_frame, gen_corpus
from .genus import genus_classes, spin_partition
from .lattice import (
    QuadLattice, automorphisms, discriminant, isometric, minkowski_reduce)
from .library import lattice_library, library_names
from .localrep import (
    is_locally_primitively_representable,
    locally_primitively_representable_everywhere)
from .represent import (
    rep_numbers, ratio_experiment, representations, verify_lgp)
from .utils import Caps, QlatError, decode_int, get_caps, to_jsonable

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILURE = 2
EXIT_NEGATIVE = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad arguments; usage errors here exit with 1
    def error(self, message):
        raise UsageError(message)


class RunConfig(NamedTuple):
    command: str
    args: dict
    seed: int = 0
    caps: Caps = Caps()
    mode: str = 'json'
    verbose: bool = False


def _is_file(value: str) -> bool:
    try:
        return Path(value).is_file()
    except OSError:
        return False


def _load_json(value: str) -> Any:
    """Parse a JSON argument given inline or as a path to a file"""
    path = Path(value)
    if path.suffix == '.json' or _is_file(value):
        try:
            with open(path) as f:
                return json.load(f)
        except FileNotFoundError:
            if path.suffix == '.json':
                raise UsageError(f'No such file: {value}')
    return json.loads(value)


def _load_lattice(value: str) -> QuadLattice:
    if not _is_file(value) and value in library_names():
        return lattice_library(value)
    return QuadLattice.from_json(_load_json(value))


def _parse_t_values(value: str) -> List[int]:
    """``a..b`` ranges and comma separated integers"""
    out = []
    for part in value.split(','):
        part = part.strip()
        if not part:
            continue
        if '..' in part:
            a, b = part.split('..', 1)
            out.extend(range(int(a), int(b) + 1))
        else:
            out.append(int(part))
    return out


def _frame_records(df: pd.DataFrame) -> List[dict]:
    return df.to_dict(orient='records')


def _cmd_reduce(args: dict, config: RunConfig):
    L = _load_lattice(args['L'])
    R, U = minkowski_reduce(L, config.caps)
    detE, det_half = discriminant(L)
    return EXIT_OK, {
        'reduced': R, 'U': U, 'detE': detE, 'det_half_gram': det_half}


def _cmd_aut(args: dict, config: RunConfig):
    gens, order = automorphisms(_load_lattice(args['L']), config.caps)
    return EXIT_OK, {'order': order, 'generators': gens}


def _cmd_isom(args: dict, config: RunConfig):
    U = isometric(
        _load_lattice(args['A']), _load_lattice(args['B']), config.caps)
    code = EXIT_OK if U is not None else EXIT_NEGATIVE
    return code, {'isometric': U is not None, 'U': U}


def _genus(L: QuadLattice, config: RunConfig, spin: bool):
    G = genus_classes(L, config.caps, config.verbose)
    if spin and L.n >= 3:
        G = spin_partition(G, config.caps, config.verbose)
    return G


def _cmd_genus(args: dict, config: RunConfig):
    G = _genus(_load_lattice(args['L']), config, args.get('spin', False))
    if config.mode == 'table':
        return EXIT_OK, G.to_frame()
    return EXIT_OK, G


def _cmd_spn(args: dict, config: RunConfig):
    L = _load_lattice(args['L'])
    if L.n < 3:
        raise ValueError('Spinor genera need rank at least 3')
    G = _genus(L, config, True)
    if config.mode == 'table':
        return EXIT_OK, G.to_frame()
    return EXIT_OK, G


def _cmd_localrep(args: dict, config: RunConfig):
    M = _load_lattice(args['M'])
    L = _load_lattice(args['L'])
    primitive = not args.get('not_primitive', False)
    if args.get('prime') is not None:
        report = is_locally_primitively_representable(
            M, L, args['prime'], primitive, config.caps, config.verbose)
    else:
        report = locally_primitively_representable_everywhere(
            M, L, primitive, config.caps, config.verbose)
    return (EXIT_OK if report.verdict else EXIT_NEGATIVE), report


def _cmd_count(args: dict, config: RunConfig):
    M = _load_lattice(args['M'])
    L = _load_lattice(args['L'])
    reps = representations(M, L, False, config.caps)
    r = sum(1 for x in reps if x.primitive)
    out = {'r': r, 'r_all': len(reps)}
    if args.get('all_classes'):
        G = _genus(L, config, L.n >= M.n + 3)
        report = rep_numbers(M, G, config.caps, config.verbose)
        out.update({
            'r_gen': report.r_gen,
            'r_spn': report.r_spn,
            'r_spn_blocks': report.r_spn_blocks,
            'per_class': [{'r': a, 'r_all': b} for a, b in report.per_class]})
    found = r if args.get('primitive') else len(reps)
    return (EXIT_OK if found else EXIT_NEGATIVE), out


def _cmd_verify_lgp(args: dict, config: RunConfig):
    verdict = verify_lgp(
        _load_lattice(args['M']), _load_lattice(args['L']),
        caps=config.caps, verbose=config.verbose)
    return (EXIT_OK if verdict.holds else EXIT_NEGATIVE), verdict


def _cmd_ratio(args: dict, config: RunConfig):
    L = _load_lattice(args['L'])
    G = genus_classes(L, config.caps, config.verbose)
    df = ratio_experiment(
        G, _parse_t_values(args['t']), config.caps, config.verbose)
    if config.mode == 'table':
        return EXIT_OK, df
    return EXIT_OK, {'classes': len(G), 'rows': _frame_records(df)}


def _cmd_heights(args: dict, config: RunConfig):
    kind = args['kind']
    if kind == 'content':
        return EXIT_OK, heights.content(_load_json(args['w']))
    L = _load_lattice(args['L'])
    if kind == 'lieso':
        basis = heights.lie_so(L)
        return EXIT_OK, {
            'dimension': len(basis),
            'basis': basis,
            'height': heights.lie_height(L)}
    W = _load_json(args['W']) if args.get('W') else []
    basis = heights.stabilizer_algebra(L, W)
    return EXIT_OK, {
        'dimension': len(basis),
        'basis': basis,
        'height': heights.stabilizer_height(L, W)}


def _cmd_padic(args: dict, config: RunConfig):
    kind = args['kind']
    p = args['p']
    if kind == 'snf':
        rows = [[decode_int(x) for x in row]
                for row in _load_json(args['matrix'])]
        A = padic.PadicMatrix(rows, p, args['e'])
        U, D, V = padic.smith_normal_form(A)
        return EXIT_OK, {
            'U': U, 'D': D, 'V': V,
            'valuations': padic.invariant_valuations(D)}
    if kind == 'kgen':
        result = padic.k_generation_check(
            _load_json(args['nilpotents']), args['m_dim'], p,
            args.get('budget'), config.caps, config.verbose)
        code = EXIT_OK if result.k is not None else EXIT_NEGATIVE
        return code, result

    f = padic.PolySystem.from_json(_load_json(args['system']))
    if kind == 'lift':
        x0 = [decode_int(x) for x in _load_json(args['x0'])]
        x = padic.newton_lift(f, x0, p, args['e'])
        return EXIT_OK, {'x': x, 'p': p, 'e': args['e']}
    w = [decode_int(x) for x in _load_json(args['w'])]
    return EXIT_OK, padic.greenberg_lift(
        f, w, args['k'], p, config.caps, config.verbose)


def _cmd_corpus(args: dict, config: RunConfig):
    instances = gen_corpus(
        config.seed, args['m'], args['n'], args['det_bound'], args['count'],
        config.caps, config.verbose)
    if config.mode == 'table':
        return EXIT_OK, corpus_frame(instances)
    return EXIT_OK, instances


_COMMANDS = {
    'reduce': _cmd_reduce,
    'aut': _cmd_aut,
    'isom': _cmd_isom,
    'genus': _cmd_genus,
    'spn': _cmd_spn,
    'localrep': _cmd_localrep,
    'count': _cmd_count,
    'verify-lgp': _cmd_verify_lgp,
    'ratio': _cmd_ratio,
    'heights': _cmd_heights,
    'padic': _cmd_padic,
    'corpus': _cmd_corpus}


def _render(report: Any, mode: str) -> str:
    if mode == 'table' and isinstance(report, pd.DataFrame):
        return report.to_string(index=False)
    if isinstance(report, pd.DataFrame):
        report = _frame_records(report)
    return json.dumps(to_jsonable(report), sort_keys=True, indent=2)


def _error(exc: BaseException) -> str:
    return json.dumps(
        {'error': type(exc).__name__, 'message': str(exc)}, sort_keys=True)


def run(config: RunConfig) -> Tuple[int, str]:
    """Dispatch one command

    Args:
        config: command, its arguments, seed, caps and output mode
    Returns:
        ``(exit code, serialized report)``; errors come back as a JSON object
        with an ``error`` field.
    """
    if config.command not in _COMMANDS:
        msg = f'Unknown command {config.command}'
        return EXIT_USAGE, _error(UsageError(msg))
    try:
        code, report = _COMMANDS[config.command](config.args, config)
    except QlatError as e:
        return EXIT_FAILURE, _error(e)
    except (UsageError, ValueError, TypeError, KeyError) as e:
        return EXIT_USAGE, _error(e)
    return code, _render(report, config.mode)


def _common_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument('--seed', type=int, default=0)
    mode = common.add_mutually_exclusive_group()
    mode.add_argument(
        '--json', dest='mode', action='store_const', const='json')
    mode.add_argument(
        '--table', dest='mode', action='store_const', const='table')
    common.add_argument('--verbose', action='store_true')
    common.add_argument('--n-jobs', type=int, default=None)
    common.add_argument(
        '--config', default=None, help='Path to a caps config file.')
    for name in Caps._fields:
        if name != 'n_jobs':
            common.add_argument(
                f'--cap-{name.replace("_", "-")}', dest=f'cap_{name}',
                type=int, default=None)
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = _Parser(prog='qlat', description='Integral quadratic lattices.')
    sub = parser.add_subparsers(dest='command')

    def add(name, help_text):
        return sub.add_parser(name, parents=[common], help=help_text)

    p = add('reduce', 'Minkowski-reduce a lattice')
    p.add_argument('-L', required=True)
    p = add('aut', 'Automorphism group order and generators')
    p.add_argument('-L', required=True)
    p = add('isom', 'Isometry test')
    p.add_argument('-A', required=True)
    p.add_argument('-B', required=True)
    p = add('genus', 'Isometry classes of the genus')
    p.add_argument('-L', required=True)
    p.add_argument('--max-classes', type=int, default=None)
    p.add_argument('--spin', action='store_true')
    p = add('spn', 'Genus split into spinor genera')
    p.add_argument('-L', required=True)
    p.add_argument('--max-classes', type=int, default=None)
    p = add('localrep', 'Local primitive representability')
    p.add_argument('-M', required=True)
    p.add_argument('-L', required=True)
    p.add_argument('--prime', type=int, default=None)
    p.add_argument('--not-primitive', action='store_true')
    p = add('count', 'Representation counts')
    p.add_argument('-M', required=True)
    p.add_argument('-L', required=True)
    p.add_argument('--primitive', action='store_true')
    p.add_argument('--all-classes', action='store_true')
    p = add('verify-lgp', 'Check one local-global instance')
    p.add_argument('-M', required=True)
    p.add_argument('-L', required=True)
    p = add('ratio', 'Representation numbers against the genus average')
    p.add_argument('-L', required=True)
    p.add_argument('--t', required=True, help='For example 1..200 or 1,5,9')

    p = sub.add_parser('heights', help='Contents and heights')
    hsub = p.add_subparsers(dest='kind')
    h = hsub.add_parser('content', parents=[common])
    h.add_argument('--w', required=True)
    h = hsub.add_parser('lieso', parents=[common])
    h.add_argument('-L', required=True)
    h = hsub.add_parser('stab', parents=[common])
    h.add_argument('-L', required=True)
    h.add_argument('--W', default=None)

    p = sub.add_parser('padic', help='p-adic kernels')
    psub = p.add_subparsers(dest='kind')
    h = psub.add_parser('snf', parents=[common])
    h.add_argument('--matrix', required=True)
    h.add_argument('--p', type=int, required=True)
    h.add_argument('--e', type=int, required=True)
    h = psub.add_parser('lift', parents=[common])
    h.add_argument('--system', required=True)
    h.add_argument('--x0', required=True)
    h.add_argument('--p', type=int, required=True)
    h.add_argument('--e', type=int, required=True)
    h = psub.add_parser('greenberg', parents=[common])
    h.add_argument('--system', required=True)
    h.add_argument('--w', required=True)
    h.add_argument('--k', type=int, required=True)
    h.add_argument('--p', type=int, required=True)
    h = psub.add_parser('kgen', parents=[common])
    h.add_argument('--nilpotents', required=True)
    h.add_argument('--m-dim', type=int, required=True)
    h.add_argument('--p', type=int, required=True)
    h.add_argument('--budget', type=int, default=None)

    p = add('corpus', 'Seeded corpus of (M, L) instances')
    p.add_argument('--m', type=int, default=1)
    p.add_argument('--n', type=int, default=4)
    p.add_argument('--det-bound', type=int, required=True)
    p.add_argument('--count', type=int, required=True)
    return parser


_GLOBAL = {'seed', 'mode', 'verbose', 'n_jobs', 'config', 'command'}


def parse_config(argv: Optional[Sequence[str]] = None) -> RunConfig:
    """Turn command-line arguments into a ``RunConfig``"""
    ns = vars(build_parser().parse_args(argv))
    if not ns.get('command'):
        raise UsageError('No command given')
    if ns['command'] in ('heights', 'padic') and not ns.get('kind'):
        raise UsageError(f'{ns["command"]} needs a subcommand')

    overrides = {
        key[len('cap_'):]: val for key, val in ns.items()
        if key.startswith('cap_')}
    overrides['n_jobs'] = ns.get('n_jobs')
    if ns.get('max_classes') is not None:
        overrides['classes'] = ns['max_classes']
    caps = get_caps(ns.get('config'), **overrides)

    args = {
        key: val for key, val in ns.items()
        if key not in _GLOBAL and not key.startswith('cap_')}
    return RunConfig(
        command=ns['command'],
        args=args,
        seed=ns['seed'],
        caps=caps,
        mode=ns.get('mode') or 'json',
        verbose=ns['verbose'])


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        config = parse_config(argv)
    except (UsageError, ValueError) as e:
        print(_error(e))
        return EXIT_USAGE
    code, text = run(config)
    print(text)
    return code


if __name__ == '__main__':
    sys.exit(main())
