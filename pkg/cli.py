"""
Command-line front end
Every invocation is one JobSpec; run() turns it into an exit status and a
deterministic JSON or TSV document.
"""

import argparse
import json
import logging
import re
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, Field, ValidationError

from averaging import refined_averaging_check
from characters import LADDER_LEVELS, condition_ladder, mu_regularity, parse_character
from galois import CoinvariantLattice, build_group
from kottwitz import BGMU_COLUMNS, bgmu_gln, enumerate_bgmu_un
from root_datum import RootDatum, Vector, build_root_datum, fundamental_coweight, fundamental_group, pairing
from tilting import fundamental_table, in_alcove, is_tilting, jantzen_sum, type_a_criterion
from utils import (
    ConfigManager, KottwitzError, ParseError, ResponseFormatter, format_vector, setup_logging,
)
from weights import coinvariant_weight_spaces, freudenthal

logger = logging.getLogger(__name__)


# commands whose natural output is a table
TABLE_COMMANDS = {'bgmu', 'weights', 'tilting-table'}

EXIT_OK, EXIT_CHECK_FAILED, EXIT_USAGE = 0, 1, 2

MU_TERM = re.compile(r'^(?P<k>[+-]?\d*)\*?w(?P<i>\d+)$')

Outcome = Tuple[int, Dict[str, Any], Optional[str]]


class JobSpec(BaseModel):
    """One CLI invocation"""
    command: Literal['describe', 'bgmu', 'weights', 'check-character', 'tilting',
                     'tilting-table', 'averaging', 'schema']
    group: Optional[str] = None
    twist: Optional[str] = None
    parameters: Dict[str, str] = Field(default_factory=dict)
    output: Optional[Literal['json', 'tsv']] = None
    cap: Optional[int] = Field(default=None, gt=0)

    @property
    def output_format(self) -> str:
        return self.output or ('tsv' if self.command in TABLE_COMMANDS else 'json')


def parse_mu(rd: RootDatum, text: str) -> Vector:
    """'1,0,-1' in lattice coordinates, or a sum of fundamental coweights such as 'w1+2w3'"""
    text = text.strip().replace(' ', '')
    if not text:
        raise ParseError("Empty cocharacter", text)
    if 'w' not in text:
        try:
            mu = tuple(int(x) for x in text.split(','))
        except ValueError:
            raise ParseError("Cocharacters are comma-separated integers", text)
        if len(mu) != rd.rank:
            raise ParseError(f"Expected {rd.rank} coordinates for {rd.type_tag}", text)
        return mu

    total: Tuple = (Fraction(0),) * rd.rank
    for term in re.split(r'(?=[+-])', text):
        if not term:
            continue
        match = MU_TERM.match(term)
        if not match:
            raise ParseError("Malformed fundamental coweight term", term)
        k = match.group('k')
        k = int(k + '1') if k in ('', '+', '-') else int(k)
        i = int(match.group('i'))
        if not 1 <= i <= rd.semisimple_rank:
            raise ParseError(f"{rd.type_tag} has no fundamental coweight", term)
        total = tuple(a + k * Fraction(b) for a, b in zip(total, fundamental_coweight(rd, i - 1)))
    if any(x.denominator != 1 for x in total):
        raise ParseError(f"Not a cocharacter of {rd.type_tag}", text)
    return tuple(int(x) for x in total)


def _require(job: JobSpec, key: str) -> str:
    value = job.parameters.get(key)
    if value is None or not str(value).strip():
        raise ParseError("Missing required option", f"--{key}")
    return value


def _group(job: JobSpec) -> CoinvariantLattice:
    if not job.group:
        raise ParseError("Missing required option", "--group")
    return build_group(job.group, job.twist)


def _group_name(lat: CoinvariantLattice) -> str:
    return lat.rd.type_tag + ("" if lat.is_split else f" ({lat.twist.name})")


def run_describe(job: JobSpec) -> Outcome:
    lat = _group(job)
    document = {
        'group': job.group,
        'root_datum': lat.rd.to_document(),
        'fundamental_group': fundamental_group(lat.rd).describe(),
        **lat.to_document(),
    }
    return EXIT_OK, document, None


def run_bgmu(job: JobSpec) -> Outcome:
    lat = _group(job)
    rd = lat.rd
    mu = parse_mu(rd, _require(job, 'mu'))
    points = enumerate_bgmu_un(lat, mu, job.cap)
    rows = [pt.to_row() for pt in points]
    document: Dict[str, Any] = {'group': _group_name(lat), 'mu': list(mu),
                                'unramified': [pt.to_document() for pt in points]}
    tables = []
    if rd.presentation == 'GL' and lat.is_split and not rd.central_rank and rd.semisimple_rank:
        polygons = [{'slope': format_vector(nu), 'degree': str(pairing(rd.two_rho_hat, nu))}
                    for nu in bgmu_gln(rd.rank, mu)]
        document['polygons'] = polygons
        tables.append(ResponseFormatter.format_table(polygons, ['slope', 'degree']))
    else:
        document['note'] = "Only the unramified part B(G, mu)_un is enumerated for this group"
    tables.append(ResponseFormatter.format_table(rows, BGMU_COLUMNS))
    return EXIT_OK, document, "\n".join(tables)


def run_weights(job: JobSpec) -> Outcome:
    lat = _group(job)
    mu = parse_mu(lat.rd, _require(job, 'mu'))
    ws = freudenthal(lat.rd, mu, job.cap)
    document: Dict[str, Any] = {'group': _group_name(lat), 'mu': list(mu), 'dimension': ws.dim}
    if job.parameters.get('coinvariant') == 'true':
        spaces = coinvariant_weight_spaces(ws, lat)
        rows = [{'class': format_vector(lat.lift(c)), 'dimension': dim}
                for c, dim in sorted(spaces.items(), key=lambda item: lat.lift(item[0]), reverse=True)]
        document['classes'] = rows
        return EXIT_OK, document, ResponseFormatter.format_table(rows, ['class', 'dimension'])
    rows = [{'weight': format_vector(nu), 'multiplicity': ws.mults[nu]} for nu in ws.weights]
    document['weights'] = rows
    return EXIT_OK, document, ResponseFormatter.format_table(rows, ['weight', 'multiplicity'])


def run_check_character(job: JobSpec) -> Outcome:
    lat = _group(job)
    chi = parse_character(lat, _require(job, 'chi'))
    level = job.parameters.get('level', 'generic')
    if level not in LADDER_LEVELS:
        raise ParseError("Unknown ladder level", level)
    report = condition_ladder(chi)
    holds = report.holds(level)
    document: Dict[str, Any] = {'level': level, 'ladder': report.model_dump()}
    if job.parameters.get('mu'):
        mu = parse_mu(lat.rd, job.parameters['mu'])
        regularity = mu_regularity(chi, mu, job.parameters.get('mode', 'strong'))
        document['mu_regularity'] = regularity.model_dump()
        holds = holds and regularity.holds
    document['holds'] = holds
    return (EXIT_OK if holds else EXIT_CHECK_FAILED), document, None


def run_tilting(job: JobSpec) -> Outcome:
    if not job.group:
        raise ParseError("Missing required option", "--type")
    rd = build_root_datum(job.group)
    mu = parse_mu(rd, _require(job, 'mu'))
    try:
        ell = int(_require(job, 'ell'))
    except ValueError:
        raise ParseError("ell must be an integer", job.parameters['ell'])
    tilting = is_tilting(rd, mu, ell)
    document: Dict[str, Any] = {
        'type': rd.type_tag,
        'mu': list(mu),
        'ell': ell,
        'tilting': tilting,
        'closed_alcove': in_alcove(rd, mu, ell),
        'terms': jantzen_sum(rd, mu, ell).to_document(),
    }
    if rd.presentation == 'GL' and rd.semisimple_rank and not rd.central_rank:
        document['type_a_criterion'] = type_a_criterion(rd.rank, mu, ell)
    return (EXIT_OK if tilting else EXIT_CHECK_FAILED), document, None


def run_tilting_table(job: JobSpec) -> Outcome:
    if not job.group:
        raise ParseError("Missing required option", "--type")
    table = fundamental_table(job.group, progress=job.parameters.get('progress') == 'true',
                              golden_path=job.parameters.get('golden'))
    status = EXIT_OK
    if table.discrepancies and job.parameters.get('strict') == 'true':
        status = EXIT_CHECK_FAILED
    tsv = ResponseFormatter.format_table(table.to_rows(), ['coweight', 'primes', 'very_good'])
    return status, table.model_dump(), tsv


def run_averaging(job: JobSpec) -> Outcome:
    lat = _group(job)
    mu = parse_mu(lat.rd, _require(job, 'mu'))
    phi = parse_character(lat, _require(job, 'phi'))
    report = refined_averaging_check(lat, mu, phi, job.cap)
    status = EXIT_OK if report.verdict == 'PASS' else EXIT_CHECK_FAILED
    return status, report.model_dump(by_alias=True), None


def run_schema(job: JobSpec) -> Outcome:
    kind = _require(job, 'kind')
    path = Path(ConfigManager.load_config()['schema_path']) / f"{kind}.json"
    if not path.exists():
        raise ParseError("Unknown document kind", kind)
    with open(path, 'r') as f:
        return EXIT_OK, json.load(f), None


HANDLERS: Dict[str, Callable[[JobSpec], Outcome]] = {
    'describe': run_describe,
    'bgmu': run_bgmu,
    'weights': run_weights,
    'check-character': run_check_character,
    'tilting': run_tilting,
    'tilting-table': run_tilting_table,
    'averaging': run_averaging,
    'schema': run_schema,
}


def run(job: JobSpec) -> Tuple[int, str]:
    """Execute a job; returns the exit status and the emitted document"""
    logger.info(f"Running {job.command} for {job.group or '-'}")
    try:
        status, document, table = HANDLERS[job.command](job)
    except ParseError as e:
        logger.error(f"Usage error: {e}")
        return EXIT_USAGE, ResponseFormatter.dumps(
            ResponseFormatter.format_error_response(str(e), details=e.token))
    except KottwitzError as e:
        logger.error(f"{job.command} failed: {e}")
        return EXIT_USAGE, ResponseFormatter.dumps(
            ResponseFormatter.format_error_response(str(e), details=type(e).__name__))
    logger.info(f"{job.command} finished with status {status}")
    if job.output_format == 'tsv' and table is not None:
        return status, table
    return status, ResponseFormatter.dumps(document)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--group', '--type', dest='group', help='Group descriptor, e.g. GL2, B3, 2A2, U3, E6+T1')
    common.add_argument('--twist', help='Named twist (2A2, 2D4, 3D4, 2E6) or a JSON integer matrix')
    common.add_argument('--format', choices=['json', 'tsv'], help='Output format')
    common.add_argument('--cap', help='Enumeration cap, overrides KOTTWITZ_CAP')
    common.add_argument('--config', help='JSON configuration file')
    common.add_argument('--save-config', help='Write the effective configuration to this JSON file')
    common.add_argument('--log-level', help='Logging level')

    parser = argparse.ArgumentParser(prog='kottwitz', description='Exact Kottwitz-set, weight and tilting computations')
    sub = parser.add_subparsers(dest='command', required=True)

    sub.add_parser('describe', parents=[common], help='Root datum and coinvariant lattice')
    bgmu = sub.add_parser('bgmu', parents=[common], help='Enumerate B(G, mu)_un')
    bgmu.add_argument('--mu')
    weights = sub.add_parser('weights', parents=[common], help='Weights of V_mu')
    weights.add_argument('--mu')
    weights.add_argument('--coinvariant', action='store_true', help='Group weights by coinvariant class')
    check = sub.add_parser('check-character', parents=[common], help='Condition ladder of a character')
    check.add_argument('--chi')
    check.add_argument('--level', choices=LADDER_LEVELS, default='generic')
    check.add_argument('--mu', help='Also test mu-regularity')
    check.add_argument('--mode', choices=['strong', 'decomposed'], default='strong')
    tilting = sub.add_parser('tilting', parents=[common], help='Jantzen sum test for one cocharacter')
    tilting.add_argument('--mu')
    tilting.add_argument('--ell')
    table = sub.add_parser('tilting-table', parents=[common], help='Fundamental coweight table')
    table.add_argument('--strict', action='store_true', help='Exit 1 when the golden table disagrees')
    table.add_argument('--golden', help='Directory of golden TSV tables')
    table.add_argument('--progress', action='store_true')
    averaging = sub.add_parser('averaging', parents=[common], help='Refined averaging multiset check')
    averaging.add_argument('--mu')
    averaging.add_argument('--phi')
    schema = sub.add_parser('schema', parents=[common], help='Print the JSON schema of a document kind')
    schema.add_argument('kind')
    return parser


PARAMETER_KEYS = ['mu', 'chi', 'phi', 'ell', 'level', 'mode', 'golden', 'kind']
FLAG_KEYS = ['coinvariant', 'strict', 'progress']


def job_from_args(args: argparse.Namespace, config: Dict[str, Any]) -> JobSpec:
    parameters = {key: str(getattr(args, key)) for key in PARAMETER_KEYS
                  if getattr(args, key, None) is not None}
    parameters.update({key: 'true' for key in FLAG_KEYS if getattr(args, key, False)})
    cap = ConfigManager.parse_cap(args.cap) if args.cap else None
    return JobSpec(command=args.command, group=args.group, twist=args.twist, parameters=parameters,
                   output=args.format or config.get('output_format'), cap=cap)


def effective_config(args: argparse.Namespace, config: Dict[str, Any], job: JobSpec) -> Dict[str, Any]:
    """Configuration after command-line overrides"""
    effective = dict(config)
    if job.cap:
        effective['orbit_cap'] = effective['weight_cap'] = job.cap
    if args.log_level:
        effective['log_level'] = args.log_level
    if args.format:
        effective['output_format'] = args.format
    return effective


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = ConfigManager.load_config(args.config)
        setup_logging(args.log_level or config['log_level'])
        job = job_from_args(args, config)
    except (KottwitzError, ValidationError) as e:
        print(ResponseFormatter.dumps(ResponseFormatter.format_error_response(str(e))))
        return EXIT_USAGE
    if args.save_config and not ConfigManager.save_config(effective_config(args, config, job), args.save_config):
        print(ResponseFormatter.dumps(ResponseFormatter.format_error_response(
            "Failed to save configuration", details=args.save_config)))
        return EXIT_USAGE
    status, text = run(job)
    sys.stdout.write(text if text.endswith('\n') else text + '\n')
    return status
