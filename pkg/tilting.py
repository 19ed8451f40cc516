"""
Tilting cocharacters
Jantzen sum formula evaluated on formal Weyl characters, alcove and Coxeter
criteria, the type A closed form, very good primes and the fundamental
coweight tables with a golden-file comparison
"""

import logging
import re
from dataclasses import dataclass, field
from math import comb
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import sympy
from pydantic import BaseModel, Field
from tqdm import tqdm

from root_datum import RootDatum, Vector, add_vectors, build_root_datum, fundamental_coweight
from utils import (
    ConfigManager, PreconditionError, UnsupportedTypeError, read_table,
)

logger = logging.getLogger(__name__)

Labels = Tuple[int, ...]

TABLE_COLUMNS = ['coweight', 'primes', 'very_good']


def _check_prime(ell: int) -> int:
    if not sympy.isprime(int(ell)):
        raise PreconditionError(f"ell = {ell} is not prime")
    return int(ell)


def _valuation(n: int, ell: int) -> int:
    v = 0
    while n % ell == 0:
        n //= ell
        v += 1
    return v


def shifted_labels(rd: RootDatum, mu: Sequence) -> Labels:
    """Labels of mu + rho"""
    labels = rd.labels(mu)
    if any(getattr(x, 'denominator', 1) != 1 for x in labels):
        raise PreconditionError(f"{tuple(mu)} has non-integral labels")
    if any(x < 0 for x in labels):
        raise PreconditionError(f"{tuple(mu)} is not dominant")
    return tuple(int(x) + 1 for x in labels)


def _beta_labels(rd: RootDatum, m: Sequence[int]) -> Labels:
    r = rd.semisimple_rank
    return tuple(sum(m[j] * rd.cartan[i][j] for j in range(r)) for i in range(r))


def _pairings(rd: RootDatum, x: Sequence[int]) -> List[Tuple[Vector, Vector, int]]:
    """(coroot coefficients m, root coefficients c, <mu + rho, alpha>) per positive coroot"""
    return [(m, c, sum(ci * xi for ci, xi in zip(c, x)))
            for c, m in zip(rd.positive_root_coeffs, rd.positive_coroot_coeffs)]


@dataclass(frozen=True)
class AffineReflection:
    """s_{beta, r}: lambda -> s_beta(lambda) + r beta, acting with the rho-shifted dot action"""
    coroot: Vector
    root: Vector
    level: int

    def dot(self, rd: RootDatum, x: Sequence[int]) -> Labels:
        """Dot action on rho-shifted labels"""
        pairing = sum(ci * xi for ci, xi in zip(self.root, x))
        shift = pairing - self.level
        return tuple(a - shift * b for a, b in zip(x, _beta_labels(rd, self.coroot)))


def sort_to_dominant(rd: RootDatum, x: Sequence[int]) -> Tuple[Labels, int]:
    """Dominant labels in the W-orbit of x and the sign of the sorting element"""
    x = list(x)
    sign = 1
    while True:
        negative = [i for i, p in enumerate(x) if p < 0]
        if not negative:
            return tuple(x), sign
        i = negative[0]
        xi = x[i]
        x = [x[k] - xi * rd.cartan[k][i] for k in range(len(x))]
        sign = -sign


@dataclass(frozen=True)
class JantzenSum:
    """Formal sum of Weyl characters chi(lambda), keyed by the labels of lambda"""
    terms: Dict[Labels, int] = field(default_factory=dict, hash=False)
    raw_terms: int = 0

    @property
    def vanishes(self) -> bool:
        return not self.terms

    def to_document(self) -> Dict[str, int]:
        return {"(" + ",".join(str(x) for x in labels) + ")": c for labels, c in sorted(self.terms.items())}


def jantzen_from_labels(rd: RootDatum, x: Sequence[int], ell: int) -> JantzenSum:
    """Sum formula for the rho-shifted labels x of a dominant mu"""
    ell = _check_prime(ell)
    terms: Dict[Labels, int] = {}
    raw = 0
    for m, c, n in _pairings(rd, x):
        for multiple in range(1, (n - 1) // ell + 1):
            y = AffineReflection(m, c, multiple * ell).dot(rd, x)
            dominant, sign = sort_to_dominant(rd, y)
            raw += 1
            if any(p == 0 for p in dominant):
                continue
            symbol = tuple(p - 1 for p in dominant)
            terms[symbol] = terms.get(symbol, 0) + sign * (1 + _valuation(multiple, ell))
    nonzero = {k: v for k, v in terms.items() if v}
    logger.debug(f"{rd.type_tag} ell={ell} labels={tuple(x)}: {raw} terms, {len(nonzero)} survive")
    return JantzenSum(terms=nonzero, raw_terms=raw)


def jantzen_sum(rd: RootDatum, mu: Sequence, ell: int) -> JantzenSum:
    return jantzen_from_labels(rd, shifted_labels(rd, mu), ell)


def max_pairing(rd: RootDatum, x: Sequence[int]) -> int:
    """max over positive roots of <mu + rho, alpha>"""
    return max((n for _, _, n in _pairings(rd, x)), default=0)


def in_alcove(rd: RootDatum, mu: Sequence, ell: int, closed: bool = True) -> bool:
    """mu in the closed (or open) fundamental alcove for the dot action"""
    top = max_pairing(rd, shifted_labels(rd, mu))
    return top <= ell if closed else top < ell


def alcove_has_point(rd: RootDatum, ell: int) -> bool:
    """The open alcove contains a dominant lattice point (equivalently ell >= h)"""
    return in_alcove(rd, (0,) * rd.rank, ell, closed=False)


def is_tilting(rd: RootDatum, mu: Sequence, ell: int) -> bool:
    ell = _check_prime(ell)
    x = shifted_labels(rd, mu)
    if max_pairing(rd, x) <= ell:
        return True
    return jantzen_from_labels(rd, x, ell).vanishes


def tilting_primes(rd: RootDatum, mu: Sequence) -> List[int]:
    """Primes at which mu is not tilting; every prime beyond the largest pairing is tilting"""
    x = shifted_labels(rd, mu)
    bound = max_pairing(rd, x)
    return [ell for ell in sympy.primerange(2, bound)
            if not jantzen_from_labels(rd, x, ell).vanishes]


def steinberg_weight(rd: RootDatum, ell: int) -> Vector:
    """(ell - 1) rho as a cocharacter"""
    out = (0,) * rd.rank
    for i in range(rd.semisimple_rank):
        out = add_vectors(out, fundamental_coweight(rd, i), ell - 1)
    return out


def type_a_criterion(n: int, mu: Sequence[int], ell: int) -> bool:
    """Closed-form tilting test for GL_n with mu a decreasing integer tuple"""
    ell = _check_prime(ell)
    mu = tuple(int(x) for x in mu)
    if len(mu) != n or any(mu[i] < mu[i + 1] for i in range(n - 1)):
        raise PreconditionError(f"{mu} is not a dominant cocharacter of GL{n}")
    x = [mu[i] + n - 1 - i for i in range(n)]
    values = set(x)
    for i in range(n):
        for j in range(i + 1, n):
            h = x[i] - x[j]
            s = _valuation(h, ell)
            a = (h // ell ** s) % ell
            b = (h - a * ell ** s) // ell ** (s + 1)
            if b == 0:
                continue
            step = ell ** (s + 1)
            chain_a = all(x[i] - a * ell ** s - t * step in values for t in range(b + 1))
            chain_b = all(x[i] - t * step in values for t in range(1, b + 1))
            if not (chain_a or chain_b):
                return False
    return True


def b_n_binomial_primes(n: int, i: int) -> List[int]:
    """Primes dividing binom(n + 1 - (i + j)/2, (i - j)/2) for 0 <= j < i, j = i mod 2"""
    primes = set()
    for j in range(i % 2, i, 2):
        primes.update(sympy.primefactors(comb(n + 1 - (i + j) // 2, (i - j) // 2)))
    return sorted(primes)


# ell very good, per base type
EXCLUDED = {'B': {2}, 'C': {2}, 'D': {2}, 'E6': {2, 3}, 'E7': {2, 3}, 'E8': {2, 3, 5},
            'F4': {2, 3}, 'G2': {2, 3}}

TAG_PATTERN = re.compile(r'^(?P<twist>[23])?(?P<head>GL|SL|U|[A-G])(?P<n>\d+)(?:\+T\d+)?$')


def is_very_good(ell: int, type_tag: str) -> bool:
    match = TAG_PATTERN.match(type_tag.strip())
    if not match:
        raise UnsupportedTypeError(f"Unrecognized type {type_tag!r}")
    head, n = match.group('head'), int(match.group('n'))
    order = int(match.group('twist') or 1)
    if head == 'U':
        order = 2
    if order > 1 and ell % order == 0:
        return False
    if head in ('GL', 'U') or (head == 'A' and order > 1):
        return True
    if head == 'SL':
        return n % ell != 0
    if head == 'A':
        return (n + 1) % ell != 0
    key = head if head in 'BCD' else f"{head}{n}"
    if key not in EXCLUDED:
        raise UnsupportedTypeError(f"Unrecognized type {type_tag!r}")
    return ell not in EXCLUDED[key]


def very_good_description(type_tag: str) -> str:
    head = type_tag.rstrip('0123456789')
    key = head if head in 'BCD' else type_tag
    excluded = EXCLUDED.get(key, set())
    return "all" if not excluded else "l != " + ",".join(str(p) for p in sorted(excluded))


def format_primes(primes: Sequence[int]) -> str:
    return "{" + ",".join(str(p) for p in sorted(primes)) + "}"


def parse_primes(text: str) -> List[int]:
    body = text.strip().strip('{}').strip()
    return sorted(int(p) for p in body.split(',') if p.strip())


class TiltingRow(BaseModel):
    coweight: str
    primes: List[int]
    very_good: str
    golden: Optional[List[int]] = None


class TiltingTable(BaseModel):
    """Non-tilting primes of every fundamental coweight of an adjoint type"""
    type: str
    rows: List[TiltingRow]
    discrepancies: List[str] = Field(default_factory=list)

    def to_rows(self) -> List[Dict[str, str]]:
        return [{'coweight': row.coweight, 'primes': format_primes(row.primes),
                 'very_good': row.very_good} for row in self.rows]


def golden_table(type_tag: str, golden_path: Optional[str] = None) -> Optional[Dict[str, List[int]]]:
    path = Path(golden_path or ConfigManager.load_config()['golden_path']) / f"{type_tag}.tsv"
    if not path.exists():
        return None
    frame = read_table(path)
    return {row['coweight']: parse_primes(row['primes']) for _, row in frame.iterrows()}


def fundamental_table(type_tag: str, progress: bool = False,
                      golden_path: Optional[str] = None) -> TiltingTable:
    """Regenerate the fundamental coweight row of a type and compare it with the golden file"""
    rd = build_root_datum(type_tag)
    if rd.presentation != 'adjoint':
        raise UnsupportedTypeError(f"Tables are defined for adjoint types, not {type_tag}")
    golden = golden_table(type_tag, golden_path)
    logger.info(f"Regenerating tilting table for {type_tag}")
    rows, discrepancies = [], []
    for i in tqdm(range(rd.semisimple_rank), desc=type_tag, disable=not progress):
        name = f"w{i + 1}"
        primes = tilting_primes(rd, fundamental_coweight(rd, i))
        expected = golden.get(name) if golden else None
        if expected is not None and expected != primes:
            message = f"{type_tag} {name}: computed {format_primes(primes)}, table {format_primes(expected)}"
            logger.warning(message)
            discrepancies.append(message)
        rows.append(TiltingRow(coweight=name, primes=primes,
                               very_good=very_good_description(type_tag), golden=expected))
    return TiltingTable(type=type_tag, rows=rows, discrepancies=discrepancies)
