"""
Unramified characters of T(Q_p) and the non-degeneracy ladder
Values are exact c*q^k with q a formal transcendental; characters are
recorded by their values on a basis of X_*(A), the Gamma-invariant cocharacters.
"""

import logging
import random
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, Field
from tqdm import tqdm

from galois import CoinvariantLattice, build_group, relative_weyl_group
from root_datum import Vector, WeylWord, act, add_vectors, fundamental_coweight, same_element
from utils import ParseError, PreconditionError, format_vector
from weights import MinusculeType, classify_labels, weight_set

logger = logging.getLogger(__name__)

VALUE_PATTERN = re.compile(r'^(?P<c>[+-]?(?:\d+(?:/\d+)?)?)(?P<q>\*?q(?:\^\(?(?P<k>[+-]?\d+(?:/\d+)?)\)?)?)?$')

LADDER_LEVELS = ['weakly_generic', 'generic', 'weakly_normalized_regular', 'normalized_regular', 'regular']


@dataclass(frozen=True)
class CharacterValue:
    """c * q^k"""
    c: Fraction
    k: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, 'c', Fraction(self.c))
        object.__setattr__(self, 'k', Fraction(self.k))
        if self.c == 0:
            raise PreconditionError("Character values must be nonzero")

    def __mul__(self, other: 'CharacterValue') -> 'CharacterValue':
        return CharacterValue(self.c * other.c, self.k + other.k)

    def __truediv__(self, other: 'CharacterValue') -> 'CharacterValue':
        return self * other.inverse()

    def inverse(self) -> 'CharacterValue':
        return CharacterValue(1 / self.c, -self.k)

    def __pow__(self, n: int) -> 'CharacterValue':
        return CharacterValue(self.c ** n, self.k * n)

    @classmethod
    def parse(cls, text: str) -> 'CharacterValue':
        """Parse "c*q^k", "q^k", "c" (c and k may be fractions)"""
        token = text.strip().replace(' ', '')
        match = VALUE_PATTERN.match(token)
        if not token or not match:
            raise ParseError("Malformed character value", text)
        c_text, has_q = match.group('c'), match.group('q') is not None
        if c_text in ('', '+', '-'):
            if not has_q:
                raise ParseError("Malformed character value", text)
            c = Fraction(-1 if c_text == '-' else 1)
        else:
            if c_text.endswith('/0'):
                raise ParseError("Malformed character value", text)
            c = Fraction(c_text)
        k = Fraction(match.group('k')) if match.group('k') else Fraction(1 if has_q else 0)
        try:
            return cls(c, k)
        except PreconditionError:
            raise ParseError("Character values must be nonzero", text)

    def __str__(self) -> str:
        c = str(self.c)
        if self.k == 0:
            return c
        return f"{c}*q^{self.k}"


ONE = CharacterValue(1, 0)


def q_power(k) -> CharacterValue:
    return CharacterValue(1, k)


def forbidden_values(f: int) -> Tuple[CharacterValue, ...]:
    """{1, q^f, q^-f}: the trivial character and |.|_E^{+-1} for an orbit of size f"""
    return ONE, q_power(f), q_power(-f)


@dataclass(frozen=True)
class UnramifiedCharacter:
    """A character of T(Q_p) trivial on T(Z_p), given on the X_*(A) basis"""
    lat: CoinvariantLattice
    values: Tuple[CharacterValue, ...]

    def __post_init__(self):
        if len(self.values) != len(self.lat.invariant_basis):
            raise PreconditionError(
                f"Expected {len(self.lat.invariant_basis)} values, got {len(self.values)}")

    def __call__(self, v: Sequence[int]) -> CharacterValue:
        value = ONE
        for x, base in zip(self.lat.invariant_coordinates(v), self.values):
            value = value * base ** x
        return value

    def __mul__(self, other: 'UnramifiedCharacter') -> 'UnramifiedCharacter':
        return UnramifiedCharacter(self.lat, tuple(a * b for a, b in zip(self.values, other.values)))

    def inverse(self) -> 'UnramifiedCharacter':
        return UnramifiedCharacter(self.lat, tuple(v.inverse() for v in self.values))

    def compose(self, w: WeylWord) -> 'UnramifiedCharacter':
        """lambda -> chi(w lambda)"""
        return UnramifiedCharacter(self.lat, tuple(
            self(act(self.lat.rd, w, b)) for b in self.lat.invariant_basis))

    def twist(self, w: WeylWord) -> 'UnramifiedCharacter':
        """chi^w(lambda) = chi(w^-1 lambda)"""
        return self.compose(w.inverse())

    def __str__(self) -> str:
        return "(" + ",".join(str(v) for v in self.values) + ")"


def parse_character(lat: CoinvariantLattice, text: str) -> UnramifiedCharacter:
    """Comma-separated values, one per X_*(A) basis vector"""
    return UnramifiedCharacter(lat, tuple(CharacterValue.parse(p) for p in text.split(',')))


def q_power_character(lat: CoinvariantLattice, exponent: Sequence) -> UnramifiedCharacter:
    """lambda -> q^{-<x, lambda>} for a rational character x"""
    return UnramifiedCharacter(lat, tuple(
        q_power(-sum((a * b for a, b in zip(exponent, base)), Fraction(0)))
        for base in lat.invariant_basis))


def two_rho_unipotent(lat: CoinvariantLattice, levi: Sequence[int] = ()) -> Vector:
    """Sum of the positive roots outside the Levi spanned by the given relative indices"""
    rd = lat.rd
    absolute = {j for i in levi for j in lat.orbits[i]}
    out = (0,) * rd.rank
    for coeffs, alpha in zip(rd.positive_root_coeffs, rd.positive_roots):
        if any(coeffs[j] for j in range(rd.semisimple_rank) if j not in absolute):
            out = add_vectors(out, alpha)
    return out


def modulus_half(lat: CoinvariantLattice, levi: Sequence[int] = (), sign: int = 1) -> UnramifiedCharacter:
    """delta_P^{sign/2}: lambda -> q^{-sign <2 rho-hat_N, lambda> / 2}"""
    two_rho = two_rho_unipotent(lat, levi)
    return q_power_character(lat, tuple(Fraction(sign * x, 2) for x in two_rho))


def orbit_test_value(chi: UnramifiedCharacter, orbit: Sequence[Sequence[int]]) -> Tuple[CharacterValue, int]:
    """(chi(sum of the orbit), orbit size)"""
    total = (0,) * chi.lat.rd.rank
    for v in orbit:
        total = add_vectors(total, v)
    return chi(total), len(orbit)


def frobenius_value(chi: UnramifiedCharacter, nu: Sequence[int]) -> CharacterValue:
    """Value of chi on the Gamma-orbit sum of a cocharacter"""
    return chi(chi.lat.orbit_sum(nu))


def _avoids(t: CharacterValue, f: int) -> bool:
    return t not in forbidden_values(f)


@lru_cache(maxsize=None)
def _relative_weyl(lat: CoinvariantLattice) -> Tuple[WeylWord, ...]:
    return tuple(relative_weyl_group(lat))


class LadderReport(BaseModel):
    """Which rungs of the non-degeneracy ladder a character satisfies"""
    group: str
    character: List[str]
    weakly_generic: bool
    generic: bool
    condition_3: bool
    condition_4: bool
    weakly_normalized_regular: bool
    normalized_regular: bool
    regular: bool
    failures: List[str] = Field(default_factory=list)

    def holds(self, level: str) -> bool:
        if level not in LADDER_LEVELS:
            raise ParseError("Unknown ladder level", level)
        return bool(getattr(self, level))


def is_weakly_generic(chi: UnramifiedCharacter) -> bool:
    return all(_avoids(*orbit_test_value(chi, orbit)) for orbit in chi.lat.simple_coroot_orbits())


def is_generic(chi: UnramifiedCharacter) -> bool:
    return all(_avoids(*orbit_test_value(chi, orbit)) for orbit in chi.lat.coroot_orbits())


def condition_3(chi: UnramifiedCharacter) -> bool:
    """chi delta^{1/2} != (chi delta^{-1/2})^w for every w in the relative Weyl group"""
    lat = chi.lat
    if not lat.rd.semisimple_rank:
        return True
    left = chi * modulus_half(lat)
    right = chi * modulus_half(lat, sign=-1)
    return all(left != right.twist(w) for w in _relative_weyl(lat))


def condition_4(chi: UnramifiedCharacter) -> bool:
    for orbit in chi.lat.coroot_orbits():
        t, f = orbit_test_value(chi, orbit)
        if not _avoids(t ** 2, f):
            return False
    return True


def is_regular(chi: UnramifiedCharacter) -> bool:
    lat = chi.lat
    identity = WeylWord()
    return all(chi != chi.twist(w) for w in _relative_weyl(lat)
               if not same_element(lat.rd, w, identity))


def condition_ladder(chi: UnramifiedCharacter) -> LadderReport:
    lat = chi.lat
    failures = []
    for orbit in lat.coroot_orbits():
        t, f = orbit_test_value(chi, orbit)
        if not _avoids(t, f):
            failures.append(f"orbit {format_vector(orbit[0])} (f={f}): value {t} is forbidden")
    weakly_generic = is_weakly_generic(chi)
    generic = weakly_generic and is_generic(chi)
    cond3 = condition_3(chi)
    cond4 = condition_4(chi)
    wnr = generic and cond3
    report = LadderReport(
        group=lat.rd.type_tag + ("" if lat.is_split else f" ({lat.twist.name})"),
        character=[str(v) for v in chi.values],
        weakly_generic=weakly_generic,
        generic=generic,
        condition_3=cond3,
        condition_4=cond4,
        weakly_normalized_regular=wnr,
        normalized_regular=wnr and cond4,
        regular=is_regular(chi),
        failures=failures,
    )
    logger.debug(f"Ladder for {chi}: {report.model_dump()}")
    return report


class MuRegularityReport(BaseModel):
    mode: str
    holds: bool
    decomposition: List[str] = Field(default_factory=list)
    failing_pair: Optional[List[str]] = None
    test_value: Optional[str] = None


def _strong_check(chi: UnramifiedCharacter, mu: Sequence) -> Optional[Tuple[Vector, Vector, CharacterValue]]:
    lat = chi.lat
    weights = weight_set(lat.rd, mu)
    for nu, nu_prime in combinations(weights, 2):
        difference = tuple(int(a - b) for a, b in zip(nu, nu_prime))
        orbit = lat.orbit(difference)
        t, f = orbit_test_value(chi, orbit)
        if not _avoids(t, f):
            return nu, nu_prime, t
    return None


def _coweight_with_labels(lat: CoinvariantLattice, labels: Sequence[int]) -> Vector:
    v = (Fraction(0),) * lat.rd.rank
    for i, x in enumerate(labels):
        if x:
            v = add_vectors(v, fundamental_coweight(lat.rd, i), x)
    return v


def decompose_mu(lat: CoinvariantLattice, mu: Sequence[int]) -> List[Vector]:
    """Greedy decomposition of mu into minuscule, then quasi-minuscule, dominant pieces

    The pieces are rational coweights; mu minus their sum is central.
    """
    rd = lat.rd
    remaining = list(rd.labels(mu))
    r = rd.semisimple_rank
    candidates = []
    for i in range(r):
        candidates.append(tuple(1 if k == i else 0 for k in range(r)))
    for i in range(r):
        candidates.append(tuple(2 if k == i else 0 for k in range(r)))
        for j in range(i + 1, r):
            candidates.append(tuple(1 if k in (i, j) else 0 for k in range(r)))
    kinds: Dict[Tuple[int, ...], MinusculeType] = {c: classify_labels(rd, c) for c in candidates}
    ordered = [c for c in candidates if kinds[c] == MinusculeType.MINUSCULE] + \
              [c for c in candidates if kinds[c] == MinusculeType.QUASI_MINUSCULE]

    pieces = []
    while any(remaining):
        choice = next((c for c in ordered if all(a <= b for a, b in zip(c, remaining))), None)
        if choice is None:
            raise PreconditionError(
                f"No minuscule or quasi-minuscule decomposition of {tuple(mu)}; supply one")
        pieces.append(_coweight_with_labels(lat, choice))
        remaining = [a - b for a, b in zip(remaining, choice)]
    return pieces


def mu_regularity(chi: UnramifiedCharacter, mu: Sequence[int], mode: str = 'strong',
                  decomposition: Optional[Sequence[Sequence]] = None) -> MuRegularityReport:
    """Strong: all weight differences of V_mu avoid the forbidden values.
    Decomposed: the strong test on each piece of a (found or supplied) decomposition.
    """
    lat = chi.lat
    if mode == 'strong':
        failure = _strong_check(chi, mu)
        pieces = [tuple(mu)]
    elif mode == 'decomposed':
        if decomposition is not None:
            pieces = [tuple(Fraction(x) for x in piece) for piece in decomposition]
            total = (Fraction(0),) * lat.rd.rank
            for piece in pieces:
                total = add_vectors(total, piece)
            if lat.rd.labels(total) != lat.rd.labels(mu):
                raise PreconditionError("Supplied decomposition does not sum to mu up to a central cocharacter")
        else:
            pieces = decompose_mu(lat, mu)
        failure = None
        for piece in pieces:
            failure = _strong_check(chi, piece)
            if failure:
                break
    else:
        raise ParseError("Unknown mu-regularity mode", mode)

    report = MuRegularityReport(mode=mode, holds=failure is None,
                                decomposition=[format_vector(p) for p in pieces])
    if failure:
        nu, nu_prime, t = failure
        report.failing_pair = [format_vector(nu), format_vector(nu_prime)]
        report.test_value = str(t)
    return report


def _require_gln(chi: UnramifiedCharacter) -> int:
    lat = chi.lat
    if lat.rd.presentation != 'GL' or not lat.is_split or lat.rd.central_rank:
        raise PreconditionError(f"{lat.rd.type_tag} is not a split GL_n")
    return lat.rd.rank


def gln_principal_series_irreducible(chi: UnramifiedCharacter, n: int) -> bool:
    """i_B^G(chi) for GL_n is irreducible iff no ratio chi_i / chi_j equals q^{+-1}"""
    if _require_gln(chi) != n:
        raise PreconditionError(f"Character of {chi.lat.rd.type_tag} passed for GL{n}")
    bad = (q_power(1), q_power(-1))
    return all(chi.values[i] / chi.values[j] not in bad for i in range(n) for j in range(n) if i != j)


def unitary_reducibility_points() -> Tuple[CharacterValue, ...]:
    """Values of chi(e_1 - e_3) at which i_B^G(chi) reduces for unramified U_3

    chi_1 = |.|_E^{+-1} gives q^{+-2}; chi_1 = eta |.|_E^{+-1/2} with eta restricting to
    the quadratic character of the unramified extension gives -q^{+-1}. The third
    family (chi_1 trivial on Q_p^* with chi nontrivial) has no unramified member.
    """
    return q_power(2), q_power(-2), CharacterValue(-1, 1), CharacterValue(-1, -1)


def rank_one_irreducibility(chi: UnramifiedCharacter) -> bool:
    """Executable rank-one criteria for GL_2, SL_2 and unramified U_3"""
    lat = chi.lat
    rd = lat.rd
    if rd.presentation == 'GL' and lat.is_split and rd.rank == 2:
        return gln_principal_series_irreducible(chi, 2)
    if rd.presentation == 'simply_connected' and rd.semisimple_rank == 1 and lat.is_split:
        t = chi(rd.simple_coroots[0])
        return t not in (q_power(1), q_power(-1)) and t ** 2 != ONE
    if rd.presentation == 'GL' and not lat.is_split and rd.rank == 3 and not rd.central_rank:
        t = chi(add_vectors(rd.simple_coroots[0], rd.simple_coroots[1]))
        return t not in unitary_reducibility_points()
    raise PreconditionError(f"No rank-one criterion for {rd.type_tag}")


SAMPLE_COEFFICIENTS = (Fraction(1), Fraction(-1), Fraction(2), Fraction(1, 2), Fraction(3))


def random_character(lat: CoinvariantLattice, rng: random.Random, exponents: int = 2) -> UnramifiedCharacter:
    return UnramifiedCharacter(lat, tuple(
        CharacterValue(rng.choice(SAMPLE_COEFFICIENTS), rng.randint(-exponents, exponents))
        for _ in lat.invariant_basis))


def search_generic_not_wnr(n: int, samples: int = 10 ** 4, seed: int = 0,
                           progress: bool = False) -> List[UnramifiedCharacter]:
    """Random GL_n characters that are generic but not weakly normalized regular"""
    lat = build_group(f"GL{n}")
    rng = random.Random(seed)
    found = []
    for _ in tqdm(range(samples), desc=f"GL{n} characters", disable=not progress):
        chi = random_character(lat, rng)
        if is_generic(chi) and not condition_3(chi):
            logger.warning(f"GL{n}: generic character {chi} fails condition (3)")
            found.append(chi)
    return found
