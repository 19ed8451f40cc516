"""
Averaging bookkeeping
Red_{b,phi} data, predicted Weil summands per (b, w), and the multiset
identity between them and r_mu composed with phi at Frobenius
"""

import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, Field

from characters import CharacterValue, UnramifiedCharacter, frobenius_value, modulus_half
from galois import CoinvariantLattice, relative_parabolic, relative_weyl_group
from kottwitz import KottwitzPoint, enumerate_bgmu_un
from root_datum import WeylWord, act, is_minimal_representative, same_element
from utils import PreconditionError, format_vector
from weights import MinusculeType, WeightSystem, classify_minuscule, freudenthal

logger = logging.getLogger(__name__)

PROVEN = 'PROVEN'
CONJECTURAL = 'CONJECTURAL'

MULTISET_NOTE = ("Equality of Frobenius-eigenvalue multisets with multiplicities and degree "
                 "shifts; this is not an isomorphism of representations.")


@dataclass(frozen=True)
class Summand:
    w: WeylWord
    character: UnramifiedCharacter
    shift: int


@dataclass(frozen=True)
class ReductionDatum:
    """Red_{b,phi}: one normalized induction per w in W_b, shifted by -<2 rho-hat, nu_b>"""
    point: Optional[KottwitzPoint]
    summands: Tuple[Summand, ...] = ()

    @property
    def characters(self) -> Counter:
        return Counter(s.character.values for s in self.summands)


@dataclass
class WeilCharacterMultiset:
    """Frobenius eigenvalues with multiplicities, keyed by (value, degree shift)"""
    entries: Counter = field(default_factory=Counter)

    def add(self, value: CharacterValue, multiplicity: int, shift: int = 0) -> None:
        if multiplicity:
            self.entries[(value, shift)] += multiplicity

    def __add__(self, other: 'WeilCharacterMultiset') -> 'WeilCharacterMultiset':
        return WeilCharacterMultiset(self.entries + other.entries)

    @property
    def total(self) -> int:
        return sum(self.entries.values())

    def values(self) -> Counter:
        """Multiplicities by eigenvalue, forgetting shifts"""
        out: Counter = Counter()
        for (value, _), mult in self.entries.items():
            out[value] += mult
        return out

    def describe(self) -> List[str]:
        return [f"{value} x{mult} [{shift}]" for (value, shift), mult in
                sorted(self.entries.items(), key=lambda item: (str(item[0][0]), item[0][1]))]


def _check_same_group(pt: KottwitzPoint, chi: UnramifiedCharacter) -> None:
    if pt.owner is not chi.lat:
        raise PreconditionError("Point and character live on different groups")


def red_b_phi(pt: Optional[KottwitzPoint], chi: UnramifiedCharacter) -> ReductionDatum:
    """Summands chi o w times delta_{P_b}^{1/2} for w in W_b; empty when b is not unramified"""
    if pt is None:
        return ReductionDatum(point=None)
    _check_same_group(pt, chi)
    half = modulus_half(chi.lat, pt.hn_levi)
    shift = -int(pt.slope_degree)
    summands = tuple(Summand(w=w, character=chi.compose(w) * half, shift=shift) for w in pt.coset_reps)
    return ReductionDatum(point=pt, summands=summands)


def geometric_lemma_red_triv(pt: KottwitzPoint, chi: UnramifiedCharacter) -> Counter:
    """Characters of the constant term along P_b, filtered from the whole relative Weyl group"""
    _check_same_group(pt, chi)
    lat = chi.lat
    absolute = [j for i in pt.hn_levi for j in lat.orbits[i]]
    half = modulus_half(lat, pt.hn_levi)
    return Counter((chi.compose(w) * half).values for w in relative_weyl_group(lat)
                   if is_minimal_representative(lat.rd, w, absolute))


def _require_rep(pt: KottwitzPoint, w: WeylWord) -> None:
    if not any(same_element(pt.owner.rd, w, rep) for rep in pt.coset_reps):
        raise PreconditionError(f"{w} is not a stored representative of W_b")


def predicted_weil_summand(ws: WeightSystem, pt: KottwitzPoint, w: WeylWord,
                           phi: UnramifiedCharacter) -> WeilCharacterMultiset:
    """Weights nu with nu_Gamma = w(b_T), valued through phi at Frobenius"""
    _check_same_group(pt, phi)
    _require_rep(pt, w)
    lat = pt.owner
    target = lat.project(act(lat.rd, w, lat.lift(pt.hn_reduction)))
    shift = -int(pt.slope_degree)
    out = WeilCharacterMultiset()
    for nu, mult in ws.mults.items():
        if lat.project(nu) == target:
            out.add(frobenius_value(phi, nu), mult, shift)
    return out


def full_weil_multiset(ws: WeightSystem, phi: UnramifiedCharacter) -> WeilCharacterMultiset:
    """r_mu composed with phi at Frobenius"""
    out = WeilCharacterMultiset()
    for nu, mult in ws.mults.items():
        out.add(frobenius_value(phi, nu), mult)
    return out


class SummandReport(BaseModel):
    w: str
    eigenvalues: List[str]
    multiplicity: int
    status: str


class StratumReport(BaseModel):
    class_: str = Field(alias='class')
    slope: str
    shift: int
    summands: List[SummandReport]

    model_config = {'populate_by_name': True}


class AveragingReport(BaseModel):
    """Outcome of the refined averaging multiset check"""
    group: str
    mu: List[int]
    verdict: str
    note: str = MULTISET_NOTE
    strata: List[StratumReport] = Field(default_factory=list)
    expected: List[str] = Field(default_factory=list)
    missing: List[str] = Field(default_factory=list)
    extra: List[str] = Field(default_factory=list)


def _status(kind: MinusculeType, index: int) -> str:
    if index == 0 or kind != MinusculeType.NEITHER:
        return PROVEN
    return CONJECTURAL


def refined_averaging_check(lat: CoinvariantLattice, mu: Sequence[int], phi: UnramifiedCharacter,
                            cap: Optional[int] = None) -> AveragingReport:
    """Compare the union over (b, w) of predicted summands with the weights of V_mu"""
    if phi.lat is not lat:
        raise PreconditionError("Parameter and group do not match")
    ws = freudenthal(lat.rd, mu, cap)
    kind = classify_minuscule(lat.rd, mu, cap)
    points = enumerate_bgmu_un(lat, mu, cap)

    predicted = WeilCharacterMultiset()
    strata = []
    for index, pt in enumerate(points):
        summands = []
        for w in pt.coset_reps:
            piece = predicted_weil_summand(ws, pt, w, phi)
            predicted = predicted + piece
            summands.append(SummandReport(w=str(w), eigenvalues=piece.describe(),
                                          multiplicity=piece.total, status=_status(kind, index)))
        strata.append(StratumReport(class_=format_vector(lat.lift(pt.cls)), slope=format_vector(pt.slope),
                                    shift=-int(pt.slope_degree), summands=summands))

    expected = full_weil_multiset(ws, phi).values()
    found = predicted.values()
    missing = expected - found
    extra = found - expected
    verdict = 'PASS' if not missing and not extra else 'FAIL'
    logger.info(f"Refined averaging for {lat.rd.type_tag}, mu={tuple(mu)}: {verdict}")
    return AveragingReport(
        group=lat.rd.type_tag + ("" if lat.is_split else f" ({lat.twist.name})"),
        mu=[int(x) for x in mu],
        verdict=verdict,
        strata=strata,
        expected=[f"{value} x{mult}" for value, mult in sorted(expected.items(), key=lambda kv: str(kv[0]))],
        missing=[f"{value} x{mult}" for value, mult in missing.items()],
        extra=[f"{value} x{mult}" for value, mult in extra.items()],
    )


def coarse_averaging_check(lat: CoinvariantLattice, mu: Sequence[int], cap: Optional[int] = None) -> bool:
    """Dimension-level identity: sum over (b, w) of coinvariant weight spaces equals dim V_mu"""
    ws = freudenthal(lat.rd, mu, cap)
    total = 0
    for pt in enumerate_bgmu_un(lat, mu, cap):
        b_t = lat.lift(pt.hn_reduction)
        for w in pt.coset_reps:
            target = lat.project(act(lat.rd, w, b_t))
            total += sum(mult for nu, mult in ws.mults.items() if lat.project(nu) == target)
    return total == ws.dim


def mu_ordinary_check(lat: CoinvariantLattice, mu: Sequence[int], phi: UnramifiedCharacter,
                      cap: Optional[int] = None) -> bool:
    """Every summand of the mu-ordinary stratum is a single eigenvalue of multiplicity one"""
    ws = freudenthal(lat.rd, mu, cap)
    ordinary = enumerate_bgmu_un(lat, mu, cap)[0]
    return all(predicted_weil_summand(ws, ordinary, w, phi).total == 1 for w in ordinary.coset_reps)


def quasi_minuscule_basic_contribution(lat: CoinvariantLattice, mu: Sequence[int], phi: UnramifiedCharacter,
                                       cap: Optional[int] = None) -> WeilCharacterMultiset:
    """Contribution of the basic class when B(G, mu)_un is {mu-ordinary, basic}"""
    points = enumerate_bgmu_un(lat, mu, cap)
    if len(points) != 2 or not points[1].is_basic:
        raise PreconditionError(f"mu = {tuple(mu)} is not quasi-minuscule for the coinvariant pairing")
    ws = freudenthal(lat.rd, mu, cap)
    basic = points[1]
    out = WeilCharacterMultiset()
    for w in basic.coset_reps:
        out = out + predicted_weil_summand(ws, basic, w, phi)
    return out


def _normalized(chi: UnramifiedCharacter, levi_group: Sequence[WeylWord]) -> Tuple[CharacterValue, ...]:
    # canonical member of the orbit under right composition by the Levi Weyl group
    return min((chi.compose(v).values for v in levi_group), key=lambda values: [str(x) for x in values])


def twist_coherent(pt: KottwitzPoint, chi: UnramifiedCharacter, w: WeylWord) -> bool:
    """Replacing chi by chi o w permutes the Levi-normalized summands of Red_{b,chi}"""
    _check_same_group(pt, chi)
    levi_group = relative_parabolic(chi.lat, pt.hn_levi)

    def normalized_multiset(character: UnramifiedCharacter) -> Dict:
        return Counter(_normalized(character.compose(rep), levi_group) for rep in pt.coset_reps)

    return normalized_multiset(chi) == normalized_multiset(chi.compose(w))
