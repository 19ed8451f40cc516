"""
Highest-weight modules of the dual group
Weights of V_mu are cocharacters of T; the roots of the dual group are the
coroots of G. Multiplicities come from Freudenthal's recursion on the dominant
chamber, with the Weyl dimension formula and Kostant's formula as oracles.
"""

import logging
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

from galois import CoinvariantClass, CoinvariantLattice, dominant_class
from kottwitz import KottwitzPoint, sort_points, unramified_point
from root_datum import (
    RootDatum, Vector, act, add_vectors, coroot_coefficients, enumerate_weyl_group,
    is_dominant, weyl_orbit,
)
from utils import CapExceededError, PreconditionError, default_cap

logger = logging.getLogger(__name__)

Labels = Tuple[int, ...]


class MinusculeType(str, Enum):
    MINUSCULE = 'minuscule'
    QUASI_MINUSCULE = 'quasi-minuscule'
    NEITHER = 'neither'


@dataclass(frozen=True)
class WeightSystem:
    """Weights of V_mu with multiplicities"""
    highest: Vector
    mults: Dict[Vector, int] = field(hash=False)
    dominant: Dict[Vector, int] = field(hash=False)
    dim: int

    @property
    def weights(self) -> List[Vector]:
        return sorted(self.mults, reverse=True)

    def multiplicity(self, nu: Sequence[int]) -> int:
        return self.mults.get(tuple(nu), 0)


def coroot_lengths(rd: RootDatum) -> Tuple[Fraction, ...]:
    """Squared lengths L_j of the simple coroots under a W-invariant form

    Normalized per connected component so that A[i][j] L_i = A[j][i] L_j.
    """
    r = rd.semisimple_rank
    lengths: List[Optional[Fraction]] = [None] * r
    for root in range(r):
        if lengths[root] is not None:
            continue
        lengths[root] = Fraction(1)
        queue = deque([root])
        while queue:
            i = queue.popleft()
            for j in range(r):
                if j != i and rd.cartan[i][j] != 0 and lengths[j] is None:
                    lengths[j] = lengths[i] * rd.cartan[i][j] / rd.cartan[j][i]
                    queue.append(j)
    return tuple(lengths)


def _check_mu(rd: RootDatum, mu: Sequence) -> Vector:
    if len(mu) != rd.rank or any(Fraction(x).denominator != 1 for x in mu):
        raise PreconditionError(f"{tuple(mu)} is not a cocharacter of {rd.type_tag}")
    mu = tuple(int(x) for x in mu)
    if not is_dominant(rd, mu):
        raise PreconditionError(f"Highest weight {mu} is not dominant")
    return mu


def _coroot_labels(rd: RootDatum, m: Sequence[int]) -> Labels:
    r = rd.semisimple_rank
    return tuple(sum(m[j] * rd.cartan[i][j] for j in range(r)) for i in range(r))


def _dominant_labels(rd: RootDatum, labels: Sequence[int]) -> Labels:
    x = list(labels)
    while True:
        negative = [i for i, p in enumerate(x) if p < 0]
        if not negative:
            return tuple(x)
        i = negative[0]
        xi = x[i]
        x = [x[k] - xi * rd.cartan[k][i] for k in range(len(x))]


def dominant_weights(rd: RootDatum, mu: Sequence[int],
                     cap: Optional[int] = None) -> Dict[Labels, Tuple[int, ...]]:
    """Dominant weights of V_mu keyed by labels, valued by depth coefficients n (mu - sum n_j a_j)"""
    return dominant_labels_below(rd, rd.labels(_check_mu(rd, mu)), cap)


def dominant_labels_below(rd: RootDatum, start_labels: Sequence[int],
                          cap: Optional[int] = None) -> Dict[Labels, Tuple[int, ...]]:
    cap = cap or default_cap('weight_cap')
    r = rd.semisimple_rank
    start_labels = tuple(int(x) for x in start_labels)
    found = {start_labels: (0,) * r}
    queue = deque([start_labels])
    steps = [(m, _coroot_labels(rd, m)) for m in rd.positive_coroot_coeffs]
    while queue:
        labels = queue.popleft()
        depth = found[labels]
        for m, shift in steps:
            image = tuple(a - b for a, b in zip(labels, shift))
            if any(p < 0 for p in image) or image in found:
                continue
            found[image] = tuple(a + b for a, b in zip(depth, m))
            if len(found) > cap:
                raise CapExceededError("Dominant weight enumeration", cap)
            queue.append(image)
    return found


def _weight_vector(rd: RootDatum, mu: Vector, depth: Sequence[int]) -> Vector:
    v = mu
    for n, coroot in zip(depth, rd.simple_coroots):
        v = add_vectors(v, coroot, -n)
    return tuple(int(x) for x in v)


def freudenthal(rd: RootDatum, mu: Sequence[int], cap: Optional[int] = None) -> WeightSystem:
    """Weight multiplicities of V_mu by Freudenthal's formula

    V_mu is a module for the dual group: its roots are the coroots of G, so for
    G2 the coweight w1 (alpha_1 short) gives the 14-dimensional module.
    """
    cap = cap or default_cap('weight_cap')
    mu = _check_mu(rd, mu)
    r = rd.semisimple_rank
    lengths = coroot_lengths(rd)
    top = rd.labels(mu)
    dominant = dominant_weights(rd, mu, cap)
    order = sorted(dominant, key=lambda lab: (sum(dominant[lab]), dominant[lab]))
    positive = [(m, _coroot_labels(rd, m)) for m in rd.positive_coroot_coeffs]

    def form(m: Sequence[int], labels: Sequence) -> Fraction:
        # (x, beta) for beta = sum m_j a_j, from the labels of x
        return sum((m[j] * labels[j] * lengths[j] / 2 for j in range(r)), Fraction(0))

    table: Dict[Labels, int] = {}
    for labels in order:
        n = dominant[labels]
        if labels == top:
            table[labels] = 1
            continue
        shifted = tuple(p + 1 for p in top)
        gamma_labels = _coroot_labels(rd, n)
        denominator = 2 * form(n, shifted) - form(n, gamma_labels)
        numerator = Fraction(0)
        for m, beta_labels in positive:
            k = 1
            while True:
                image = tuple(a + k * b for a, b in zip(labels, beta_labels))
                mult = table.get(_dominant_labels(rd, image), 0)
                if mult == 0:
                    break
                numerator += mult * form(m, image)
                k += 1
        value = 2 * numerator / denominator
        assert value.denominator == 1 and value >= 0
        table[labels] = int(value)

    mults: Dict[Vector, int] = {}
    dominant_mults: Dict[Vector, int] = {}
    for labels, mult in table.items():
        if mult == 0:
            continue
        weight = _weight_vector(rd, mu, dominant[labels])
        dominant_mults[weight] = mult
        for image in weyl_orbit(rd, weight, cap):
            mults[image] = mult
            if len(mults) > cap:
                raise CapExceededError("Weight system", cap)
    ws = WeightSystem(highest=mu, mults=mults, dominant=dominant_mults, dim=sum(mults.values()))
    logger.debug(f"V_{mu} for {rd.type_tag}: {len(mults)} weights, dimension {ws.dim}")
    return ws


def weyl_dimension(rd: RootDatum, mu: Sequence[int]) -> int:
    """prod over positive roots alpha of <alpha, mu + rho> / <alpha, rho>"""
    mu = _check_mu(rd, mu)
    labels = rd.labels(mu)
    value = Fraction(1)
    for c in rd.positive_root_coeffs:
        value *= Fraction(sum(ci * (li + 1) for ci, li in zip(c, labels)), sum(c))
    assert value.denominator == 1
    return int(value)


def kostant_multiplicity(rd: RootDatum, mu: Sequence[int], nu: Sequence[int],
                         cap: Optional[int] = None) -> int:
    """Multiplicity by Kostant's alternating sum over W (small rank only)"""
    mu = _check_mu(rd, mu)
    shifted = add_vectors(mu, rd.rho)
    target = add_vectors(tuple(nu), rd.rho)
    positive = tuple(rd.positive_coroot_coeffs)

    @lru_cache(maxsize=None)
    def partitions(coeffs: Tuple[int, ...], start: int) -> int:
        if all(x == 0 for x in coeffs):
            return 1
        total = 0
        for k in range(start, len(positive)):
            rest = tuple(a - b for a, b in zip(coeffs, positive[k]))
            if all(x >= 0 for x in rest):
                total += partitions(rest, k)
        return total

    result = 0
    for w in enumerate_weyl_group(rd, cap):
        difference = add_vectors(act(rd, w, shifted), target, -1)
        coefficients = coroot_coefficients(rd, difference)
        combination = (Fraction(0),) * rd.rank
        for x, coroot in zip(coefficients, rd.simple_coroots):
            combination = add_vectors(combination, coroot, x)
        if tuple(combination) != tuple(difference):
            continue
        if any(x < 0 or Fraction(x).denominator != 1 for x in coefficients):
            continue
        sign = -1 if w.length % 2 else 1
        result += sign * partitions(tuple(int(x) for x in coefficients), 0)
    return result


def coinvariant_weight_space(ws: WeightSystem, lat: CoinvariantLattice, c: CoinvariantClass) -> int:
    """dim V_mu(c) = sum of mult(nu) over weights nu projecting to c"""
    return sum(mult for nu, mult in ws.mults.items() if lat.project(nu) == c)


def coinvariant_weight_spaces(ws: WeightSystem, lat: CoinvariantLattice) -> Dict[CoinvariantClass, int]:
    spaces: Dict[CoinvariantClass, int] = {}
    for nu, mult in ws.mults.items():
        c = lat.project(nu)
        spaces[c] = spaces.get(c, 0) + mult
    return spaces


def classify_minuscule(rd: RootDatum, mu: Sequence[int], cap: Optional[int] = None) -> MinusculeType:
    """Minuscule: mu is the only dominant weight; quasi-minuscule: the others are one central weight"""
    return classify_labels(rd, rd.labels(_check_mu(rd, mu)), cap)


def classify_labels(rd: RootDatum, top: Sequence[int], cap: Optional[int] = None) -> MinusculeType:
    top = tuple(int(x) for x in top)
    dominant = dominant_labels_below(rd, top, cap)
    if len(dominant) == 1:
        return MinusculeType.MINUSCULE
    if len(dominant) == 2:
        (other,) = [lab for lab in dominant if lab != top]
        if all(p == 0 for p in other) and tuple(dominant[other]) in rd.positive_coroot_coeffs:
            return MinusculeType.QUASI_MINUSCULE
    return MinusculeType.NEITHER


def weight_orbits_to_kottwitz(ws: WeightSystem, lat: CoinvariantLattice,
                              cap: Optional[int] = None) -> List[KottwitzPoint]:
    """Dominant coinvariant classes of the weights of V_mu"""
    classes = {dominant_class(lat, lat.project(nu))[0] for nu in ws.mults}
    return sort_points([unramified_point(lat, c, cap) for c in classes])


def weight_set(rd: RootDatum, mu: Sequence, cap: Optional[int] = None) -> List[Vector]:
    """Weights of V_mu for a dominant, possibly rational, cocharacter (no multiplicities)"""
    cap = cap or default_cap('weight_cap')
    mu = tuple(Fraction(x) for x in mu)
    if not is_dominant(rd, mu):
        raise PreconditionError(f"Highest weight {tuple(mu)} is not dominant")
    weights = set()
    for depth in dominant_labels_below(rd, rd.labels(mu), cap).values():
        v = mu
        for n, coroot in zip(depth, rd.simple_coroots):
            v = add_vectors(v, coroot, -n)
        weights |= weyl_orbit(rd, v, cap)
        if len(weights) > cap:
            raise CapExceededError("Weight system", cap)
    return sorted(weights, reverse=True)
