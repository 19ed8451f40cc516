"""
Unramified Kottwitz sets
Slope and kappa maps, B(G, mu)_un enumeration, Harder-Narasimhan reductions,
GL_n Newton polygons and the dimension/modulus bookkeeping for strata
"""

import logging
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

from galois import (
    CoinvariantClass, CoinvariantLattice, coinvariant_pairing, dominant_class,
    relative_coset_reps,
)
from root_datum import (
    Vector, WeylWord, act, act_on_root, add_vectors, coroot_coefficients, is_dominant,
    is_positive_coeffs, longest_element, opposition, same_element,
)
from utils import CapExceededError, PreconditionError, default_cap, format_vector

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class KottwitzPoint:
    """An element of B(G)_un with its slope, kappa and HN-dominant reduction"""
    cls: CoinvariantClass
    slope: Vector
    kappa: Tuple[int, ...]
    hn_reduction: CoinvariantClass
    levi: Tuple[int, ...]
    hn_levi: Tuple[int, ...]
    coset_reps: Tuple[WeylWord, ...]
    owner: CoinvariantLattice = field(compare=False, hash=False, repr=False)

    @property
    def is_basic(self) -> bool:
        return len(self.levi) == len(self.owner.orbits)

    @property
    def slope_degree(self) -> Fraction:
        """<2 rho-hat, nu_b>"""
        return Fraction(sum(a * b for a, b in zip(self.owner.rd.two_rho_hat, self.slope)))

    def fiber(self) -> List[CoinvariantClass]:
        """The classes w(b_T) for w in W_b"""
        lat = self.owner
        lift = lat.lift(self.hn_reduction)
        return [lat.project(act(lat.rd, w, lift)) for w in self.coset_reps]

    def to_row(self) -> Dict[str, Any]:
        return {
            'class': format_vector(self.owner.lift(self.cls)),
            'slope': format_vector(self.slope),
            'kappa': format_vector(self.kappa),
            'levi': "{" + ",".join(str(i + 1) for i in self.levi) + "}",
            'W_b': len(self.coset_reps),
            'degree': str(self.slope_degree),
        }

    def to_document(self) -> Dict[str, Any]:
        row = self.to_row()
        row.update({
            'class_coords': list(self.cls.coords),
            'hn_reduction': format_vector(self.owner.lift(self.hn_reduction)),
            'hn_levi': [i + 1 for i in self.hn_levi],
            'coset_reps': [str(w) for w in self.coset_reps],
            'basic': self.is_basic,
        })
        return row


BGMU_COLUMNS = ['class', 'slope', 'kappa', 'levi', 'W_b', 'degree']


def unramified_point(lat: CoinvariantLattice, c: CoinvariantClass,
                     cap: Optional[int] = None) -> KottwitzPoint:
    """Full Kottwitz data of the B(G)_un element represented by c"""
    rd = lat.rd
    dominant, _ = dominant_class(lat, c)
    v = lat.lift(dominant)
    slope = lat.average(v)
    labels = lat.relative_labels(slope)
    levi = tuple(i for i, p in enumerate(labels) if p == 0)

    w0 = longest_element(rd)
    hn_reduction = lat.project(act(rd, w0, v))
    opp = opposition(rd) if rd.semisimple_rank else {}
    position = {j: i for i, orbit in enumerate(lat.orbits) for j in orbit}
    hn_levi = tuple(sorted({position[opp[lat.orbits[i][0]]] for i in levi}))
    coset_reps = tuple(relative_coset_reps(lat, hn_levi, cap))

    return KottwitzPoint(
        cls=dominant,
        slope=tuple(Fraction(x) for x in slope),
        kappa=lat.kappa(v),
        hn_reduction=hn_reduction,
        levi=levi,
        hn_levi=hn_levi,
        coset_reps=coset_reps,
        owner=lat,
    )


def sort_points(points: List[KottwitzPoint]) -> List[KottwitzPoint]:
    """Descending in the partial order: larger <2 rho-hat, nu> first"""
    return sorted(points, key=lambda pt: (-pt.slope_degree, tuple(-x for x in pt.slope), pt.cls.coords))


def _check_dominant_mu(lat: CoinvariantLattice, mu: Sequence) -> Tuple[int, ...]:
    if len(mu) != lat.rd.rank:
        raise PreconditionError(f"mu {tuple(mu)} does not have rank {lat.rd.rank}")
    if any(Fraction(x).denominator != 1 for x in mu):
        raise PreconditionError(f"mu {tuple(mu)} is not integral")
    mu = tuple(int(x) for x in mu)
    if not is_dominant(lat.rd, mu):
        raise PreconditionError(f"mu {mu} is not dominant")
    return mu


def enumerate_bgmu_un(lat: CoinvariantLattice, mu: Sequence[int],
                      cap: Optional[int] = None) -> List[KottwitzPoint]:
    """Dominant classes lambda_Gamma <= mu_Gamma, mu-ordinary element first"""
    cap = cap or default_cap('orbit_cap')
    mu = _check_dominant_mu(lat, mu)
    top = lat.project(mu)
    # every alpha_i raises <2 rho-hat, .> by 2 and dominant classes pair non-negatively
    depth = int(sum(a * b for a, b in zip(lat.rd.two_rho_hat, mu))) // 2
    steps = [lat.simple_class(i) for i in range(len(lat.orbits))]

    seen = {top}
    frontier = deque([(top, 0)])
    while frontier:
        current, n = frontier.popleft()
        if n == depth:
            continue
        for step in steps:
            candidate = current - step
            if candidate in seen:
                continue
            seen.add(candidate)
            if len(seen) > cap:
                raise CapExceededError("B(G, mu)_un search", cap)
            frontier.append((candidate, n + 1))

    points = sort_points([unramified_point(lat, c, cap) for c in seen
                          if all(p >= 0 for p in lat.relative_labels(lat.average(lat.lift(c))))])
    logger.debug(f"B(G,{mu})_un: {len(points)} of {len(seen)} candidate classes are dominant")
    return points


def mu_ordinary_and_basic(lat: CoinvariantLattice, mu: Sequence[int],
                          cap: Optional[int] = None) -> Tuple[KottwitzPoint, Tuple[int, ...]]:
    """The mu-ordinary point and mu^flat, the image of mu in pi_1(G)_Gamma"""
    points = enumerate_bgmu_un(lat, mu, cap)
    return points[0], lat.kappa(_check_dominant_mu(lat, mu))


def basic_point(lat: CoinvariantLattice, mu: Sequence[int],
                cap: Optional[int] = None) -> Optional[KottwitzPoint]:
    """The basic element of B(G, mu) when it is unramified, else None"""
    points = enumerate_bgmu_un(lat, mu, cap)
    last = points[-1]
    return last if last.is_basic else None


def bgmu_gln(n: int, mu: Sequence[int]) -> List[Tuple[Fraction, ...]]:
    """Newton points of B(GL_n, mu): concave polygons under the Hodge polygon of mu"""
    mu = tuple(int(x) for x in mu)
    if len(mu) != n or any(mu[i] < mu[i + 1] for i in range(n - 1)):
        raise PreconditionError(f"mu {mu} is not a dominant cocharacter of GL{n}")
    hodge = [0]
    for x in mu:
        hodge.append(hodge[-1] + x)
    total = hodge[-1]
    results: List[Tuple[Fraction, ...]] = []

    def extend(x: int, y: int, previous: Optional[Fraction], slopes: Tuple[Fraction, ...]) -> None:
        if x == n:
            if y == total:
                results.append(slopes)
            return
        for m in range(1, n - x + 1):
            low = math.ceil(Fraction(m * (total - y), n - x))
            for h in range(low, hodge[x + m] - y + 1):
                slope = Fraction(h, m)
                if previous is not None and slope >= previous:
                    break
                extend(x + m, y + h, slope, slopes + (slope,) * m)

    extend(0, 0, None, ())
    return sorted(results, reverse=True)


def component_dimension(lat: CoinvariantLattice, c: CoinvariantClass) -> int:
    """d = <2 rho-hat, c>"""
    return coinvariant_pairing(lat, lat.rd.two_rho_hat, c)


def two_rho_hat_w(lat: CoinvariantLattice, w: WeylWord) -> Vector:
    """Sum of the positive roots alpha with w(alpha) > 0"""
    rd = lat.rd
    out = (0,) * rd.rank
    for coeffs, alpha in zip(rd.positive_root_coeffs, rd.positive_roots):
        if is_positive_coeffs(act_on_root(rd, w, coeffs)):
            out = add_vectors(out, alpha)
    return out


def dimension_identity(lat: CoinvariantLattice, pt: KottwitzPoint, w: WeylWord) -> Tuple[Fraction, Fraction]:
    """Both sides of d(w b_T) = <2 rho-hat, nu_b> - 2 <2 rho-hat^w, nu^HN_{b_T}>

    nu^HN is the negative of the averaged HN reduction.
    """
    rd = lat.rd
    b_t = lat.lift(pt.hn_reduction)
    lhs = Fraction(component_dimension(lat, lat.project(act(rd, w, b_t))))
    nu_hn = tuple(-x for x in lat.average(b_t))
    weighted = two_rho_hat_w(lat, w)
    rhs = pt.slope_degree - 2 * sum(a * b for a, b in zip(weighted, nu_hn))
    return lhs, Fraction(rhs)


@dataclass(frozen=True)
class ModulusDecomposition:
    """delta_B^w split as delta^{>0} delta^{=0} delta^{<0} (character exponents)"""
    positive: Vector
    zero: Vector
    negative: Vector
    positive_roots: Tuple[Vector, ...] = ()
    zero_roots: Tuple[Vector, ...] = ()
    negative_roots: Tuple[Vector, ...] = ()

    @property
    def total(self) -> Vector:
        return add_vectors(add_vectors(self.positive, self.zero), self.negative)


def modulus_decomposition(lat: CoinvariantLattice, w: WeylWord, pt: KottwitzPoint) -> ModulusDecomposition:
    rd = lat.rd
    if not any(same_element(rd, w, rep) for rep in pt.coset_reps):
        raise PreconditionError(f"{w} is not a minimal representative for the HN Levi of this point")
    nu = lat.average(lat.lift(pt.hn_reduction))
    buckets: Dict[str, List[Vector]] = {'>0': [], '=0': [], '<0': []}
    for coeffs, alpha in zip(rd.positive_root_coeffs, rd.positive_roots):
        image = act_on_root(rd, w, coeffs)
        if sum(a * b for a, b in zip(alpha, nu)) == 0:
            key = '=0'
        elif is_positive_coeffs(image):
            key = '>0'
        else:
            key = '<0'
        buckets[key].append(rd.root_vector(image))

    def total(vectors: List[Vector]) -> Vector:
        out = (0,) * rd.rank
        for v in vectors:
            out = add_vectors(out, v)
        return out

    return ModulusDecomposition(
        positive=total(buckets['>0']), zero=total(buckets['=0']), negative=total(buckets['<0']),
        positive_roots=tuple(buckets['>0']), zero_roots=tuple(buckets['=0']),
        negative_roots=tuple(buckets['<0']),
    )


def leq_points(lat: CoinvariantLattice, a: KottwitzPoint, b: KottwitzPoint) -> bool:
    """a <= b: slope dominance nu_a <= nu_b together with kappa(a) = kappa(b)"""
    if a.kappa != b.kappa:
        return False
    rd = lat.rd
    difference = add_vectors(b.slope, a.slope, -1)
    coefficients = coroot_coefficients(rd, difference)
    combination = (Fraction(0),) * rd.rank
    for x, coroot in zip(coefficients, rd.simple_coroots):
        combination = add_vectors(combination, coroot, x)
    if tuple(combination) != tuple(difference):
        return False
    return all(x >= 0 for x in coefficients)
