"""
Galois twists and coinvariant lattices
Diagram automorphisms acting on X_*(T), the quotient X_*(T)_Gamma with its
torsion, dominance, pairing, partial order and the relative Weyl group
"""

import json
import logging
import re
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import sympy

from lattice import LatticeQuotient, as_int_matrix, kernel
from root_datum import (
    RootDatum, Vector, WeylWord, act, add_vectors, build_root_datum, longest_element,
    pairing, scale_vector, _cartan_inverse,
)
from utils import CapExceededError, InvalidTwistError, ParseError, PreconditionError, default_cap

logger = logging.getLogger(__name__)

MAX_TWIST_ORDER = 12

TWISTED_PATTERN = re.compile(r'^(2A|2D|3D|2E|U)(\d+)$')


@dataclass(frozen=True)
class GaloisTwist:
    """Frobenius acting on X_*(T) by a diagram automorphism (column convention)"""
    sigma: Tuple[Tuple[int, ...], ...]
    order: int
    permutation: Tuple[int, ...]
    name: str = 'split'

    def apply(self, v: Sequence) -> Vector:
        return tuple(sum(row[k] * v[k] for k in range(len(v))) for row in self.sigma)

    @property
    def is_trivial(self) -> bool:
        return self.order == 1


def _identity(n: int) -> Tuple[Tuple[int, ...], ...]:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def make_twist(rd: RootDatum, matrix: Sequence[Sequence[int]], name: str = 'custom') -> GaloisTwist:
    """Validate a lattice automorphism and read off its action on the Dynkin diagram"""
    sigma = tuple(tuple(int(x) for x in row) for row in matrix)
    n = rd.rank
    if len(sigma) != n or any(len(row) != n for row in sigma):
        raise InvalidTwistError(f"Twist must be a {n}x{n} integer matrix")

    M = np.array(sigma, dtype=object)
    power = M.copy()
    identity = np.array(_identity(n), dtype=object)
    order = 1
    while not (power == identity).all():
        power = M @ power
        order += 1
        if order > MAX_TWIST_ORDER:
            raise InvalidTwistError("Twist is not of finite order")

    twist = GaloisTwist(sigma=sigma, order=order, permutation=(), name=name)
    coroots = list(rd.simple_coroots)
    permutation = []
    for j, coroot in enumerate(coroots):
        image = twist.apply(coroot)
        if image not in coroots:
            raise InvalidTwistError(f"Twist sends simple coroot {j + 1} outside the simple coroots")
        permutation.append(coroots.index(image))
    if sorted(permutation) != list(range(len(coroots))):
        raise InvalidTwistError("Twist does not permute the simple coroots")

    # dual action: <alpha_{pi(i)}, sigma v> = <alpha_i, v>
    for i, alpha in enumerate(rd.simple_roots):
        target = rd.simple_roots[permutation[i]]
        for k in range(n):
            column = tuple(sigma[r][k] for r in range(n))
            if pairing(target, column) != alpha[k]:
                raise InvalidTwistError(f"Twist does not permute the simple roots (root {i + 1})")

    return GaloisTwist(sigma=sigma, order=order, permutation=tuple(permutation), name=name)


def identity_twist(rd: RootDatum) -> GaloisTwist:
    return GaloisTwist(sigma=_identity(rd.rank), order=1,
                       permutation=tuple(range(rd.semisimple_rank)), name='split')


def permutation_twist(rd: RootDatum, node_map: Dict[int, int], name: str) -> GaloisTwist:
    """Twist of an adjoint presentation permuting fundamental coweights (1-based nodes)"""
    n = rd.rank
    matrix = [list(row) for row in _identity(n)]
    for source, target in node_map.items():
        for r in range(n):
            matrix[r][source - 1] = 1 if r == target - 1 else 0
    return make_twist(rd, matrix, name)


def unitary_twist(rd: RootDatum) -> GaloisTwist:
    """sigma(e_i) = -e_{n+1-i} on the GL_n lattice"""
    n = rd.rank - rd.central_rank
    matrix = [list(row) for row in _identity(rd.rank)]
    for i in range(n):
        for r in range(n):
            matrix[r][i] = -1 if r == n - 1 - i else 0
    return make_twist(rd, matrix, f"2A{n - 1}")


def parse_twist_matrix(text: str) -> List[List[int]]:
    try:
        matrix = json.loads(text)
    except json.JSONDecodeError:
        raise ParseError("Twist is neither a named twist nor a JSON matrix", text)
    if not isinstance(matrix, list) or not all(isinstance(row, list) for row in matrix):
        raise ParseError("Twist matrix must be a list of integer rows", text)
    return [[int(x) for x in row] for row in matrix]


def _positive_first(v: Vector) -> Vector:
    leading = next((x for x in v if x != 0), 0)
    return tuple(-x for x in v) if leading < 0 else v


def _left_inverse(columns: Sequence[Vector], n: int) -> Tuple[Tuple[Fraction, ...], ...]:
    """Exact (B^T B)^{-1} B^T for a basis matrix B given by its columns"""
    if not columns:
        return ()
    B = sympy.Matrix([[col[r] for col in columns] for r in range(n)])
    solver = (B.T * B).inv() * B.T
    return tuple(tuple(Fraction(int(x.p), int(x.q)) for x in solver.row(i)) for i in range(solver.rows))


class CoinvariantLattice:
    """X_*(T)_Gamma = X_*(T) / (sigma - 1) X_*(T) for a root datum with a twist"""

    def __init__(self, rd: RootDatum, twist: GaloisTwist):
        self.rd = rd
        self.twist = twist
        n = rd.rank
        sigma_minus_one = np.array(twist.sigma, dtype=object) - np.array(_identity(n), dtype=object)
        self.quotient = LatticeQuotient(sigma_minus_one)
        coroot_columns = np.array([list(c) for c in rd.simple_coroots], dtype=object).T \
            if rd.simple_coroots else as_int_matrix([], n)
        self.pi1 = LatticeQuotient(np.concatenate([sigma_minus_one, coroot_columns], axis=1)
                                   if rd.simple_coroots else sigma_minus_one)
        basis = kernel(sigma_minus_one)
        self.invariant_basis: Tuple[Vector, ...] = tuple(
            _positive_first(tuple(int(x) for x in basis[:, k])) for k in range(basis.shape[1]))
        self._invariant_solver = _left_inverse(self.invariant_basis, n)
        self.orbits: Tuple[Tuple[int, ...], ...] = self._simple_orbits()
        self.relative_reflections: Tuple[WeylWord, ...] = tuple(
            longest_element(rd, orbit) for orbit in self.orbits)
        logger.debug(f"{rd.type_tag} ({twist.name}): coinvariants {self.describe()}")

    def _simple_orbits(self) -> Tuple[Tuple[int, ...], ...]:
        seen, orbits = set(), []
        for j in range(self.rd.semisimple_rank):
            if j in seen:
                continue
            orbit, k = [], j
            while k not in orbit:
                orbit.append(k)
                k = self.twist.permutation[k]
            seen.update(orbit)
            orbits.append(tuple(sorted(orbit)))
        return tuple(orbits)

    @property
    def is_split(self) -> bool:
        return self.twist.is_trivial

    @property
    def free_rank(self) -> int:
        return self.quotient.free_rank

    @property
    def torsion(self) -> List[int]:
        return self.quotient.torsion

    def describe(self) -> str:
        return self.quotient.describe()

    def apply_sigma(self, v: Sequence) -> Vector:
        return self.twist.apply(v)

    def orbit(self, v: Sequence) -> List[Vector]:
        """Distinct Frobenius translates of a vector"""
        out, current = [], tuple(v)
        while current not in out:
            out.append(current)
            current = self.apply_sigma(current)
        return out

    def orbit_sum(self, v: Sequence) -> Vector:
        total = (0,) * self.rd.rank
        for image in self.orbit(v):
            total = add_vectors(total, image)
        return total

    def average(self, v: Sequence) -> Vector:
        """(1/n) sum of sigma^k v over the twist order n"""
        total = (Fraction(0),) * self.rd.rank
        current = tuple(v)
        for _ in range(self.twist.order):
            total = add_vectors(total, current)
            current = self.apply_sigma(current)
        return scale_vector(total, Fraction(1, self.twist.order))

    def project(self, v: Sequence[int]) -> 'CoinvariantClass':
        if any(Fraction(x).denominator != 1 for x in v):
            raise PreconditionError(f"Cocharacter {tuple(v)} is not integral")
        return CoinvariantClass(self.quotient.coords([int(x) for x in v]), owner=self)

    def lift(self, c: 'CoinvariantClass') -> Vector:
        return self.quotient.lift(c.coords)

    def zero(self) -> 'CoinvariantClass':
        return CoinvariantClass(self.quotient.zero(), owner=self)

    def simple_class(self, i: int) -> 'CoinvariantClass':
        """alpha_i: image of the i-th orbit of simple coroots"""
        return self.project(self.rd.simple_coroots[self.orbits[i][0]])

    def kappa(self, v: Sequence[int]) -> Tuple[int, ...]:
        """Image in pi_1(G)_Gamma"""
        return self.pi1.coords([int(x) for x in v])

    def describe_pi1(self) -> str:
        return self.pi1.describe()

    def coroot_orbits(self) -> List[List[Vector]]:
        """Frobenius orbits of positive coroots"""
        remaining = list(self.rd.positive_coroots)
        orbits = []
        while remaining:
            orbit = self.orbit(remaining[0])
            orbits.append(orbit)
            remaining = [c for c in remaining if c not in orbit]
        return orbits

    def simple_coroot_orbits(self) -> List[List[Vector]]:
        return [[self.rd.simple_coroots[j] for j in orbit] for orbit in self.orbits]

    def is_invariant_character(self, chi: Sequence[int]) -> bool:
        n = self.rd.rank
        for k in range(n):
            column = tuple(self.twist.sigma[r][k] for r in range(n))
            if pairing(chi, column) != chi[k]:
                return False
        return True

    def invariant_coordinates(self, v: Sequence) -> Tuple[int, ...]:
        """Coordinates of a Gamma-invariant cocharacter in the X_*(A) basis"""
        coords = tuple(sum((row[k] * v[k] for k in range(len(v))), Fraction(0))
                       for row in self._invariant_solver)
        rebuilt = (Fraction(0),) * self.rd.rank
        for x, b in zip(coords, self.invariant_basis):
            rebuilt = add_vectors(rebuilt, b, x)
        if rebuilt != tuple(Fraction(x) for x in v) or any(x.denominator != 1 for x in coords):
            raise PreconditionError(f"{tuple(v)} is not an integral Gamma-invariant cocharacter")
        return tuple(int(x) for x in coords)

    def relative_labels(self, nu: Sequence) -> Vector:
        """Pairings of an invariant rational cocharacter with one simple root per orbit"""
        return tuple(pairing(self.rd.simple_roots[orbit[0]], nu) for orbit in self.orbits)

    def to_document(self) -> Dict[str, Any]:
        return {
            'twist': self.twist.name,
            'twist_order': self.twist.order,
            'coinvariants': self.describe(),
            'free_rank': self.free_rank,
            'torsion': self.torsion,
            'pi1_coinvariants': self.describe_pi1(),
            'relative_simple_orbits': [[j + 1 for j in orbit] for orbit in self.orbits],
            'invariant_basis': [list(v) for v in self.invariant_basis],
        }


@dataclass(frozen=True)
class CoinvariantClass:
    """An element of X_*(T)_Gamma in the normal-form coordinates of its owner"""
    coords: Tuple[int, ...]
    owner: CoinvariantLattice = field(compare=False, hash=False, repr=False)

    def __add__(self, other: 'CoinvariantClass') -> 'CoinvariantClass':
        return CoinvariantClass(self.owner.quotient.add(self.coords, other.coords), owner=self.owner)

    def __sub__(self, other: 'CoinvariantClass') -> 'CoinvariantClass':
        return CoinvariantClass(self.owner.quotient.add(self.coords, other.coords, -1), owner=self.owner)

    def __neg__(self) -> 'CoinvariantClass':
        return self.owner.zero() - self

    def __rmul__(self, k: int) -> 'CoinvariantClass':
        return CoinvariantClass(self.owner.quotient.normalize([k * x for x in self.coords]),
                                owner=self.owner)

    @property
    def order(self) -> int:
        return self.owner.quotient.order(self.coords)

    def __str__(self) -> str:
        return "[" + ",".join(str(x) for x in self.coords) + "]"


def coinvariants(rd: RootDatum, twist: Optional[GaloisTwist] = None) -> CoinvariantLattice:
    """Normal form of (sigma - 1) on the cocharacter lattice"""
    return CoinvariantLattice(rd, twist or identity_twist(rd))


def build_group(descriptor: str, twist: Optional[str] = None) -> CoinvariantLattice:
    """Parse a group descriptor such as "GL2", "B3", "2A2", "U3", "3D4" or "E6+T1"

    `twist` may name a twist ("2A<n>", "2D<n>", "3D4", "2E6") or give a JSON matrix.
    """
    descriptor = descriptor.strip()
    suffix = ''
    torus = re.match(r'^(.*)(\+T\d+)$', descriptor)
    if torus:
        descriptor, suffix = torus.group(1), torus.group(2)

    match = TWISTED_PATTERN.match(descriptor)
    if match:
        head, n = match.group(1), int(match.group(2))
        if head in ('2A', 'U'):
            size = n + 1 if head == '2A' else n
            if size < 2:
                raise ParseError("Unitary group needs n >= 2", descriptor)
            rd = build_root_datum(f"GL{size}{suffix}")
            return coinvariants(rd, unitary_twist(rd))
        rd = build_root_datum(f"{head[1]}{n}{suffix}")
        return coinvariants(rd, named_twist(rd, descriptor))

    rd = build_root_datum(descriptor + suffix)
    if twist is None or twist.strip() in ('', 'split', '1'):
        return coinvariants(rd)
    twist = twist.strip()
    if twist.startswith('['):
        return coinvariants(rd, make_twist(rd, parse_twist_matrix(twist)))
    return coinvariants(rd, named_twist(rd, twist))


def named_twist(rd: RootDatum, name: str) -> GaloisTwist:
    """Standard diagram automorphisms of adjoint presentations"""
    letter, n = rd.components[0] if rd.components else ('', 0)
    if name.startswith('2A'):
        if rd.presentation == 'GL':
            return unitary_twist(rd)
        return permutation_twist(rd, {i: n + 1 - i for i in range(1, n + 1)}, name)
    if name.startswith('2D') and letter == 'D':
        return permutation_twist(rd, {n - 1: n, n: n - 1}, name)
    if name == '3D4' and (letter, n) == ('D', 4):
        return permutation_twist(rd, {1: 3, 3: 4, 4: 1}, name)
    if name == '2E6' and (letter, n) == ('E', 6):
        return permutation_twist(rd, {1: 6, 6: 1, 3: 5, 5: 3}, name)
    raise InvalidTwistError(f"Twist {name!r} does not apply to {rd.type_tag}")


def project_to_coinvariants(lat: CoinvariantLattice, v: Sequence[int]) -> CoinvariantClass:
    return lat.project(v)


def coinvariant_pairing(lat: CoinvariantLattice, chi: Sequence[int], c: CoinvariantClass) -> int:
    """<chi, c> for a Gamma-invariant character chi"""
    if not lat.is_invariant_character(chi):
        raise PreconditionError(f"Character {tuple(chi)} is not Gamma-invariant")
    value = pairing(chi, lat.lift(c))
    assert Fraction(value).denominator == 1
    return int(value)


def is_dominant_coinvariant(lat: CoinvariantLattice, c: CoinvariantClass) -> bool:
    """Closed-chamber dominance of the averaged image"""
    return all(p >= 0 for p in lat.rd.labels(lat.average(lat.lift(c))))


def relative_coefficients(lat: CoinvariantLattice, c: CoinvariantClass) -> Optional[Tuple[Fraction, ...]]:
    """Rational coefficients of the averaged class in the averaged alpha_i, if in their span"""
    if not lat.orbits:
        target = lat.average(lat.lift(c))
        return () if all(x == 0 for x in target) else None
    columns = [lat.average(lat.rd.simple_coroots[orbit[0]]) for orbit in lat.orbits]
    M = sympy.Matrix([[sympy.Rational(col[r].numerator, col[r].denominator) for col in columns]
                      for r in range(lat.rd.rank)])
    target = lat.average(lat.lift(c))
    b = sympy.Matrix([sympy.Rational(x.numerator, x.denominator) for x in target])
    try:
        solution, params = M.gauss_jordan_solve(b)
    except ValueError:
        return None
    if params.shape[0]:
        return None
    return tuple(Fraction(int(x.p), int(x.q)) for x in solution)


def coinvariant_leq(lat: CoinvariantLattice, a: CoinvariantClass, b: CoinvariantClass) -> bool:
    """b - a is a non-negative integral combination of the alpha_i (torsion included)"""
    difference = b - a
    coefficients = relative_coefficients(lat, difference)
    if coefficients is None:
        return False
    if any(x < 0 or x.denominator != 1 for x in coefficients):
        return False
    combination = lat.zero()
    for i, x in enumerate(coefficients):
        combination = combination + int(x) * lat.simple_class(i)
    return combination == difference


def dominant_class(lat: CoinvariantLattice, c: CoinvariantClass) -> Tuple[CoinvariantClass, WeylWord]:
    """Dominant representative under the relative Weyl group and the word reaching it"""
    v = lat.lift(c)
    nu = lat.average(v)
    word = WeylWord()
    while True:
        labels = lat.relative_labels(nu)
        negative = [i for i, p in enumerate(labels) if p < 0]
        if not negative:
            return lat.project(v), word
        reflection = lat.relative_reflections[negative[0]]
        v = act(lat.rd, reflection, v)
        nu = act(lat.rd, reflection, nu)
        word = reflection * word


def relative_coset_reps(lat: CoinvariantLattice, levi: Sequence[int] = (),
                        cap: Optional[int] = None,
                        generators: Optional[Sequence[int]] = None) -> List[WeylWord]:
    """Minimal representatives of W_gen / W_L in the relative Weyl group

    `levi` and `generators` list relative indices (positions in lat.orbits);
    generators default to every relative simple reflection.
    """
    cap = cap or default_cap('coset_cap')
    rd = lat.rd
    if not lat.orbits:
        return [WeylWord()]
    levi = set(levi)
    generators = set(range(len(lat.orbits)) if generators is None else generators)
    absolute = {j for i in levi for j in lat.orbits[i]}
    labels = [0 if j in absolute else 1 for j in range(rd.semisimple_rank)]
    inverse = _cartan_inverse(rd.cartan)
    coeffs = [sum(inverse[j][i] * labels[i] for i in range(rd.semisimple_rank))
              for j in range(rd.semisimple_rank)]
    start = (Fraction(0),) * rd.rank
    for x, coroot in zip(coeffs, rd.simple_coroots):
        start = add_vectors(start, coroot, x)

    seen = {start}
    words = [WeylWord()]
    queue = deque([(start, WeylWord())])
    while queue:
        v, word = queue.popleft()
        for i, orbit in enumerate(lat.orbits):
            if i not in generators or pairing(rd.simple_roots[orbit[0]], v) <= 0:
                continue
            image = act(rd, lat.relative_reflections[i], v)
            if image in seen:
                continue
            seen.add(image)
            if len(seen) > cap:
                raise CapExceededError("Relative coset enumeration", cap)
            new_word = lat.relative_reflections[i] * word
            words.append(new_word)
            queue.append((image, new_word))
    return words


def relative_weyl_group(lat: CoinvariantLattice, cap: Optional[int] = None) -> List[WeylWord]:
    return relative_coset_reps(lat, (), cap)


def relative_parabolic(lat: CoinvariantLattice, levi: Sequence[int], cap: Optional[int] = None) -> List[WeylWord]:
    """Elements of the relative Weyl group of the Levi with the given relative indices"""
    return relative_coset_reps(lat, (), cap, generators=levi)
