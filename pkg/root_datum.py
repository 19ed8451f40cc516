"""
Based root data for the Kottwitz toolkit
Cartan data per type, positive roots generated by reflection closure,
Weyl words, orbits, dominance and minimal-length coset representatives
"""

import logging
import re
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from math import factorial
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import sympy

from lattice import LatticeQuotient, as_int_matrix
from utils import CapExceededError, PreconditionError, UnsupportedTypeError, default_cap

logger = logging.getLogger(__name__)

Vector = Tuple  # tuple of int or Fraction

TYPE_PATTERN = re.compile(r'^(GL|SL|[A-G])(\d+)$')

MIN_RANK = {'A': 1, 'B': 2, 'C': 2, 'D': 4, 'E': 6, 'F': 4, 'G': 2}
MAX_RANK = {'E': 8, 'F': 4, 'G': 2}

E_EDGES = [(1, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8), (2, 4)]


def pairing(x: Sequence, v: Sequence):
    """Standard dot product between a character and a cocharacter"""
    return sum(a * b for a, b in zip(x, v))


def add_vectors(a: Sequence, b: Sequence, scale=1) -> Vector:
    return tuple(x + scale * y for x, y in zip(a, b))


def scale_vector(a: Sequence, s) -> Vector:
    return tuple(s * x for x in a)


def unit(i: int, n: int) -> Vector:
    return tuple(1 if k == i else 0 for k in range(n))


def gram_matrix(letter: str, n: int) -> List[List[int]]:
    """Inner products of simple roots, Bourbaki numbering"""
    gram = [[0] * n for _ in range(n)]

    def edge(i: int, j: int, value: int) -> None:
        gram[i - 1][j - 1] = gram[j - 1][i - 1] = value

    if letter == 'A':
        lengths = [2] * n
        for i in range(1, n):
            edge(i, i + 1, -1)
    elif letter == 'B':
        lengths = [2] * (n - 1) + [1]
        for i in range(1, n):
            edge(i, i + 1, -1)
    elif letter == 'C':
        lengths = [2] * (n - 1) + [4]
        for i in range(1, n - 1):
            edge(i, i + 1, -1)
        edge(n - 1, n, -2)
    elif letter == 'D':
        lengths = [2] * n
        for i in range(1, n - 1):
            edge(i, i + 1, -1)
        edge(n - 2, n, -1)
    elif letter == 'E':
        lengths = [2] * n
        for i, j in E_EDGES:
            if j <= n:
                edge(i, j, -1)
    elif letter == 'F':
        lengths = [4, 4, 2, 2]
        edge(1, 2, -2)
        edge(2, 3, -2)
        edge(3, 4, -1)
    elif letter == 'G':
        lengths = [2, 6]
        edge(1, 2, -3)
    else:
        raise UnsupportedTypeError(f"Unknown Cartan type {letter}{n}")

    for i in range(n):
        gram[i][i] = lengths[i]
    return gram


def cartan_matrix(letter: str, n: int) -> Tuple[Tuple[int, ...], ...]:
    """A[i][j] = <alpha_i, alpha_j^vee> = 2 (alpha_i, alpha_j) / (alpha_j, alpha_j)"""
    gram = gram_matrix(letter, n)
    return tuple(tuple(2 * gram[i][j] // gram[j][j] for j in range(n)) for i in range(n))


def expected_root_count(letter: str, n: int) -> int:
    counts = {'A': n * (n + 1) // 2, 'B': n * n, 'C': n * n, 'D': n * (n - 1),
              'E': {6: 36, 7: 63, 8: 120}.get(n, 0), 'F': 24, 'G': 6}
    return counts[letter]


def weyl_order_of_type(letter: str, n: int) -> int:
    if letter == 'A':
        return factorial(n + 1)
    if letter in ('B', 'C'):
        return 2 ** n * factorial(n)
    if letter == 'D':
        return 2 ** (n - 1) * factorial(n)
    return {('E', 6): 51840, ('E', 7): 2903040, ('E', 8): 696729600,
            ('F', 4): 1152, ('G', 2): 12}[(letter, n)]


@dataclass(frozen=True)
class WeylWord:
    """w = s_{letters[0]} s_{letters[1]} ... ; the last letter acts first"""
    letters: Tuple[int, ...] = ()

    @property
    def length(self) -> int:
        return len(self.letters)

    def inverse(self) -> 'WeylWord':
        return WeylWord(tuple(reversed(self.letters)))

    def __mul__(self, other: 'WeylWord') -> 'WeylWord':
        return WeylWord(self.letters + other.letters)

    def __str__(self) -> str:
        return "1" if not self.letters else "".join(f"s{i + 1}" for i in self.letters)


@dataclass(frozen=True)
class RootDatum:
    """Based root datum on Z^rank; roots are characters, coroots cocharacters"""
    type_tag: str
    rank: int
    simple_roots: Tuple[Vector, ...]
    simple_coroots: Tuple[Vector, ...]
    cartan: Tuple[Tuple[int, ...], ...]
    components: Tuple[Tuple[str, int], ...]
    presentation: str
    central_rank: int = 0
    positive_root_coeffs: Tuple[Vector, ...] = field(default=(), repr=False)
    positive_coroot_coeffs: Tuple[Vector, ...] = field(default=(), repr=False)

    @property
    def semisimple_rank(self) -> int:
        return len(self.simple_roots)

    @cached_property
    def positive_roots(self) -> Tuple[Vector, ...]:
        return tuple(self.root_vector(c) for c in self.positive_root_coeffs)

    @cached_property
    def positive_coroots(self) -> Tuple[Vector, ...]:
        return tuple(self.coroot_vector(m) for m in self.positive_coroot_coeffs)

    def root_vector(self, coeffs: Sequence[int]) -> Vector:
        out = (0,) * self.rank
        for c, alpha in zip(coeffs, self.simple_roots):
            out = add_vectors(out, alpha, c)
        return out

    def coroot_vector(self, coeffs: Sequence[int]) -> Vector:
        out = (0,) * self.rank
        for m, coroot in zip(coeffs, self.simple_coroots):
            out = add_vectors(out, coroot, m)
        return out

    def labels(self, v: Sequence) -> Vector:
        """Pairings <alpha_i, v> of a cocharacter with the simple roots"""
        return tuple(pairing(alpha, v) for alpha in self.simple_roots)

    def colabels(self, x: Sequence) -> Vector:
        """Pairings <x, alpha_i^vee> of a character with the simple coroots"""
        return tuple(pairing(x, coroot) for coroot in self.simple_coroots)

    @cached_property
    def two_rho_hat(self) -> Vector:
        """Sum of the positive roots (the character 2 rho-hat)"""
        out = (0,) * self.rank
        for alpha in self.positive_roots:
            out = add_vectors(out, alpha)
        return out

    @cached_property
    def rho(self) -> Vector:
        """Half the sum of the positive coroots"""
        out = (Fraction(0),) * self.rank
        for coroot in self.positive_coroots:
            out = add_vectors(out, coroot)
        return scale_vector(out, Fraction(1, 2))

    @property
    def coxeter_number(self) -> int:
        if not self.positive_root_coeffs:
            return 1
        return max(sum(c) for c in self.positive_root_coeffs) + 1

    @property
    def weyl_group_order(self) -> int:
        order = 1
        for letter, n in self.components:
            order *= weyl_order_of_type(letter, n)
        return order

    def to_document(self) -> Dict:
        return {
            'type': self.type_tag,
            'presentation': self.presentation,
            'rank': self.rank,
            'semisimple_rank': self.semisimple_rank,
            'cartan': [list(row) for row in self.cartan],
            'simple_roots': [list(v) for v in self.simple_roots],
            'simple_coroots': [list(v) for v in self.simple_coroots],
            'positive_roots': [list(v) for v in self.positive_roots],
            'positive_coroots': [list(v) for v in self.positive_coroots],
            'weyl_group_order': self.weyl_group_order,
            'coxeter_number': self.coxeter_number,
        }


def positive_root_pairs(cartan: Sequence[Sequence[int]]) -> List[Tuple[Vector, Vector]]:
    """Positive roots and their coroots, as simple-root coefficient pairs"""
    r = len(cartan)
    simple = [(unit(i, r), unit(i, r)) for i in range(r)]
    seen = set(simple)
    queue = deque(simple)
    while queue:
        c, m = queue.popleft()
        for i in range(r):
            if c == unit(i, r):
                continue
            pc = sum(c[j] * cartan[j][i] for j in range(r))
            pm = sum(m[j] * cartan[i][j] for j in range(r))
            nc = tuple(c[k] - (pc if k == i else 0) for k in range(r))
            nm = tuple(m[k] - (pm if k == i else 0) for k in range(r))
            if (nc, nm) not in seen:
                seen.add((nc, nm))
                queue.append((nc, nm))
    return sorted(seen, key=lambda pair: (sum(pair[0]), pair[0]))


def validate_cartan(cartan: Sequence[Sequence[int]]) -> None:
    r = len(cartan)
    for i in range(r):
        if cartan[i][i] != 2:
            raise UnsupportedTypeError(f"Cartan diagonal entry {i} is {cartan[i][i]}")
        for j in range(r):
            if i == j:
                continue
            if cartan[i][j] > 0 or (cartan[i][j] == 0) != (cartan[j][i] == 0):
                raise UnsupportedTypeError(f"Cartan entries ({i},{j}) are inconsistent")
            if cartan[i][j] * cartan[j][i] > 3:
                raise UnsupportedTypeError(f"Cartan entries ({i},{j}) are not of finite type")


def _assemble(type_tag: str, letter: str, n: int, presentation: str,
              roots: List[Vector], coroots: List[Vector], central_rank: int) -> RootDatum:
    cartan = cartan_matrix(letter, n)
    pad = (0,) * central_rank
    roots = [tuple(v) + pad for v in roots]
    coroots = [tuple(v) + pad for v in coroots]
    rank = len(roots[0]) if roots else central_rank

    for i in range(n):
        for j in range(n):
            assert pairing(roots[i], coroots[j]) == cartan[i][j]

    pairs = positive_root_pairs(cartan)
    rd = RootDatum(
        type_tag=type_tag,
        rank=rank,
        simple_roots=tuple(roots),
        simple_coroots=tuple(coroots),
        cartan=cartan,
        components=((letter, n),) if n else (),
        presentation=presentation,
        central_rank=central_rank,
        positive_root_coeffs=tuple(c for c, _ in pairs),
        positive_coroot_coeffs=tuple(m for _, m in pairs),
    )
    _validate(rd, letter, n)
    return rd


def _validate(rd: RootDatum, letter: str, n: int) -> None:
    validate_cartan(rd.cartan)
    if n and len(rd.positive_root_coeffs) != expected_root_count(letter, n):
        raise UnsupportedTypeError(
            f"{rd.type_tag}: generated {len(rd.positive_root_coeffs)} positive roots, "
            f"expected {expected_root_count(letter, n)}")
    two_rho_hat = rd.two_rho_hat
    for coroot in rd.simple_coroots:
        assert pairing(two_rho_hat, coroot) == 2


def build_root_datum(descriptor: str, central_rank: int = 0) -> RootDatum:
    """Build a validated root datum from a type descriptor

    Accepted descriptors: "<Letter><rank>" (adjoint presentation, Bourbaki
    numbering), "GL<n>" and "SL<n>". A trailing "+T<z>" adds a central torus.
    """
    descriptor = descriptor.strip()
    torus = re.match(r'^(.*)\+T(\d+)$', descriptor)
    if torus:
        descriptor, central_rank = torus.group(1), central_rank + int(torus.group(2))
    match = TYPE_PATTERN.match(descriptor)
    if not match:
        raise UnsupportedTypeError(f"Unsupported group descriptor {descriptor!r}")
    head, n = match.group(1), int(match.group(2))
    if central_rank < 0:
        raise UnsupportedTypeError("Central torus rank must be non-negative")
    tag = descriptor + (f"+T{central_rank}" if central_rank else "")

    if head == 'GL':
        if n < 1:
            raise UnsupportedTypeError("GL0 has rank 0")
        if n == 1:
            return _torus(tag, 1 + central_rank)
        roots = [tuple((1 if k == i else -1 if k == i + 1 else 0) for k in range(n))
                 for i in range(n - 1)]
        rd = _assemble(tag, 'A', n - 1, 'GL', roots, list(roots), central_rank)
        return _warn_fundamental_group(rd)

    if head == 'SL':
        if n < 2:
            raise UnsupportedTypeError(f"{descriptor} has semisimple rank 0")
        cartan = cartan_matrix('A', n - 1)
        roots = [tuple(row) for row in cartan]
        coroots = [unit(j, n - 1) for j in range(n - 1)]
        return _warn_fundamental_group(
            _assemble(tag, 'A', n - 1, 'simply_connected', roots, coroots, central_rank))

    letter = head
    if n < 1:
        raise UnsupportedTypeError(f"{descriptor} has rank 0")
    if n < MIN_RANK[letter] or (letter in MAX_RANK and n > MAX_RANK[letter]) \
            or (letter == 'E' and n not in (6, 7, 8)):
        raise UnsupportedTypeError(f"Unsupported rank for type {letter}: {n}")
    cartan = cartan_matrix(letter, n)
    roots = [unit(i, n) for i in range(n)]
    coroots = [tuple(cartan[i][j] for i in range(n)) for j in range(n)]
    return _warn_fundamental_group(
        _assemble(tag, letter, n, 'adjoint', roots, coroots, central_rank))


def _torus(type_tag: str, rank: int) -> RootDatum:
    return RootDatum(type_tag=type_tag, rank=rank, simple_roots=(), simple_coroots=(),
                     cartan=(), components=(), presentation='GL', central_rank=0)


@lru_cache(maxsize=None)
def fundamental_group(rd: RootDatum) -> LatticeQuotient:
    """X_*(T) modulo the coroot lattice"""
    relations = as_int_matrix([list(col) for col in zip(*rd.simple_coroots)], rd.rank) \
        if rd.simple_coroots else as_int_matrix([], rd.rank)
    return LatticeQuotient(relations)


def _warn_fundamental_group(rd: RootDatum) -> RootDatum:
    if fundamental_group(rd).torsion:
        logger.warning(
            f"{rd.type_tag}: pi_1 has torsion {fundamental_group(rd).torsion}; "
            f"the derived group is not simply connected")
    return rd


# Weyl group actions

def reflect_cochar(rd: RootDatum, i: int, v: Sequence) -> Vector:
    return add_vectors(v, rd.simple_coroots[i], -pairing(rd.simple_roots[i], v))


def reflect_char(rd: RootDatum, i: int, x: Sequence) -> Vector:
    return add_vectors(x, rd.simple_roots[i], -pairing(x, rd.simple_coroots[i]))


def act(rd: RootDatum, word: WeylWord, v: Sequence, kind: str = 'cochar') -> Vector:
    """Apply a Weyl word to a cocharacter (default) or a character"""
    reflect = reflect_cochar if kind == 'cochar' else reflect_char
    v = tuple(v)
    for i in reversed(word.letters):
        v = reflect(rd, i, v)
    return v


def reflect_root_coeffs(rd: RootDatum, i: int, c: Sequence[int]) -> Vector:
    p = sum(c[j] * rd.cartan[j][i] for j in range(len(c)))
    return tuple(c[k] - (p if k == i else 0) for k in range(len(c)))


def act_on_root(rd: RootDatum, word: WeylWord, c: Sequence[int]) -> Vector:
    """Apply a Weyl word to a root given by its simple-root coefficients"""
    c = tuple(c)
    for i in reversed(word.letters):
        c = reflect_root_coeffs(rd, i, c)
    return c


def is_positive_coeffs(c: Sequence[int]) -> bool:
    return all(x >= 0 for x in c) and any(x > 0 for x in c)


def inversion_count(rd: RootDatum, word: WeylWord) -> int:
    """Number of positive roots sent to negative roots"""
    return sum(1 for c in rd.positive_root_coeffs if not is_positive_coeffs(act_on_root(rd, word, c)))


def is_minimal_representative(rd: RootDatum, word: WeylWord, levi: Iterable[int]) -> bool:
    """Minimal length in its coset w W_M iff w(alpha_j) > 0 for j in the Levi"""
    r = rd.semisimple_rank
    return all(is_positive_coeffs(act_on_root(rd, word, unit(j, r))) for j in levi)


def same_element(rd: RootDatum, a: WeylWord, b: WeylWord) -> bool:
    """Two words are equal in W iff they agree on a regular vector"""
    probe = tuple(1 for _ in range(rd.semisimple_rank))
    return _act_labels(rd, a, probe) == _act_labels(rd, b, probe)


def _reflect_labels(rd: RootDatum, i: int, x: Sequence) -> Vector:
    # labels of a character against the simple coroots
    xi = x[i]
    return tuple(x[k] - xi * rd.cartan[i][k] for k in range(len(x)))


def _act_labels(rd: RootDatum, word: WeylWord, x: Sequence) -> Vector:
    x = tuple(x)
    for i in reversed(word.letters):
        x = _reflect_labels(rd, i, x)
    return x


def dominant_representative(rd: RootDatum, v: Sequence,
                            kind: str = 'cochar') -> Tuple[Vector, WeylWord]:
    """Dominant vector in the Weyl orbit of v and a word carrying v to it"""
    reflect = reflect_cochar if kind == 'cochar' else reflect_char
    v = tuple(v)
    letters: Tuple[int, ...] = ()
    while True:
        if kind == 'cochar':
            values = rd.labels(v)
        else:
            values = rd.colabels(v)
        negative = [i for i, p in enumerate(values) if p < 0]
        if not negative:
            return v, WeylWord(letters)
        i = negative[0]
        v = reflect(rd, i, v)
        letters = (i,) + letters


def is_dominant(rd: RootDatum, v: Sequence, kind: str = 'cochar') -> bool:
    values = rd.labels(v) if kind == 'cochar' else rd.colabels(v)
    return all(p >= 0 for p in values)


def weyl_orbit(rd: RootDatum, v: Sequence, cap: Optional[int] = None,
               kind: str = 'cochar') -> FrozenSet[Vector]:
    """Closure of v under the simple reflections"""
    cap = cap or default_cap('orbit_cap')
    reflect = reflect_cochar if kind == 'cochar' else reflect_char
    start = tuple(v)
    seen = {start}
    queue = deque([start])
    while queue:
        current = queue.popleft()
        for i in range(rd.semisimple_rank):
            image = reflect(rd, i, current)
            if image not in seen:
                seen.add(image)
                if len(seen) > cap:
                    raise CapExceededError("Weyl orbit", cap)
                queue.append(image)
    return frozenset(seen)


def coset_words(rd: RootDatum, generators: Iterable[int], stabilizer: Iterable[int],
                cap: Optional[int] = None) -> List[WeylWord]:
    """Minimal representatives of W_gen / W_stab as reduced words, by length"""
    cap = cap or default_cap('coset_cap')
    generators = sorted(set(generators))
    stabilizer = set(stabilizer)
    if not stabilizer <= set(generators):
        raise PreconditionError(f"Levi {sorted(stabilizer)} is not a subset of {generators}")
    start = tuple(0 if i in stabilizer else 1 for i in range(rd.semisimple_rank))
    seen = {start}
    words = [WeylWord()]
    queue = deque([(start, WeylWord())])
    while queue:
        x, word = queue.popleft()
        for i in generators:
            if x[i] <= 0:
                continue
            image = _reflect_labels(rd, i, x)
            if image in seen:
                continue
            seen.add(image)
            if len(seen) > cap:
                raise CapExceededError("Coset enumeration", cap)
            new_word = WeylWord((i,) + word.letters)
            words.append(new_word)
            queue.append((image, new_word))
    return words


def minimal_coset_reps(rd: RootDatum, levi: Iterable[int], cap: Optional[int] = None) -> List[WeylWord]:
    """Minimal-length representatives of W_G / W_M, sorted by length"""
    levi = set(levi)
    if not levi <= set(range(rd.semisimple_rank)):
        raise PreconditionError(f"Levi {sorted(levi)} is not a set of simple-root indices")
    return coset_words(rd, range(rd.semisimple_rank), levi, cap)


def enumerate_weyl_group(rd: RootDatum, cap: Optional[int] = None) -> List[WeylWord]:
    """All Weyl group elements as reduced words"""
    cap = cap or default_cap('coset_cap')
    if rd.weyl_group_order > cap:
        raise CapExceededError("Weyl group", cap)
    return coset_words(rd, range(rd.semisimple_rank), (), cap)


def parabolic_subgroup(rd: RootDatum, subset: Iterable[int], cap: Optional[int] = None) -> List[WeylWord]:
    """All elements of the parabolic subgroup W_J"""
    return coset_words(rd, subset, (), cap)


def longest_element(rd: RootDatum, subset: Optional[Iterable[int]] = None) -> WeylWord:
    """Reduced word of the longest element of W (or of W_J)"""
    subset = sorted(set(range(rd.semisimple_rank) if subset is None else subset))
    x = tuple(1 for _ in range(rd.semisimple_rank))
    letters: Tuple[int, ...] = ()
    while True:
        ready = [i for i in subset if x[i] > 0]
        if not ready:
            return WeylWord(letters)
        i = ready[0]
        x = _reflect_labels(rd, i, x)
        letters = (i,) + letters


def opposition(rd: RootDatum) -> Dict[int, int]:
    """The involution j -> i with w_0(alpha_j) = -alpha_i"""
    w0 = longest_element(rd)
    r = rd.semisimple_rank
    result = {}
    for j in range(r):
        image = act_on_root(rd, w0, unit(j, r))
        result[j] = next(i for i in range(r) if image[i] == -1)
    return result


@lru_cache(maxsize=None)
def _cartan_inverse(cartan: Tuple[Tuple[int, ...], ...]) -> Tuple[Tuple[Fraction, ...], ...]:
    inverse = sympy.Matrix(cartan).inv()
    return tuple(tuple(Fraction(int(x.p), int(x.q)) for x in inverse.row(i))
                 for i in range(inverse.rows))


def fundamental_coweight(rd: RootDatum, i: int) -> Vector:
    """The cocharacter dual to alpha_i in the span of the coroots (1..i ones for GL_n)"""
    if not 0 <= i < rd.semisimple_rank:
        raise PreconditionError(f"No simple root with index {i + 1}")
    if rd.presentation == 'GL':
        return tuple(1 if k <= i else 0 for k in range(rd.rank))
    inverse = _cartan_inverse(rd.cartan)
    coeffs = [inverse[j][i] for j in range(rd.semisimple_rank)]
    out = (Fraction(0),) * rd.rank
    for x, coroot in zip(coeffs, rd.simple_coroots):
        out = add_vectors(out, coroot, x)
    return tuple(int(x) if x.denominator == 1 else x for x in out)


def coroot_coefficients(rd: RootDatum, v: Sequence) -> Vector:
    """Coefficients of v in the simple coroots, solved through the Cartan matrix"""
    inverse = _cartan_inverse(rd.cartan)
    labels = rd.labels(v)
    r = rd.semisimple_rank
    # labels = A n  with  A[i][j] = <alpha_i, alpha_j^vee>
    return tuple(sum(inverse[j][i] * labels[i] for i in range(r)) for j in range(r))
