"""
Integer lattices: Smith normal form and finitely generated quotient groups
All arithmetic runs on numpy object arrays so entries stay exact Python ints
"""

import logging
import math
from typing import List, Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)


def as_int_matrix(rows: Sequence[Sequence[int]], n_rows: int = None) -> np.ndarray:
    """Build an exact integer matrix; an empty column list keeps its row count"""
    matrix = np.array([[int(x) for x in row] for row in rows], dtype=object)
    if matrix.size == 0:
        return np.zeros((n_rows or 0, 0), dtype=object)
    return matrix


def exgcd(a: int, b: int) -> np.ndarray:
    """2x2 integer matrix M of determinant 1 with M @ [a, b] = [gcd(a, b), 0]

    If a divides b, M[0, 1] is 0.
    """
    a_sign = -1 if a < 0 else 1
    b_sign = -1 if b < 0 else 1
    a, b = a * a_sign, b * b_sign
    if a == 0 and b == 0:
        return np.eye(2, dtype=object)

    M = np.array([[a, 1, 0],
                  [b, 0, 1]], dtype=object)
    M = M[::-1]
    while M[1, 0] != 0:
        q = M[0, 0] // M[1, 0]
        M[0] -= q * M[1]
        M = M[::-1]

    g = M[0, 0]
    M = M[:, 1:] * np.array([a_sign, b_sign], dtype=object)
    if g != 0:
        M[1] = [-b_sign * b // g, a_sign * a // g]
    return M


def inv_2x2_det1(M: np.ndarray) -> np.ndarray:
    """Inverse of a 2x2 integer matrix with determinant 1"""
    return np.array([[M[1, 1], -M[0, 1]], [-M[1, 0], M[0, 0]]], dtype=object)


def smith_normal_form(A: np.ndarray) -> Tuple[np.ndarray, ...]:
    """Smith normal form with transforms

    Returns (S, D, T, Sinv, Tinv) with A == S @ D @ T, D diagonal with
    non-negative entries d_0 | d_1 | ... (zeros last), and S, T unimodular.
    """
    A = np.asarray(A, dtype=object)
    D = A.copy()
    rows, cols = D.shape
    S, T = np.eye(rows, dtype=object), np.eye(cols, dtype=object)
    Sinv, Tinv = S.copy(), T.copy()

    def clear_row(i: int) -> bool:
        if (D[i, i + 1:] == 0).all():
            return False
        for j in range(i + 1, cols):
            M = exgcd(D[i, i], D[i, j]).T
            D[:, [i, j]] = D[:, [i, j]] @ M
            T[[i, j]] = inv_2x2_det1(M) @ T[[i, j]]
            Tinv[:, [i, j]] = Tinv[:, [i, j]] @ M
        return True

    def clear_col(i: int) -> bool:
        if (D[i + 1:, i] == 0).all():
            return False
        for j in range(i + 1, rows):
            M = exgcd(D[i, i], D[j, i])
            D[[i, j]] = M @ D[[i, j]]
            S[:, [i, j]] = S[:, [i, j]] @ inv_2x2_det1(M)
            Sinv[[i, j]] = M @ Sinv[[i, j]]
        return True

    def pivot(i: int) -> None:
        # move a nonzero entry of the trailing block to (i, i)
        block = [(r, c) for r in range(i, rows) for c in range(i, cols) if D[r, c] != 0]
        if not block or D[i, i] != 0:
            return
        r, c = min(block, key=lambda rc: abs(D[rc]))
        if r != i:
            D[[i, r]] = D[[r, i]]
            S[:, [i, r]] = S[:, [r, i]]
            Sinv[[i, r]] = Sinv[[r, i]]
        if c != i:
            D[:, [i, c]] = D[:, [c, i]]
            T[[i, c]] = T[[c, i]]
            Tinv[:, [i, c]] = Tinv[:, [c, i]]

    def diagonalize(start: int) -> None:
        for i in range(start, min(rows, cols)):
            pivot(i)
            clear_col(i)
            while clear_row(i) and clear_col(i):
                pass

    diagonalize(0)

    # enforce the divisibility chain on the diagonal
    size = min(rows, cols)
    changed = True
    while changed:
        changed = False
        for i in range(size):
            for j in range(i + 1, size):
                if D[i, i] != 0 and D[j, j] % D[i, i] != 0:
                    D[i] += D[j]
                    S[:, j] -= S[:, i]
                    Sinv[i] += Sinv[j]
                    diagonalize(i)
                    changed = True
                    break
            if changed:
                break

    for i in range(size):
        if D[i, i] < 0:
            D[i] = -D[i]
            S[:, i] = -S[:, i]
            Sinv[i] = -Sinv[i]

    # zeros last
    order = sorted(range(size), key=lambda k: (D[k, k] == 0, k))
    if order != list(range(size)):
        perm = order + list(range(size, rows))
        D[:] = D[perm]
        S[:] = S[:, perm]
        Sinv[:] = Sinv[perm]
        cperm = order + list(range(size, cols))
        D[:] = D[:, cperm]
        T[:] = T[cperm]
        Tinv[:] = Tinv[:, cperm]

    assert (S @ D @ T == A).all()
    return S, D, T, Sinv, Tinv


def kernel(A: np.ndarray) -> np.ndarray:
    """Matrix whose columns are a basis of the integer null space of A"""
    A = np.asarray(A, dtype=object)
    S, D, T, Sinv, Tinv = smith_normal_form(A)
    diagonal = [D[i, i] if i < min(D.shape) else 0 for i in range(A.shape[1])]
    keep = [i for i, d in enumerate(diagonal) if d == 0]
    return Tinv[:, keep]


class LatticeQuotient:
    """The group Z^n / (column span of a relation matrix)

    A class is stored as a tuple: free coordinates first, then residues for
    every nontrivial invariant factor.
    """

    def __init__(self, relations: np.ndarray):
        relations = np.asarray(relations, dtype=object)
        self.ambient_rank = relations.shape[0]
        S, D, T, Sinv, Tinv = smith_normal_form(relations)
        self._S, self._Sinv = S, Sinv
        size = min(D.shape)
        self._diagonal = [int(D[i, i]) if i < size else 0 for i in range(self.ambient_rank)]
        self._free = [i for i, d in enumerate(self._diagonal) if d == 0]
        self._torsion = [i for i, d in enumerate(self._diagonal) if d > 1]

    @property
    def free_rank(self) -> int:
        return len(self._free)

    @property
    def torsion(self) -> List[int]:
        """Invariant factors greater than one"""
        return [self._diagonal[i] for i in self._torsion]

    def coords(self, v: Sequence[int]) -> Tuple[int, ...]:
        """Class of an integer vector"""
        y = self._Sinv @ np.array([int(x) for x in v], dtype=object)
        free = [int(y[i]) for i in self._free]
        residues = [int(y[i]) % self._diagonal[i] for i in self._torsion]
        return tuple(free + residues)

    def lift(self, coords: Sequence[int]) -> Tuple[int, ...]:
        """An integer vector in the given class"""
        y = np.zeros(self.ambient_rank, dtype=object)
        for slot, i in enumerate(self._free + self._torsion):
            y[i] = int(coords[slot])
        return tuple(int(x) for x in self._S @ y)

    def normalize(self, coords: Sequence[int]) -> Tuple[int, ...]:
        """Reduce torsion residues of a coordinate tuple"""
        free = list(coords[:self.free_rank])
        residues = [int(c) % d for c, d in zip(coords[self.free_rank:], self.torsion)]
        return tuple(int(x) for x in free) + tuple(residues)

    def add(self, a: Sequence[int], b: Sequence[int], scale: int = 1) -> Tuple[int, ...]:
        return self.normalize([x + scale * y for x, y in zip(a, b)])

    def zero(self) -> Tuple[int, ...]:
        return tuple(0 for _ in range(self.free_rank + len(self._torsion)))

    def order(self, coords: Sequence[int]) -> int:
        """Order of a class, 0 when it has infinite order"""
        if any(coords[:self.free_rank]):
            return 0
        order = 1
        for c, d in zip(coords[self.free_rank:], self.torsion):
            if c % d:
                step = d // math.gcd(int(c), d)
                order = order * step // math.gcd(order, step)
        return order

    def describe(self) -> str:
        """Human-readable isomorphism type such as "Z + Z/2" """
        parts = ["Z"] * self.free_rank + [f"Z/{d}" for d in self.torsion]
        return " + ".join(parts) if parts else "0"
