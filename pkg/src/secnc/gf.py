"""Exact linear algebra over prime fields GF(q).

Matrices are stored as read-only int64 numpy arrays with every entry reduced
mod q.  Products stay exact as long as q**2 fits in int64, which covers every
modulus this package uses (q is at most a few thousand).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

DEFAULT_Q = 257


class NoSolution(ValueError):
    """Raised by :func:`solve_right` when ``b`` is outside the column space of ``a``."""


class FieldTooSmall(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def next_prime(n: int) -> int:
    """Smallest prime strictly greater than ``n``."""
    p = max(n + 1, 2)
    while not is_prime(p):
        p += 1
    return p


@dataclass(frozen=True)
class Field:
    q: int

    def __post_init__(self):
        if not is_prime(self.q):
            raise ValueError(f"field modulus must be prime, got {self.q}")
        if self.q * self.q >= 2**62:
            raise ValueError(f"modulus {self.q} too large for exact int64 products")

    def inv(self, a: int) -> int:
        a %= self.q
        if a == 0:
            raise ZeroDivisionError("zero has no inverse")
        return pow(a, self.q - 2, self.q)

    def elements(self) -> range:
        return range(self.q)

    def matrix(self, entries) -> FieldMatrix:
        return FieldMatrix(entries, self.q)

    def random_matrix(self, rows: int, cols: int, rng: np.random.Generator) -> FieldMatrix:
        return FieldMatrix(rng.integers(0, self.q, size=(rows, cols)), self.q)


# ---------------------------------------------------------------------------
# array level routines (hot paths in the verifier call these directly)


def rref(a: np.ndarray, q: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row-echelon form of ``a`` over GF(q) and its pivot columns.

    Pivots are taken left to right; within a column the smallest eligible row
    index wins, so the output is deterministic.
    """
    r_mat = np.array(a, dtype=np.int64) % q
    rows, cols = r_mat.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(r_mat[r:, c])
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            r_mat[[r, p]] = r_mat[[p, r]]
        inv = pow(int(r_mat[r, c]), q - 2, q)
        r_mat[r] = (r_mat[r] * inv) % q
        col = r_mat[:, c].copy()
        col[r] = 0
        if col.any():
            r_mat = (r_mat - np.outer(col, r_mat[r])) % q
        pivots.append(c)
        r += 1
    return r_mat, pivots


def rank_of(a: np.ndarray, q: int) -> int:
    a = np.asarray(a)
    if a.size == 0:
        return 0
    return len(rref(a, q)[1])


def null_space_of(a: np.ndarray, q: int) -> np.ndarray:
    """Right null space basis as the columns of a ``cols x nullity`` array."""
    a = np.asarray(a, dtype=np.int64)
    cols = a.shape[1]
    if a.shape[0] == 0:
        return np.eye(cols, dtype=np.int64)
    r_mat, pivots = rref(a, q)
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = np.zeros((cols, len(free)), dtype=np.int64)
    for j, f in enumerate(free):
        basis[f, j] = 1
        for i, p in enumerate(pivots):
            basis[p, j] = (-r_mat[i, f]) % q
    return basis


def solve_right_of(a: np.ndarray, b: np.ndarray, q: int) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if a.shape[0] != b.shape[0]:
        raise ValueError(f"row mismatch: {a.shape} vs {b.shape}")
    n = a.shape[1]
    aug, pivots = rref(np.hstack([a, b]), q)
    if any(p >= n for p in pivots):
        raise NoSolution("right-hand side not in the column space")
    x = np.zeros((n, b.shape[1]), dtype=np.int64)
    for i, p in enumerate(pivots):
        x[p] = aug[i, n:]
    return x


def in_row_space(rows: np.ndarray, vec: np.ndarray, q: int) -> bool:
    rows = np.asarray(rows, dtype=np.int64).reshape(-1, len(vec))
    base = rank_of(rows, q)
    return rank_of(np.vstack([rows, vec]), q) == base


# ---------------------------------------------------------------------------


class FieldMatrix:
    """Immutable matrix over GF(q)."""

    __slots__ = ("q", "a")

    def __init__(self, entries, q: int):
        arr = np.array(entries, dtype=np.int64)
        if arr.ndim == 1:
            arr = arr.reshape(1, -1) if arr.size else arr.reshape(0, 0)
        if arr.ndim != 2:
            raise ValueError("FieldMatrix needs 2-D entries")
        arr %= q
        arr.flags.writeable = False
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "a", arr)

    def __setattr__(self, name, value):
        raise AttributeError("FieldMatrix is immutable")

    @classmethod
    def zeros(cls, rows: int, cols: int, q: int) -> FieldMatrix:
        return cls(np.zeros((rows, cols), dtype=np.int64), q)

    @classmethod
    def identity(cls, n: int, q: int) -> FieldMatrix:
        return cls(np.eye(n, dtype=np.int64), q)

    @property
    def rows(self) -> int:
        return self.a.shape[0]

    @property
    def cols(self) -> int:
        return self.a.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.a.shape

    @property
    def T(self) -> FieldMatrix:
        return FieldMatrix(self.a.T, self.q)

    def _check(self, other: FieldMatrix):
        if not isinstance(other, FieldMatrix):
            return NotImplemented
        if other.q != self.q:
            raise ValueError(f"field mismatch: GF({self.q}) vs GF({other.q})")
        return None

    def __matmul__(self, other: FieldMatrix) -> FieldMatrix:
        if self._check(other) is NotImplemented:
            return NotImplemented
        return FieldMatrix((self.a @ other.a) % self.q, self.q)

    def __add__(self, other: FieldMatrix) -> FieldMatrix:
        if self._check(other) is NotImplemented:
            return NotImplemented
        return FieldMatrix(self.a + other.a, self.q)

    def __sub__(self, other: FieldMatrix) -> FieldMatrix:
        if self._check(other) is NotImplemented:
            return NotImplemented
        return FieldMatrix(self.a - other.a, self.q)

    def __neg__(self) -> FieldMatrix:
        return FieldMatrix(-self.a, self.q)

    def scale(self, c: int) -> FieldMatrix:
        return FieldMatrix(self.a * (c % self.q), self.q)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FieldMatrix):
            return NotImplemented
        return self.q == other.q and self.a.shape == other.a.shape and bool((self.a == other.a).all())

    def __hash__(self):
        return hash((self.q, self.a.shape, self.a.tobytes()))

    def __getitem__(self, idx: tuple[int, int]) -> int:
        r, c = idx
        return int(self.a[r, c])

    def columns(self, idx: Sequence[int]) -> FieldMatrix:
        return FieldMatrix(self.a[:, list(idx)].reshape(self.rows, len(idx)), self.q)

    def select_rows(self, idx: Sequence[int]) -> FieldMatrix:
        return FieldMatrix(self.a[list(idx), :].reshape(len(idx), self.cols), self.q)

    def tolist(self) -> list[list[int]]:
        return self.a.tolist()

    def __repr__(self):
        return f"FieldMatrix(GF({self.q}), {self.a.tolist()})"

    def rref(self) -> tuple[FieldMatrix, list[int]]:
        r_mat, pivots = rref(self.a, self.q)
        return FieldMatrix(r_mat, self.q), pivots

    def rank(self) -> int:
        return rank(self)

    def null_space(self) -> FieldMatrix:
        return null_space(self)

    def inverse(self) -> FieldMatrix:
        if self.rows != self.cols:
            raise ValueError("only square matrices have inverses")
        return solve_right(self, FieldMatrix.identity(self.rows, self.q))


def hstack(mats: Iterable[FieldMatrix]) -> FieldMatrix:
    mats = list(mats)
    return FieldMatrix(np.hstack([m.a for m in mats]), mats[0].q)


def vstack(mats: Iterable[FieldMatrix]) -> FieldMatrix:
    mats = list(mats)
    return FieldMatrix(np.vstack([m.a for m in mats]), mats[0].q)


def rank(m: FieldMatrix) -> int:
    return rank_of(m.a, m.q)


def null_space(m: FieldMatrix) -> FieldMatrix:
    """Basis of ``{x : m x = 0}`` as columns; ``cols - rank`` of them."""
    return FieldMatrix(null_space_of(m.a, m.q).reshape(m.cols, -1), m.q)


def solve_right(a: FieldMatrix, b: FieldMatrix) -> FieldMatrix:
    """Some ``x`` with ``a @ x == b``; raises :class:`NoSolution` otherwise."""
    if a.q != b.q:
        raise ValueError("field mismatch")
    return FieldMatrix(solve_right_of(a.a, b.a, a.q), a.q)


def vandermonde(k: int, t: int, alphas: Sequence[int], q: int) -> FieldMatrix:
    """``k x t`` matrix with entry ``(r, c) = alphas[c] ** r``.

    Any ``k`` columns are independent when the evaluation points are distinct.
    """
    if len(alphas) != t:
        raise ValueError(f"need {t} evaluation points, got {len(alphas)}")
    if t > q:
        raise FieldTooSmall(f"{t} distinct points do not exist in GF({q})")
    reduced = [a % q for a in alphas]
    if len(set(reduced)) != t:
        raise ValueError("evaluation points must be pairwise distinct mod q")
    out = np.zeros((k, t), dtype=np.int64)
    for c, a in enumerate(reduced):
        for r in range(k):
            out[r, c] = pow(a, r, q)
    return FieldMatrix(out.reshape(k, t), q)


def mds_expand(in_dim: int, out_dim: int, field: Field) -> FieldMatrix:
    """Generator of an ``[out_dim, in_dim]`` MDS code: any ``in_dim`` columns are invertible."""
    if out_dim < in_dim:
        raise ValueError(f"cannot expand {in_dim} symbols into {out_dim}")
    if out_dim > field.q:
        raise FieldTooSmall(f"MDS length {out_dim} exceeds GF({field.q}) size")
    return vandermonde(in_dim, out_dim, list(range(out_dim)), field.q)
