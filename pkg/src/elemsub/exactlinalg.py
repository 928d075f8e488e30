"""Exact dense linear algebra over a prime field F_p.

Matrices are plain ``numpy`` int64 arrays holding residues in ``[0, p)``.
Pivoting is always "first nonzero in scan order", so every routine here is
deterministic and bit-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from sympy import isprime


class FieldError(ValueError):
    """Raised for an invalid modulus or a shape/field mismatch."""


def check_prime(p: int) -> int:
    if not isinstance(p, (int, np.integer)) or not isprime(int(p)):
        raise FieldError(f"modulus must be a prime, got {p!r}")
    if p == 2:
        raise FieldError("characteristic 2 is not supported (need p >= 3)")
    return int(p)


def inv(a: int, p: int) -> int:
    a = int(a) % p
    if a == 0:
        raise ZeroDivisionError("0 has no inverse")
    return pow(a, -1, p)


@dataclass(frozen=True)
class FieldElement:
    """A residue class modulo an odd prime."""

    value: int
    p: int

    def __post_init__(self):
        check_prime(self.p)
        object.__setattr__(self, "value", int(self.value) % self.p)

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.p != self.p:
                raise FieldError("elements of different fields")
            return other.value
        return int(other) % self.p

    def __add__(self, other):
        return FieldElement(self.value + self._coerce(other), self.p)

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElement(self.value - self._coerce(other), self.p)

    def __rsub__(self, other):
        return FieldElement(self._coerce(other) - self.value, self.p)

    def __mul__(self, other):
        return FieldElement(self.value * self._coerce(other), self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(-self.value, self.p)

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return FieldElement(pow(self.value, k, self.p), self.p)

    def inverse(self) -> "FieldElement":
        return FieldElement(inv(self.value, self.p), self.p)

    def __truediv__(self, other):
        return self * FieldElement(self._coerce(other), self.p).inverse()

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"{self.value} mod {self.p}"


def as_matrix(m, p: int) -> np.ndarray:
    a = np.array(m, dtype=np.int64)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    if a.ndim != 2:
        raise FieldError(f"expected a 2-d matrix, got shape {a.shape}")
    return a % p


@lru_cache(maxsize=None)
def _inverse_table(p: int) -> np.ndarray:
    t = np.zeros(p, dtype=np.int64)
    for a in range(1, p):
        t[a] = pow(a, -1, p)
    return t


def rref(m, p: int) -> tuple[np.ndarray, list[int], int]:
    """Reduced row echelon form of ``m`` over F_p.

    Returns ``(R, pivots, rank)`` where ``pivots`` lists the pivot column of
    each nonzero row of ``R``.
    """
    a = as_matrix(m, p)
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if not nz.size:
            continue
        k = int(nz[0]) + r
        if k != r:
            a[[r, k]] = a[[k, r]]
        a[r] = (a[r] * _inverse_table(p)[a[r, c]]) % p
        col = a[:, c].copy()
        col[r] = 0
        if col.any():
            a -= col[:, None] * a[r]
            a %= p
        pivots.append(c)
        r += 1
    return a, pivots, r


def rank(m, p: int) -> int:
    a = as_matrix(m, p)
    if a.size == 0:
        return 0
    return rref(a, p)[2]


def kernel(m, p: int) -> np.ndarray:
    """Basis of the right nullspace, as the columns of a (cols x k) matrix."""
    a = as_matrix(m, p)
    cols = a.shape[1]
    R, pivots, rk = rref(a, p)
    free = [c for c in range(cols) if c not in set(pivots)]
    K = np.zeros((cols, len(free)), dtype=np.int64)
    for t, f in enumerate(free):
        K[f, t] = 1
        for i, pc in enumerate(pivots):
            K[pc, t] = (-R[i, f]) % p
    return K


def image(m, p: int) -> np.ndarray:
    """Column space basis in reduced column echelon form (cols are basis)."""
    a = as_matrix(m, p)
    R, _, rk = rref(a.T, p)
    return np.ascontiguousarray(R[:rk].T)


def solve_affine(A, b, p: int):
    """Solutions of ``A x = b``: ``(x0, K)`` with solution set ``x0 + span(K)``.

    Returns ``None`` when the system is inconsistent.
    """
    A = as_matrix(A, p)
    b = np.asarray(b, dtype=np.int64).reshape(-1) % p
    rows, cols = A.shape
    aug = np.concatenate([A, b.reshape(-1, 1)], axis=1)
    R, pivots, rk = rref(aug, p)
    if cols in pivots:
        return None
    x0 = np.zeros(cols, dtype=np.int64)
    for i, pc in enumerate(pivots):
        x0[pc] = R[i, cols]
    free = [c for c in range(cols) if c not in set(pivots)]
    K = np.zeros((cols, len(free)), dtype=np.int64)
    for t, f in enumerate(free):
        K[f, t] = 1
        for i, pc in enumerate(pivots):
            K[pc, t] = (-R[i, f]) % p
    return x0, K


def det(m, p: int) -> int:
    a = as_matrix(m, p)
    n = a.shape[0]
    if a.shape != (n, n):
        raise FieldError("determinant of a non-square matrix")
    d = 1
    for c in range(n):
        nz = np.flatnonzero(a[c:, c])
        if nz.size == 0:
            return 0
        k = c + int(nz[0])
        if k != c:
            a[[c, k]] = a[[k, c]]
            d = -d
        piv = int(a[c, c])
        d = d * piv % p
        if c + 1 < n:
            factors = a[c + 1:, c] * inv(piv, p) % p
            a[c + 1:] = (a[c + 1:] - np.outer(factors, a[c])) % p
    return d % p


def inverse(m, p: int) -> np.ndarray:
    a = as_matrix(m, p)
    n = a.shape[0]
    if a.shape != (n, n):
        raise FieldError("inverse of a non-square matrix")
    R, pivots, rk = rref(np.concatenate([a, np.eye(n, dtype=np.int64)], axis=1), p)
    if rk < n or pivots[n - 1] != n - 1:
        raise ZeroDivisionError("matrix is singular")
    return R[:, n:].copy()


def matmul(a, b, p: int) -> np.ndarray:
    return (np.asarray(a, dtype=np.int64) @ np.asarray(b, dtype=np.int64)) % p


def matpow(a, k: int, p: int) -> np.ndarray:
    """``a**k`` mod p; works on stacks ``(..., m, m)`` as well."""
    a = np.asarray(a, dtype=np.int64) % p
    result = np.broadcast_to(np.eye(a.shape[-1], dtype=np.int64), a.shape).copy()
    base = a
    while k:
        if k & 1:
            result = (result @ base) % p
        k >>= 1
        if k:
            base = (base @ base) % p
    return result


def vector_block(p: int, k: int, start: int, stop: int) -> np.ndarray:
    """Rows start..stop-1 of the lexicographic listing of F_p^k."""
    place = p ** np.arange(k - 1, -1, -1, dtype=np.int64)
    return (np.arange(start, stop, dtype=np.int64)[:, None] // place) % p


@lru_cache(maxsize=64)
def _all_vectors(p: int, k: int) -> np.ndarray:
    if k == 0:
        return np.zeros((1, 0), dtype=np.int64)
    out = vector_block(p, k, 0, p**k)
    out.setflags(write=False)
    return out


def all_vectors(p: int, k: int) -> np.ndarray:
    """All of F_p^k as rows, in lexicographic order."""
    return _all_vectors(p, k)


@dataclass(frozen=True, eq=False)
class Subspace:
    """A subspace of F_p^n stored by its reduced column echelon basis.

    ``basis`` is n x r; row ``pivots[s]`` of column ``s`` is 1, every other
    pivot row of that column is 0, and entries above the pivot vanish.
    The representation is canonical, so equality is entry-wise.
    """

    ambient_dim: int
    basis: np.ndarray
    pivots: tuple[int, ...]
    p: int

    @property
    def dim(self) -> int:
        return len(self.pivots)

    def key(self) -> tuple:
        return (self.pivots, tuple(self.basis.T.reshape(-1).tolist()))

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return (
            self.p == other.p
            and self.ambient_dim == other.ambient_dim
            and self.pivots == other.pivots
            and np.array_equal(self.basis, other.basis)
        )

    def __hash__(self):
        return hash((self.p, self.ambient_dim, self.key()))

    def contains(self, vectors) -> bool:
        v = as_matrix(vectors, self.p)
        return rank(np.concatenate([self.basis, v], axis=1), self.p) == self.dim

    def __repr__(self):
        return f"Subspace(dim={self.dim}, n={self.ambient_dim}, pivots={self.pivots})"


def canonical_subspace(span, p: int, dim: int | None = None) -> Subspace:
    """The subspace spanned by the columns of ``span``, in canonical form.

    ``dim`` optionally demands a specific dimension; a mismatch (including a
    zero span when ``dim > 0``) raises ``FieldError``.
    """
    a = as_matrix(span, p)
    n = a.shape[0]
    R, pivots, rk = rref(a.T, p)
    if dim is not None and rk != dim:
        raise FieldError(f"span has dimension {rk}, expected {dim}")
    basis = np.ascontiguousarray(R[:rk].T)
    basis.setflags(write=False)
    # column s has its leading 1 in row pivots[s]
    return Subspace(n, basis, tuple(int(c) for c in pivots), p)


def subspace_sum(a: Subspace, b: Subspace) -> Subspace:
    _check_compatible(a, b)
    return canonical_subspace(np.concatenate([a.basis, b.basis], axis=1), a.p)


def subspace_intersection(a: Subspace, b: Subspace) -> Subspace:
    _check_compatible(a, b)
    p = a.p
    if a.dim == 0 or b.dim == 0:
        return canonical_subspace(np.zeros((a.ambient_dim, 0), dtype=np.int64), p)
    K = kernel(np.concatenate([a.basis, (-b.basis) % p], axis=1), p)
    vecs = matmul(a.basis, K[: a.dim], p)
    return canonical_subspace(vecs, p)


def _check_compatible(a: Subspace, b: Subspace) -> None:
    if a.ambient_dim != b.ambient_dim:
        raise FieldError(
            f"ambient dimension mismatch: {a.ambient_dim} vs {b.ambient_dim}"
        )
    if a.p != b.p:
        raise FieldError("subspaces over different fields")


def random_invertible(r: int, p: int, rng: np.random.Generator) -> np.ndarray:
    while True:
        g = rng.integers(0, p, size=(r, r), dtype=np.int64)
        if det(g, p):
            return g
