"""F_p-points of Grassmannians: canonical chart representatives, Pluecker
coordinates and enumeration by pivot pattern (Schubert cell)."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterator

import numpy as np

from .exactlinalg import Subspace, all_vectors, canonical_subspace, det, inv, inverse

DEFAULT_BUDGET = 10**7


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class PlanePoint:
    """An r-plane in an n-dimensional space, optionally the underlying space of an algebra.

    ``subspace.basis`` restricted to the rows ``sigma`` is the identity, so the
    stored basis is the chart representative for the chart ``sigma``.
    """

    subspace: Subspace
    algebra: object = None

    @property
    def sigma(self) -> tuple[int, ...]:
        return self.subspace.pivots

    @property
    def basis(self) -> np.ndarray:
        return self.subspace.basis

    @property
    def r(self) -> int:
        return self.subspace.dim

    @property
    def n(self) -> int:
        return self.subspace.ambient_dim

    @property
    def p(self) -> int:
        return self.subspace.p

    def key(self) -> tuple:
        return self.subspace.key()

    def __eq__(self, other):
        if not isinstance(other, PlanePoint):
            return NotImplemented
        return self.subspace == other.subspace

    def __hash__(self):
        return hash(self.subspace)

    def __repr__(self):
        return f"PlanePoint(sigma={self.sigma}, n={self.n}, r={self.r})"


def plane(span, p: int, algebra=None, r: int | None = None) -> PlanePoint:
    return PlanePoint(canonical_subspace(span, p, dim=r), algebra)


def chart_representative(pt: PlanePoint, sigma) -> np.ndarray:
    """A^Sigma: the basis of the plane whose rows ``sigma`` form the identity.

    Raises ``ValueError`` if the plane is not in the chart U_sigma.
    """
    sigma = list(sigma)
    if len(sigma) != pt.r:
        raise ValueError("chart index set has the wrong size")
    block = pt.basis[sigma, :]
    if det(block, pt.p) == 0:
        raise ValueError(f"plane is not in the chart {tuple(sigma)}")
    return pt.basis @ inverse(block, pt.p) % pt.p


def plucker(pt: PlanePoint) -> tuple[int, ...]:
    """Normalized Pluecker vector, indexed by r-subsets in lexicographic order."""
    coords = [det(pt.basis[list(s), :], pt.p) for s in combinations(range(pt.n), pt.r)]
    lead = next(c for c in coords if c)
    scale = inv(lead, pt.p)
    return tuple(c * scale % pt.p for c in coords)


def gaussian_binomial(n: int, r: int, q: int) -> int:
    if r < 0 or r > n:
        return 0
    num = den = 1
    for i in range(r):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def free_positions(n: int, sigma) -> list[tuple[int, int]]:
    """(row, column) entries of a chart-sigma echelon matrix that are free."""
    sset = set(sigma)
    return [(i, s) for s, piv in enumerate(sigma) for i in range(piv + 1, n) if i not in sset]


def pivot_patterns(n: int, r: int):
    return combinations(range(n), r)


def cell_size(n: int, sigma, p: int) -> int:
    return p ** len(free_positions(n, sigma))


def enumerate_cell(n: int, sigma, p: int, algebra=None) -> Iterator[PlanePoint]:
    """All planes with pivot set ``sigma``, in lexicographic order of free entries."""
    sigma = tuple(sigma)
    r = len(sigma)
    free = free_positions(n, sigma)
    # column-major order of free entries gives the lexicographic key order
    free.sort(key=lambda rc: (rc[1], rc[0]))
    rows = np.array([rc[0] for rc in free], dtype=np.int64)
    cols = np.array([rc[1] for rc in free], dtype=np.int64)
    base = np.zeros((n, r), dtype=np.int64)
    base[list(sigma), list(range(r))] = 1
    for values in all_vectors(p, len(free)):
        m = base.copy()
        m[rows, cols] = values
        m.setflags(write=False)
        yield PlanePoint(Subspace(n, m, sigma, p), algebra)


def enumerate_grassmannian(n: int, r: int, p: int, budget: int = DEFAULT_BUDGET,
                           algebra=None) -> Iterator[PlanePoint]:
    """Every r-plane of F_p^n exactly once, ordered by (sigma, free entries)."""
    total = gaussian_binomial(n, r, p)
    if total > budget:
        raise BudgetExceeded(f"Grass({r},{n})(F_{p}) has {total} points > budget {budget}")
    for sigma in pivot_patterns(n, r):
        yield from enumerate_cell(n, sigma, p, algebra)


def isotropic(basis, gram, p: int) -> bool:
    B = np.asarray(basis, dtype=np.int64)
    return not ((B.T @ gram @ B) % p).any()
