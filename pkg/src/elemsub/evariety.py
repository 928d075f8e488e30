"""Elementary subalgebras: the membership test, enumeration of E(r, g)(F_p),
triangularization of elementary subalgebras, and maximality.

Enumeration works one pivot pattern (chart) at a time.  Within a pattern the
canonical basis is built column by column; the admissible values of the next
column form an affine subspace (fixed pivot entries intersected with the
centralizer of the columns chosen so far), so only commuting tuples are ever
generated and the p-nilpotency filter runs on whole batches.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import combinations
from typing import Iterator

import numpy as np

from .exactlinalg import (
    all_vectors,
    canonical_subspace,
    image,
    inverse,
    kernel,
    rank,
    rref,
    Subspace,
    solve_affine,
    vector_block,
)
from .grassmann import DEFAULT_BUDGET, BudgetExceeded, PlanePoint, enumerate_grassmannian
from .liealg import AlgebraError, RestrictedLieAlgebra, SizeGuardError, symplectic_form

log = logging.getLogger(__name__)

FULL_SCAN_LIMIT = 4096
CHUNK = 1 << 16


@dataclass(frozen=True, eq=False)
class ElementaryPoint:
    """An elementary subalgebra, stored as its canonical plane.

    ``certificate`` records how trivial p-restriction was established:
    ``"full-scan"`` (every element of the plane checked) or
    ``"basis-checked"`` (basis vectors and their pairwise sums).
    """

    plane: PlanePoint
    certificate: str

    @property
    def algebra(self) -> RestrictedLieAlgebra:
        return self.plane.algebra

    @property
    def basis(self) -> np.ndarray:
        return self.plane.basis

    @property
    def elements(self) -> list[np.ndarray]:
        return [self.basis[:, s] for s in range(self.r)]

    @property
    def sigma(self) -> tuple[int, ...]:
        return self.plane.sigma

    @property
    def r(self) -> int:
        return self.plane.r

    def key(self) -> tuple:
        return self.plane.key()

    def __eq__(self, other):
        if not isinstance(other, ElementaryPoint):
            return NotImplemented
        return self.plane == other.plane

    def __hash__(self):
        return hash(self.plane)

    def __repr__(self):
        return f"ElementaryPoint(sigma={self.sigma}, r={self.r}, {self.certificate})"


class NotElementary(ValueError):
    pass


def _commuting(g: RestrictedLieAlgebra, B: np.ndarray) -> bool:
    r = B.shape[1]
    for s in range(r):
        ad = g.ad(B[:, s])
        if (ad @ B[:, s + 1:] % g.p).any():
            return False
    return True


def elementary_certificate(g: RestrictedLieAlgebra, basis,
                           full_scan_limit: int = FULL_SCAN_LIMIT) -> str | None:
    """``None`` if the span of the columns is not elementary, else the certificate kind."""
    p = g.p
    B = np.asarray(basis, dtype=np.int64) % p
    r = B.shape[1]
    if not _commuting(g, B):
        return None
    if p**r <= full_scan_limit:
        X = all_vectors(p, r) @ B.T % p
        return "full-scan" if g.p_nilpotent_mask(X).all() else None
    vecs = [B[:, s] for s in range(r)]
    vecs += [(B[:, s] + B[:, t]) % p for s, t in combinations(range(r), 2)]
    return "basis-checked" if g.p_nilpotent_mask(np.array(vecs)).all() else None


def is_elementary(g: RestrictedLieAlgebra, plane: PlanePoint) -> bool:
    if plane.n != g.dim:
        raise AlgebraError("plane does not live in this algebra")
    return elementary_certificate(g, plane.basis) is not None


def elementary_point(g: RestrictedLieAlgebra, span, r: int | None = None) -> ElementaryPoint:
    """Canonicalize ``span`` and certify it; raises ``NotElementary`` otherwise."""
    pl = PlanePoint(canonical_subspace(span, g.p, dim=r), g)
    cert = elementary_certificate(g, pl.basis)
    if cert is None:
        raise NotElementary("span is not an elementary subalgebra")
    return ElementaryPoint(pl, cert)


# -- enumeration ------------------------------------------------------------------


class _Counter:
    def __init__(self, budget):
        self.budget = budget
        self.used = 0

    def spend(self, k):
        self.used += k
        if self.used > self.budget:
            raise BudgetExceeded(
                f"search generated more than {self.budget} candidate vectors"
            )


def _feasible(constraints, piv, free, p) -> bool:
    """Whether some x with x[piv] = 1 supported on ``free`` satisfies the constraints."""
    _, pivots, _ = rref(constraints[:, list(free) + [piv]], p)
    return len(free) not in pivots


def _search_pattern(g: RestrictedLieAlgebra, sigma, counter: _Counter) -> list[np.ndarray]:
    """Canonical bases (n x r) of all elementary planes with pivot set ``sigma``."""
    n, p, r = g.dim, g.p, len(sigma)
    sset = set(sigma)
    frees = [[i for i in range(piv + 1, n) if i not in sset] for piv in sigma]
    found: list[np.ndarray] = []

    def extend(s: int, cols: list[np.ndarray], constraints: np.ndarray | None):
        piv, free = sigma[s], frees[s]
        # charge the budget before materializing the candidates
        if constraints is None:
            x0, K = np.zeros(len(free), dtype=np.int64), np.eye(len(free), dtype=np.int64)
        else:
            sol = solve_affine(constraints[:, free], (-constraints[:, piv]) % p, p)
            if sol is None:
                return
            x0, K = sol
        k = K.shape[1]
        counter.spend(p**k)
        survivors = []
        for start in range(0, p**k, CHUNK):
            coeffs = vector_block(p, k, start, min(start + CHUNK, p**k))
            cand = np.zeros((coeffs.shape[0], n), dtype=np.int64)
            cand[:, piv] = 1
            cand[:, free] = (x0 + coeffs @ K.T) % p
            survivors.append(cand[g.p_nilpotent_mask(cand)])
        cand = np.concatenate(survivors)
        for x in cand:
            new_cols = cols + [x]
            if s + 1 == r:
                found.append(np.array(new_cols, dtype=np.int64).T)
                continue
            rows = g.ad(x)
            stacked = rows if constraints is None else np.concatenate([constraints, rows])
            R, _, rk = rref(stacked, p)
            R = R[:rk]
            # prune when some later column already has no admissible value
            if all(_feasible(R, sigma[t], frees[t], p) for t in range(s + 2, r)):
                extend(s + 1, new_cols, R)

    extend(0, [], None)
    found.sort(key=lambda B: tuple(B.T.reshape(-1).tolist()))
    return found


def _pattern_job(args):
    g, sigma, budget = args
    counter = _Counter(budget)
    return _search_pattern(g, sigma, counter), counter.used


def enumerate_E(g: RestrictedLieAlgebra, r: int, within=None, budget: int = DEFAULT_BUDGET,
                workers: int = 1, full_scan_limit: int = FULL_SCAN_LIMIT) -> Iterator[ElementaryPoint]:
    """All r-dimensional elementary subalgebras of g over F_p.

    ``within`` optionally restricts to the planes inside a restricted
    subalgebra given by a basis matrix (n x m) in g's coordinates; use
    ``g.nilradical`` for the designated nilradical.  ``budget`` caps the
    number of candidate vectors the search may generate.  Output order is
    (sigma, free entries) lexicographic and independent of ``workers``.
    """
    if r < 1:
        raise ValueError("r must be >= 1")
    if within is not None:
        yield from _enumerate_within(g, r, np.asarray(within, dtype=np.int64), budget, workers,
                                     full_scan_limit)
        return
    if r > g.dim:
        return
    patterns = list(combinations(range(g.dim), r))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = pool.map(_pattern_job, [(g, s, budget) for s in patterns])
            total = 0
            for sigma, (bases, used) in zip(patterns, results):
                total += used
                if total > budget:
                    raise BudgetExceeded(f"search generated more than {budget} candidate vectors")
                yield from _certify(g, sigma, bases, full_scan_limit)
        return
    counter = _Counter(budget)
    for sigma in patterns:
        bases = _search_pattern(g, sigma, counter)
        yield from _certify(g, sigma, bases, full_scan_limit)


def _certify(g, sigma, bases, full_scan_limit):
    for B in bases:
        cert = elementary_certificate(g, B, full_scan_limit)
        if cert is None:
            raise AssertionError("search produced a non-elementary plane")
        B.setflags(write=False)
        yield ElementaryPoint(PlanePoint(Subspace(g.dim, B, tuple(sigma), g.p), g), cert)


def _enumerate_within(g, r, W, budget, workers, full_scan_limit):
    sub = g.subalgebra(W, name=f"sub({g.name})")
    pts = []
    for q in enumerate_E(sub, r, budget=budget, workers=workers, full_scan_limit=full_scan_limit):
        pl = PlanePoint(canonical_subspace(W @ q.basis % g.p, g.p, dim=r), g)
        pts.append(ElementaryPoint(pl, q.certificate))
    pts.sort(key=lambda e: e.key())
    yield from pts


def enumerate_E_naive(g: RestrictedLieAlgebra, r: int, budget: int = DEFAULT_BUDGET):
    """Filter of the full Grassmannian by ``is_elementary`` (reference path)."""
    for pl in enumerate_grassmannian(g.dim, r, g.p, budget=budget, algebra=g):
        cert = elementary_certificate(g, pl.basis)
        if cert is not None:
            yield ElementaryPoint(pl, cert)


def max_elementary_dimension(g: RestrictedLieAlgebra, within=None, budget: int = DEFAULT_BUDGET,
                             workers: int = 1) -> tuple[int, list[ElementaryPoint]]:
    """Largest r with E(r, g) nonempty, together with the points of that E(r, g)."""
    # nonemptiness is monotone in r, so lower levels only need one witness
    best = 0
    for r in range(1, g.dim + 1):
        if next(iter(enumerate_E(g, r, within=within, budget=budget)), None) is None:
            break
        best = r
    if best == 0:
        return 0, []
    return best, list(enumerate_E(g, best, within=within, budget=budget, workers=workers))


# -- centralizers and maximality -------------------------------------------------


def centralizer(g: RestrictedLieAlgebra, basis) -> np.ndarray:
    """Basis (columns) of {x in g : [x, u] = 0 for all columns u}."""
    B = np.asarray(basis, dtype=np.int64)
    rows = np.concatenate([g.ad(B[:, s]) for s in range(B.shape[1])])
    return kernel(rows, g.p)


def is_maximal_elementary(g: RestrictedLieAlgebra, pt: ElementaryPoint,
                          guard: int = 10**7) -> bool:
    """No p-nilpotent x outside ``pt`` commutes with it (checked element by element)."""
    p = g.p
    C = centralizer(g, pt.basis)
    if p ** C.shape[1] > guard:
        raise BudgetExceeded(f"centralizer has {p ** C.shape[1]} elements > {guard}")
    X = all_vectors(p, C.shape[1]) @ C.T % p
    X = X[g.p_nilpotent_mask(X)]
    # outside the plane: appending x raises the rank
    for x in X:
        if rank(np.concatenate([pt.basis, x.reshape(-1, 1)], axis=1), p) > pt.r:
            return False
    return True


def has_trivial_pmap(g: RestrictedLieAlgebra, exhaustive_limit: int = 10**6) -> bool:
    """Whether x^[p] = 0 for every x in g."""
    if g.pmap.any():
        return False
    if g.p ** g.dim <= exhaustive_limit:
        return bool(g.p_nilpotent_mask(all_vectors(g.p, g.dim)).all())
    # Jacobson cross terms are brackets of length p; they vanish if g^p = 0
    term = np.eye(g.dim, dtype=np.int64)
    for _ in range(g.p - 1):
        term = image(np.concatenate([g.ad(g.basis_vector(i)) @ term % g.p
                                     for i in range(g.dim)], axis=1), g.p)
        if term.shape[1] == 0:
            return True
    if g.p ** g.dim > 10**8:
        raise SizeGuardError(f"{g.name}: cannot decide triviality of the p-map within the size guard")
    return bool(g.p_nilpotent_mask(all_vectors(g.p, g.dim)).all())


def is_maximal_via_socle(g: RestrictedLieAlgebra, pt: ElementaryPoint, strict: bool = True) -> bool:
    """Maximality as dim Soc(eps^* g_ad) = r.

    The criterion needs a trivial p-map on ``g``; with ``strict`` that
    hypothesis is checked and a violation raises ``AlgebraError``.
    """
    if strict and not has_trivial_pmap(g):
        raise AlgebraError(f"{g.name} has a nonzero p-map; the socle criterion does not apply")
    from .rankfn import soc_dim
    from .repmod import adjoint

    return soc_dim(adjoint(g), pt, 1) == pt.r


# -- direct sums ----------------------------------------------------------------------


def direct_sum_planes(points, total: RestrictedLieAlgebra) -> ElementaryPoint:
    """The block plane eps_1 + ... + eps_s inside the direct sum ``total``."""
    points = list(points)
    if sum(pt.algebra.dim for pt in points) != total.dim:
        raise AlgebraError("summand dimensions do not add up to the target algebra")
    cols, off = [], 0
    for pt in points:
        block = np.zeros((total.dim, pt.r), dtype=np.int64)
        block[off:off + pt.algebra.dim] = pt.basis
        cols.append(block)
        off += pt.algebra.dim
    return elementary_point(total, np.concatenate(cols, axis=1), r=sum(pt.r for pt in points))


# -- Heisenberg algebras and symplectic quotients ------------------------------------


@dataclass(frozen=True, eq=False)
class SymplecticQuotient:
    """W = g / z with <a, b> = coefficient of the central generator in [sigma a, sigma b].

    ``complement`` lists the coordinates of g spanning the splitting sigma(W).
    """

    algebra: RestrictedLieAlgebra
    center: np.ndarray
    complement: tuple[int, ...]
    gram: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.complement)

    def project(self, x) -> np.ndarray:
        """Coordinates in W of the image of x (the center is killed)."""
        x = np.asarray(x, dtype=np.int64)
        k = int(np.flatnonzero(self.center)[0])
        coef = x[k] * pow(int(self.center[k]), -1, self.algebra.p)
        y = (x - coef * self.center) % self.algebra.p
        return y[list(self.complement)]


def heisenberg_form(g: RestrictedLieAlgebra) -> SymplecticQuotient:
    p = g.p
    Z = centralizer(g, np.eye(g.dim, dtype=np.int64))
    if Z.shape[1] != 1:
        raise AlgebraError(f"{g.name}: center has dimension {Z.shape[1]}, not 1")
    z = Z[:, 0]
    for i in range(g.dim):
        for j in range(g.dim):
            if rank(np.stack([g.structure[i, j], z], axis=1), p) > 1:
                raise AlgebraError(f"{g.name}: g/z is not abelian")
    if not has_trivial_pmap(g):
        raise AlgebraError(f"{g.name}: p-map does not vanish")
    k = int(np.flatnonzero(z)[0])
    comp = tuple(i for i in range(g.dim) if i != k)
    zk = pow(int(z[k]), -1, p)
    m = len(comp)
    G = np.zeros((m, m), dtype=np.int64)
    for a, i in enumerate(comp):
        for b, j in enumerate(comp):
            G[a, b] = g.structure[i, j, k] * zk % p
    if rank(G, p) != m:
        raise AlgebraError(f"{g.name}: induced form is degenerate")
    G.setflags(write=False)
    return SymplecticQuotient(g, z, comp, G)


def is_lagrangian_preimage(pt: ElementaryPoint, form: SymplecticQuotient | None = None) -> bool:
    """Whether the plane contains the center and projects onto a Lagrangian subspace."""
    g = pt.algebra
    form = heisenberg_form(g) if form is None else form
    p = g.p
    if rank(np.concatenate([pt.basis, form.center.reshape(-1, 1)], axis=1), p) != pt.r:
        return False
    img = np.stack([form.project(u) for u in pt.elements], axis=1)
    L = canonical_subspace(img, p)
    if 2 * L.dim != form.dim:
        return False
    return not ((L.basis.T @ form.gram @ L.basis) % p).any()


# -- triangularization ------------------------------------------------------------------


def _operators(pt: ElementaryPoint) -> np.ndarray:
    g = pt.algebra
    if g.realization is None:
        raise AlgebraError("triangularization needs a matrix realization")
    return g.to_matrices(pt.basis.T)


def _flag_step(ops, current: np.ndarray, ambient: np.ndarray, p: int) -> np.ndarray:
    """A vector v of ``ambient`` outside ``current`` with u v in ``current`` for every u."""
    m = ops.shape[1]
    # parametrize v = ambient @ c; require the image of u v in V / current to vanish
    if current.shape[1]:
        Q = kernel(current.T, p).T  # rows cut out current as their common zero set
    else:
        Q = np.eye(m, dtype=np.int64)
    rows = np.concatenate([Q @ u @ ambient % p for u in ops]) if len(ops) else np.zeros((0, ambient.shape[1]), dtype=np.int64)
    sols = ambient @ kernel(rows, p) % p
    cur_rank = rank(current, p) if current.shape[1] else 0
    for t in range(sols.shape[1]):
        v = sols[:, t]
        if rank(np.concatenate([current, v.reshape(-1, 1)], axis=1), p) > cur_rank:
            return v
    raise AssertionError("no invariant line: operators are not commuting nilpotents")


def engel_triangularize(pt: ElementaryPoint) -> np.ndarray:
    """g in GL_m with g u g^-1 strictly upper triangular for every u in the plane."""
    ops = _operators(pt)
    p = pt.algebra.p
    m = ops.shape[1]
    flag = np.zeros((m, 0), dtype=np.int64)
    full = np.eye(m, dtype=np.int64)
    for _ in range(m):
        v = _flag_step(ops, flag, full, p)
        flag = np.concatenate([flag, v.reshape(-1, 1)], axis=1)
    return inverse(flag, p)


def conjugate(g_mat, u, p: int) -> np.ndarray:
    return g_mat @ u @ inverse(g_mat, p) % p


def symplectic_flag_triangularize(pt: ElementaryPoint) -> np.ndarray:
    """g in Sp_2n with g u g^-1 in the standard Borel nilradical for every u in the plane.

    Grows an invariant isotropic flag V_1 < ... < V_n, taking at each step an
    invariant line of V_i^perp / V_i, then completes V_n to a symplectic basis.
    """
    ops = _operators(pt)
    p = pt.algebra.p
    m = ops.shape[1]
    if m % 2:
        raise AlgebraError("symplectic space of odd dimension")
    n = m // 2
    S = symplectic_form(n) % p
    flag = np.zeros((m, 0), dtype=np.int64)
    for i in range(n):
        perp = kernel((flag.T @ S) % p, p) if i else np.eye(m, dtype=np.int64)
        v = _flag_step(ops, flag, perp, p)
        flag = np.concatenate([flag, v.reshape(-1, 1)], axis=1)
    E = flag
    # complement: standard vectors extending E to a basis
    W = []
    cur = E
    for j in range(m):
        e = np.eye(m, dtype=np.int64)[:, j:j + 1]
        if rank(np.concatenate([cur, e], axis=1), p) > cur.shape[1]:
            cur = np.concatenate([cur, e], axis=1)
            W.append(e[:, 0])
    W = np.array(W, dtype=np.int64).T
    G = E.T @ S @ W % p
    F = W @ inverse(G, p) % p  # <e_i, f_j> = delta_ij
    H = F.T @ S @ F % p
    half = pow(2, -1, p)
    F = (F + E @ (H * half % p)) % p
    P = np.concatenate([E, F], axis=1)
    if ((P.T @ S @ P - S) % p).any():
        raise AssertionError("constructed basis is not symplectic")
    return inverse(P, p)


def is_symplectic(g_mat, p: int) -> bool:
    m = g_mat.shape[0]
    S = symplectic_form(m // 2)
    return not ((g_mat.T @ S @ g_mat - S) % p).any()


__all__ = [
    "ElementaryPoint", "NotElementary", "SymplecticQuotient", "centralizer", "conjugate",
    "direct_sum_planes", "elementary_certificate", "elementary_point", "engel_triangularize",
    "enumerate_E", "enumerate_E_naive", "has_trivial_pmap", "heisenberg_form", "is_elementary",
    "is_lagrangian_preimage", "is_maximal_elementary", "is_maximal_via_socle", "is_symplectic",
    "max_elementary_dimension", "symplectic_flag_triangularize",
]
