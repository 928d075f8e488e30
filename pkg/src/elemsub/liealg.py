"""Restricted Lie algebras given by structure constants and a p-map table.

An element is a coordinate vector (int64 residues) with respect to the fixed
basis of the algebra.  ``structure[i, j, k]`` is the coefficient of ``x_k``
in ``[x_i, x_j]`` and ``pmap[i]`` holds the coordinates of ``x_i^[p]``.
Algebras built inside ``gl_m`` also carry ``realization``, the stack of the
m x m matrices of the basis vectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exactlinalg import (
    all_vectors,
    check_prime,
    inv,
    matpow,
    rank,
    rref,
    solve_affine,
)


class AlgebraError(ValueError):
    pass


class SizeGuardError(RuntimeError):
    """An enumeration would exceed its configured size guard."""


@dataclass(frozen=True, eq=False)
class RestrictedLieAlgebra:
    name: str
    p: int
    structure: np.ndarray
    pmap: np.ndarray
    labels: tuple[str, ...]
    realization: np.ndarray | None = None
    # designated nilradical (columns = basis vectors), used by "--within nilradical"
    nilradical: np.ndarray | None = None
    _coord: tuple | None = field(default=None, repr=False)

    def __post_init__(self):
        check_prime(self.p)
        n = len(self.labels)
        if self.structure.shape != (n, n, n) or self.pmap.shape != (n, n):
            raise AlgebraError("structure constants / p-map have the wrong shape")
        for arr in (self.structure, self.pmap, self.realization, self.nilradical):
            if arr is not None:
                arr.setflags(write=False)
        if self.realization is not None and self._coord is None:
            object.__setattr__(self, "_coord", _coordinate_extractor(self.realization, self.p))

    @property
    def dim(self) -> int:
        return len(self.labels)

    def __repr__(self):
        return f"RestrictedLieAlgebra({self.name!r}, dim={self.dim}, p={self.p})"

    def element(self, coords) -> np.ndarray:
        x = np.asarray(coords, dtype=np.int64).reshape(-1) % self.p
        if x.shape[0] != self.dim:
            raise AlgebraError(f"{self.name}: element of length {x.shape[0]}, expected {self.dim}")
        return x

    def basis_vector(self, i: int) -> np.ndarray:
        e = np.zeros(self.dim, dtype=np.int64)
        e[i] = 1
        return e

    def bracket(self, x, y) -> np.ndarray:
        x, y = self.element(x), self.element(y)
        return np.einsum("i,j,ijk->k", x, y, self.structure) % self.p

    def bracket_batch(self, X, Y) -> np.ndarray:
        return np.einsum("Ni,Nj,ijk->Nk", X, Y, self.structure) % self.p

    def ad(self, x) -> np.ndarray:
        """Matrix of ``y -> [x, y]``."""
        x = self.element(x)
        return np.einsum("i,ijk->kj", x, self.structure) % self.p

    def p_power(self, x) -> np.ndarray:
        """``x^[p]`` from the basis table via the Jacobson formula."""
        return self.p_power_batch(self.element(x)[None, :])[0]

    def p_power_batch(self, X) -> np.ndarray:
        p = self.p
        X = np.asarray(X, dtype=np.int64) % p
        N, n = X.shape
        total = np.zeros((N, n), dtype=np.int64)
        z = np.zeros((N, n), dtype=np.int64)
        inverses = np.array([inv(i, p) for i in range(1, p)], dtype=np.int64)
        for k in range(n):
            a = X[:, k]
            if not a.any():
                continue
            # (a x_k)^[p] = a^p x_k^[p] = a x_k^[p] over F_p
            total = (total + np.outer(a, self.pmap[k])) % p
            y = np.zeros((N, n), dtype=np.int64)
            y[:, k] = a
            if z.any():
                total = (total + self._jacobson_sum(z, y, inverses)) % p
            z = (z + y) % p
        return total

    def _jacobson_sum(self, x, y, inverses) -> np.ndarray:
        """Sum of s_i(x, y), where i*s_i is the t^(i-1) coefficient of ad(tx+y)^(p-1)(x)."""
        p = self.p
        N, n = x.shape
        poly = np.zeros((p, N, n), dtype=np.int64)
        poly[0] = x
        for _ in range(p - 1):
            new = np.zeros_like(poly)
            for d in range(p):
                if not poly[d].any():
                    continue
                new[d] += self.bracket_batch(y, poly[d])
                if d + 1 < p:
                    new[d + 1] += self.bracket_batch(x, poly[d])
            poly = new % p
        s = np.zeros((N, n), dtype=np.int64)
        for i in range(1, p):
            s += poly[i - 1] * inverses[i - 1]
        return s % p

    # -- matrix realization ------------------------------------------------

    def to_matrix(self, x) -> np.ndarray:
        self._need_realization()
        return np.einsum("i,iab->ab", self.element(x), self.realization) % self.p

    def to_matrices(self, X) -> np.ndarray:
        self._need_realization()
        return np.einsum("Ni,iab->Nab", np.asarray(X, dtype=np.int64), self.realization) % self.p

    def from_matrix(self, m) -> np.ndarray:
        """Coordinates of a matrix lying in the span of the realization."""
        self._need_realization()
        positions, inverse_block, basis_flat = self._coord
        flat = np.asarray(m, dtype=np.int64).reshape(-1) % self.p
        x = flat[positions] @ inverse_block % self.p
        if not np.array_equal(x @ basis_flat % self.p, flat):
            raise AlgebraError(f"matrix does not lie in {self.name}")
        return x

    def _need_realization(self):
        if self.realization is None:
            raise AlgebraError(f"{self.name} has no matrix realization")

    def p_nilpotent_mask(self, X) -> np.ndarray:
        """Boolean mask of rows ``x`` of ``X`` with ``x^[p] = 0``.

        Uses the p-th matrix power when a realization exists, otherwise the
        Jacobson computation.
        """
        X = np.asarray(X, dtype=np.int64)
        if X.shape[0] == 0:
            return np.zeros(0, dtype=bool)
        if self.realization is not None:
            out = np.empty(X.shape[0], dtype=bool)
            for start in range(0, X.shape[0], 65536):
                mats = self.to_matrices(X[start:start + 65536])
                out[start:start + 65536] = ~matpow(mats, self.p, self.p).any(axis=(1, 2))
            return out
        return ~self.p_power_batch(X).any(axis=1)

    def is_p_nilpotent(self, x) -> bool:
        return not self.p_power(x).any()

    # -- invariants ----------------------------------------------------------

    def check_antisymmetry(self) -> bool:
        s = self.structure
        return np.array_equal((s + s.transpose(1, 0, 2)) % self.p, np.zeros_like(s))

    def check_jacobi(self) -> bool:
        s = self.structure
        t = np.einsum("ijl,lkm->ijkm", s, s) % self.p
        total = t + t.transpose(1, 2, 0, 3) + t.transpose(2, 0, 1, 3)
        return not (total % self.p).any()

    def check_restricted(self) -> bool:
        for i in range(self.dim):
            lhs = self.ad(self.pmap[i])
            rhs = matpow(self.ad(self.basis_vector(i)), self.p, self.p)
            if not np.array_equal(lhs, rhs):
                return False
        return True

    def check_realization(self) -> bool:
        if self.realization is None:
            return True
        R, p = self.realization, self.p
        for i in range(self.dim):
            for j in range(self.dim):
                comm = (R[i] @ R[j] - R[j] @ R[i]) % p
                if not np.array_equal(comm, self.to_matrix(self.structure[i, j])):
                    return False
            if not np.array_equal(matpow(R[i], p, p), self.to_matrix(self.pmap[i])):
                return False
        return True

    def validate(self) -> None:
        if not self.check_antisymmetry():
            raise AlgebraError(f"{self.name}: bracket is not antisymmetric")
        if not self.check_jacobi():
            raise AlgebraError(f"{self.name}: Jacobi identity fails")
        if not self.check_restricted():
            raise AlgebraError(f"{self.name}: p-map is not compatible with ad")
        if not self.check_realization():
            raise AlgebraError(f"{self.name}: realization disagrees with structure constants")

    def subalgebra(self, basis, name: str | None = None) -> "RestrictedLieAlgebra":
        """The restricted subalgebra spanned by the columns of ``basis``.

        Coordinates of the result are relative to those columns; callers keep
        ``basis`` to map points back into this algebra.
        """
        p = self.p
        B = np.asarray(basis, dtype=np.int64) % p
        m = B.shape[1]
        if rank(B, p) != m:
            raise AlgebraError("subalgebra basis is not linearly independent")

        def coords(v):
            sol = solve_affine(B, v, p)
            if sol is None:
                raise AlgebraError("span is not closed under the bracket / p-map")
            return sol[0]

        S = np.zeros((m, m, m), dtype=np.int64)
        P = np.zeros((m, m), dtype=np.int64)
        for a in range(m):
            for b in range(m):
                S[a, b] = coords(self.bracket(B[:, a], B[:, b]))
            P[a] = coords(self.p_power(B[:, a]))
        real = None
        if self.realization is not None:
            real = np.einsum("ia,ixy->axy", B, self.realization) % p
        labels = tuple(_describe(self, B[:, a]) for a in range(m))
        return RestrictedLieAlgebra(name or f"sub({self.name})", p, S, P, labels, real)


def _describe(g: RestrictedLieAlgebra, x) -> str:
    nz = np.flatnonzero(x)
    if len(nz) == 1 and x[nz[0]] == 1:
        return g.labels[nz[0]]
    return "+".join(f"{int(x[i])}*{g.labels[i]}" for i in nz)


def _coordinate_extractor(realization: np.ndarray, p: int):
    n = realization.shape[0]
    flat = realization.reshape(n, -1) % p
    _, pivots, rk = rref(flat, p)
    if rk != n:
        raise AlgebraError("realization matrices are linearly dependent")
    positions = np.array(pivots, dtype=np.int64)
    from .exactlinalg import inverse

    inverse_block = inverse(flat[:, positions], p)
    return positions, inverse_block, flat


# -- constructors -------------------------------------------------------------


def from_matrices(name: str, mats, p: int, labels, nilradical=None, validate=True) -> RestrictedLieAlgebra:
    """Restricted subalgebra of gl_m spanned by ``mats`` (closed under [,] and p-th power)."""
    p = check_prime(p)
    mats = np.asarray(mats, dtype=np.int64) % p
    n = mats.shape[0]
    positions, inverse_block, flat = _coordinate_extractor(mats, p)

    def coords(m):
        f = m.reshape(-1) % p
        x = f[positions] @ inverse_block % p
        if not np.array_equal(x @ flat % p, f):
            raise AlgebraError(f"{name}: span of matrices is not closed")
        return x

    S = np.zeros((n, n, n), dtype=np.int64)
    for i in range(n):
        for j in range(i + 1, n):
            c = coords(mats[i] @ mats[j] - mats[j] @ mats[i])
            S[i, j] = c
            S[j, i] = (-c) % p
    P = np.array([coords(matpow(mats[i], p, p)) for i in range(n)], dtype=np.int64).reshape(n, n)
    g = RestrictedLieAlgebra(
        name, p, S, P, tuple(labels), mats,
        None if nilradical is None else np.asarray(nilradical, dtype=np.int64),
        (positions, inverse_block, flat),
    )
    if validate:
        g.validate()
    return g


def unit(m: int, i: int, j: int) -> np.ndarray:
    e = np.zeros((m, m), dtype=np.int64)
    e[i, j] = 1
    return e


def _select(labels_all, wanted_labels):
    n = len(labels_all)
    cols = [labels_all.index(lab) for lab in wanted_labels]
    B = np.zeros((n, len(cols)), dtype=np.int64)
    for t, c in enumerate(cols):
        B[c, t] = 1
    return B


def gl(n: int, p: int) -> RestrictedLieAlgebra:
    _positive(n)
    mats, labels = [], []
    for i in range(n):
        for j in range(n):
            mats.append(unit(n, i, j))
            labels.append(f"E{i + 1},{j + 1}")
    upper = [f"E{i + 1},{j + 1}" for i in range(n) for j in range(i + 1, n)]
    return from_matrices(f"gl{n}", np.array(mats).reshape(-1, n, n), p, labels,
                         nilradical=_select(labels, upper))


def sl(n: int, p: int) -> RestrictedLieAlgebra:
    if n < 2:
        raise AlgebraError("sl(n) needs n >= 2")
    mats, labels = [], []
    for i in range(n):
        for j in range(n):
            if i != j:
                mats.append(unit(n, i, j))
                labels.append(f"E{i + 1},{j + 1}")
    for i in range(n - 1):
        mats.append(unit(n, i, i) - unit(n, i + 1, i + 1))
        labels.append(f"H{i + 1}")
    upper = [f"E{i + 1},{j + 1}" for i in range(n) for j in range(i + 1, n)]
    return from_matrices(f"sl{n}", np.array(mats), p, labels, nilradical=_select(labels, upper))


def symplectic_form(n: int) -> np.ndarray:
    """S = [[0, I], [-I, 0]] on F_p^(2n)."""
    S = np.zeros((2 * n, 2 * n), dtype=np.int64)
    S[:n, n:] = np.eye(n, dtype=np.int64)
    S[n:, :n] = -np.eye(n, dtype=np.int64)
    return S


def sp(size: int, p: int) -> RestrictedLieAlgebra:
    """sp(2n) as the matrices m with m^T S + S m = 0; ``size`` = 2n."""
    if size < 2 or size % 2:
        raise AlgebraError("sp(2n) needs an even size >= 2")
    n = size // 2
    mats, labels = [], []
    # A-block: E_ij - E_{n+j, n+i}
    for i in range(n):
        for j in range(n):
            mats.append(unit(size, i, j) - unit(size, n + j, n + i))
            labels.append(f"A{i + 1},{j + 1}")
    # B-block (upper right, symmetric)
    for i in range(n):
        for j in range(i, n):
            m = unit(size, i, n + j) + (unit(size, j, n + i) if i != j else 0)
            mats.append(m)
            labels.append(f"B{i + 1},{j + 1}")
    # C-block (lower left, symmetric)
    for i in range(n):
        for j in range(i, n):
            m = unit(size, n + i, j) + (unit(size, n + j, i) if i != j else 0)
            mats.append(m)
            labels.append(f"C{i + 1},{j + 1}")
    nil = [f"A{i + 1},{j + 1}" for i in range(n) for j in range(i + 1, n)]
    nil += [f"B{i + 1},{j + 1}" for i in range(n) for j in range(i, n)]
    return from_matrices(f"sp{size}", np.array(mats), p, labels, nilradical=_select(labels, nil))


def in_sp_nilradical(m, n: int, p: int) -> bool:
    """Whether a 2n x 2n matrix lies in the standard Borel nilradical of sp(2n)."""
    m = np.asarray(m, dtype=np.int64) % p
    S = symplectic_form(n)
    if ((m.T @ S + S @ m) % p).any():
        return False
    A, C = m[:n, :n], m[n:, :n]
    return not C.any() and not np.tril(A).any()


def nilradical_upper(n: int, p: int) -> RestrictedLieAlgebra:
    """u_n, the strictly upper triangular n x n matrices."""
    return parabolic_nilradical(n, (), p, name=f"u{n}")


def levi_blocks(n: int, J) -> list[list[int]]:
    """0-based index blocks of the Levi factor for simple roots J (1-based) of gl_n."""
    J = set(J)
    if any(not (1 <= a <= n - 1) for a in J):
        raise AlgebraError(f"simple roots must lie in 1..{n - 1}, got {sorted(J)}")
    blocks, cur = [], [0]
    for a in range(1, n):
        if a in J:
            cur.append(a)
        else:
            blocks.append(cur)
            cur = [a]
    blocks.append(cur)
    return blocks


def _block_of(n, J):
    where = {}
    for b, blk in enumerate(levi_blocks(n, J)):
        for i in blk:
            where[i] = b
    return where


def parabolic_nilradical(n: int, J, p: int, name: str | None = None) -> RestrictedLieAlgebra:
    """u_J in gl_n: strictly upper entries (i, j) with i, j in different Levi blocks."""
    _positive(n)
    where = _block_of(n, J)
    mats, labels = [], []
    for i in range(n):
        for j in range(i + 1, n):
            if where[i] != where[j]:
                mats.append(unit(n, i, j))
                labels.append(f"E{i + 1},{j + 1}")
    if not mats:
        raise AlgebraError("the nilradical is zero for this J")
    return from_matrices(name or f"u{n}[J={','.join(map(str, sorted(J)))}]",
                         np.array(mats), p, labels)


def parabolic(n: int, J, p: int) -> RestrictedLieAlgebra:
    """p_J in gl_n: entries (i, j) with i <= j or i, j in the same Levi block."""
    _positive(n)
    where = _block_of(n, J)
    mats, labels, nil = [], [], []
    for i in range(n):
        for j in range(n):
            if i <= j or where[i] == where[j]:
                mats.append(unit(n, i, j))
                labels.append(f"E{i + 1},{j + 1}")
                if where[i] != where[j]:
                    nil.append(labels[-1])
    return from_matrices(f"p{n}[J={','.join(map(str, sorted(J)))}]", np.array(mats), p, labels,
                         nilradical=_select(labels, nil) if nil else np.zeros((len(labels), 0), dtype=np.int64))


def unr(r: int, s: int, p: int) -> RestrictedLieAlgebra:
    """u_{r,s} in gl_{r+s}: entries in rows 1..r and columns r+1..r+s."""
    if r < 1 or s < 1:
        raise AlgebraError("u_{r,s} needs r, s >= 1")
    n = r + s
    return parabolic_nilradical(n, [a for a in range(1, n) if a != r], p, name=f"u{r},{s}")


def heisenberg(n: int, p: int) -> RestrictedLieAlgebra:
    """Heisenberg algebra of dimension 2n-1, basis x_1..x_{n-1}, y_1..y_n.

    Realized in gl_{n+1}: x_i = E_{1,i+1}, y_j = E_{j+1,n+1}, y_n = E_{1,n+1},
    so that [x_i, y_j] = delta_ij y_n and y_n spans the center.
    """
    p = check_prime(p)
    _positive(n)
    m = n + 1
    mats, labels = [], []
    for i in range(1, n):
        mats.append(unit(m, 0, i))
        labels.append(f"x{i}")
    for j in range(1, n):
        mats.append(unit(m, j, n))
        labels.append(f"y{j}")
    mats.append(unit(m, 0, n))
    labels.append(f"y{n}")
    g = from_matrices(f"heis{n}", np.array(mats), p, labels)
    return g


def abelian(n: int, p: int) -> RestrictedLieAlgebra:
    """g_a^{+n}: trivial bracket and p-map, realized by square-zero 2x2 blocks."""
    _positive(n)
    mats = [unit(2 * n, 2 * s, 2 * s + 1) for s in range(n)]
    return from_matrices(f"ga{n}", np.array(mats), p, [f"t{s + 1}" for s in range(n)])


def direct_sum(algebras) -> RestrictedLieAlgebra:
    algebras = list(algebras)
    if not algebras:
        raise AlgebraError("direct sum of nothing")
    p = algebras[0].p
    if any(g.p != p for g in algebras):
        raise AlgebraError("summands over different fields")
    N = sum(g.dim for g in algebras)
    S = np.zeros((N, N, N), dtype=np.int64)
    P = np.zeros((N, N), dtype=np.int64)
    labels, off = [], 0
    for t, g in enumerate(algebras):
        d = g.dim
        S[off:off + d, off:off + d, off:off + d] = g.structure
        P[off:off + d, off:off + d] = g.pmap
        labels += [f"{lab}#{t + 1}" for lab in g.labels]
        off += d
    real = None
    if all(g.realization is not None for g in algebras):
        M = sum(g.realization.shape[1] for g in algebras)
        real = np.zeros((N, M, M), dtype=np.int64)
        off = moff = 0
        for g in algebras:
            d, m = g.dim, g.realization.shape[1]
            real[off:off + d, moff:moff + m, moff:moff + m] = g.realization
            off += d
            moff += m
    nil = None
    if all(g.nilradical is not None for g in algebras):
        off, cols = 0, []
        for g in algebras:
            for c in range(g.nilradical.shape[1]):
                v = np.zeros(N, dtype=np.int64)
                v[off:off + g.dim] = g.nilradical[:, c]
                cols.append(v)
            off += g.dim
        nil = np.array(cols, dtype=np.int64).T.reshape(N, len(cols))
    name = "+".join(g.name for g in algebras)
    return RestrictedLieAlgebra(name, p, S, P, tuple(labels), real, nil)


def semidirect(module, h: RestrictedLieAlgebra | None = None) -> RestrictedLieAlgebra:
    """W x| h for a restricted h-module W (given as a RestrictedModule).

    Basis: the basis of h followed by the standard basis w_1..w_d of W, with
    [h, w] = rho(h) w, [w, w'] = 0 and w^[p] = 0.
    """
    h = module.algebra if h is None else h
    if module.algebra is not h:
        raise AlgebraError("module is not over the given algebra")
    p, n, d = h.p, h.dim, module.dim
    N = n + d
    S = np.zeros((N, N, N), dtype=np.int64)
    S[:n, :n, :n] = h.structure
    for i in range(n):
        for a in range(d):
            # [x_i, w_a] = sum_b rho(x_i)[b, a] w_b
            S[i, n + a, n:] = module.ops[i][:, a]
            S[n + a, i, n:] = (-module.ops[i][:, a]) % p
    P = np.zeros((N, N), dtype=np.int64)
    P[:n, :n] = h.pmap
    labels = list(h.labels) + [f"w{a + 1}" for a in range(d)]
    real = None
    if h.realization is not None:
        m = h.realization.shape[1]
        M = m + d + 1
        real = np.zeros((N, M, M), dtype=np.int64)
        for i in range(n):
            real[i, :m, :m] = h.realization[i]
            real[i, m:m + d, m:m + d] = module.ops[i]
        for a in range(d):
            real[n + a, m + a, m + d] = 1
    g = RestrictedLieAlgebra(f"{module.name}x|{h.name}", p, S % p, P, tuple(labels), real)
    return g


def central_extension_gl2n(n: int, p: int, phi=None) -> RestrictedLieAlgebra:
    """k -> gl~_2n -> gl_2n, split as Lie algebras, with (b, x)^[p] = (phi(x), x^[p]).

    ``phi`` gives the values of the (over F_p, linear) functional on the
    basis E_ij of gl_2n; ``None`` means phi = 0.  Basis: c, then E_ij.
    """
    base = gl(2 * n, p)
    m = base.dim
    phi = np.zeros(m, dtype=np.int64) if phi is None else np.asarray(phi, dtype=np.int64) % p
    if phi.shape != (m,):
        raise AlgebraError(f"phi needs {m} values")
    N = m + 1
    S = np.zeros((N, N, N), dtype=np.int64)
    S[1:, 1:, 1:] = base.structure
    P = np.zeros((N, N), dtype=np.int64)
    P[1:, 1:] = base.pmap
    P[1:, 0] = phi
    labels = ("c",) + base.labels
    nil = np.zeros((N, base.nilradical.shape[1]), dtype=np.int64)
    nil[1:] = base.nilradical
    g = RestrictedLieAlgebra(f"cext{2 * n}", p, S, P, labels, None, nil)
    return g


def _positive(n):
    if n < 1:
        raise AlgebraError("dimension parameter must be >= 1")


# -- p-nilpotent cone -----------------------------------------------------------

NILCONE_GUARD = 10**8


def nilpotent_cone_points(g: RestrictedLieAlgebra, guard: int = NILCONE_GUARD) -> np.ndarray:
    """All x in g(F_p) with x^[p] = 0, as rows in lexicographic order."""
    total = g.p ** g.dim
    if total > guard:
        raise SizeGuardError(f"p^n = {total} exceeds the guard {guard}")
    X = all_vectors(g.p, g.dim)
    return X[g.p_nilpotent_mask(X)]


def com_check_nilradical(n: int, J, p: int) -> bool:
    """Whether [u_J, p_J] = u_J inside gl_n."""
    par = parabolic(n, J, p)
    U = par.nilradical
    if U.shape[1] == 0:
        return True
    brackets = [par.bracket(U[:, a], par.basis_vector(b))
                for a in range(U.shape[1]) for b in range(par.dim)]
    span = np.array(brackets, dtype=np.int64).T
    return rank(span, p) == U.shape[1] and rank(np.concatenate([span, U], axis=1), p) == U.shape[1]
