"""Radical and socle ranks of restrictions to elementary subalgebras, support
loci, constant-rank scans and the power decomposition of monomials."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from itertools import product
from math import comb

import numpy as np

from .evariety import ElementaryPoint, enumerate_E, is_maximal_elementary
from .exactlinalg import matpow, rank, solve_affine
from .grassmann import DEFAULT_BUDGET, chart_representative, enumerate_grassmannian
from .repmod import RestrictedModule, RestrictedTuple, restrict


# -- specialization ------------------------------------------------------------------


def theta_specialize(M: RestrictedModule, eps: ElementaryPoint, s: int, sigma=None) -> np.ndarray:
    """Sum_i Y_{i,s}(eps) rho(x_i), with Y the chart-``sigma`` representative of eps.

    ``s`` is 1-based.  ``sigma`` defaults to the pivot set of eps; a chart not
    containing eps raises ``ValueError``.
    """
    if not 1 <= s <= eps.r:
        raise ValueError(f"s must lie in 1..{eps.r}")
    A = eps.basis if sigma is None else chart_representative(eps.plane, sigma)
    return np.einsum("i,iab->ab", A[:, s - 1], M.ops) % M.p


# -- radicals and socles -----------------------------------------------------------


def compositions(j: int, r: int, cap: int):
    """Tuples (j_1..j_r) of integers in [0, cap] summing to j."""
    if r == 1:
        if 0 <= j <= cap:
            yield (j,)
        return
    for first in range(min(j, cap), -1, -1):
        for rest in compositions(j - first, r - 1, cap):
            yield (first,) + rest


def _monomial_operators(T: RestrictedTuple, j: int) -> list[np.ndarray]:
    p, d = T.p, T.dim
    powers = [[np.eye(d, dtype=np.int64)] for _ in range(T.r)]
    for s in range(T.r):
        for _ in range(p - 1):
            powers[s].append(powers[s][-1] @ T.ops[s] % p)
    out = []
    for c in compositions(j, T.r, p - 1):
        out.append(reduce(lambda a, b: a @ b % p, (powers[s][c[s]] for s in range(T.r))))
    return out


def _check_j(T: RestrictedTuple, j: int):
    top = (T.p - 1) * T.r
    if not 0 <= j <= top:
        raise ValueError(f"j must lie in 0..{top}")


def tuple_rad_dim(T: RestrictedTuple, j: int) -> int:
    _check_j(T, j)
    if j == 0:
        return T.dim
    return rank(np.concatenate(_monomial_operators(T, j), axis=1), T.p)


def tuple_soc_dim(T: RestrictedTuple, j: int) -> int:
    _check_j(T, j)
    if j == 0:
        return 0
    return T.dim - rank(np.concatenate(_monomial_operators(T, j), axis=0), T.p)


def rad_dim(M: RestrictedModule, eps: ElementaryPoint, j: int) -> int:
    return tuple_rad_dim(restrict(M, eps), j)


def soc_dim(M: RestrictedModule, eps: ElementaryPoint, j: int) -> int:
    return tuple_soc_dim(restrict(M, eps), j)


def jordan_type_of(op, p: int) -> list[int]:
    """Block sizes (descending) of a nilpotent operator."""
    op = np.asarray(op, dtype=np.int64) % p
    d = op.shape[0]
    if matpow(op, d, p).any():
        raise ValueError("operator is not nilpotent")
    ranks = [d]
    cur = np.eye(d, dtype=np.int64)
    while ranks[-1]:
        cur = cur @ op % p
        ranks.append(rank(cur, p))
    at_least = [ranks[k] - ranks[k + 1] for k in range(len(ranks) - 1)]  # blocks of size >= k+1
    parts = []
    for k in range(len(at_least)):
        exactly = at_least[k] - (at_least[k + 1] if k + 1 < len(at_least) else 0)
        parts += [k + 1] * exactly
    return sorted(parts, reverse=True)


def jordan_type(M: RestrictedModule, eps: ElementaryPoint) -> list[int]:
    if eps.r != 1:
        raise ValueError("Jordan type is defined for lines (r = 1)")
    return jordan_type_of(restrict(M, eps).ops[0], M.p)


def tuple_free_rank(T: RestrictedTuple) -> tuple[bool, int]:
    """(is free, number of free summands): rank of prod_s T_s^(p-1) against dim / p^r."""
    p = T.p
    top = reduce(lambda a, b: a @ b % p, (matpow(T.ops[s], p - 1, p) for s in range(T.r)))
    a = rank(top, p)
    return a * p**T.r == T.dim, a


def is_free_restriction(M: RestrictedModule, eps: ElementaryPoint) -> tuple[bool, int]:
    return tuple_free_rank(restrict(M, eps))


# -- support loci -----------------------------------------------------------------------


def has_nonfree_line(M: RestrictedModule, eps: ElementaryPoint) -> bool:
    """Whether some F_p-rational line of eps restricts M to a non-free module."""
    p = M.p
    for line in enumerate_grassmannian(eps.r, 1, p):
        u = eps.basis @ line.basis[:, 0] % p
        op = M.act(u)
        if rank(matpow(op, p - 1, p), p) * p != M.dim:
            return True
    return False


def support_locus(M: RestrictedModule, r: int, points=None, budget: int = DEFAULT_BUDGET):
    """Points of E(r, g)(F_p) meeting the rank-1 support of M in a rational line."""
    pts = list(enumerate_E(M.algebra, r, budget=budget)) if points is None else points
    return [e for e in pts if has_nonfree_line(M, e)]


def support_locus_direct(M: RestrictedModule, r: int, points=None, budget: int = DEFAULT_BUDGET):
    """Points eps with eps^*M not free."""
    pts = list(enumerate_E(M.algebra, r, budget=budget)) if points is None else points
    return [e for e in pts if not is_free_restriction(M, e)[0]]


# -- surveys --------------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class RankProfile:
    """``rad[j]`` = dim Rad^j and ``soc[j]`` = dim Soc^j for j = 0..(p-1)r."""

    point: ElementaryPoint
    rad: tuple[int, ...]
    soc: tuple[int, ...]
    free: bool
    free_rank: int
    in_support: bool
    maximal: bool | None = None


def rank_profile(M: RestrictedModule, eps: ElementaryPoint, maximal: bool | None = None) -> RankProfile:
    T = restrict(M, eps)
    top = (M.p - 1) * eps.r
    rad = tuple(tuple_rad_dim(T, j) for j in range(top + 1))
    soc = tuple(tuple_soc_dim(T, j) for j in range(top + 1))
    free, a = tuple_free_rank(T)
    return RankProfile(eps, rad, soc, free, a, has_nonfree_line(M, eps), maximal)


@dataclass(frozen=True, eq=False)
class RankSurvey:
    """Profiles over every enumerated point.  ``max``/``min`` are the observed
    extremes over the F_p-points, indexed by j = 1..(p-1)r."""

    module: RestrictedModule
    r: int
    profiles: list[RankProfile]
    max: list[int] = field(default_factory=list)
    min: list[int] = field(default_factory=list)

    @property
    def top(self) -> int:
        return (self.module.p - 1) * self.r

    def rad_locus(self, j: int) -> list[ElementaryPoint]:
        """Points with dim Rad^j below the observed maximum."""
        best = max(pr.rad[j] for pr in self.profiles)
        return [pr.point for pr in self.profiles if pr.rad[j] < best]

    def soc_locus(self, j: int) -> list[ElementaryPoint]:
        """Points with dim Soc^j above the observed minimum."""
        least = min(pr.soc[j] for pr in self.profiles)
        return [pr.point for pr in self.profiles if pr.soc[j] > least]


def rank_survey(M: RestrictedModule, r: int, points=None, budget: int = DEFAULT_BUDGET,
                with_maximal: bool = False, workers: int = 1) -> RankSurvey:
    g = M.algebra
    pts = list(enumerate_E(g, r, budget=budget, workers=workers)) if points is None else list(points)
    if not pts:
        raise ValueError(f"E({r}, {g.name})(F_{g.p}) is empty")
    profiles = [rank_profile(M, e, is_maximal_elementary(g, e) if with_maximal else None) for e in pts]
    top = (g.p - 1) * r
    mx = [max(pr.rad[j] for pr in profiles) for j in range(1, top + 1)]
    mn = [min(pr.soc[j] for pr in profiles) for j in range(1, top + 1)]
    return RankSurvey(M, r, profiles, mx, mn)


def constant_rank_report(survey: RankSurvey) -> dict:
    """Observed extremes and constancy flags per j = 1..(p-1)r.

    A rank is flagged constant exactly when its non-maximal (radical) or
    non-minimal (socle) locus is empty.
    """
    top = survey.top
    below = [len(survey.rad_locus(j)) for j in range(1, top + 1)]
    above = [len(survey.soc_locus(j)) for j in range(1, top + 1)]
    return {
        "max": list(survey.max),
        "min": list(survey.min),
        "constant_rad": [c == 0 for c in below],
        "constant_soc": [c == 0 for c in above],
        "below_max_counts": below,
        "above_min_counts": above,
        "points": len(survey.profiles),
    }


# -- power decomposition ------------------------------------------------------------------


def _two_variable(a: int, b: int, p: int) -> list[tuple[int, int]]:
    """Coefficients c_j with x^a y^b = sum_j c_j (j x + y)^(a+b), j = 0..a+b."""
    i = a + b
    # row k: coefficient of x^k y^(i-k) in (j x + y)^i is C(i, k) j^k
    V = np.array([[comb(i, k) * pow(j, k, p) % p for j in range(i + 1)] for k in range(i + 1)],
                 dtype=np.int64)
    target = np.zeros(i + 1, dtype=np.int64)
    target[a] = 1
    sol = solve_affine(V, target, p)
    if sol is None or sol[1].shape[1]:
        raise ArithmeticError("Vandermonde system is singular")
    return [(int(c), j) for j, c in enumerate(sol[0]) if c]


def power_decompose(exponents, p: int) -> list[tuple[int, tuple[int, ...]]]:
    """Write x_1^i_1 ... x_n^i_n as sum_j a_j lambda_j^i with linear forms lambda_j.

    Returns ``[(a_j, coefficients of lambda_j), ...]``; needs i = sum i_k < p.
    Two variables are handled by solving a Vandermonde system for the forms
    j*x + y; more variables by folding one variable in at a time.
    """
    exps = [int(e) for e in exponents]
    n, i = len(exps), sum(exps)
    if any(e < 0 for e in exps):
        raise ValueError("exponents must be non-negative")
    if i >= p:
        raise ValueError(f"degree {i} must be < p = {p}")
    if i == 0:
        return [(1, (0,) * n)]
    nz = [k for k, e in enumerate(exps) if e]
    first = nz[0]
    terms = {tuple(1 if k == first else 0 for k in range(n)): 1}
    deg = exps[first]
    for k in nz[1:]:
        new: dict[tuple[int, ...], int] = {}
        for form, a in terms.items():
            # x_k^e * form^deg with x := x_k, y := form (independent variables)
            for c, j in _two_variable(exps[k], deg, p):
                lam = tuple((j * (1 if t == k else 0) + form[t]) % p for t in range(n))
                new[lam] = (new.get(lam, 0) + a * c) % p
        terms = {f: a for f, a in new.items() if a}
        deg += exps[k]
    return sorted((a, f) for f, a in terms.items())


def expand_power_sum(terms, degree: int, p: int) -> dict[tuple[int, ...], int]:
    """sum_j a_j lambda_j^degree as {exponent tuple: coefficient} (nonzero only)."""
    if not terms:
        return {}
    n = len(terms[0][1])
    out: dict[tuple[int, ...], int] = {}
    for a, lam in terms:
        poly = {(0,) * n: 1}
        for _ in range(degree):
            nxt: dict[tuple[int, ...], int] = {}
            for mono, c in poly.items():
                for t, coef in enumerate(lam):
                    if coef:
                        m2 = mono[:t] + (mono[t] + 1,) + mono[t + 1:]
                        nxt[m2] = (nxt.get(m2, 0) + c * coef) % p
            poly = nxt
        for mono, c in poly.items():
            out[mono] = (out.get(mono, 0) + a * c) % p
    return {m: c for m, c in out.items() if c}


def monomials_below(p: int, nvars: int):
    """All exponent tuples in ``nvars`` variables of total degree < p."""
    for e in product(range(p), repeat=nvars):
        if sum(e) < p:
            yield e
