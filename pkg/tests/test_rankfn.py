from itertools import product

import numpy as np
import pytest
import sympy

from elemsub import evariety as E
from elemsub import liealg as L
from elemsub import rankfn as K
from elemsub import repmod as R
from elemsub.catalog import cyclic_module
from elemsub.exactlinalg import canonical_subspace


def cols(g, *labels):
    return np.stack([g.basis_vector(g.labels.index(lab)) for lab in labels], axis=1)


def test_theta_specialization():
    p = 5
    g = L.abelian(2, p)
    M = R.free_module_over(g)
    for a, b in [(1, 0), (1, 3), (2, 4)]:
        pt = E.elementary_point(g, np.array([[a], [b]]))
        got = K.theta_specialize(M, pt, 1)
        # [a:b] is the line through x_1 + (b/a) x_2
        want = (M.ops[0] + b * pow(a, -1, p) * M.ops[1]) % p
        assert np.array_equal(got, want)
    pt = E.elementary_point(g, np.eye(2, dtype=np.int64))
    assert np.array_equal(K.theta_specialize(M, pt, 2), M.ops[1])
    with pytest.raises(ValueError):
        K.theta_specialize(M, pt, 3)
    line = E.elementary_point(g, np.array([[0], [1]]))
    with pytest.raises(ValueError):
        K.theta_specialize(M, line, 1, sigma=(0,))


def test_compositions():
    assert sorted(K.compositions(2, 2, 1)) == [(1, 1)]
    assert len(list(K.compositions(3, 3, 2))) == 7
    assert list(K.compositions(5, 1, 4)) == []


def test_free_rad_and_soc():
    p, r = 3, 2
    T = R.free_module(r, 1, p)
    # monomials t^c with every exponent at most p-1 and total degree at least j
    for j in range(0, (p - 1) * r + 1):
        want = sum(1 for c in product(range(p), repeat=r) if sum(c) >= j)
        assert K.tuple_rad_dim(T, j) == want
        assert K.tuple_soc_dim(T, j) == p**r - want
    assert K.tuple_rad_dim(T, 2) == 6
    with pytest.raises(ValueError):
        K.tuple_rad_dim(T, 5)
    with pytest.raises(ValueError):
        K.tuple_soc_dim(T, -1)


def test_jordan_types():
    p = 5
    J = np.eye(4, k=1, dtype=np.int64)
    assert K.jordan_type_of(J, p) == [4]
    assert K.jordan_type_of(np.zeros((3, 3), dtype=np.int64), p) == [1, 1, 1]
    assert K.jordan_type_of(np.kron(np.eye(2, dtype=np.int64), np.eye(5, k=1, dtype=np.int64)), p) == [5, 5]
    assert K.jordan_type_of(np.diag([1, 0, 0], k=1), p) == [2, 1, 1]
    with pytest.raises(ValueError):
        K.jordan_type_of(np.eye(2, dtype=np.int64), p)
    g = L.sl(2, 3)
    pt = E.elementary_point(g, cols(g, "E1,2"))
    assert K.jordan_type(R.adjoint(g), pt) == [3]


def test_freeness_examples():
    p = 3
    g = L.sl(2, p)
    line = next(iter(E.enumerate_E(g, 1)))
    assert K.is_free_restriction(R.adjoint(g), line) == (True, 1)
    assert K.is_free_restriction(R.defining(g), line) == (False, 0)
    assert K.tuple_free_rank(R.free_module(2, 3, 5)) == (True, 3)


def test_support_loci():
    p = 3
    ab = L.abelian(2, p)
    F = R.free_module_over(ab)
    assert K.support_locus(F, 1) == [] == K.support_locus_direct(F, 1)
    triv = R.trivial(ab)
    pts = list(E.enumerate_E(ab, 1))
    assert len(K.support_locus(triv, 1)) == len(pts) == p + 1
    # cyclic:1 is free along x_1 and trivial along x_2
    C = cyclic_module(ab, 1)
    supp = K.support_locus(C, 1)
    assert [pt.key() for pt in supp] == [canonical_subspace(np.array([[0], [1]]), p).key()]
    assert [pt.key() for pt in K.support_locus_direct(C, 1)] == [pt.key() for pt in supp]
    # over a plane, the direct route needs freeness over the whole plane
    plane_pts = list(E.enumerate_E(ab, 2))
    assert len(K.support_locus(C, 2)) == 1 and len(K.support_locus_direct(C, 2)) == 1
    assert K.support_locus(F, 2, plane_pts) == []


def test_adjoint_u3_survey():
    p = 3
    g = L.nilradical_upper(3, p)
    M = R.adjoint(g)
    S = K.rank_survey(M, 2)
    assert len(S.profiles) == p + 1
    for pr in S.profiles:
        D = R.restrict(R.dual(M), pr.point)
        # Soc^j(M) and Rad^j(M^#) are dual: dim Soc^j M = d - dim Rad^j M^#
        for j in range(1, S.top + 1):
            assert pr.soc[j] == M.dim - K.tuple_rad_dim(D, j)
        assert pr.rad[0] == M.dim and pr.soc[0] == 0
    rep = K.constant_rank_report(S)
    assert rep["points"] == p + 1
    assert len(rep["max"]) == len(rep["min"]) == S.top


def test_gl3_defining_nonconstant():
    p = 3
    g = L.gl(3, p)
    S = K.rank_survey(R.defining(g), 2, points=E.enumerate_E(g, 2, within=g.nilradical))
    rep = K.constant_rank_report(S)
    assert rep["points"] == 4
    # u_{1,2} = <E1,2, E1,3> has image <e1>; u_{2,1} = <E1,3, E2,3> has image <e1, e2>
    assert rep["max"][0] == 2 and rep["min"][0] == 1
    assert not rep["constant_rad"][0] and not rep["constant_soc"][0]
    u12 = canonical_subspace(cols(g, "E1,2", "E1,3"), p).key()
    u21 = canonical_subspace(cols(g, "E1,3", "E2,3"), p).key()
    assert u12 in [pt.key() for pt in S.rad_locus(1)]
    assert u21 in [pt.key() for pt in S.soc_locus(1)]


def test_free_module_has_constant_ranks():
    p = 3
    ab = L.abelian(2, p)
    S = K.rank_survey(R.free_module_over(ab), 1)
    rep = K.constant_rank_report(S)
    assert all(rep["constant_rad"]) and all(rep["constant_soc"])
    assert all(pr.free for pr in S.profiles) and not any(pr.in_support for pr in S.profiles)


def sympy_check(exps, p):
    n, i = len(exps), sum(exps)
    xs = sympy.symbols(f"x0:{n}")
    total = sum(a * sum(c * x for c, x in zip(lam, xs)) ** i for a, lam in K.power_decompose(exps, p))
    want = sympy.prod([x**e for x, e in zip(xs, exps)])
    return sympy.Poly(sympy.expand(total - want), *xs, modulus=p).is_zero


def test_power_decompose_small():
    p = 5
    assert K.power_decompose((1, 0), p) == [(1, (1, 0))]
    terms = K.power_decompose((1, 1), p)
    assert {lam for _, lam in terms} <= {(1, 0), (1, 1), (1, 2)}
    # independent route: (x + j y)^2 = x^2 + 2j xy + j^2 y^2, solved for xy over GF(p)
    V = sympy.Matrix([[1, 1, 1], [0, 2, 4], [0, 1, 4]])
    c = V.inv_mod(p) * sympy.Matrix([0, 1, 0]) % p
    want = {(1, j): int(c[j]) for j in range(3) if c[j]}
    assert {lam: a for a, lam in terms} == want
    with pytest.raises(ValueError):
        K.power_decompose((3, 2), p)


def test_power_decompose_random_degree_three():
    rng = np.random.default_rng(0)
    p = 5
    for _ in range(5):
        n = int(rng.integers(2, 4))
        exps = [0] * n
        for k in rng.integers(0, n, size=3):
            exps[k] += 1
        assert sympy_check(exps, p)
        terms = K.power_decompose(exps, p)
        want = {tuple(exps): 1}
        assert K.expand_power_sum(terms, 3, p) == want


def test_monomials_below():
    assert sum(1 for _ in K.monomials_below(3, 2)) == 6
    assert all(sum(e) < 5 for e in K.monomials_below(5, 3))


def test_radsoc_loci_agree_for_cyclic_module():
    # k[t]/(t^p) along x_1: free on every line except <x_2>, where it is trivial
    p = 3
    g = L.abelian(2, p)
    M = cyclic_module(g, 1)
    S = K.rank_survey(M, 1)
    rad = {pt.key() for pt in S.rad_locus(1)}
    soc = {pt.key() for pt in S.soc_locus(1)}
    supp = {pt.key() for pt in K.support_locus(M, 1)}
    assert rad == supp == soc == {canonical_subspace(np.array([[0], [1]]), p).key()}
