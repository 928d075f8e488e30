from itertools import permutations

import numpy as np
import pytest

from elemsub import evariety as E
from elemsub import liealg as L
from elemsub.exactlinalg import all_vectors, canonical_subspace, inverse, random_invertible
from elemsub.grassmann import BudgetExceeded, enumerate_grassmannian, isotropic, plane


def cols(g, *labels):
    return np.stack([g.basis_vector(g.labels.index(lab)) for lab in labels], axis=1)


def keys(pts):
    return [pt.key() for pt in pts]


def lagrangian_count(gram, p):
    """Isotropic half-dimensional subspaces, found by filtering the Grassmannian."""
    m = gram.shape[0]
    return sum(isotropic(pl.basis, gram, p) for pl in enumerate_grassmannian(m, m // 2, p))


# -- membership ---------------------------------------------------------------------------


def test_is_elementary_examples():
    g = L.gl(3, 5)
    assert E.is_elementary(g, plane(cols(g, "E1,2", "E1,3"), 5))
    assert not E.is_elementary(g, plane(cols(g, "E1,2", "E2,3"), 5))
    assert E.is_elementary(g, plane(cols(g, "E1,2") + cols(g, "E2,3"), 5))
    # a semisimple line is never elementary
    assert not E.is_elementary(g, plane(cols(g, "E1,1"), 5))
    with pytest.raises(E.NotElementary):
        E.elementary_point(g, cols(g, "E1,2", "E2,3"))


def test_certificates_agree():
    g = L.nilradical_upper(4, 3)
    full = list(E.enumerate_E(g, 3))
    basis = list(E.enumerate_E(g, 3, full_scan_limit=0))
    assert keys(full) == keys(basis)
    assert {pt.certificate for pt in full} == {"full-scan"}
    assert {pt.certificate for pt in basis} == {"basis-checked"}


# -- enumeration --------------------------------------------------------------------------


@pytest.mark.parametrize("p", [3, 5, 7])
def test_E2_u3_is_projective_line(p):
    pts = list(E.enumerate_E(L.nilradical_upper(3, p), 2))
    assert len(pts) == p + 1


@pytest.mark.parametrize("make,r", [
    (lambda: L.nilradical_upper(3, 3), 2),
    (lambda: L.nilradical_upper(3, 5), 2),
    (lambda: L.nilradical_upper(4, 3), 2),
    (lambda: L.nilradical_upper(4, 3), 4),
    (lambda: L.heisenberg(3, 3), 2),
    (lambda: L.heisenberg(3, 3), 3),
    (lambda: L.direct_sum([L.sl(2, 3)] * 2), 2),
    (lambda: L.gl(2, 3), 1),
    (lambda: L.gl(2, 5), 2),
])
def test_pruned_search_equals_grassmannian_filter(make, r):
    g = make()
    fast = list(E.enumerate_E(g, r))
    slow = list(E.enumerate_E_naive(g, r))
    assert keys(fast) == keys(slow)
    assert all(E.is_elementary(g, pt.plane) for pt in fast)


@pytest.mark.parametrize("make", [lambda: L.sl(2, 3), lambda: L.sl(2, 5), lambda: L.sl(3, 3),
                                  lambda: L.heisenberg(2, 5)])
def test_lines_match_nilpotent_cone(make):
    g = make()
    cone = L.nilpotent_cone_points(g)
    assert len(list(E.enumerate_E(g, 1))) == (len(cone) - 1) // (g.p - 1)


def test_product_of_sl2():
    for r, p in [(2, 3), (2, 5), (3, 3)]:
        g = L.direct_sum([L.sl(2, p)] * r)
        assert len(list(E.enumerate_E(g, r))) == (p + 1) ** r


def test_direct_sum_planes_bijective_on_sl2_pair():
    p = 3
    a = L.sl(2, p)
    g = L.direct_sum([a, a])
    lines = list(E.enumerate_E(a, 1))
    images = {E.direct_sum_planes([x, y], g).key() for x in lines for y in lines}
    assert len(images) == len(lines) ** 2
    assert images == set(keys(E.enumerate_E(g, 2)))
    assert E.direct_sum_planes([lines[0]], a) == lines[0]


def test_within_nilradical_gl3():
    g = L.gl(3, 3)
    pts = list(E.enumerate_E(g, 2, within=g.nilradical))
    want = {canonical_subspace(cols(g, "E1,2", "E1,3"), 3).key(),
            canonical_subspace(cols(g, "E1,3", "E2,3"), 3).key()}
    assert want <= set(keys(pts))
    assert len(pts) == 4
    assert all(pt.algebra is g for pt in pts)


def test_workers_do_not_change_output():
    g = L.heisenberg(3, 3)
    assert keys(E.enumerate_E(g, 2, workers=1)) == keys(E.enumerate_E(g, 2, workers=3))


def test_budget_refusal():
    with pytest.raises(BudgetExceeded):
        list(E.enumerate_E(L.gl(4, 5), 4, budget=1000))


def test_conjugation_invariance():
    p = 3
    g = L.gl(3, p)
    pts = set(keys(E.enumerate_E(g, 2)))
    rng = np.random.default_rng(0)
    mats = [np.eye(3, dtype=np.int64)[list(s)] for s in permutations(range(3))]
    mats += [random_invertible(3, p, rng) for _ in range(4)]
    for h in mats:
        hinv = inverse(h, p)
        for key in list(pts)[::17]:
            sigma, flat = key
            B = np.array(flat, dtype=np.int64).reshape(len(sigma), -1).T
            moved = np.stack([g.from_matrix(h @ g.to_matrix(B[:, s]) @ hinv % p)
                              for s in range(B.shape[1])], axis=1)
            assert canonical_subspace(moved, p).key() in pts


# -- Heisenberg -----------------------------------------------------------------------------


@pytest.mark.parametrize("n,p", [(2, 3), (2, 5), (3, 3), (3, 5)])
def test_heisenberg_lagrangian(n, p):
    g = L.heisenberg(n, p)
    form = E.heisenberg_form(g)
    pts = list(E.enumerate_E(g, n))
    assert len(pts) == lagrangian_count(form.gram, p) == np.prod([p**i + 1 for i in range(1, n)])
    assert all(E.is_lagrangian_preimage(pt, form) for pt in pts)
    ys = E.elementary_point(g, cols(g, *[f"y{j}" for j in range(1, n + 1)]))
    assert E.is_lagrangian_preimage(ys, form)


def test_heisenberg_form_rejects_others():
    with pytest.raises(L.AlgebraError):
        E.heisenberg_form(L.nilradical_upper(4, 3))
    with pytest.raises(L.AlgebraError):
        E.heisenberg_form(L.abelian(2, 3))


def test_central_extension_counts_run():
    for phi in (None, np.eye(2, dtype=np.int64).ravel()):
        g = L.central_extension_gl2n(1, 3, phi)
        pts = list(E.enumerate_E(g, 2))
        assert pts and all(E.is_elementary(g, pt.plane) for pt in pts)


# -- triangularization --------------------------------------------------------------------


def strictly_upper(m):
    return not np.tril(m).any()


def test_engel_examples():
    p = 5
    g = L.gl(3, p)
    u12 = E.elementary_point(g, cols(g, "E1,2", "E1,3"))
    assert np.array_equal(E.engel_triangularize(u12), np.eye(3))
    low = E.elementary_point(g, cols(g, "E2,1", "E3,1"))
    h = E.engel_triangularize(low)
    assert sorted(h.sum(axis=0)) == [1, 1, 1] and set(np.unique(h)) == {0, 1}
    for u in g.to_matrices(low.basis.T):
        assert strictly_upper(E.conjugate(h, u, p))
    rng = np.random.default_rng(1)
    for _ in range(20):
        k = random_invertible(3, p, rng)
        span = np.stack([g.from_matrix(k @ g.to_matrix(x) @ inverse(k, p) % p) for x in u12.elements],
                        axis=1)
        pt = E.elementary_point(g, span)
        h = E.engel_triangularize(pt)
        assert all(strictly_upper(E.conjugate(h, u, p)) for u in g.to_matrices(pt.basis.T))


def test_engel_on_all_points_gl3():
    g = L.gl(3, 3)
    for pt in E.enumerate_E(g, 2):
        h = E.engel_triangularize(pt)
        assert all(strictly_upper(E.conjugate(h, u, 3)) for u in g.to_matrices(pt.basis.T))


@pytest.mark.parametrize("p", [3, 5])
def test_sp4_maximal_points_triangularize(p):
    g = L.sp(4, p)
    r, pts = E.max_elementary_dimension(g)
    assert r == 3
    # over F_q the maximal points are Lagrangian-type: (q + 1)(q^2 + 1) of them
    assert len(pts) == (p + 1) * (p**2 + 1)
    for pt in pts:
        h = E.symplectic_flag_triangularize(pt)
        assert E.is_symplectic(h, p)
        assert all(L.in_sp_nilradical(E.conjugate(h, u, p), 2, p) for u in g.to_matrices(pt.basis.T))


def test_symplectic_on_conjugated_nilradical_block():
    p = 5
    g = L.sp(4, p)
    S = L.symplectic_form(2)
    # B-block (the Lagrangian-type elementary subalgebra) moved by a symplectic matrix
    B = [x for x in range(g.dim) if g.labels[x].startswith("B")]
    assert len(B) == 3
    rng = np.random.default_rng(2)
    for _ in range(10):
        while True:
            A = random_invertible(2, p, rng)
            k = np.block([[A, np.zeros((2, 2), dtype=np.int64)],
                          [np.zeros((2, 2), dtype=np.int64), inverse(A.T % p, p)]])
            C = rng.integers(0, p, size=(2, 2))
            shear = np.block([[np.eye(2, dtype=np.int64), np.zeros((2, 2), dtype=np.int64)],
                              [(C + C.T) % p, np.eye(2, dtype=np.int64)]])
            k = k @ shear % p
            if not ((k.T @ S @ k - S) % p).any():
                break
        span = np.stack([g.from_matrix(k @ g.realization[x] @ inverse(k, p) % p) for x in B], axis=1)
        pt = E.elementary_point(g, span)
        h = E.symplectic_flag_triangularize(pt)
        assert E.is_symplectic(h, p)
        assert all(L.in_sp_nilradical(E.conjugate(h, u, p), 2, p) for u in g.to_matrices(pt.basis.T))


# -- maximality -------------------------------------------------------------------------------


def test_maximality_examples():
    g = L.gl(3, 5)
    assert E.is_maximal_elementary(g, E.elementary_point(g, cols(g, "E1,2", "E1,3")))
    x = cols(g, "E1,2") + cols(g, "E2,3")
    assert not E.is_maximal_elementary(g, E.elementary_point(g, x))


def test_socle_criterion_requires_trivial_pmap():
    g = L.nilradical_upper(4, 3)
    assert not E.has_trivial_pmap(g)
    pt = next(iter(E.enumerate_E(g, 2)))
    with pytest.raises(L.AlgebraError):
        E.is_maximal_via_socle(g, pt)


@pytest.mark.parametrize("make,r", [(lambda: L.nilradical_upper(3, 5), 1), (lambda: L.nilradical_upper(3, 5), 2),
                                    (lambda: L.heisenberg(3, 3), 2), (lambda: L.heisenberg(3, 3), 3),
                                    (lambda: L.nilradical_upper(4, 5), 3),
                                    (lambda: L.parabolic_nilradical(4, [2], 3), 2)])
def test_socle_and_brute_force_agree(make, r):
    g = make()
    assert E.has_trivial_pmap(g)
    pts = list(E.enumerate_E(g, r))
    brute = [E.is_maximal_elementary(g, pt) for pt in pts]
    assert brute == [E.is_maximal_via_socle(g, pt) for pt in pts]


def test_full_plane_scan_helper_consistency():
    # every element of an enumerated plane is p-nilpotent
    g = L.heisenberg(3, 5)
    for pt in list(E.enumerate_E(g, 3))[::5]:
        X = all_vectors(5, pt.r) @ pt.basis.T % 5
        assert not g.p_power_batch(X).any()
