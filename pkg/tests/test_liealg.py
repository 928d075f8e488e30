import numpy as np
import pytest

from elemsub import liealg as L
from elemsub.exactlinalg import FieldError, all_vectors, matpow
from elemsub.repmod import defining, free_module_over


def E(g, label):
    return g.basis_vector(g.labels.index(label))


def random_elements(g, k, seed):
    return np.random.default_rng(seed).integers(0, g.p, size=(k, g.dim))


CONSTRUCTORS = [
    lambda p: L.gl(3, p),
    lambda p: L.sl(3, p),
    lambda p: L.sp(4, p),
    lambda p: L.sp(6, p),
    lambda p: L.nilradical_upper(4, p),
    lambda p: L.parabolic_nilradical(5, [2, 3], p),
    lambda p: L.parabolic(4, [1, 3], p),
    lambda p: L.unr(2, 3, p),
    lambda p: L.heisenberg(3, p),
    lambda p: L.abelian(3, p),
    lambda p: L.direct_sum([L.sl(2, p), L.heisenberg(2, p)]),
    lambda p: L.central_extension_gl2n(1, p),
    lambda p: L.central_extension_gl2n(1, p, np.eye(2, dtype=np.int64).ravel()),
]


@pytest.mark.parametrize("p", [3, 5])
@pytest.mark.parametrize("make", CONSTRUCTORS)
def test_constructors_validate(make, p):
    g = make(p)
    assert g.check_antisymmetry() and g.check_jacobi() and g.check_restricted()
    assert g.check_realization()


def test_semidirect_validates():
    h = L.abelian(2, 3)
    g = L.semidirect(free_module_over(h))
    g.validate()
    assert g.dim == 2 + 9


def test_gl3_bracket():
    g = L.gl(3, 5)
    assert np.array_equal(g.bracket(E(g, "E1,2"), E(g, "E2,3")), E(g, "E1,3"))
    for x in random_elements(g, 50, 0):
        assert not g.bracket(x, x).any()


@pytest.mark.parametrize("make,p", [(lambda p: L.sp(4, p), 7), (lambda p: L.gl(4, p), 5),
                                    (lambda p: L.parabolic_nilradical(5, [2], p), 3)])
def test_bracket_matches_commutator(make, p):
    g = make(p)
    X, Y = random_elements(g, 200, 1), random_elements(g, 200, 2)
    for x, y in zip(X, Y):
        a, b = g.to_matrix(x), g.to_matrix(y)
        assert np.array_equal(g.to_matrix(g.bracket(x, y)), (a @ b - b @ a) % p)


def test_jacobson_matches_matrix_power_gl4():
    g = L.gl(4, 5)
    X = random_elements(g, 500, 3)
    got = g.p_power_batch(X)
    want = matpow(g.to_matrices(X), 5, 5).reshape(500, -1)
    assert np.array_equal(got, want)
    for x in X[:20]:
        assert np.array_equal(g.p_power(x), g.from_matrix(matpow(g.to_matrix(x), 5, 5)))


@pytest.mark.parametrize("make,p", [(lambda p: L.sp(4, p), 3), (lambda p: L.sl(3, p), 7),
                                    (lambda p: L.direct_sum([L.sl(2, p), L.gl(2, p)]), 5)])
def test_jacobson_semilinear_and_matrix(make, p):
    g = make(p)
    rng = np.random.default_rng(4)
    for x in random_elements(g, 100, 5):
        a = int(rng.integers(1, p))
        assert np.array_equal(g.p_power(a * x % p), a * g.p_power(x) % p)
        assert np.array_equal(g.to_matrix(g.p_power(x)), matpow(g.to_matrix(x), p, p))


def test_jacobson_without_realization():
    # the central extension has no realization; compare to the gl_2 quotient and phi
    p = 5
    phi = np.eye(2, dtype=np.int64).ravel()
    g = L.central_extension_gl2n(1, p, phi)
    base = L.gl(2, p)
    for x in random_elements(g, 100, 6):
        y = g.p_power(x)
        xb = x[1:]
        assert np.array_equal(y[1:], base.p_power(xb))
        # p-semilinear phi over F_p is linear, and the c-component of (b, x)^[p] is phi(x)
        assert y[0] == phi @ xb % p


def test_central_extension_phi_zero():
    g = L.central_extension_gl2n(1, 3)
    base = L.gl(2, 3)
    for x in random_elements(base, 50, 7):
        y = g.p_power(np.concatenate([[0], x]))
        assert y[0] == 0 and np.array_equal(y[1:], base.p_power(x))


def test_u3_basis_p_nilpotent():
    for p in (3, 5, 7):
        g = L.nilradical_upper(3, p)
        assert not g.pmap.any()
        for i in range(g.dim):
            assert not g.p_power(g.basis_vector(i)).any()


def test_commuting_pairs_additive():
    g = L.gl(3, 5)
    x = E(g, "E1,2") + 2 * E(g, "E1,3")
    y = 3 * E(g, "E1,3") + E(g, "E1,1") + E(g, "E2,2") + E(g, "E3,3")
    assert not g.bracket(x, y).any()
    assert np.array_equal(g.p_power(x + y), (g.p_power(x) + g.p_power(y)) % 5)


def test_heisenberg_two_is_u3():
    g = L.heisenberg(2, 3)
    assert g.dim == 3
    assert np.array_equal(g.bracket(E(g, "x1"), E(g, "y1")), E(g, "y2"))
    for lab in g.labels:
        assert not g.bracket(E(g, "y2"), E(g, lab)).any()
    u3 = L.nilradical_upper(3, 3)
    assert u3.dim == 3


def test_heisenberg_relations():
    g = L.heisenberg(4, 5)
    n = 4
    for i in range(1, n):
        for j in range(1, n + 1):
            want = E(g, f"y{n}") if i == j else np.zeros(g.dim, dtype=np.int64)
            assert np.array_equal(g.bracket(E(g, f"x{i}"), E(g, f"y{j}")), want)
    assert not g.pmap.any()


def test_rejects_p_two():
    with pytest.raises(FieldError):
        L.heisenberg(2, 2)
    with pytest.raises(FieldError):
        L.gl(2, 2)


def test_sp_dimensions_and_convention():
    g = L.sp(4, 3)
    assert g.dim == 10
    S = L.symplectic_form(2)
    for m in g.realization:
        assert not ((m.T @ S + S @ m) % 3).any()
    nil = g.to_matrices(g.nilradical.T)
    assert all(L.in_sp_nilradical(m, 2, 3) for m in nil)
    assert g.nilradical.shape[1] == 4


def test_malformed_J_rejected():
    with pytest.raises(L.AlgebraError):
        L.parabolic_nilradical(4, [0], 3)
    with pytest.raises(L.AlgebraError):
        L.parabolic_nilradical(3, [1, 2], 3)


def test_direct_sum_componentwise():
    a, b = L.sl(2, 5), L.heisenberg(2, 5)
    g = L.direct_sum([a, b])
    rng = np.random.default_rng(8)
    for _ in range(50):
        x = np.concatenate([rng.integers(0, 5, a.dim), np.zeros(b.dim, dtype=np.int64)])
        y = np.concatenate([np.zeros(a.dim, dtype=np.int64), rng.integers(0, 5, b.dim)])
        assert not g.bracket(x, y).any()
        z = (x + y) % 5
        assert np.array_equal(g.p_power(z)[:a.dim], a.p_power(z[:a.dim]))
        assert np.array_equal(g.p_power(z)[a.dim:], b.p_power(z[a.dim:]))


def test_nilpotent_cone():
    g = L.sl(2, 3)
    pts = L.nilpotent_cone_points(g)
    assert len(pts) == 9
    # the two routes of the p-nilpotency test agree on every element
    X = all_vectors(3, g.dim)
    assert np.array_equal(g.p_nilpotent_mask(X), ~g.p_power_batch(X).any(axis=1))
    ab = L.abelian(2, 5)
    assert len(L.nilpotent_cone_points(ab)) == 25
    with pytest.raises(L.SizeGuardError):
        L.nilpotent_cone_points(L.gl(4, 5), guard=10**6)


def test_u4_regular_nilpotent_at_p3():
    g = L.nilradical_upper(4, 3)
    x = E(g, "E1,2") + E(g, "E2,3") + E(g, "E3,4")
    # as a matrix its cube is E_{1,4}; the restricted structure follows the matrix power
    assert np.array_equal(g.p_power(x), E(g, "E1,4"))
    assert not g.p_power(g.p_power(x)).any()
    assert g.is_p_nilpotent(E(g, "E1,2") + E(g, "E2,3"))


def test_com_check():
    assert L.com_check_nilradical(3, [2], 3)
    assert L.com_check_nilradical(4, [1, 3], 3)
    assert L.com_check_nilradical(3, [1, 2], 5)


def test_subalgebra_and_from_matrix():
    g = L.gl(3, 5)
    sub = g.subalgebra(g.nilradical)
    sub.validate()
    assert sub.dim == 3
    with pytest.raises(L.AlgebraError):
        g.subalgebra(np.stack([E(g, "E1,2"), E(g, "E2,3")], axis=1))
    with pytest.raises(L.AlgebraError):
        L.nilradical_upper(3, 5).from_matrix(np.eye(3, dtype=np.int64))


def test_defining_module_validates():
    for g in (L.sp(4, 3), L.heisenberg(3, 5), L.unr(2, 2, 7)):
        assert defining(g).dim == g.realization.shape[1]
