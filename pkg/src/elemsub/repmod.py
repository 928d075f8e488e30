"""Restricted representations presented by one operator per basis vector."""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import product

import numpy as np

from .exactlinalg import matpow
from .liealg import RestrictedLieAlgebra


class ModuleError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class RestrictedModule:
    """A u(g)-module: ``ops[i]`` is the d x d matrix of the basis vector x_i."""

    algebra: RestrictedLieAlgebra
    ops: np.ndarray
    name: str = "M"
    check: bool = True

    def __post_init__(self):
        ops = np.asarray(self.ops, dtype=np.int64) % self.algebra.p
        if ops.ndim != 3 or ops.shape[0] != self.algebra.dim or ops.shape[1] != ops.shape[2]:
            raise ModuleError(
                f"need {self.algebra.dim} square operators, got shape {ops.shape}"
            )
        ops.setflags(write=False)
        object.__setattr__(self, "ops", ops)
        if self.check:
            self.validate()

    @property
    def dim(self) -> int:
        return self.ops.shape[1]

    @property
    def p(self) -> int:
        return self.algebra.p

    def act(self, x) -> np.ndarray:
        """rho(x) for an algebra element x."""
        x = self.algebra.element(x)
        return np.einsum("i,iab->ab", x, self.ops) % self.p

    def validate(self) -> None:
        g, p, R = self.algebra, self.p, self.ops
        for i in range(g.dim):
            for j in range(i + 1, g.dim):
                comm = (R[i] @ R[j] - R[j] @ R[i]) % p
                if not np.array_equal(comm, self.act(g.structure[i, j])):
                    raise ModuleError(f"{self.name}: bracket not preserved on ({g.labels[i]}, {g.labels[j]})")
            if not np.array_equal(matpow(R[i], p, p), self.act(g.pmap[i])):
                raise ModuleError(f"{self.name}: rho({g.labels[i]})^p != rho({g.labels[i]}^[p])")

    def __repr__(self):
        return f"RestrictedModule({self.name!r}, dim={self.dim}, over {self.algebra.name})"


@dataclass(frozen=True, eq=False)
class RestrictedTuple:
    """Commuting operators with vanishing p-th powers: the restriction of a
    module to an elementary subalgebra with a chosen basis."""

    ops: np.ndarray
    p: int

    def __post_init__(self):
        ops = np.asarray(self.ops, dtype=np.int64) % self.p
        ops.setflags(write=False)
        object.__setattr__(self, "ops", ops)

    @property
    def r(self) -> int:
        return self.ops.shape[0]

    @property
    def dim(self) -> int:
        return self.ops.shape[1]

    def is_valid(self) -> bool:
        p, T = self.p, self.ops
        for s in range(self.r):
            if matpow(T[s], p, p).any():
                return False
            for t in range(s + 1, self.r):
                if ((T[s] @ T[t] - T[t] @ T[s]) % p).any():
                    return False
        return True

    def dual(self) -> "RestrictedTuple":
        return RestrictedTuple((-self.ops.transpose(0, 2, 1)) % self.p, self.p)

    def recombine(self, g) -> "RestrictedTuple":
        """Operators of the basis u'_t = sum_s g[s, t] u_s."""
        g = np.asarray(g, dtype=np.int64)
        return RestrictedTuple(np.einsum("st,sab->tab", g, self.ops) % self.p, self.p)


def _same_algebra(M: RestrictedModule, N: RestrictedModule):
    if M.algebra is not N.algebra:
        raise ModuleError("modules over different algebras")


def restrict(M: RestrictedModule, eps) -> RestrictedTuple:
    """The operators rho(u_1), ..., rho(u_r) for the canonical basis of ``eps``."""
    if eps.algebra is not M.algebra:
        raise ModuleError("elementary subalgebra lives in a different algebra")
    B = eps.basis
    return RestrictedTuple(np.einsum("is,iab->sab", B, M.ops) % M.p, M.p)


# -- constructors --------------------------------------------------------------


def trivial(g: RestrictedLieAlgebra) -> RestrictedModule:
    return RestrictedModule(g, np.zeros((g.dim, 1, 1), dtype=np.int64), "k")


def defining(g: RestrictedLieAlgebra) -> RestrictedModule:
    if g.realization is None:
        raise ModuleError(f"{g.name} has no defining representation")
    return RestrictedModule(g, g.realization, "V")


def adjoint(g: RestrictedLieAlgebra) -> RestrictedModule:
    ops = np.array([g.ad(g.basis_vector(i)) for i in range(g.dim)]).reshape(g.dim, g.dim, g.dim)
    return RestrictedModule(g, ops, "ad")


def dual(M: RestrictedModule) -> RestrictedModule:
    ops = (-M.ops.transpose(0, 2, 1)) % M.p
    return RestrictedModule(M.algebra, ops, f"{M.name}#", check=M.check)


def tensor(M: RestrictedModule, N: RestrictedModule) -> RestrictedModule:
    _same_algebra(M, N)
    a, b = np.eye(M.dim, dtype=np.int64), np.eye(N.dim, dtype=np.int64)
    ops = np.array([np.kron(M.ops[i], b) + np.kron(a, N.ops[i]) for i in range(M.algebra.dim)])
    return RestrictedModule(M.algebra, ops, f"({M.name}(x){N.name})", check=M.check and N.check)


def direct_sum_mod(M: RestrictedModule, N: RestrictedModule) -> RestrictedModule:
    _same_algebra(M, N)
    d = M.dim + N.dim
    ops = np.zeros((M.algebra.dim, d, d), dtype=np.int64)
    ops[:, : M.dim, : M.dim] = M.ops
    ops[:, M.dim:, M.dim:] = N.ops
    return RestrictedModule(M.algebra, ops, f"({M.name}+{N.name})", check=M.check and N.check)


FREE_DIM_BUDGET = 5000


def free_operators(r: int, a: int, p: int) -> np.ndarray:
    """Multiplication by t_1..t_r on (k[t_1..t_r]/(t_s^p))^{+a}; monomial basis."""
    if r < 1 or a < 1:
        raise ModuleError("free module needs r >= 1 and a >= 1")
    d1 = p**r
    if a * d1 > FREE_DIM_BUDGET:
        raise ModuleError(f"free module of dimension {a * d1} exceeds {FREE_DIM_BUDGET}")
    monomials = list(product(range(p), repeat=r))
    index = {m: k for k, m in enumerate(monomials)}
    T = np.zeros((r, d1, d1), dtype=np.int64)
    for m, k in index.items():
        for s in range(r):
            if m[s] + 1 < p:
                target = m[:s] + (m[s] + 1,) + m[s + 1:]
                T[s, index[target], k] = 1
    return np.array([np.kron(np.eye(a, dtype=np.int64), T[s]) for s in range(r)])


def free_module(r: int, a: int, p: int) -> RestrictedTuple:
    return RestrictedTuple(free_operators(r, a, p), p)


def free_module_over(g: RestrictedLieAlgebra, a: int = 1) -> RestrictedModule:
    """The regular u(g_a^{+r})-module repeated a times, for g = abelian(r)."""
    if g.structure.any() or g.pmap.any():
        raise ModuleError("free modules are only built over g_a^{+r}")
    return RestrictedModule(g, free_operators(g.dim, a, g.p), f"free{g.dim},{a}")


def pullback(M: RestrictedModule, g: RestrictedLieAlgebra, images) -> RestrictedModule:
    """Module over ``g`` with x_i acting as rho(images[i]) for a restricted map g -> M.algebra."""
    images = np.asarray(images, dtype=np.int64)
    ops = np.array([M.act(images[i]) for i in range(g.dim)]).reshape(g.dim, M.dim, M.dim)
    return RestrictedModule(g, ops, f"{M.name}*")


def load_module_json(path, g: RestrictedLieAlgebra) -> RestrictedModule:
    """Custom module: ``{"name": ..., "operators": [[[int]]...]}`` with one matrix per basis vector."""
    with open(path) as fh:
        data = json.load(fh)
    ops = data["operators"] if isinstance(data, dict) else data
    name = data.get("name", "custom") if isinstance(data, dict) else "custom"
    try:
        arr = np.array(ops, dtype=np.int64)
    except (ValueError, TypeError) as exc:
        raise ModuleError(f"{path}: operators must be integer matrices") from exc
    return RestrictedModule(g, arr, name)


def dump_module_json(M: RestrictedModule) -> str:
    return json.dumps({"name": M.name, "operators": M.ops.tolist()})

