"""Name-addressable algebras and modules for the command line.

Algebras: ``gl:3``, ``sl:4``, ``sp:4``, ``u:5``, ``unr:2,3``, ``parab:4:J=1,3``,
``parab-nilrad:5:J=2,3``, ``heis:3``, ``ab:2``, ``cext:1`` (phi = 0) or
``cext:1:phi=trace``; ``X^k`` is the k-fold direct sum and ``X+Y`` a direct sum.

Modules: ``triv``, ``defining``, ``adjoint``, ``free:a`` and ``cyclic:i`` (over ``ab:r``),
``json:<path>`` and the combinators ``dual(M)``, ``tensor(M,N)``, ``sum(M,N)``.
"""

from __future__ import annotations

import re
from dataclasses import replace

import numpy as np

from . import liealg as L
from . import repmod as R


class CatalogError(ValueError):
    pass


ALGEBRA_CATALOG = {
    "gl:n": "general linear gl_n",
    "sl:n": "special linear sl_n (off-diagonal E_ij, then H_i)",
    "sp:2n": "symplectic sp_2n for S = [[0, I], [-I, 0]]",
    "u:n": "strictly upper triangular u_n",
    "unr:r,s": "u_{r,s}: rows 1..r, columns r+1..r+s of gl_{r+s}",
    "parab:n:J=a,b": "parabolic p_J of gl_n (J = simple roots in the Levi)",
    "parab-nilrad:n:J=a,b": "nilradical u_J of p_J",
    "heis:n": "Heisenberg algebra of dimension 2n-1",
    "ab:n": "g_a^{+n}",
    "cext:n[:phi=trace]": "central extension of gl_2n with p-map twisted by phi",
    "X^k": "k-fold direct sum of X",
    "X+Y": "direct sum",
}

MODULE_CATALOG = {
    "triv": "trivial module k",
    "defining": "the matrix realization",
    "adjoint": "adjoint representation",
    "free:a | free:r,a": "a copies of the regular u(g_a^{+r})-module (algebra ab:r)",
    "cyclic:i": "k[t]/(t^p) with the i-th basis vector acting as t, the rest as 0 (algebra ab:r)",
    "json:<path>": 'file {"name": ..., "operators": [matrix per basis vector]}',
    "dual:M | dual(M)": "dual module",
    "tensor:M,N": "tensor product",
    "tensor(M,N)": "tensor product",
    "sum(M,N)": "direct sum",
}


def describe_catalog() -> str:
    lines = ["algebras:"]
    lines += [f"  {k:<24} {v}" for k, v in ALGEBRA_CATALOG.items()]
    lines.append("modules:")
    lines += [f"  {k:<24} {v}" for k, v in MODULE_CATALOG.items()]
    return "\n".join(lines)


def _ints(text: str, spec: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise CatalogError(f"bad integer list in {spec!r}\n{describe_catalog()}") from None


def _one(text: str, spec: str) -> int:
    vals = _ints(text, spec)
    if len(vals) != 1:
        raise CatalogError(f"expected one integer in {spec!r}\n{describe_catalog()}")
    return vals[0]


def _J(parts, spec):
    if len(parts) != 3 or not parts[2].startswith("J="):
        raise CatalogError(f"{spec!r}: expected <name>:n:J=a,b\n{describe_catalog()}")
    return _one(parts[1], spec), _ints(parts[2][2:], spec)


def _atom(spec: str, p: int) -> L.RestrictedLieAlgebra:
    parts = spec.split(":")
    head = parts[0]
    if head == "gl" and len(parts) == 2:
        return L.gl(_one(parts[1], spec), p)
    if head == "sl" and len(parts) == 2:
        return L.sl(_one(parts[1], spec), p)
    if head == "sp" and len(parts) == 2:
        return L.sp(_one(parts[1], spec), p)
    if head == "u" and len(parts) == 2:
        return L.nilradical_upper(_one(parts[1], spec), p)
    if head == "unr" and len(parts) == 2:
        rs = _ints(parts[1], spec)
        if len(rs) != 2:
            raise CatalogError(f"{spec!r}: expected unr:r,s")
        return L.unr(rs[0], rs[1], p)
    if head == "parab":
        return L.parabolic(*_J(parts, spec), p)
    if head == "parab-nilrad":
        n, J = _J(parts, spec)
        return L.parabolic_nilradical(n, J, p)
    if head == "heis" and len(parts) == 2:
        return L.heisenberg(_one(parts[1], spec), p)
    if head == "ab" and len(parts) == 2:
        return L.abelian(_one(parts[1], spec), p)
    if head == "cext" and len(parts) in (2, 3):
        n = _one(parts[1], spec)
        phi = None
        if len(parts) == 3:
            if parts[2] != "phi=trace":
                raise CatalogError(f"{spec!r}: only phi=trace is catalogued")
            phi = np.eye(2 * n, dtype=np.int64).ravel()
        return L.central_extension_gl2n(n, p, phi)
    raise CatalogError(f"unknown algebra {spec!r}\n{describe_catalog()}")


def parse_algebra(spec: str, p: int) -> L.RestrictedLieAlgebra:
    spec = spec.strip()
    if not spec:
        raise CatalogError(f"empty algebra spec\n{describe_catalog()}")
    summands = []
    for term in spec.split("+"):
        term = term.strip()
        m = re.fullmatch(r"(.+)\^(\d+)", term)
        base, k = (m.group(1), int(m.group(2))) if m else (term, 1)
        if k < 1:
            raise CatalogError(f"{term!r}: exponent must be >= 1")
        summands += [_atom(base, p)] * k
    if len(summands) == 1:
        return summands[0]
    g = L.direct_sum(summands)
    return replace(g, name=spec)


def _split_args(body: str, spec: str) -> list[str]:
    out, depth, cur = [], 0, ""
    for ch in body:
        if ch == "," and depth == 0:
            out.append(cur)
            cur = ""
            continue
        depth += (ch == "(") - (ch == ")")
        if depth < 0:
            raise CatalogError(f"unbalanced parentheses in {spec!r}")
        cur += ch
    if depth:
        raise CatalogError(f"unbalanced parentheses in {spec!r}")
    out.append(cur)
    return [a.strip() for a in out]


def cyclic_module(g: L.RestrictedLieAlgebra, i: int) -> R.RestrictedModule:
    """k[t]/(t^p) pulled back along g_a^{+r} -> g_a sending x_i to t (1-based)."""
    if not 1 <= i <= g.dim:
        raise CatalogError(f"cyclic:{i} needs 1 <= i <= {g.dim}")
    images = np.zeros((g.dim, 1), dtype=np.int64)
    images[i - 1, 0] = 1
    M = R.pullback(R.free_module_over(L.abelian(1, g.p)), g, images)
    return replace(M, name=f"cyclic{i}")


def _two_modules(body: str, spec: str, g):
    """Split ``M,N`` at the first top-level comma where both halves parse."""
    pieces = _split_args(body, spec)
    for k in range(1, len(pieces)):
        try:
            return parse_module(",".join(pieces[:k]), g), parse_module(",".join(pieces[k:]), g)
        except CatalogError:
            continue
    raise CatalogError(f"{spec!r}: expected two module specs")


def parse_module(spec: str, g: L.RestrictedLieAlgebra) -> R.RestrictedModule:
    spec = spec.strip()
    if spec in ("triv", "k", "trivial"):
        return R.trivial(g)
    if spec == "defining":
        return R.defining(g)
    if spec == "adjoint":
        return R.adjoint(g)
    if spec.startswith("free:"):
        vals = _ints(spec[5:], spec)
        if len(vals) == 2 and vals[0] != g.dim:
            raise CatalogError(f"{spec!r}: free:r,a needs r = dim of {g.name} = {g.dim}")
        if len(vals) not in (1, 2):
            raise CatalogError(f"{spec!r}: expected free:a or free:r,a")
        return R.free_module_over(g, vals[-1])
    if spec.startswith("cyclic:"):
        return cyclic_module(g, _one(spec[7:], spec))
    if spec.startswith("json:"):
        return R.load_module_json(spec[5:], g)
    if spec.startswith("dual:"):
        return R.dual(parse_module(spec[5:], g))
    if spec.startswith("tensor:"):
        return R.tensor(*_two_modules(spec[7:], spec, g))
    m = re.fullmatch(r"(dual|tensor|sum)\((.*)\)", spec)
    if m:
        args = [parse_module(a, g) for a in _split_args(m.group(2), spec)]
        if m.group(1) == "dual" and len(args) == 1:
            return R.dual(args[0])
        if m.group(1) in ("tensor", "sum") and len(args) == 2:
            op = R.tensor if m.group(1) == "tensor" else R.direct_sum_mod
            return op(*args)
        raise CatalogError(f"wrong number of arguments in {spec!r}")
    raise CatalogError(f"unknown module {spec!r}\n{describe_catalog()}")
