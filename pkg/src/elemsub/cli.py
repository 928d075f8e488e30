"""Command line: ``enumerate``, ``survey``, ``verify`` and ``catalog``.

Exit codes: 0 success, 1 verification failure, 2 budget refusal, 3 invalid input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys

import numpy as np

from . import evariety as E
from . import rankfn as F
from .catalog import CatalogError, describe_catalog, parse_algebra, parse_module
from .exactlinalg import FieldError, check_prime
from .grassmann import DEFAULT_BUDGET, BudgetExceeded
from .liealg import AlgebraError, SizeGuardError
from .repmod import ModuleError
from .verify import RECIPES

SCHEMA_VERSION = 1

EXIT_OK, EXIT_FAIL, EXIT_BUDGET, EXIT_INPUT = 0, 1, 2, 3

log = logging.getLogger("elemsub")


class InputError(ValueError):
    pass


# -- serialization ----------------------------------------------------------------------


def point_record(pt: E.ElementaryPoint, maximal) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "sigma": list(pt.sigma),
        "basis_matrix": pt.basis.tolist(),
        "flags": {"maximal": maximal, "certificate": pt.certificate},
    }


def _maximal_or_none(g, pt):
    try:
        return E.is_maximal_elementary(g, pt)
    except SizeGuardError:
        return None


def profile_row(pr: F.RankProfile, J: int) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "sigma": " ".join(map(str, pr.point.sigma)),
        "basis": json.dumps(pr.point.basis.tolist(), separators=(",", ":")),
        **{f"rad_{j}": pr.rad[j] for j in range(1, J + 1)},
        **{f"soc_{j}": pr.soc[j] for j in range(1, J + 1)},
        "free": pr.free,
        "free_rank": pr.free_rank,
        "in_support": pr.in_support,
        "maximal": "" if pr.maximal is None else pr.maximal,
    }


def survey_summary(survey: F.RankSurvey, J: int) -> dict:
    rep = F.constant_rank_report(survey)
    out = {"schema_version": SCHEMA_VERSION, "algebra": survey.module.algebra.name,
           "module": survey.module.name, "r": survey.r, "p": survey.module.p,
           "points": rep["points"]}
    for key in ("max", "min", "constant_rad", "constant_soc", "below_max_counts", "above_min_counts"):
        out[key] = rep[key][:J]
    return out


def _dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True)


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- helpers ----------------------------------------------------------------------------


def _prime(p: int) -> int:
    try:
        check_prime(p)
    except FieldError as exc:
        raise InputError(str(exc)) from None
    return p


def _within(g, spec: str):
    if spec in (None, "all"):
        return None
    if spec == "nilradical":
        if g.nilradical is None:
            raise InputError(f"{g.name} has no designated nilradical")
        return g.nilradical
    if spec.startswith("subalgebra:"):
        labels = [s.strip() for s in spec[len("subalgebra:"):].split(";") if s.strip()]
        missing = [lab for lab in labels if lab not in g.labels]
        if missing or not labels:
            raise InputError(f"unknown basis labels {missing}; available: {' '.join(g.labels)}")
        return np.eye(g.dim, dtype=np.int64)[:, [g.labels.index(lab) for lab in labels]]
    raise InputError("--within must be all, nilradical or subalgebra:<label;label;...>")


def _positive(name, value):
    if value is not None and value < 1:
        raise InputError(f"--{name} must be positive")


# -- commands ---------------------------------------------------------------------------


def cmd_enumerate(args) -> int:
    p = _prime(args.p)
    g = parse_algebra(args.algebra, p)
    W = _within(g, args.within)
    pts = list(E.enumerate_E(g, args.r, within=W, budget=args.budget, workers=args.workers))
    fmt = args.format or "jsonl"
    if fmt == "jsonl":
        text = "".join(_dump_json(point_record(pt, _maximal_or_none(g, pt))) + "\n" for pt in pts)
    elif fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["schema_version", "sigma", "basis", "certificate", "maximal"])
        for pt in pts:
            m = _maximal_or_none(g, pt)
            w.writerow([SCHEMA_VERSION, " ".join(map(str, pt.sigma)),
                        json.dumps(pt.basis.tolist(), separators=(",", ":")), pt.certificate,
                        "" if m is None else m])
        text = buf.getvalue()
    else:
        certs = {}
        for pt in pts:
            certs[pt.certificate] = certs.get(pt.certificate, 0) + 1
        text = _dump_json({"schema_version": SCHEMA_VERSION, "algebra": g.name, "r": args.r, "p": p,
                           "within": args.within or "all", "count": len(pts),
                           "certificates": certs}) + "\n"
    _emit(text, args.out)
    print(f"count: {len(pts)}", file=sys.stderr)
    return EXIT_OK


def cmd_survey(args) -> int:
    p = _prime(args.p)
    g = parse_algebra(args.algebra, p)
    if not args.module:
        raise InputError("survey needs --module")
    M = parse_module(args.module, g)
    W = _within(g, args.within)
    pts = list(E.enumerate_E(g, args.r, within=W, budget=args.budget, workers=args.workers))
    if not pts:
        raise InputError(f"E({args.r}, {g.name})(F_{p}) is empty")
    survey = F.rank_survey(M, args.r, points=pts, with_maximal=args.maximal)
    top = (p - 1) * args.r
    J = top if args.j is None else args.j
    if not 1 <= J <= top:
        raise InputError(f"--j must lie in 1..{top}")
    fmt = args.format or "csv"
    if fmt == "csv":
        buf = io.StringIO()
        rows = [profile_row(pr, J) for pr in survey.profiles]
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        text = buf.getvalue()
    elif fmt == "jsonl":
        text = "".join(_dump_json({**profile_row(pr, J), "basis": pr.point.basis.tolist(),
                                   "sigma": list(pr.point.sigma),
                                   "maximal": pr.maximal}) + "\n" for pr in survey.profiles)
    else:
        text = _dump_json(survey_summary(survey, J)) + "\n"
    _emit(text, args.out)
    print(f"points: {len(pts)}", file=sys.stderr)
    return EXIT_OK


_RECIPE_ARGS = {
    "sl-even": ("m",), "sl-odd": ("m",), "sp": ("n",), "heisenberg": ("n",),
    "product": ("r",), "open-orbit": ("n",), "maximality": ("n", "r"),
    "radsoc": ("module",), "powerdecomp": ("n",), "properties": ("seed",),
}


def cmd_verify(args) -> int:
    if args.recipe not in RECIPES:
        raise InputError(f"unknown recipe {args.recipe!r}; choose from {', '.join(RECIPES)}")
    kwargs = {}
    if args.p is not None:
        kwargs["p"] = _prime(args.p)
    for name in _RECIPE_ARGS[args.recipe]:
        value = getattr(args, name)
        if value is not None:
            kwargs["nvars" if args.recipe == "powerdecomp" and name == "n" else name] = value
    if args.recipe not in ("radsoc", "powerdecomp", "properties"):
        kwargs["budget"] = args.budget
        kwargs["workers"] = args.workers
    elif args.recipe == "radsoc":
        kwargs["budget"] = args.budget
    try:
        rep = RECIPES[args.recipe](**kwargs)
    except TypeError as exc:
        raise InputError(str(exc)) from None
    if args.format == "json-summary":
        _emit(_dump_json(rep.to_dict()) + "\n", args.out)
    else:
        _emit(rep.render() + "\n", args.out)
    print(f"{rep.status} in {rep.seconds:.2f} s", file=sys.stderr)
    return EXIT_OK if rep.verdict else EXIT_FAIL


def cmd_catalog(args) -> int:
    text = describe_catalog() + "\nrecipes:\n" + "".join(f"  {k}\n" for k in RECIPES)
    _emit(text, args.out)
    return EXIT_OK


# -- parser -------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="elemsub", description="Elementary subalgebras of restricted Lie algebras over F_p.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, need_algebra=True):
        if need_algebra:
            sp.add_argument("--algebra", required=True)
            sp.add_argument("--r", type=int, required=True)
            sp.add_argument("--within", default="all")
        sp.add_argument("--p", type=int, default=None if not need_algebra else 3)
        sp.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
        sp.add_argument("--workers", type=int, default=1)
        sp.add_argument("--out")
        sp.add_argument("--seed", type=int, default=None)

    e = sub.add_parser("enumerate", help="list the points of E(r, g)(F_p)")
    common(e)
    e.add_argument("--format", choices=["jsonl", "csv", "json-summary"])
    e.set_defaults(func=cmd_enumerate)

    s = sub.add_parser("survey", help="radical/socle ranks of a module over E(r, g)(F_p)")
    common(s)
    s.add_argument("--module")
    s.add_argument("--j", type=int)
    s.add_argument("--maximal", action="store_true", help="also flag maximal points")
    s.add_argument("--format", choices=["csv", "jsonl", "json-summary"])
    s.set_defaults(func=cmd_survey)

    v = sub.add_parser("verify", help="run a named verification recipe")
    v.add_argument("recipe")
    common(v, need_algebra=False)
    for name in ("m", "n", "r"):
        v.add_argument(f"--{name}", type=int)
    v.add_argument("--module")
    v.add_argument("--format", choices=["text", "json-summary"], default="text")
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("catalog", help="list algebras, modules and recipes")
    c.add_argument("--out")
    c.set_defaults(func=cmd_catalog)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        for name in ("budget", "workers", "r", "m", "n", "j"):
            _positive(name, getattr(args, name, None))
        return args.func(args)
    except (BudgetExceeded, SizeGuardError) as exc:
        print(f"budget refusal: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (InputError, CatalogError, AlgebraError, ModuleError, FieldError, ValueError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
