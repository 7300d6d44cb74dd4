"""Command-line entry point: ``fqhb <subcommand> ...``.

Exit status is 0 on success, 1 when a verification fails and 2 on usage
errors.  Structured output is JSON (CSV for census records); ``--pretty``
switches to a human layout.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import __version__, bounds
from .families import (
    FAMILY_NAMES,
    AntisymMatrix,
    FamilyError,
    classify_maximizer,
    concurrent_hyperplanes,
    cone,
    conic,
    default_alpha,
    elliptic_surface,
    hermitian,
    hyperbolic_quadric,
    space_filling,
    standard_antisym,
)
from .forms import FormError, count_points, format_form, parse_form
from .gf import FieldError, get_field, parse_field_spec, prime_power
from .locus import BoundViolation, invariant_report, smoothness


class UsageError(Exception):
    """Bad flag value; reported with exit status 2."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(2)


def _field_from(args, flag: str = "--field"):
    text = getattr(args, flag.lstrip("-").replace("-", "_"))
    try:
        return parse_field_spec(str(text), args.modulus)
    except (FieldError, ValueError) as exc:
        raise UsageError(f"{flag}: {exc}") from exc


def _form_from(text: str, field, nvars: int, flag: str):
    try:
        return parse_form(text, field, nvars)
    except (FormError, FieldError) as exc:
        raise UsageError(f"{flag}: {exc}") from exc


def _meta(field) -> dict:
    return {"field": field.describe(), "version": __version__}


def _emit(obj: dict, pretty: bool, out=None) -> None:
    out = out or sys.stdout
    if pretty:
        for key, value in obj.items():
            if isinstance(value, dict):
                value = ", ".join(f"{k}={v}" for k, v in value.items())
            elif isinstance(value, list):
                value = "; ".join(str(v) for v in value) or "-"
            print(f"{key:>14}: {value}", file=out)
    else:
        print(json.dumps(obj), file=out)


def _report_dict(F, field) -> dict:
    rep = invariant_report(F)
    out = rep.to_dict()
    out["label"] = classify_maximizer(F, rep).value
    out["smoothness"] = smoothness(F)
    if rep.k < 0:
        out["note"] = "k = -1 encodes a hypersurface without rational points"
    out.update(_meta(field))
    return out


# -- subcommands -----------------------------------------------------------

def cmd_count(args) -> int:
    field = _field_from(args)
    F = _form_from(args.form, field, args.vars, "--form")
    if F.is_zero():
        raise UsageError("--form: the zero polynomial does not define a hypersurface")
    N = count_points(F)
    if args.json or args.pretty:
        _emit({"N": N, "form": format_form(F), **_meta(field)}, args.pretty)
    else:
        print(N)
    return 0


def cmd_invariant(args) -> int:
    field = _field_from(args)
    F = _form_from(args.form, field, args.vars, "--form")
    if F.is_zero():
        raise UsageError("--form: the zero polynomial does not define a hypersurface")
    out = _report_dict(F, field)
    out["form"] = format_form(F)
    _emit(out, args.pretty)
    return 0


_BOUNDS = ("theta", "serre", "singular", "homma", "quadric")


def cmd_bound(args) -> int:
    try:
        if args.which == "theta":
            if args.k is None:
                raise UsageError("--k is required for --which theta")
            value = bounds.theta(args.n, args.k, args.d, args.q)
        elif args.which == "serre":
            value = bounds.serre_bound(args.d, args.n, args.q)
        elif args.which == "singular":
            value = bounds.singular_k0_bound(args.d, args.n, args.q)
        elif args.which == "homma":
            value = bounds.homma_k0_bound(args.d, args.n, args.q)
        else:
            if args.h is None or args.kind is None:
                raise UsageError("--which quadric needs --h and --kind")
            prime_power(args.q)
            value = bounds.quadric_cone_count(args.n, args.h, args.kind, args.q)
    except (bounds.BoundError, FieldError) as exc:
        raise UsageError(str(exc)) from exc
    if args.json or args.pretty:
        params = {"n": args.n, "k": args.k, "d": args.d, "q": args.q}
        _emit({"which": args.which, "value": value, "params": params, "version": __version__}, args.pretty)
    else:
        print(value)
    return 0


def _construct(args, field):
    fam = args.family
    dim = args.dim
    try:
        if fam == "hyperplanes":
            if args.d is None:
                raise UsageError("--d is required for hyperplanes")
            return concurrent_hyperplanes(args.d, 2 if dim is None else dim, field)
        if fam == "space-filling":
            if args.matrix:
                entries = [field.parse(t) for t in args.matrix.split(",")]
                size = next((m for m in range(2, 64) if m * (m - 1) // 2 == len(entries)), None)
                if size is None:
                    raise UsageError("--matrix: entry count is not m(m-1)/2 for any m")
                A = AntisymMatrix.from_upper(field, size, entries)
            else:
                A = standard_antisym(field, (2 if dim is None else dim) + 2)
            return space_filling(A)
        if fam == "hermitian":
            return hermitian(2 if dim is None else dim, field)
        if fam == "hermitian-cone":
            return cone(0 if args.vertex is None else args.vertex, hermitian(2 if dim is None else dim, field))
        if fam in ("hyperbolic", "hyperbolic-cone"):
            base_dim = 2 if dim is None else dim
            if base_dim % 2:
                raise UsageError("--dim: the split quadric needs an even dimension")
            Q = hyperbolic_quadric(base_dim // 2, field)
            if fam == "hyperbolic":
                return Q
            return cone(0 if args.vertex is None else args.vertex, Q)
        if fam == "elliptic":
            alpha = default_alpha(field) if args.alpha is None else field.parse(args.alpha)
            return elliptic_surface(alpha, field)
        if fam == "conic":
            return conic(field)
    except (FamilyError, FieldError, FormError) as exc:
        raise UsageError(str(exc)) from exc
    raise UsageError(f"unknown family {fam!r}")


def cmd_construct(args) -> int:
    field = _field_from(args, "--q")
    F = _construct(args, field)
    out = _report_dict(F, field)
    out.update(family=args.family, form=format_form(F), vars=F.nvars)
    if args.pretty:
        print(format_form(F))
    _emit(out, args.pretty)
    return 0


def cmd_census(args) -> int:
    from .census.census import CensusError, census

    field = _field_from(args, "--q")
    if args.mode == "random" and args.count is None:
        raise UsageError("--count is required in random mode")
    try:
        records, summary = census(field, args.d, args.n, mode=args.mode, count=args.count, seed=args.seed,
                                  shards=args.shards, verify=args.verify)
    except CensusError as exc:
        raise UsageError(str(exc)) from exc
    if args.out:
        records.write_csv(args.out)
        _emit(summary, args.pretty)
    else:
        sys.stdout.write(records.to_csv())
        _emit(summary, args.pretty, sys.stderr)
    return 0 if summary["ok"] else 1


def cmd_verify(args) -> int:
    from .census.verify import load_grid, verify_theorems

    try:
        grid = load_grid(args.grid)
    except (OSError, ValueError) as exc:
        raise UsageError(f"--grid: {exc}") from exc
    report = verify_theorems(grid, shards=args.shards)
    out = report.to_dict()
    out["version"] = __version__
    out["fields"] = {str(s["q"]): s["field"] for s in report.summaries}
    if args.pretty:
        for c in report.clauses:
            mark = "PASS" if c.passed else "FAIL"
            extra = f" counterexample={c.counterexample}" if c.counterexample else ""
            print(f"{mark} {c.name} q={c.params[0]} d={c.params[1]} n={c.params[2]}: {c.detail}{extra}")
    else:
        print(json.dumps(out))
    return 0 if report.passed else 1


def cmd_equiv(args) -> int:
    from .census.equiv import equiv

    field = _field_from(args)
    F = _form_from(args.a, field, args.vars, "--a")
    G = _form_from(args.b, field, args.vars, "--b")
    if F.is_zero() or G.is_zero():
        raise UsageError("forms must be nonzero")
    if F.degree != G.degree:
        raise UsageError("--a and --b have different degrees")
    res = equiv(F, G, budget=args.budget)
    _emit({"a": format_form(F), "b": format_form(G), **res.to_dict(field), **_meta(field)}, args.pretty)
    return 0


def cmd_fields(args) -> int:
    if args.field is not None:
        fields = [_field_from(args)]
    else:
        fields = []
        for q in range(2, args.max + 1):
            try:
                p, r = prime_power(q)
            except FieldError:
                continue
            fields.append(get_field(p, r))
    rows = []
    for f in fields:
        d = f.describe()
        if f.sqrt_q is not None:
            d["sqrt_q"] = f.sqrt_q
        rows.append(d)
    if args.pretty:
        for d in rows:
            print(f"F_{d['q']}: p={d['p']} r={d['r']} modulus={d['modulus']} generator={d['generator']}")
    else:
        print(json.dumps({"fields": rows, "version": __version__}))
    return 0


# -- parser ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fqhb", description="Rational points and linear subspaces of hypersurfaces over F_q.")
    parser.add_argument("--version", action="version", version=f"fqhb {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, field_flag="--field"):
        p.add_argument(field_flag, required=True, help="field as p^r or a prime power q")
        p.add_argument("--modulus", help="monic modulus c0,c1,...,1 (constant term first)")
        p.add_argument("--pretty", action="store_true", help="human-readable output")

    p = sub.add_parser("count", help="number of rational points")
    common(p)
    p.add_argument("--vars", type=int, required=True, help="number of variables (n+2)")
    p.add_argument("--form", required=True, help='e.g. "X0^3+X1^3+X2^3+X3^3"')
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("invariant", help="full invariant report")
    common(p)
    p.add_argument("--vars", type=int, required=True)
    p.add_argument("--form", required=True)
    p.set_defaults(func=cmd_invariant)

    p = sub.add_parser("bound", help="closed-form bounds")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--which", choices=_BOUNDS, default="theta")
    p.add_argument("--h", type=int, help="vertex dimension for --which quadric")
    p.add_argument("--kind", choices=bounds.QUADRIC_KINDS)
    p.add_argument("--json", action="store_true")
    p.add_argument("--pretty", action="store_true")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("construct", help="build a member of an extremal family")
    p.add_argument("family", choices=FAMILY_NAMES)
    common(p, "--q")
    p.add_argument("--dim", type=int, help="hypersurface (or base) dimension")
    p.add_argument("--vertex", type=int, help="vertex dimension of a cone")
    p.add_argument("--alpha", help="alpha for the elliptic surface")
    p.add_argument("--matrix", help="a01,a02,...: upper triangle of the antisymmetric matrix")
    p.add_argument("--d", type=int, help="degree (hyperplanes)")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("census", help="survey all forms of one shape")
    common(p, "--q")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--mode", choices=("exhaustive", "random"), default="exhaustive")
    p.add_argument("--count", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--shards", type=int, default=1)
    p.add_argument("--out", help="CSV file (summary JSON then goes to stdout)")
    p.add_argument("--verify", action="store_true", help="classify, run lemma checks and coverage")
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("verify", help="check the bounds and equality cases over a grid")
    p.add_argument("--grid", default="default", help='"default" or a JSON file [[q,d,n],...]')
    p.add_argument("--shards", type=int, default=1)
    p.add_argument("--pretty", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("equiv", help="exact projective equivalence for small groups")
    common(p)
    p.add_argument("--vars", type=int, required=True)
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--budget", type=int, default=10 ** 6)
    p.set_defaults(func=cmd_equiv)

    p = sub.add_parser("fields", help="describe fields and their default moduli")
    p.add_argument("--field")
    p.add_argument("--modulus")
    p.add_argument("--max", type=int, default=64, help="largest q listed when --field is absent")
    p.add_argument("--pretty", action="store_true")
    p.set_defaults(func=cmd_fields)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for name in ("shards", "budget", "count", "vars"):
        value = getattr(args, name, None)
        if value is not None and value < 1:
            print(f"fqhb {args.command}: error: --{name} must be positive", file=sys.stderr)
            return 2
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"fqhb {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except BoundViolation as exc:
        print(f"fqhb {args.command}: bound violation: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
