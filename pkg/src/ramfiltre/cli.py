"""Command-line interface.

Exit codes: 0 ok, 1 verification failure, 2 invalid input, 3 internal
inconsistency, 4 closed form and recursion disagree.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction
from typing import Any, Sequence

from . import constants
from .core import (
    DomainError,
    FieldLabel,
    RadicalSpec,
    RamificationError,
    TameFactor,
    VClass,
    tame_multiplier,
)
from .engine import JumpQuery, Path, t_closed, t_nk_rec, jump
from .filtration import Filtration, build_filtration
from .herbrand import different_valuation, phi_from_filtration, upper_jumps
from .oracle import PRESETS, default_jobs, mutation_names, parse_grid, run_checks

EXIT_OK, EXIT_VERIFY, EXIT_DOMAIN, EXIT_INTERNAL, EXIT_MISMATCH = 0, 1, 2, 3, 4
GRID_ENV = "RAMFILTRE_GRID"


def _frac(x: Fraction | int) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def _label(label: FieldLabel) -> dict[str, Any]:
    return {"r": str(label.r), "s": [str(x) for x in label.s]}


def document(f: Filtration) -> dict[str, Any]:
    """The JSON-ready description of a filtration; every number is a string."""
    spec = f.spec
    assert spec is not None
    phi = phi_from_filtration(f)
    return {
        "spec": {
            "p": str(spec.p),
            "r": str(spec.r),
            "s": [str(x) for x in spec.s],
            "vclass": spec.vclass.value,
            "tame": str(spec.tame),
            "p2_asserted": spec.p2_asserted,
        },
        "D": str(tame_multiplier(spec.tame)),
        "levels": [
            {
                "jump": str(lv.jump),
                "family": lv.kind[0],
                "k": str(lv.kind[1]),
                "source": _label(lv.kind[2]),
                "fixed_field": _label(lv.fixed_field),
                "group_order": str(lv.group_order),
            }
            for lv in f.levels
        ],
        "herbrand": {
            "phi_breakpoints": [[_frac(u), _frac(v)] for u, v in phi.breakpoints],
            "phi_slopes": [_frac(s) for s in phi.slopes],
            "upper_jumps": [_frac(v) for v in upper_jumps(f)],
        },
        "different_valuation": str(different_valuation(f)),
    }


def dumps_json(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _flatten(obj: Any, prefix: str = "") -> list[tuple[str, str]]:
    if isinstance(obj, dict):
        rows = []
        for key in sorted(obj):
            rows += _flatten(obj[key], f"{prefix}/{key}" if prefix else key)
        return rows
    if isinstance(obj, list):
        rows = []
        for i, item in enumerate(obj):
            rows += _flatten(item, f"{prefix}/{i}")
        return rows
    if isinstance(obj, bool):
        return [(prefix, "true" if obj else "false")]
    return [(prefix, str(obj))]


def dumps_csv(doc: Any) -> str:
    """One ``path,value`` row per leaf of the JSON document."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["path", "value"])
    writer.writerows(_flatten(doc))
    return buf.getvalue()


def _text(f: Filtration) -> str:
    spec = f.spec
    lines = [f"Gal({spec.label}/F)  p={spec.p}  class={spec.vclass.value}  D={spec.D}"]
    lines.append(f"{'jump':>12}  {'family':>6}  {'k':>2}  {'fixed field':<22}  order")
    for lv in f.levels:
        lines.append(f"{lv.jump:>12}  {lv.kind[0]:>6}  {lv.kind[1]:>2}  {str(lv.fixed_field):<22}  {lv.group_order}")
    lines.append(f"different valuation: {different_valuation(f)}")
    return "\n".join(lines) + "\n"


def _parse_s(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise DomainError(f"cannot parse exponent list {text!r}") from exc


def _spec_from(args: argparse.Namespace) -> RadicalSpec:
    return RadicalSpec.make(
        args.p,
        args.r,
        _parse_s(args.s),
        VClass.parse(args.vclass),
        TameFactor.parse(getattr(args, "tame", None)),
        getattr(args, "assert_p2", False),
    )


def cmd_compute(args: argparse.Namespace) -> int:
    f = build_filtration(_spec_from(args), args.path)
    doc = document(f)
    if args.format == "json":
        sys.stdout.write(dumps_json(doc))
    elif args.format == "csv":
        sys.stdout.write(dumps_csv(doc))
    else:
        sys.stdout.write(_text(f))
    return EXIT_OK


def cmd_jump(args: argparse.Namespace) -> int:
    from .core import Prime

    p = Prime(args.p)
    if p.is_two and not args.assert_p2:
        raise DomainError("p=2 hypothesis not asserted")
    q = JumpQuery.make(p.value, args.r, _parse_s(args.s), args.k, VClass.parse(args.vclass))
    if args.path == "both":
        a, b = t_closed(q), t_nk_rec(q)
        print(f"closed {a}")
        print(f"rec {b}")
        return EXIT_OK if a == b else EXIT_MISMATCH
    print(jump(q, Path(args.path)))
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    if args.list_mutations:
        print("\n".join(mutation_names()))
        return EXIT_OK
    name = args.grid or os.environ.get(GRID_ENV) or "default"
    grid = parse_grid(name)
    if args.mutate is not None and args.mutate not in constants.DEFAULTS:
        raise DomainError(f"unknown mutation {args.mutate!r}")
    names = tuple(args.checks.split(",")) if args.checks else None
    report = run_checks(grid, names, jobs=args.jobs, mutation=args.mutate, fail_fast=args.mutate is not None)
    if not grid.primes:
        print("warning: empty grid, 0 checks run", file=sys.stderr)
    if args.format == "json":
        sys.stdout.write(dumps_json(report.to_dict()))
    else:
        print(report.to_text())
        print("PASS" if report.passed else "FAIL")
    return EXIT_OK if report.passed else EXIT_VERIFY


def cmd_table(args: argparse.Namespace) -> int:
    vclass = VClass.parse(args.vclass)
    n, k = args.n, args.k if args.k is not None else args.n + 1
    if not 1 <= k <= n + 1:
        raise DomainError(f"k={k} outside 1..{n + 1}")
    from .core import Prime
    from .oracle import _exponent_vectors

    p = Prime(args.p).value
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["r", *[f"s{i}" for i in range(1, n + 1)], "k", "jump"])
    for r in range(1, args.rmax + 1):
        for s in _exponent_vectors(n, args.rmax, vclass):
            value = 0 if k == 1 and r == 1 else jump(JumpQuery.make(p, r, s, k, vclass))
            writer.writerow([r, *s, k, value])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ramfiltre", description="Ramification filtrations of radical extensions.")
    sub = parser.add_subparsers(dest="command", required=True)

    def spec_args(sp: argparse.ArgumentParser) -> None:
        sp.add_argument("--p", type=int, required=True, help="the prime p")
        sp.add_argument("--r", type=int, required=True, help="cyclotomic level r")
        sp.add_argument("--s", required=True, help="comma-separated radical exponents")
        sp.add_argument("--vclass", required=True, choices=["div", "nondiv"], help="does p divide v(a_n)")
        sp.add_argument("--assert-p2", action="store_true", help="assert the extra degree hypothesis when p=2")

    c = sub.add_parser("compute", help="full ramification filtration")
    spec_args(c)
    c.add_argument("--tame", default="", help="prime-to-p radicals, e.g. 5:1,7:1:2")
    c.add_argument("--format", choices=["json", "csv", "text"], default="text")
    c.add_argument("--path", choices=[x.value for x in Path], default="auto")
    c.set_defaults(func=cmd_compute)

    j = sub.add_parser("jump", help="a single jump t_{n,k}")
    spec_args(j)
    j.add_argument("--k", type=int, required=True)
    j.add_argument("--path", choices=["auto", "closed", "rec", "both"], default="auto")
    j.set_defaults(func=cmd_jump)

    v = sub.add_parser("verify", help="run the verification grid")
    v.add_argument("--grid", default=None, help=f"preset ({', '.join(PRESETS)}) or key=value list; env {GRID_ENV}")
    v.add_argument("--jobs", type=int, default=default_jobs())
    v.add_argument("--mutate", default=None, help="perturb one named constant (negative control)")
    v.add_argument("--checks", default=None, help="comma-separated subset of checks")
    v.add_argument("--list-mutations", action="store_true")
    v.add_argument("--format", choices=["text", "json"], default="text")
    v.set_defaults(func=cmd_verify)

    t = sub.add_parser("table", help="CSV table of jumps over a lattice box")
    t.add_argument("--p", type=int, required=True)
    t.add_argument("--n", type=int, required=True)
    t.add_argument("--rmax", type=int, required=True)
    t.add_argument("--vclass", required=True, choices=["div", "nondiv"])
    t.add_argument("--k", type=int, default=None, help="defaults to n+1")
    t.set_defaults(func=cmd_table)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (RamificationError, KeyError) as exc:
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
