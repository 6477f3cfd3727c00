"""Command line entry point: ``cquiver <command> ...``.

Exit codes: 0 success, 1 a check failed, 2 usage or schema error.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Sequence

import numpy as np

from . import io
from .barcode import decompose, is_isomorphic
from .errors import CQuiverError, PaperInconsistency, SchemaError
from .fuzz import CHECKS, FuzzConfig, FuzzReport, build, fuzz_campaign
from .quiver import OrientedQuiver, validate_quiver
from .reflection import (
    DIAMOND,
    MINUS,
    MIRROR,
    PAPER_B,
    PLUS,
    SYMMETRIC,
    ReflectionContext,
    back_context,
    in_overline_rep,
    in_underline_rep,
    is_canonical,
    reflect_minus,
    reflect_morphism_minus,
    reflect_morphism_plus,
    reflect_plus,
    unit_iso_check,
    counit_iso_check,
    verify_lemma_squares,
)
from .render import render_svg
from .representation import Rep, compose, hom_space, identity_morphism, linear_combination, validate_rep

OK, FAILED, USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE)


def _conventions(p: argparse.ArgumentParser) -> None:
    p.add_argument("--s-prime-value", choices=(SYMMETRIC, PAPER_B), default=SYMMETRIC,
                   help="value at the moved breakpoint (default: symmetric two-sided kernel)")
    p.add_argument("--reflected-orientation", choices=("source", "sink"), default="source",
                   help="orientation of the window after reflecting (default: source)")
    p.add_argument("--pairing", choices=(DIAMOND, MIRROR), default=DIAMOND,
                   help="how window coordinates are paired across the moved breakpoint")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("-o", "--output", help="write here instead of standard output")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cquiver", description="Reflection functors for continuous type-A quivers.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", help="check a document and list violations")
    p.add_argument("input")
    _common(p)

    p = sub.add_parser("reflect", help="reflect a representation at a sink or source")
    p.add_argument("input")
    p.add_argument("--at", type=int, required=True, help="breakpoint index")
    p.add_argument("--direction", choices=(PLUS, MINUS), default=PLUS)
    _conventions(p)
    _common(p)

    p = sub.add_parser("decompose", help="write the barcode of a representation")
    p.add_argument("input")
    _common(p)

    p = sub.add_parser("check", help="run reflection checks on one representation")
    p.add_argument("input")
    p.add_argument("--at", type=int, required=True)
    p.add_argument("--direction", choices=(PLUS, MINUS), default=PLUS)
    for name in ("membership", "lemmas", "roundtrip", "functoriality"):
        p.add_argument(f"--{name}", action="store_true")
    p.add_argument("--seed", type=int, default=None, help="seed for sampled morphisms (default: $FUZZ_SEED or 0)")
    _conventions(p)
    _common(p)

    p = sub.add_parser("fuzz", help="randomized acceptance campaign")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=None, help="default: $FUZZ_SEED or 0")
    p.add_argument("--max-cuts", type=int, default=8)
    p.add_argument("--max-dim", type=int, default=6)
    p.add_argument("--max-bars", type=int, default=5)
    p.add_argument("--field", default="32003", help='a prime or "Q"')
    p.add_argument("--side", choices=(PLUS, MINUS), default=PLUS)
    p.add_argument("--checks", default=",".join(CHECKS), help="comma separated subset of " + ",".join(CHECKS))
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--no-minimize", action="store_true")
    p.add_argument("--timing", action="store_true", help="include per-check timings (not byte-stable)")
    _conventions(p)
    _common(p)

    p = sub.add_parser("render", help="draw a barcode (or a representation's barcode) as SVG")
    p.add_argument("input")
    p.add_argument("--title", default="")
    _common(p)
    return parser


# helpers ---------------------------------------------------------------------------------


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _write(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _rep(path: str) -> Rep:
    return io.loads(_read(path), "rep")


def _seed(value: int | None) -> int:
    if value is not None:
        return value
    return int(os.environ.get("FUZZ_SEED", "0"))


def _conv(args) -> dict:
    return {"s_prime_value": args.s_prime_value, "orientation": args.reflected_orientation, "pairing": args.pairing}


def _report(payload: dict, path: str | None) -> None:
    _write(io.dumps(payload, "report"), path)


# commands --------------------------------------------------------------------------------


def cmd_validate(args) -> int:
    doc = io.parse(_read(args.input))
    obj = io.decode(doc)
    if isinstance(obj, Rep):
        problems = validate_rep(obj)
    elif isinstance(obj, OrientedQuiver):
        problems = validate_quiver(obj)
    else:
        problems = []
    _report({"command": "validate", "kind": doc.kind, "violations": problems, "passed": not problems}, args.output)
    # quiver notes are warnings, not violations
    return FAILED if problems and doc.kind == "rep" else OK


def cmd_reflect(args) -> int:
    v = _rep(args.input)
    fn = reflect_plus if args.direction == PLUS else reflect_minus
    try:
        out = fn(v, args.at, **_conv(args))
    except PaperInconsistency as exc:
        _report({"command": "reflect", "passed": False, "check": exc.check, "cell": exc.cell, "error": str(exc)}, args.output)
        return FAILED
    _write(io.dumps(out), args.output)
    return OK


def cmd_decompose(args) -> int:
    v = _rep(args.input)
    _write(io.dumps((decompose(v), v.quiver)), args.output)
    return OK


def _check_membership(v: Rep, ctx: ReflectionContext) -> dict:
    member = in_overline_rep if ctx.direction == PLUS else in_underline_rep
    m = member(v, ctx.k, ctx)
    return {"name": "membership", "passed": m.holds, "detail": f"rank {m.rank}, required {m.required}"}


def _check_lemmas(v: Rep, ctx: ReflectionContext) -> dict:
    report = verify_lemma_squares(v, ctx.k, ctx.direction, ctx)
    return {"name": "lemmas", "passed": report.passed, "detail": report.lines()}


def _check_roundtrip(v: Rep, ctx: ReflectionContext) -> dict:
    there, back = (reflect_plus, reflect_minus) if ctx.direction == PLUS else (reflect_minus, reflect_plus)
    try:
        w = there(v, ctx.k, ctx)
        u = back(w, ctx.k, back_context(ctx))
        same = is_isomorphic(v, u)
        detail = f"{decompose(v)} -> {decompose(w)} -> {decompose(u)}"
        if same and is_canonical(ctx):
            unit = unit_iso_check if ctx.direction == PLUS else counit_iso_check
            unit(v, ctx.k, ctx=ctx)
            detail += "; canonical comparison map is an isomorphism"
    except CQuiverError as exc:
        return {"name": "roundtrip", "passed": False, "detail": f"{type(exc).__name__}: {exc}"}
    return {"name": "roundtrip", "passed": same, "detail": detail}


def _check_functoriality(v: Rep, ctx: ReflectionContext, seed: int) -> dict:
    lift = reflect_morphism_plus if ctx.direction == PLUS else reflect_morphism_minus
    rng = np.random.default_rng(seed)
    try:
        ident = identity_morphism(v)
        image = lift(ident, ctx.k, ctx)
        problems = [] if image == identity_morphism(image.source) else ["identity not preserved"]
        basis = hom_space(v, v)
        for trial in range(5 if basis else 0):
            f, g = (linear_combination(v.field, [int(c) for c in rng.integers(0, 7, len(basis))], basis) for _ in range(2))
            sf, sg, sgf = lift(f, ctx.k, ctx), lift(g, ctx.k, ctx), lift(compose(g, f), ctx.k, ctx)
            if not sf.is_valid():
                problems.append(f"trial {trial}: reflected morphism is not natural")
            if compose(sg, sf) != sgf:
                problems.append(f"trial {trial}: composition not preserved")
    except CQuiverError as exc:
        return {"name": "functoriality", "passed": False, "detail": f"{type(exc).__name__}: {exc}"}
    return {"name": "functoriality", "passed": not problems, "detail": problems or "identity and 5 composites preserved"}


def cmd_check(args) -> int:
    v = _rep(args.input)
    ctx = ReflectionContext(v.quiver, args.at, args.direction, **_conv(args))
    chosen = [n for n in ("membership", "lemmas", "roundtrip", "functoriality") if getattr(args, n)]
    chosen = chosen or ["membership", "lemmas", "roundtrip", "functoriality"]
    results = []
    for name in chosen:
        if name == "membership":
            results.append(_check_membership(v, ctx))
        elif name == "lemmas":
            results.append(_check_lemmas(v, ctx))
        elif name == "roundtrip":
            results.append(_check_roundtrip(v, ctx))
        else:
            results.append(_check_functoriality(v, ctx, _seed(args.seed)))
    passed = all(r["passed"] for r in results)
    payload = {
        "command": "check",
        "at": args.at,
        "direction": args.direction,
        "conventions": _conv(args),
        "checks": results,
        "passed": passed,
    }
    _report(payload, args.output)
    return OK if passed else FAILED


def fuzz_payload(report: FuzzReport, config: FuzzConfig, timing: bool = False) -> dict:
    failures = []
    for f in report.failures:
        small = build(f.minimized, config.field)
        failures.append({
            "trial": f.trial,
            "check": f.check,
            "diagnostic": f.diagnostic,
            "at": f.minimized.k,
            "bars": [str(b) for b in f.minimized.bars],
            "input": io.rep_out(small),
        })
    payload = {
        "command": "fuzz",
        "config": {
            "trials": config.trials,
            "seed": config.seed,
            "max_cuts": config.max_cuts,
            "max_dim": config.max_dim,
            "max_bars": config.max_bars,
            "field": "Q" if config.prime is None else {"p": config.prime},
            "side": config.side,
            "checks": list(config.checks),
            **config.conventions(),
        },
        "trials": report.trials,
        "failures": failures,
        "failed_checks": dict(sorted(report.failed_checks().items())),
        "passed": report.passed,
    }
    if timing:
        payload["timing"] = {k: round(v, 3) for k, v in sorted(report.timing.items())}
    return payload


def cmd_fuzz(args) -> int:
    prime = None if args.field.upper() == "Q" else int(args.field)
    checks = tuple(c for c in args.checks.split(",") if c)
    config = FuzzConfig(
        trials=args.trials,
        seed=_seed(args.seed),
        max_cuts=args.max_cuts,
        max_dim=args.max_dim,
        max_bars=args.max_bars,
        prime=prime,
        side=args.side,
        checks=checks,
        minimize=not args.no_minimize,
        workers=args.workers,
        **_conv(args),
    )
    report = fuzz_campaign(config)
    _report(fuzz_payload(report, config, args.timing), args.output)
    return OK if report.passed else FAILED


def cmd_render(args) -> int:
    obj = io.decode(io.parse(_read(args.input)))
    if isinstance(obj, Rep):
        bc, q = decompose(obj), obj.quiver
    elif isinstance(obj, tuple):
        bc, q = obj
    else:
        raise SchemaError("render needs a rep or barcode document", path="$.kind")
    _write(render_svg(bc, q, args.title), args.output)
    return OK


COMMANDS = {
    "validate": cmd_validate,
    "reflect": cmd_reflect,
    "decompose": cmd_decompose,
    "check": cmd_check,
    "fuzz": cmd_fuzz,
    "render": cmd_render,
}


def run_cli(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return USAGE
    except (ValueError, CQuiverError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return USAGE


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
