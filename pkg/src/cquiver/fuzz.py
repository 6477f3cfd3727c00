"""Randomized verification of the reflection functors.

Each trial samples a quiver with a sink (or source), a representation in the
matching subcategory, and runs the containment, dimension, universal-square
and round-trip checks.  Failures are shrunk to small interval sums.
"""

from __future__ import annotations

import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field as dc_field
from fractions import Fraction
from typing import Callable

import numpy as np

from .barcode import decompose
from .errors import CQuiverError
from .exact_linalg import FieldSpec, Matrix
from .quiver import ASC, DESC, OrientedQuiver
from .representation import (
    Bar,
    Budget,
    Rep,
    cell_sample,
    conjugate,
    describe_cell,
    dim_at,
    random_barcode,
    sum_of_intervals,
)
from .reflection import (
    DIAMOND,
    PLUS,
    SYMMETRIC,
    ReflectionContext,
    back_context,
    in_overline_rep,
    in_underline_rep,
    is_canonical,
    reflect_barcode,
    reflect_dims_plus,
    reflect_dims_minus,
    reflect_minus,
    reflect_plus,
    verify_lemma_squares,
)

CHECKS = ("containment", "dims", "lemmas", "roundtrip")


@dataclass(frozen=True)
class FuzzConfig:
    trials: int = 100
    seed: int = 0
    max_cuts: int = 8
    max_dim: int = 6
    max_bars: int = 5
    prime: int | None = 32003
    side: str = PLUS
    s_prime_value: str = SYMMETRIC
    orientation: str = "source"
    pairing: str = DIAMOND
    touch_rate: float = 0.6
    checks: tuple[str, ...] = CHECKS
    minimize: bool = True
    workers: int = 1

    def __post_init__(self) -> None:
        if self.trials < 0 or self.max_cuts < 3 or self.max_dim < 1 or self.max_bars < 0:
            raise ValueError("bounds must be positive (at least three cuts)")
        unknown = set(self.checks) - set(CHECKS)
        if unknown:
            raise ValueError(f"unknown checks {sorted(unknown)}")

    @property
    def field(self) -> FieldSpec:
        return FieldSpec(self.prime)

    def conventions(self) -> dict:
        return {"s_prime_value": self.s_prime_value, "orientation": self.orientation, "pairing": self.pairing}


@dataclass(frozen=True)
class Case:
    """A sampled input: quiver, breakpoint index and the planted bars."""

    quiver: OrientedQuiver
    k: int
    bars: tuple[Bar, ...]
    cuts: tuple[Fraction, ...]


@dataclass(frozen=True)
class FuzzFailure:
    trial: int
    check: str
    diagnostic: str
    case: Case
    minimized: Case


@dataclass
class FuzzReport:
    trials: int
    seed: int
    failures: list[FuzzFailure] = dc_field(default_factory=list)
    timing: dict[str, float] = dc_field(default_factory=dict)
    counts: dict[str, int] = dc_field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures

    def merge(self, other: "FuzzReport") -> "FuzzReport":
        timing = Counter(self.timing)
        timing.update(other.timing)
        counts = Counter(self.counts)
        counts.update(other.counts)
        failures = sorted(self.failures + other.failures, key=lambda f: (f.trial, f.check))
        return FuzzReport(self.trials + other.trials, self.seed, failures, dict(timing), dict(counts))

    def failed_checks(self) -> Counter:
        return Counter(f.check for f in self.failures)


# sampling ------------------------------------------------------------------------------


def random_quiver(rng: np.random.Generator, kind: str, max_cuts: int) -> tuple[OrientedQuiver, int]:
    """Three to five breakpoints on a half-integer grid, with breakpoint k forced extremal."""
    m = int(rng.integers(3, min(5, max_cuts) + 1))
    grid = np.arange(-6, 7)
    bps = sorted(Fraction(int(x), 2) for x in rng.choice(grid, size=m, replace=False))
    k = int(rng.integers(1, m - 1))
    dirs = [ASC if rng.random() < 0.5 else DESC for _ in range(m + 1)]
    dirs[k], dirs[k + 1] = (ASC, DESC) if kind == PLUS else (DESC, ASC)
    return OrientedQuiver(bps, dirs), k


def build(case: Case, field: FieldSpec, rng: np.random.Generator | None = None) -> Rep:
    """The interval sum of a case, optionally hidden behind random per-cell bases."""
    v = sum_of_intervals(case.quiver, case.bars, field, case.cuts)
    if rng is None:
        return v
    return conjugate(v, [Matrix.random_invertible(field, d, rng) for d in v.dims])


def _member(kind: str) -> Callable:
    return in_overline_rep if kind == PLUS else in_underline_rep


def sample_case(config: FuzzConfig, rng: np.random.Generator, attempts: int = 200) -> Case:
    kind = config.side
    for _ in range(attempts):
        q, k = random_quiver(rng, kind, config.max_cuts)
        a, b = q.breakpoints[k - 1], q.breakpoints[k + 1]
        budget = Budget(
            max_bars=config.max_bars,
            max_cuts=config.max_cuts,
            max_dim=config.max_dim,
            touch=(a, b),
            touch_rate=config.touch_rate,
        )
        bars, cuts = random_barcode(q, budget, rng)
        case = Case(q, k, tuple(bars), cuts)
        if _member(kind)(build(case, config.field), k):
            return case
    return Case(q, k, (), cuts)


# checks --------------------------------------------------------------------------------


def _context(case: Case, config: FuzzConfig) -> ReflectionContext:
    return ReflectionContext(case.quiver, case.k, config.side, **config.conventions())


def run_checks(v: Rep, case: Case, config: FuzzConfig, timing: Counter | None = None) -> list[tuple[str, str]]:
    """``(check, diagnostic)`` for every failing check on ``v``."""
    timing = Counter() if timing is None else timing
    ctx = _context(case, config)
    forward, backward = (reflect_plus, reflect_minus) if config.side == PLUS else (reflect_minus, reflect_plus)
    out: list[tuple[str, str]] = []
    clock = time.perf_counter()
    try:
        image = forward(v, case.k, ctx, verify=False)
    except CQuiverError as exc:
        return [(c, f"reflection raised {type(exc).__name__}: {exc}") for c in config.checks]
    timing["reflect"] += time.perf_counter() - clock

    if "containment" in config.checks:
        clock = time.perf_counter()
        try:
            target = in_underline_rep if config.side == PLUS else in_overline_rep
            held = target(image, case.k, back_context(ctx))
            if not held:
                out.append(("containment", f"rank {held.rank} of {held.required}"))
        except CQuiverError as exc:
            out.append(("containment", f"{type(exc).__name__}: {exc}"))
        timing["containment"] += time.perf_counter() - clock

    if "dims" in config.checks:
        clock = time.perf_counter()
        diag = _dims_diagnostic(v, image, ctx, config)
        if diag:
            out.append(("dims", diag))
        timing["dims"] += time.perf_counter() - clock

    if "lemmas" in config.checks and is_canonical(ctx):
        clock = time.perf_counter()
        report = verify_lemma_squares(v, case.k, config.side, ctx)
        if not report.passed:
            out.append(("lemmas", "; ".join(f"{c.kind} at {c.cell}" for c in report.failures())))
        timing["lemmas"] += time.perf_counter() - clock

    if "roundtrip" in config.checks:
        clock = time.perf_counter()
        try:
            back = backward(image, case.k, back_context(ctx), verify=False)
            want, got = decompose(v), decompose(back)
            if want != got:
                out.append(("roundtrip", f"{want} came back as {got}"))
        except CQuiverError as exc:
            out.append(("roundtrip", f"{type(exc).__name__}: {exc}"))
        timing["roundtrip"] += time.perf_counter() - clock
    return out


def _dims_diagnostic(v: Rep, image: Rep, ctx: ReflectionContext, config: FuzzConfig) -> str:
    profile = (reflect_dims_plus if config.side == PLUS else reflect_dims_minus)(v, ctx.k, ctx)
    moved = reflect_barcode(decompose(v), ctx, v.field)
    for c in range(profile.ncells):
        x = cell_sample(profile.cuts, c)
        for name, got in (("assembled", dim_at(image, x)), ("transported", moved.dim_at(x))):
            if got != profile.dims[c]:
                return f"{name} {got} vs pointwise {profile.dims[c]} on {describe_cell(profile.cuts, c)}"
    # same count on both sides: kernel of a surjection, cokernel of an injection
    expected = dim_at(v, ctx.a) + dim_at(v, ctx.b) - dim_at(v, ctx.point)
    got = dim_at(image, ctx.image)
    if got != expected:
        return f"dimension {got} at the moved point, formula gives {expected}"
    return ""


# shrinking ------------------------------------------------------------------------------


def _still_fails(case: Case, check: str, config: FuzzConfig) -> bool:
    v = build(case, config.field)
    try:
        if not _member(config.side)(v, case.k):
            return False
    except CQuiverError:
        return False
    return any(c == check for c, _ in run_checks(v, case, replace_checks(config, (check,))))


def replace_checks(config: FuzzConfig, checks: tuple[str, ...]) -> FuzzConfig:
    fields = asdict(config)
    fields["checks"] = checks
    return FuzzConfig(**fields)


def _complexity(x: Fraction) -> tuple:
    return (x.denominator, abs(x), x)


def _simpler(x: Fraction, anchors: tuple[Fraction, ...]) -> list[Fraction]:
    """Strictly simpler replacements for an endpoint, nearest first; strictness ensures termination."""
    near = sorted(set(anchors) | {Fraction(round(x)), Fraction(round(2 * x), 2)}, key=lambda y: (abs(y - x), y))
    return [y for y in near if _complexity(y) < _complexity(x)]


def minimize(case: Case, check: str, config: FuzzConfig) -> Case:
    """Drop bars, then move endpoints to simpler coordinates, while the check keeps failing."""
    bars = list(case.bars)
    i = 0
    while i < len(bars):
        trial = Case(case.quiver, case.k, tuple(bars[:i] + bars[i + 1 :]), case.cuts)
        if _still_fails(trial, check, config):
            bars.pop(i)
        else:
            i += 1
    anchors = case.quiver.breakpoints
    changed = True
    while changed:
        changed = False
        for i, bar in enumerate(bars):
            for attr in ("lo", "hi"):
                x = getattr(bar, attr)
                if x is None:
                    continue
                for y in _simpler(x, anchors):
                    ends = {"lo": bar.lo, "hi": bar.hi, attr: y}
                    try:
                        cand = Bar(ends["lo"], ends["hi"], bar.lo_closed, bar.hi_closed)
                    except ValueError:
                        continue
                    trial_bars = tuple(bars[:i] + [cand] + bars[i + 1 :])
                    cuts = tuple(sorted(set(case.cuts) | {y}))
                    trial = Case(case.quiver, case.k, trial_bars, cuts)
                    if _still_fails(trial, check, config):
                        bars[i], bar, changed = cand, cand, True
                        break
    used = set(case.quiver.breakpoints) | {e for b in bars for e in (b.lo, b.hi) if e is not None}
    return Case(case.quiver, case.k, tuple(bars), tuple(sorted(used)))


# campaigns ------------------------------------------------------------------------------


def _trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, trial]))


def run_trial(config: FuzzConfig, trial: int) -> FuzzReport:
    rng = _trial_rng(config.seed, trial)
    timing: Counter = Counter()
    clock = time.perf_counter()
    case = sample_case(config, rng)
    timing["sample"] += time.perf_counter() - clock
    v = build(case, config.field, rng)
    failures = []
    for check, diag in run_checks(v, case, config, timing):
        small = minimize(case, check, config) if config.minimize else case
        failures.append(FuzzFailure(trial, check, diag, case, small))
    return FuzzReport(1, config.seed, failures, dict(timing), {"bars": len(case.bars)})


def _run_range(args: tuple[FuzzConfig, int, int]) -> FuzzReport:
    config, start, stop = args
    report = FuzzReport(0, config.seed)
    for t in range(start, stop):
        report = report.merge(run_trial(config, t))
    return report


def fuzz_campaign(config: FuzzConfig) -> FuzzReport:
    """Run ``config.trials`` independent trials; the result depends only on the config."""
    if config.workers <= 1 or config.trials < 2:
        return _run_range((config, 0, config.trials))
    step = -(-config.trials // config.workers)
    chunks = [(config, s, min(s + step, config.trials)) for s in range(0, config.trials, step)]
    report = FuzzReport(0, config.seed)
    with ProcessPoolExecutor(max_workers=config.workers) as pool:
        for part in pool.map(_run_range, chunks):
            report = report.merge(part)
    return report
