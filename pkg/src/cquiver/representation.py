"""Finitely presented representations of continuous type-A quivers.

A representation is constant on the cells of a finite partition of the line:
open rays/intervals between consecutive cuts and the cut points themselves.
Cell ``2j+1`` is the point ``cuts[j]``; cell ``2j`` is the open interval to its
left.  Only maps between adjacent cells are stored; map ``i`` joins cells
``i`` and ``i+1`` and points the way the surrounding segment is oriented.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field as dc_field
from functools import cached_property
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import FieldMismatch, Incomparable, QuiverMismatch
from .exact_linalg import FieldSpec, Matrix, inverse, null_space, rank
from .quiver import ASC, OrientedQuiver, comparable, coord


# bars -----------------------------------------------------------------------


@dataclass(frozen=True)
class Bar:
    """An interval of the line; ``None`` endpoints are infinite (and open)."""

    lo: Fraction | None
    hi: Fraction | None
    lo_closed: bool = True
    hi_closed: bool = True

    def __post_init__(self) -> None:
        lo = None if self.lo is None else coord(self.lo)
        hi = None if self.hi is None else coord(self.hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if lo is None and self.lo_closed:
            object.__setattr__(self, "lo_closed", False)
        if hi is None and self.hi_closed:
            object.__setattr__(self, "hi_closed", False)
        if lo is not None and hi is not None:
            if lo > hi or (lo == hi and not (self.lo_closed and self.hi_closed)):
                raise ValueError(f"empty bar {self}")

    @classmethod
    def closed(cls, lo, hi) -> "Bar":
        return cls(lo, hi, True, True)

    @classmethod
    def point(cls, x) -> "Bar":
        return cls(x, x, True, True)

    @classmethod
    def parse(cls, text: str) -> "Bar":
        """Parse ``"[0, 5/2)"``-style notation; ``inf`` marks an infinite end."""
        t = text.strip()
        if t.startswith("{") and t.endswith("}"):
            return cls.point(Fraction(t[1:-1].strip()))
        lo_c, hi_c = t[0] == "[", t[-1] == "]"
        lo_s, hi_s = (s.strip() for s in t[1:-1].split(","))
        lo = None if lo_s in ("-inf", "-oo") else Fraction(lo_s)
        hi = None if hi_s in ("inf", "+inf", "oo") else Fraction(hi_s)
        return cls(lo, hi, lo_c, hi_c)

    def contains(self, x) -> bool:
        x = coord(x)
        if self.lo is not None and (x < self.lo or (x == self.lo and not self.lo_closed)):
            return False
        if self.hi is not None and (x > self.hi or (x == self.hi and not self.hi_closed)):
            return False
        return True

    def endpoints(self) -> list[Fraction]:
        return [e for e in (self.lo, self.hi) if e is not None]

    def sort_key(self):
        lo = (0, Fraction(0)) if self.lo is None else (1, self.lo)
        hi = (1, Fraction(0)) if self.hi is None else (0, self.hi)
        return (lo, hi, not self.lo_closed, self.hi_closed)

    def __lt__(self, other: "Bar") -> bool:
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        if self.lo is not None and self.lo == self.hi:
            return "{" + str(self.lo) + "}"
        lo = "-inf" if self.lo is None else str(self.lo)
        hi = "inf" if self.hi is None else str(self.hi)
        return f"{'[' if self.lo_closed else '('}{lo}, {hi}{']' if self.hi_closed else ')'}"


# cells ---------------------------------------------------------------------


def cell_count(cuts: Sequence) -> int:
    return 2 * len(cuts) + 1


def cell_of(cuts: Sequence[Fraction], x) -> int:
    x = coord(x)
    j = bisect.bisect_left(cuts, x)
    if j < len(cuts) and cuts[j] == x:
        return 2 * j + 1
    return 2 * j


def cell_bounds(cuts: Sequence[Fraction], c: int) -> tuple[Fraction | None, Fraction | None]:
    """(lo, hi) of an open cell, or (x, x) for a point cell."""
    if c % 2:
        x = cuts[c // 2]
        return x, x
    j = c // 2
    lo = cuts[j - 1] if j > 0 else None
    hi = cuts[j] if j < len(cuts) else None
    return lo, hi


def cell_sample(cuts: Sequence[Fraction], c: int) -> Fraction:
    lo, hi = cell_bounds(cuts, c)
    if lo is not None and hi is not None:
        return (lo + hi) / 2
    if lo is None and hi is None:
        return Fraction(0)
    if lo is None:
        return hi - 1
    return lo + 1


def cell_in_bar(cuts: Sequence[Fraction], c: int, bar: Bar) -> bool:
    return bar.contains(cell_sample(cuts, c))


def describe_cell(cuts: Sequence[Fraction], c: int) -> str:
    lo, hi = cell_bounds(cuts, c)
    if c % 2:
        return "{" + str(lo) + "}"
    return f"({'-inf' if lo is None else lo}, {'inf' if hi is None else hi})"


# representations ----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Rep:
    quiver: OrientedQuiver
    field: FieldSpec
    cuts: tuple[Fraction, ...]
    dims: tuple[int, ...]
    maps: tuple[Matrix, ...]

    def __init__(self, quiver, field, cuts, dims, maps):
        object.__setattr__(self, "quiver", quiver)
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "cuts", tuple(coord(c) for c in cuts))
        object.__setattr__(self, "dims", tuple(int(d) for d in dims))
        object.__setattr__(self, "maps", tuple(maps))
        if len(self.dims) != cell_count(self.cuts):
            raise ValueError("dims must have one entry per cell")
        if len(self.maps) != len(self.dims) - 1:
            raise ValueError("maps must have one entry per adjacent cell pair")

    @property
    def ncells(self) -> int:
        return len(self.dims)

    @cached_property
    def directions(self) -> tuple[bool, ...]:
        """``directions[i]`` is True when map ``i`` runs from cell i to cell i+1."""
        return tuple(pair_forward(self.quiver, self.cuts, i) for i in range(len(self.maps)))

    def forward(self, i: int) -> bool:
        return self.directions[i]

    def pair_ends(self, i: int) -> tuple[int, int]:
        """(source cell, target cell) of map ``i``."""
        return (i, i + 1) if self.forward(i) else (i + 1, i)

    def total_dim(self) -> int:
        return sum(self.dims)

    def is_zero(self) -> bool:
        return self.total_dim() == 0

    def __eq__(self, other) -> bool:
        if not isinstance(other, Rep):
            return NotImplemented
        return (
            self.quiver == other.quiver
            and self.field == other.field
            and self.cuts == other.cuts
            and self.dims == other.dims
            and self.maps == other.maps
        )

    def __hash__(self) -> int:
        return hash((self.quiver, self.field, self.cuts, self.dims))


def pair_forward(q: OrientedQuiver, cuts: Sequence[Fraction], i: int) -> bool:
    open_cell = i if i % 2 == 0 else i + 1
    lo, hi = cell_bounds(cuts, open_cell)
    return q.segment_dirs[q.segment_of_open(lo, hi)] == ASC


def standard_cuts(q: OrientedQuiver, extra: Iterable = ()) -> tuple[Fraction, ...]:
    return tuple(sorted(set(q.breakpoints) | {coord(e) for e in extra}))


def zero_rep(q: OrientedQuiver, field: FieldSpec, cuts: Iterable = ()) -> Rep:
    cs = standard_cuts(q, cuts)
    n = cell_count(cs)
    return Rep(q, field, cs, [0] * n, [Matrix.zeros(field, 0, 0)] * (n - 1))


def validate_rep(v: Rep) -> list[str]:
    """Shape and coverage violations; an empty list means ``v`` is a valid rep."""
    out: list[str] = []
    missing = set(v.quiver.breakpoints) - set(v.cuts)
    if missing:
        out.append(f"cuts miss breakpoints {sorted(str(m) for m in missing)}")
    if any(a >= b for a, b in zip(v.cuts, v.cuts[1:])):
        out.append("cuts not strictly increasing")
    if any(d < 0 for d in v.dims):
        out.append("negative dimension")
    for i, m in enumerate(v.maps):
        if m.field != v.field:
            out.append(f"map {i}: field {m.field} differs from {v.field}")
            continue
        s, t = v.pair_ends(i)
        if m.shape != (v.dims[t], v.dims[s]):
            out.append(
                f"map {i} ({describe_cell(v.cuts, s)} -> {describe_cell(v.cuts, t)}): "
                f"shape {m.shape} != ({v.dims[t]}, {v.dims[s]})"
            )
    return out


def dim_at(v: Rep, x) -> int:
    return v.dims[cell_of(v.cuts, x)]


def chain_map(v: Rep, c_from: int, c_to: int) -> Matrix:
    """Composite of stored maps from cell ``c_from`` to cell ``c_to``."""
    out = Matrix.identity(v.field, v.dims[c_from])
    if c_from == c_to:
        return out
    step = 1 if c_to > c_from else -1
    c = c_from
    while c != c_to:
        i = min(c, c + step)
        s, t = v.pair_ends(i)
        if s != c:
            raise Incomparable(f"map {i} points against the chain {c_from} -> {c_to}")
        out = v.maps[i] @ out
        c += step
    return out


def map_along(v: Rep, x, y) -> Matrix:
    """V(x, y) for x ⪯ y."""
    c = comparable(v.quiver, x, y)
    if c is None or c != (coord(x), coord(y)):
        raise Incomparable(f"{x} is not below {y}")
    return chain_map(v, cell_of(v.cuts, x), cell_of(v.cuts, y))


def _cell_lookup(old_cuts: Sequence[Fraction], new_cuts: Sequence[Fraction]) -> list[int]:
    return [cell_of(old_cuts, cell_sample(new_cuts, c)) for c in range(cell_count(new_cuts))]


def refine_partition(v: Rep, extra: Iterable) -> Rep:
    """Insert cuts; split cells carry identity maps."""
    new_cuts = tuple(sorted(set(v.cuts) | {coord(e) for e in extra}))
    if new_cuts == v.cuts:
        return v
    old = _cell_lookup(v.cuts, new_cuts)
    dims = [v.dims[o] for o in old]
    maps = []
    for i in range(len(new_cuts) * 2):
        a, b = old[i], old[i + 1]
        if a == b:
            maps.append(Matrix.identity(v.field, dims[i]))
        else:
            j = min(a, b)
            assert abs(a - b) == 1
            maps.append(v.maps[j])
    return Rep(v.quiver, v.field, new_cuts, dims, maps)


def common_refinement(a: Rep, b: Rep) -> tuple[Rep, Rep]:
    if a.quiver != b.quiver:
        raise QuiverMismatch("representations live on different quivers")
    if a.field != b.field:
        raise FieldMismatch(f"{a.field} vs {b.field}")
    cuts = set(a.cuts) | set(b.cuts)
    return refine_partition(a, cuts), refine_partition(b, cuts)


def _block_diag(field: FieldSpec, a: Matrix, b: Matrix) -> Matrix:
    out = field.zeros(a.rows + b.rows, a.cols + b.cols)
    out[: a.rows, : a.cols] = a.array
    out[a.rows :, a.cols :] = b.array
    return Matrix._wrap(field, out)


def direct_sum(a: Rep, b: Rep) -> Rep:
    a, b = common_refinement(a, b)
    dims = [x + y for x, y in zip(a.dims, b.dims)]
    maps = [_block_diag(a.field, m, n) for m, n in zip(a.maps, b.maps)]
    return Rep(a.quiver, a.field, a.cuts, dims, maps)


def direct_sum_all(q: OrientedQuiver, field: FieldSpec, reps: Iterable[Rep], cuts: Iterable = ()) -> Rep:
    out = zero_rep(q, field, cuts)
    for r in reps:
        out = direct_sum(out, r)
    return out


def interval_module(q: OrientedQuiver, bar: Bar, field: FieldSpec, cuts: Iterable = ()) -> Rep:
    cs = standard_cuts(q, list(cuts) + bar.endpoints())
    dims = [1 if cell_in_bar(cs, c, bar) else 0 for c in range(cell_count(cs))]
    one = Matrix.identity(field, 1)
    maps = []
    for i in range(len(dims) - 1):
        if dims[i] and dims[i + 1]:
            maps.append(one)
        else:
            maps.append(None)
    rep_maps = []
    for i, m in enumerate(maps):
        if m is not None:
            rep_maps.append(m)
        else:
            s, t = (i, i + 1) if pair_forward(q, cs, i) else (i + 1, i)
            rep_maps.append(Matrix.zeros(field, dims[t], dims[s]))
    return Rep(q, field, cs, dims, rep_maps)


def sum_of_intervals(
    q: OrientedQuiver, bars: Iterable[Bar], field: FieldSpec, cuts: Iterable = ()
) -> Rep:
    bars = list(bars)
    extra = set(coord(c) for c in cuts)
    for b in bars:
        extra.update(b.endpoints())
    return direct_sum_all(q, field, (interval_module(q, b, field, extra) for b in bars), extra)


def conjugate(v: Rep, bases: Sequence[Matrix]) -> Rep:
    """Apply the per-cell change of basis ``x ↦ P_c x``: maps become P_t M P_s⁻¹."""
    invs = [inverse(p) for p in bases]
    maps = []
    for i, m in enumerate(v.maps):
        s, t = v.pair_ends(i)
        maps.append(bases[t] @ m @ invs[s])
    return Rep(v.quiver, v.field, v.cuts, v.dims, maps)


# morphisms ------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Morphism:
    """Per-cell matrices between two reps sharing one partition."""

    source: Rep
    target: Rep
    components: tuple[Matrix, ...]

    def __post_init__(self) -> None:
        if self.source.cuts != self.target.cuts:
            raise ValueError("morphism ends must share a partition; refine first")
        object.__setattr__(self, "components", tuple(self.components))

    def naturality_violations(self) -> list[str]:
        v, w, f = self.source, self.target, self.components
        out = []
        for c, m in enumerate(f):
            if m.shape != (w.dims[c], v.dims[c]):
                out.append(f"component {c} has shape {m.shape}")
        if out:
            return out
        for i in range(len(v.maps)):
            s, t = v.pair_ends(i)
            if f[t] @ v.maps[i] != w.maps[i] @ f[s]:
                out.append(f"square over map {i} ({describe_cell(v.cuts, s)} -> {describe_cell(v.cuts, t)})")
        return out

    def is_valid(self) -> bool:
        return not self.naturality_violations()

    def is_zero(self) -> bool:
        return all(m.is_zero() for m in self.components)

    def is_isomorphism(self) -> bool:
        return all(m.rows == m.cols and rank(m) == m.rows for m in self.components)

    def __matmul__(self, other: "Morphism") -> "Morphism":
        """self ∘ other."""
        return compose(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Morphism):
            return NotImplemented
        return self.source == other.source and self.target == other.target and self.components == other.components

    def __hash__(self) -> int:
        return hash(self.components)


def refine_morphism(f: Morphism, extra: Iterable) -> Morphism:
    """Insert cuts into both ends; split cells repeat their component."""
    v, w = refine_partition(f.source, extra), refine_partition(f.target, extra)
    old = _cell_lookup(f.source.cuts, v.cuts)
    return Morphism(v, w, tuple(f.components[o] for o in old))


def identity_morphism(v: Rep) -> Morphism:
    return Morphism(v, v, tuple(Matrix.identity(v.field, d) for d in v.dims))


def zero_morphism(v: Rep, w: Rep) -> Morphism:
    v, w = common_refinement(v, w)
    return Morphism(v, w, tuple(Matrix.zeros(v.field, b, a) for a, b in zip(v.dims, w.dims)))


def compose(g: Morphism, f: Morphism) -> Morphism:
    if f.target != g.source:
        raise ValueError("morphisms are not composable")
    return Morphism(f.source, g.target, tuple(b @ a for a, b in zip(f.components, g.components)))


def linear_combination(field: FieldSpec, coeffs: Sequence, morphisms: Sequence[Morphism]) -> Morphism:
    first = morphisms[0]
    comps = []
    for c in range(len(first.components)):
        acc = Matrix.zeros(field, *first.components[c].shape)
        for a, m in zip(coeffs, morphisms):
            acc = acc + m.components[c].scale(a)
        comps.append(acc)
    return Morphism(first.source, first.target, tuple(comps))


def hom_space(v: Rep, w: Rep) -> list[Morphism]:
    """Basis of Hom(v, w) as the solution space of all naturality squares."""
    v, w = common_refinement(v, w)
    field = v.field
    sizes = [a * b for a, b in zip(v.dims, w.dims)]
    offsets = np.concatenate([[0], np.cumsum(sizes)]).astype(int)
    n = int(offsets[-1])
    if n == 0:
        return []
    blocks = []
    for i, m_v in enumerate(v.maps):
        s, t = v.pair_ends(i)
        m_w = w.maps[i]
        rows = w.dims[t] * v.dims[s]
        if rows == 0:
            continue
        row = field.zeros(rows, n)
        # row-major vec: vec(F_t V) = (I ⊗ Vᵀ) vec(F_t), vec(W F_s) = (W ⊗ I) vec(F_s)
        if sizes[t]:
            row[:, offsets[t] : offsets[t + 1]] += np.kron(np.eye(w.dims[t], dtype=int).astype(row.dtype), m_v.array.T)
        if sizes[s]:
            row[:, offsets[s] : offsets[s + 1]] -= np.kron(m_w.array, np.eye(v.dims[s], dtype=int).astype(row.dtype))
        blocks.append(field.reduce(row))
    if blocks:
        system = Matrix._wrap(field, field.reduce(np.concatenate(blocks, axis=0)))
        basis = null_space(system)
    else:
        basis = Matrix.identity(field, n)
    out = []
    for j in range(basis.cols):
        col = basis.array[:, j]
        comps = []
        for c in range(v.ncells):
            seg = col[offsets[c] : offsets[c + 1]].reshape(w.dims[c], v.dims[c])
            comps.append(Matrix._wrap(field, seg.copy()))
        out.append(Morphism(v, w, tuple(comps)))
    return out


def random_morphism(v: Rep, w: Rep, rng: np.random.Generator) -> Morphism:
    basis = hom_space(v, w)
    if not basis:
        return zero_morphism(v, w)
    coeffs = [v.field.elem(int(x)) for x in rng.integers(0, 1 << 30, size=len(basis))]
    if v.field.p is None:
        coeffs = [Fraction(int(x)) for x in rng.integers(-3, 4, size=len(basis))]
    return linear_combination(v.field, coeffs, basis)


# random generation ---------------------------------------------------------------


@dataclass(frozen=True)
class Budget:
    max_bars: int = 5
    max_cuts: int = 8
    max_dim: int = 6
    grid: Fraction = Fraction(1, 2)
    unbounded_rate: float = 0.1
    touch: tuple[Fraction, ...] = dc_field(default_factory=tuple)
    touch_rate: float = 0.0


def random_barcode(q: OrientedQuiver, budget: Budget, rng: np.random.Generator) -> tuple[list[Bar], tuple[Fraction, ...]]:
    """Random bars whose endpoints keep the total cut count within budget.

    Returns the bars and the cut set they were drawn from.
    """
    bps = list(q.breakpoints)
    lo = (bps[0] if bps else Fraction(0)) - 2
    hi = (bps[-1] if bps else Fraction(0)) + 2
    steps = int((hi - lo) / budget.grid)
    grid = [lo + budget.grid * i for i in range(steps + 1)]
    free = [g for g in grid if g not in set(bps)]
    n_extra = max(0, budget.max_cuts - len(bps))
    if n_extra and free:
        pick = rng.choice(len(free), size=min(n_extra, len(free)), replace=False)
        extra = [free[int(i)] for i in pick]
    else:
        extra = []
    cuts = sorted(set(bps) | set(extra))
    if not cuts:
        cuts = [Fraction(0)]
    touch = [t for t in budget.touch if t in cuts]
    n_bars = int(rng.integers(0, budget.max_bars + 1)) if budget.max_bars else 0
    bars: list[Bar] = []
    counts = [0] * cell_count(cuts)
    attempts = 0
    while len(bars) < n_bars and attempts < 50 * (n_bars + 1):
        attempts += 1
        i, j = sorted(int(x) for x in rng.integers(0, len(cuts), size=2))
        b_lo: Fraction | None = cuts[i]
        b_hi: Fraction | None = cuts[j]
        if touch and rng.random() < budget.touch_rate:
            t = touch[int(rng.integers(0, len(touch)))]
            if rng.random() < 0.5:
                b_lo = t if t <= b_hi else b_hi
                b_hi = max(b_hi, t)
            else:
                b_hi = t if t >= b_lo else b_lo
                b_lo = min(b_lo, t)
        lo_c, hi_c = bool(rng.random() < 0.6), bool(rng.random() < 0.6)
        if rng.random() < budget.unbounded_rate:
            b_lo, lo_c = None, False
        if rng.random() < budget.unbounded_rate:
            b_hi, hi_c = None, False
        if b_lo is not None and b_hi is not None and b_lo == b_hi:
            lo_c = hi_c = True
        bar = Bar(b_lo, b_hi, lo_c, hi_c)
        inc = [1 if cell_in_bar(cuts, c, bar) else 0 for c in range(len(counts))]
        if any(a + b > budget.max_dim for a, b in zip(counts, inc)):
            continue
        counts = [a + b for a, b in zip(counts, inc)]
        bars.append(bar)
    return bars, tuple(cuts)


def random_rep(
    q: OrientedQuiver,
    budget: Budget,
    seed: int,
    field: FieldSpec,
    with_barcode: bool = False,
):
    """Random barcode, rebuilt and hidden behind a per-cell change of basis."""
    rng = np.random.default_rng(seed)
    bars, cuts = random_barcode(q, budget, rng)
    v = sum_of_intervals(q, bars, field, cuts)
    bases = [Matrix.random_invertible(field, d, rng) for d in v.dims]
    v = conjugate(v, bases)
    if with_barcode:
        return v, bars
    return v
