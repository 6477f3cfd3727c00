"""Interval decomposition of cell-partition representations.

Multiplicities come from inclusion–exclusion of generalized ranks: the rank
of the canonical map from the limit to the colimit of the representation
restricted to a range of cells.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import DecompositionMismatch, QuiverMismatch
from .exact_linalg import (
    FieldSpec,
    Matrix,
    cokernel_basis,
    hstack,
    kernel_basis,
    rank,
    vstack,
)
from .quiver import OrientedQuiver
from .representation import Bar, Rep, cell_bounds, common_refinement, sum_of_intervals


@dataclass(frozen=True)
class Barcode:
    """A multiset of bars, kept as sorted ``(bar, multiplicity)`` pairs."""

    entries: tuple[tuple[Bar, int], ...] = ()

    def __post_init__(self) -> None:
        counts: Counter = Counter()
        for bar, m in self.entries:
            if m < 0:
                raise ValueError("negative multiplicity")
            counts[bar] += m
        ordered = tuple(sorted(((b, m) for b, m in counts.items() if m), key=lambda e: e[0].sort_key()))
        object.__setattr__(self, "entries", ordered)

    @classmethod
    def of(cls, bars: Iterable[Bar]) -> "Barcode":
        return cls(tuple((b, 1) for b in bars))

    @classmethod
    def parse(cls, *texts: str) -> "Barcode":
        return cls.of(Bar.parse(t) for t in texts)

    def bars(self) -> list[Bar]:
        return [b for b, m in self.entries for _ in range(m)]

    def __iter__(self) -> Iterator[Bar]:
        return iter(self.bars())

    def __len__(self) -> int:
        return sum(m for _, m in self.entries)

    def __add__(self, other: "Barcode") -> "Barcode":
        return Barcode(self.entries + other.entries)

    def multiplicity(self, bar: Bar) -> int:
        return dict(self.entries).get(bar, 0)

    def dim_at(self, x) -> int:
        return sum(m for b, m in self.entries if b.contains(x))

    def __str__(self) -> str:
        parts = [str(b) if m == 1 else f"{b}^{m}" for b, m in self.entries]
        return "{" + ", ".join(parts) + "}"


def _zero(field: FieldSpec, r: int, c: int) -> Matrix:
    return Matrix.zeros(field, r, c)


def _eye(field: FieldSpec, n: int) -> Matrix:
    return Matrix.identity(field, n)


def generalized_rank(v: Rep, lo_cell: int, hi_cell: int) -> int:
    """Rank of lim → colim of ``v`` restricted to cells ``lo_cell..hi_cell``.

    The limit is the kernel of the block difference map over the stored maps
    in range, the colimit the matching cokernel.
    """
    if lo_cell > hi_cell:
        raise ValueError("empty cell range")
    field = v.field
    cells = list(range(lo_cell, hi_cell + 1))
    dims = [v.dims[c] for c in cells]
    total = sum(dims)
    edges = list(range(lo_cell, hi_cell))
    # difference map: ⊕ V(c) → ⊕_edges V(target)
    rows = []
    for i in edges:
        s, t = v.pair_ends(i)
        blocks = []
        for c, d in zip(cells, dims):
            if c == s:
                blocks.append(v.maps[i])
            elif c == t:
                blocks.append(-_eye(field, d))
            else:
                blocks.append(_zero(field, v.dims[t], d))
        rows.append(hstack(field, blocks, rows=v.dims[t]))
    if total == 0:
        return 0
    d = vstack(field, rows, cols=total) if rows else _zero(field, 0, total)
    lim = kernel_basis(d).inclusion
    # colimit: ⊕ V(c) modulo images of (ι_s - ι_t M) for each edge
    rel_cols = []
    for i in edges:
        s, t = v.pair_ends(i)
        blocks = []
        for c, dd in zip(cells, dims):
            if c == s:
                blocks.append(_eye(field, dd))
            elif c == t:
                blocks.append(-v.maps[i])
            else:
                blocks.append(_zero(field, dd, v.dims[s]))
        rel_cols.append(vstack(field, blocks, cols=v.dims[s]))
    rel = hstack(field, rel_cols, rows=total) if rel_cols else _zero(field, total, 0)
    colim = cokernel_basis(rel).projection
    # lim → V(first cell) → ⊕V(c) → colim; any cell gives the same composite
    return rank(colim @ _restrict_first(field, lim, dims))


def _restrict_first(field: FieldSpec, lim: Matrix, dims: Sequence[int]) -> Matrix:
    """Keep only the first cell's coordinates of each limit vector, placed back in ⊕V(c)."""
    n0 = dims[0]
    out = field.zeros(lim.rows, lim.cols)
    out[:n0, :] = lim.array[:n0, :]
    return Matrix._wrap(field, out)


def span_to_bar(cuts: Sequence, i: int, j: int) -> Bar:
    lo, _ = cell_bounds(cuts, i)
    _, hi = cell_bounds(cuts, j)
    return Bar(lo, hi, i % 2 == 1, j % 2 == 1)


def _rank_table(v: Rep) -> dict[tuple[int, int], int]:
    """All nonzero generalized ranks via one incremental sweep per start cell.

    The sweep keeps the limit L with legs to the first and current cell and the
    colimit C with legs from them; each new cell is a pushout or pullback step.
    """
    field = v.field
    n = v.ncells
    table: dict[tuple[int, int], int] = {}
    for i in range(n):
        d = v.dims[i]
        if d == 0:
            continue
        li = lj = _eye(field, d)
        ci = cj = _eye(field, d)
        r = d
        table[(i, i)] = r
        for j in range(i, n - 1):
            a = v.maps[j]
            if a.is_identity():
                # gluing along an identity leaves both limit and colimit alone
                table[(i, j + 1)] = r
                continue
            if v.forward(j):
                lj = a @ lj
                pres = cokernel_basis(vstack(field, [cj, -a], cols=v.dims[j]), split=(cj.rows, a.rows))
                p1, p2 = pres.restrictions
                ci, cj = p1 @ ci, p2
            else:
                pres = kernel_basis(hstack(field, [lj, -a], rows=v.dims[j]), split=(lj.cols, a.cols))
                q1, q2 = pres.projections
                li, lj = li @ q1, q2
                cj = cj @ a
            r = rank(ci @ li)
            if r == 0:
                break
            table[(i, j + 1)] = r
    return table


def decompose(v: Rep) -> Barcode:
    table = _rank_table(v)
    n = v.ncells

    def r(i: int, j: int) -> int:
        if i < 0 or j >= n:
            return 0
        return table.get((i, j), 0)

    entries = []
    counts = [0] * n
    for (i, j) in table:
        m = r(i, j) - r(i - 1, j) - r(i, j + 1) + r(i - 1, j + 1)
        if m < 0:
            raise DecompositionMismatch(f"negative multiplicity on cells {i}..{j}")
        if m:
            entries.append((span_to_bar(v.cuts, i, j), m))
            for c in range(i, j + 1):
                counts[c] += m
    if tuple(counts) != v.dims:
        raise DecompositionMismatch(f"bar dimensions {counts} differ from {list(v.dims)}")
    return Barcode(tuple(entries))


def rebuild(q: OrientedQuiver, bc: Barcode, field: FieldSpec, cuts: Iterable = ()) -> Rep:
    return sum_of_intervals(q, bc.bars(), field, cuts)


def is_isomorphic(v: Rep, w: Rep) -> bool:
    if v.quiver != w.quiver:
        raise QuiverMismatch("representations live on different quivers")
    v, w = common_refinement(v, w)
    return v.dims == w.dims and decompose(v) == decompose(w)
