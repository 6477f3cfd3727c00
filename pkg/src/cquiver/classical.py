"""Classical reflection functors on finite type-A quivers, and their embedding.

This module is deliberately self-contained: it reduces matrices over GF(p)
with its own elimination so it can serve as an independent reference for the
continuous reflection.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .exact_linalg import FieldSpec, Matrix
from .quiver import ASC, DESC, OrientedQuiver
from .representation import Rep

RIGHT_ARROW = ">"  # i -> i+1
LEFT_ARROW = "<"  # i+1 -> i


@dataclass(frozen=True)
class ClassicalRep:
    """Vertices 0..n-1; ``arrows[i]`` joins vertices i and i+1.

    ``maps[i]`` is a list-of-rows matrix from the arrow's tail space to its
    head space, entries reduced mod ``p``.
    """

    arrows: tuple[str, ...]
    dims: tuple[int, ...]
    maps: tuple[tuple[tuple[int, ...], ...], ...]
    p: int

    @property
    def n(self) -> int:
        return len(self.dims)

    def ends(self, i: int) -> tuple[int, int]:
        """(tail, head) of arrow ``i``."""
        return (i, i + 1) if self.arrows[i] == RIGHT_ARROW else (i + 1, i)

    def is_sink(self, v: int) -> bool:
        return all(self.ends(i)[1] == v for i in (v - 1, v) if 0 <= i < self.n - 1)

    def is_source(self, v: int) -> bool:
        return all(self.ends(i)[0] == v for i in (v - 1, v) if 0 <= i < self.n - 1)


def _nullspace(rows: list[list[int]], ncols: int, p: int) -> list[list[int]]:
    """Basis vectors (as lists) of the right null space mod p."""
    m = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(m)) if m[i][c] % p), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        inv = pow(m[r][c], p - 2, p)
        m[r] = [x * inv % p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] % p:
                f = m[i][c]
                m[i] = [(x - f * y) % p for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [0] * ncols
        vec[fc] = 1
        for row, pc in enumerate(pivots):
            vec[pc] = (-m[row][fc]) % p
        basis.append(vec)
    return basis


def _transpose(rows: Sequence[Sequence[int]], nrows: int, ncols: int) -> list[list[int]]:
    return [[rows[i][j] for i in range(nrows)] for j in range(ncols)]


def _flip(arrows: tuple[str, ...], v: int) -> tuple[str, ...]:
    out = list(arrows)
    for i in (v - 1, v):
        if 0 <= i < len(out):
            out[i] = LEFT_ARROW if out[i] == RIGHT_ARROW else RIGHT_ARROW
    return tuple(out)


def bgp_plus(m: ClassicalRep, v: int) -> ClassicalRep:
    """Reflection at a sink: the new space is the kernel of the summed incoming maps."""
    if not m.is_sink(v):
        raise ValueError(f"vertex {v} is not a sink")
    p = m.p
    incoming = [i for i in (v - 1, v) if 0 <= i < m.n - 1]
    tails = [m.ends(i)[0] for i in incoming]
    widths = [m.dims[t] for t in tails]
    total = sum(widths)
    # D = [M_i1 | M_i2] : ⊕ M_tail -> M_v
    rows = [[0] * total for _ in range(m.dims[v])]
    off = 0
    for i, w in zip(incoming, widths):
        for r in range(m.dims[v]):
            for c in range(w):
                rows[r][off + c] = m.maps[i][r][c] % p
        off += w
    kernel = _nullspace(rows, total, p)
    k = len(kernel)
    dims = list(m.dims)
    dims[v] = k
    maps = list(m.maps)
    off = 0
    for i, t, w in zip(incoming, tails, widths):
        # new arrow v -> t: coordinates of the kernel basis in the t-summand
        maps[i] = tuple(tuple(kernel[j][off + c] for j in range(k)) for c in range(w))
        off += w
    return ClassicalRep(_flip(m.arrows, v), tuple(dims), tuple(maps), p)


def bgp_minus(m: ClassicalRep, v: int) -> ClassicalRep:
    """Reflection at a source: the new space is the cokernel of the stacked outgoing maps.

    The cokernel is presented as the dual of the kernel of the transpose.
    """
    if not m.is_source(v):
        raise ValueError(f"vertex {v} is not a source")
    p = m.p
    outgoing = [i for i in (v - 1, v) if 0 <= i < m.n - 1]
    heads = [m.ends(i)[1] for i in outgoing]
    heights = [m.dims[h] for h in heads]
    total = sum(heights)
    # D = [M_o1 ; M_o2] : M_v -> ⊕ M_head ; cokernel coordinates = left null space of D
    stacked = []
    for i, h in zip(outgoing, heights):
        for r in range(h):
            stacked.append([m.maps[i][r][c] % p for c in range(m.dims[v])])
    left_null = _nullspace(_transpose(stacked, total, m.dims[v]), total, p) if m.dims[v] else [
        [int(i == j) for j in range(total)] for i in range(total)
    ]
    k = len(left_null)
    dims = list(m.dims)
    dims[v] = k
    maps = list(m.maps)
    off = 0
    for i, h in zip(outgoing, heights):
        # new arrow head -> v: functional rows restricted to this summand
        maps[i] = tuple(tuple(left_null[j][off + c] for c in range(h)) for j in range(k))
        off += h
    return ClassicalRep(_flip(m.arrows, v), tuple(dims), tuple(maps), p)


def random_classical(arrows: Sequence[str], max_dim: int, rng: np.random.Generator, p: int) -> ClassicalRep:
    dims = tuple(int(d) for d in rng.integers(0, max_dim + 1, size=len(arrows) + 1))
    maps = []
    for i, a in enumerate(arrows):
        t, h = (i, i + 1) if a == RIGHT_ARROW else (i + 1, i)
        maps.append(tuple(tuple(int(x) for x in rng.integers(0, p, size=dims[t])) for _ in range(dims[h])))
    return ClassicalRep(tuple(arrows), dims, tuple(maps), p)


# embedding into the continuous line ---------------------------------------------------


def natural_pads(arrows: Sequence[str], lone_sink: bool = True) -> tuple[str, str]:
    """Padding directions making both end vertices a sink or a source.

    A lone vertex is both; ``lone_sink`` picks which one it becomes.
    """
    if not arrows:
        return (ASC, DESC) if lone_sink else (DESC, ASC)
    first = ASC if arrows[0] == LEFT_ARROW else DESC
    last = DESC if arrows[-1] == RIGHT_ARROW else ASC
    return first, last


def embedded_quiver(arrows: Sequence[str], pads: tuple[str, str] | None = None) -> OrientedQuiver:
    """Vertex i sits at coordinate i+1, padded by zero vertices at 0 and n+1.

    ``pads`` orients the segments (0, 1) and (n, n+1); the outermost segments
    are fixed so that reflecting an end vertex only flips its padding.
    """
    n = len(arrows) + 1
    first, last = pads if pads is not None else natural_pads(arrows)
    inner = [ASC if a == RIGHT_ARROW else DESC for a in arrows]
    return OrientedQuiver(range(n + 2), [ASC, first, *inner, last, DESC])


def embed(m: ClassicalRep, field: FieldSpec, pads: tuple[str, str] | None = None) -> Rep:
    """Point cells carry the vertex spaces; each open segment copies its tail point."""
    q = embedded_quiver(m.arrows, pads)
    n = m.n
    cuts = tuple(Fraction(j) for j in range(n + 2))
    ncells = 2 * len(cuts) + 1

    def space(j: int) -> int:
        return m.dims[j - 1] if 1 <= j <= n else 0

    def tail(cell: int) -> int | None:
        """Coordinate of the tail point of an open cell strictly inside [0, n+1]."""
        j = cell // 2 - 1
        if cell % 2 or not 0 <= j <= n:
            return None
        return j if q.segment_dirs[j + 1] == ASC else j + 1

    dims = [space((c - 1) // 2) if c % 2 else (space(tail(c)) if tail(c) is not None else 0) for c in range(ncells)]
    shell = Rep(q, field, cuts, dims, [Matrix.zeros(field, 0, 0)] * (ncells - 1))
    maps = []
    for i in range(ncells - 1):
        s, t = shell.pair_ends(i)
        if not dims[s] or not dims[t]:
            maps.append(Matrix.zeros(field, dims[t], dims[s]))
        elif s % 2:  # tail point into its open segment
            maps.append(Matrix.identity(field, dims[t]))
        else:  # open segment into the head point, a genuine arrow
            arrow = s // 2 - 2
            maps.append(Matrix(field, m.maps[arrow]))
    return Rep(q, field, cuts, dims, maps)


def agreement_plus(m: ClassicalRep, v: int, field: FieldSpec) -> list[str]:
    """Compare the continuous reflection of ``embed(m)`` at vertex ``v`` with ``bgp_plus``.

    Returns a list of mismatch descriptions, empty when the two agree on the
    cell dimensions and on the barcode.
    """
    from .barcode import decompose
    from .reflection import reflect_plus

    out = reflect_plus(embed(m, field), v + 1, verify=False)
    pads = (out.quiver.segment_dirs[1], out.quiver.segment_dirs[-2])
    ref = embed(bgp_plus(m, v), field, pads)
    problems = []
    if out.quiver != ref.quiver:
        problems.append(f"quiver {out.quiver} vs {ref.quiver}")
    if out.cuts != ref.cuts or out.dims != ref.dims:
        problems.append(f"dims {out.dims} vs classical {ref.dims}")
    if not problems and decompose(out) != decompose(ref):
        problems.append(f"barcode {decompose(out)} vs classical {decompose(ref)}")
    return problems
