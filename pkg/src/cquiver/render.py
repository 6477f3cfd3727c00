"""Static SVG drawing of a barcode over the real line."""

from __future__ import annotations

from fractions import Fraction
from xml.sax.saxutils import escape

from .barcode import Barcode
from .quiver import ASC, OrientedQuiver

WIDTH = 640
ROW = 18
MARGIN = 40
CAP = 4


def _span(bc: Barcode, q: OrientedQuiver | None) -> tuple[Fraction, Fraction]:
    xs = [e for b in bc.bars() for e in (b.lo, b.hi) if e is not None]
    if q is not None:
        xs += list(q.breakpoints)
    if not xs:
        return Fraction(-1), Fraction(1)
    lo, hi = min(xs), max(xs)
    pad = max((hi - lo) / 8, Fraction(1, 2))
    return lo - pad, hi + pad


def render_svg(bc: Barcode, q: OrientedQuiver | None = None, title: str = "") -> str:
    """Bars as horizontal segments; closed ends are filled dots, open ends hollow ones.

    Infinite ends run to the plot edge with an arrow head.  When a quiver is
    given its breakpoints are marked on the axis with segment orientations.
    """
    lo, hi = _span(bc, q)
    bars = bc.bars()
    height = 2 * MARGIN + ROW * (len(bars) + 2)

    def px(x: Fraction) -> float:
        return round(MARGIN + float((x - lo) / (hi - lo)) * (WIDTH - 2 * MARGIN), 2)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" '
        f'viewBox="0 0 {WIDTH} {height}" font-family="monospace" font-size="11">',
        f'<rect width="{WIDTH}" height="{height}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{MARGIN}" y="{MARGIN / 2}">{escape(title)}</text>')
    axis_y = height - MARGIN
    out.append(f'<line x1="{MARGIN}" y1="{axis_y}" x2="{WIDTH - MARGIN}" y2="{axis_y}" stroke="black"/>')
    if q is not None:
        edges = [lo, *q.breakpoints, hi]
        for i, d in enumerate(q.segment_dirs):
            mid = px((edges[i] + edges[i + 1]) / 2)
            glyph = "&#8594;" if d == ASC else "&#8592;"
            out.append(f'<text x="{mid}" y="{axis_y - 4}" text-anchor="middle">{glyph}</text>')
        for b in q.breakpoints:
            x = px(b)
            out.append(f'<line x1="{x}" y1="{MARGIN}" x2="{x}" y2="{axis_y}" stroke="#bbb" stroke-dasharray="3,3"/>')
            out.append(f'<text x="{x}" y="{axis_y + 14}" text-anchor="middle">{b}</text>')
    for row, bar in enumerate(bars):
        y = MARGIN + ROW * (row + 1)
        x0 = px(bar.lo) if bar.lo is not None else MARGIN
        x1 = px(bar.hi) if bar.hi is not None else WIDTH - MARGIN
        out.append(f'<g><title>{escape(str(bar))}</title>')
        out.append(f'<line x1="{x0}" y1="{y}" x2="{x1}" y2="{y}" stroke="#1f4e9c" stroke-width="3"/>')
        for end, x, closed in ((bar.lo, x0, bar.lo_closed), (bar.hi, x1, bar.hi_closed)):
            if end is None:
                tip = -6 if x == MARGIN else 6
                out.append(f'<path d="M{x} {y - 4} L{x + tip} {y} L{x} {y + 4} Z" fill="#1f4e9c"/>')
            else:
                fill = "#1f4e9c" if closed else "white"
                out.append(f'<circle cx="{x}" cy="{y}" r="{CAP}" fill="{fill}" stroke="#1f4e9c" stroke-width="1.5"/>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
