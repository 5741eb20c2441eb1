"""Self-contained SVG rendering of comparison pages and presentations.

Hand-built SVG keeps output byte-deterministic (no library metadata, no
timestamps), which the batch pipeline relies on for diffable artifacts.
Colors follow the qualitative paired scheme: one dark and one light
shade per functional muscle group.
"""
from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

from .model import AFFECTED, UNAFFECTED, MuscleId
from .significance import BundleComparison, visibility_report
from .store import PresentationDoc, Session

GROUP_SHADES = {
    "pushing": ("#1f78b4", "#a6cee3"),
    "forearm": ("#33a02c", "#b2df8a"),
    "back": ("#e31a1c", "#fb9a99"),
    "finger": ("#ff7f00", "#fdbf6f"),
}


def assign_colors(muscles: list[MuscleId] | tuple[MuscleId, ...]) -> dict[str, str]:
    """Stable muscle -> hex color map: shades assigned by name within group."""
    by_group: dict[str, list[str]] = {}
    for m in muscles:
        by_group.setdefault(m.group, []).append(m.name)
    colors = {}
    for m in muscles:
        shades = GROUP_SHADES[m.group]
        slot = sorted(by_group[m.group]).index(m.name)
        colors[m.name] = shades[slot % len(shades)]
    return colors


def _f(x: float) -> str:
    return f"{x:.2f}"


def _polyline(xs, ys) -> str:
    return " ".join(f"{_f(x)},{_f(y)}" for x, y in zip(xs, ys))


def _scale(values, lo, hi, out_lo, out_hi):
    values = np.asarray(values, dtype=float)
    if hi <= lo:
        return np.full(len(values), (out_lo + out_hi) / 2.0)
    return out_lo + (values - lo) * (out_hi - out_lo) / (hi - lo)


class _Svg:
    def __init__(self, width: int, height: int):
        self.width = width
        self.height = height
        self.parts: list[str] = []

    def add(self, fragment: str) -> None:
        self.parts.append(fragment)

    def text(self, x, y, s, size=12, color="#333", anchor="start", weight="normal"):
        self.add(
            f'<text x="{_f(x)}" y="{_f(y)}" font-size="{size}" fill="{color}" '
            f'text-anchor="{anchor}" font-weight="{weight}" '
            f'font-family="Helvetica, Arial, sans-serif">{escape(s)}</text>'
        )

    def to_string(self) -> str:
        head = (
            '<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" '
            f'height="{self.height}" viewBox="0 0 {self.width} {self.height}">\n'
            f'<rect width="{self.width}" height="{self.height}" fill="#ffffff"/>\n'
        )
        return head + "\n".join(self.parts) + "\n</svg>\n"


def _chart(svg, x, y, w, h, times, base, highlighted, color, t_lo, t_hi, v_max):
    svg.add(
        f'<rect x="{_f(x)}" y="{_f(y)}" width="{_f(w)}" height="{_f(h)}" '
        f'fill="none" stroke="#dddddd"/>'
    )
    if len(times) == 0:
        return
    xs = _scale(times, t_lo, t_hi, x, x + w)
    base_ys = y + h - _scale(base, 0.0, v_max, 0.0, h)
    hi_ys = y + h - _scale(highlighted, 0.0, v_max, 0.0, h)
    # filled highlight under the curve, unfilled stroke for original power
    area = (
        f"{_f(xs[0])},{_f(y + h)} "
        + _polyline(xs, hi_ys)
        + f" {_f(xs[-1])},{_f(y + h)}"
    )
    svg.add(f'<polygon points="{area}" fill="{color}" fill-opacity="0.6" stroke="none"/>')
    svg.add(
        f'<polyline points="{_polyline(xs, base_ys)}" fill="none" '
        f'stroke="{color}" stroke-width="1.2"/>'
    )


def comparison_svg(comparison: BundleComparison, width: int = 1100) -> str:
    """One page: motion context row plus aligned muscle rows, both limbs.

    Rows collapsed by the current threshold are omitted; the remaining
    charts take up the space (the on-screen rescale behavior).
    """
    report = visibility_report(comparison)
    rows = [m for m in comparison.muscles if m.name in report.surviving]
    colors = assign_colors(comparison.muscles)

    margin, label_w, gap = 16, 64, 24
    col_w = (width - 2 * margin - label_w - gap) / 2
    row_h, motion_h, header_h = 64, 72, 56
    has_motion = bool(comparison.motion)
    height = int(
        header_h
        + (motion_h + 10 if has_motion else 0)
        + len(rows) * (row_h + 10)
        + margin
    )
    svg = _Svg(width, height)
    title = (
        f"{comparison.patient_id} / {comparison.motion_type} "
        f"(threshold {comparison.threshold:.2f})"
    )
    svg.text(margin, 24, title, size=16, weight="bold")
    x_a = margin + label_w
    x_u = x_a + col_w + gap
    svg.text(x_a, 44, "affected", size=12, color="#555")
    svg.text(x_u, 44, "unaffected", size=12, color="#555")

    # shared horizontal time range across every chart
    t_lo = math.inf
    t_hi = -math.inf
    for ch in comparison.charts.values():
        if len(ch.base.times):
            t_lo = min(t_lo, float(ch.base.times[0]))
            t_hi = max(t_hi, float(ch.base.times[-1]))
    if has_motion:
        for ts, _ in comparison.motion.values():
            if len(ts):
                t_lo = min(t_lo, float(ts[0]))
                t_hi = max(t_hi, float(ts[-1]))
    if not math.isfinite(t_lo):
        t_lo, t_hi = 0.0, 1.0

    y = header_h
    if has_motion:
        v_max = max(
            (float(np.max(vs)) for _, vs in comparison.motion.values() if len(vs)),
            default=1.0,
        ) or 1.0
        svg.text(margin, y + motion_h / 2, "motion", size=11, color="#555")
        for side, x0 in ((AFFECTED, x_a), (UNAFFECTED, x_u)):
            if side in comparison.motion:
                ts, vs = comparison.motion[side]
                svg.add(
                    f'<rect x="{_f(x0)}" y="{_f(y)}" width="{_f(col_w)}" '
                    f'height="{_f(motion_h)}" fill="none" stroke="#dddddd"/>'
                )
                xs = _scale(ts, t_lo, t_hi, x0, x0 + col_w)
                ys = y + motion_h - _scale(vs, 0.0, v_max, 0.0, motion_h)
                svg.add(
                    f'<polyline points="{_polyline(xs, ys)}" fill="none" '
                    f'stroke="#666666" stroke-width="1.2"/>'
                )
        y += motion_h + 10

    for m in rows:
        color = colors[m.name]
        pair = {s: comparison.charts[(m.name, s)] for s in (AFFECTED, UNAFFECTED)}
        v_max = max(
            (float(np.max(c.base.values)) for c in pair.values() if len(c.base)),
            default=1.0,
        ) or 1.0
        svg.add(
            f'<rect x="{_f(margin)}" y="{_f(y + row_h / 2 - 6)}" width="10" '
            f'height="10" fill="{color}"/>'
        )
        svg.text(margin + 14, y + row_h / 2 + 4, m.name, size=11)
        for side, x0 in ((AFFECTED, x_a), (UNAFFECTED, x_u)):
            ch = pair[side]
            _chart(
                svg, x0, y, col_w, row_h,
                ch.base.times, ch.base.values, ch.highlighted,
                color, t_lo, t_hi, v_max,
            )
            score = comparison.scores[(m.name, side)]
            svg.text(
                x0 + col_w - 4, y + 12,
                f"{score.normalized_score:.3f}", size=9, color="#888", anchor="end",
            )
        y += row_h + 10
    return svg.to_string()


def _donut_arc(cx, cy, r_out, r_in, a0, a1) -> str:
    if a1 - a0 >= 2 * math.pi - 1e-9:
        a1 = a0 + 2 * math.pi - 1e-6
    large = 1 if (a1 - a0) > math.pi else 0
    x0o, y0o = cx + r_out * math.cos(a0), cy + r_out * math.sin(a0)
    x1o, y1o = cx + r_out * math.cos(a1), cy + r_out * math.sin(a1)
    x1i, y1i = cx + r_in * math.cos(a1), cy + r_in * math.sin(a1)
    x0i, y0i = cx + r_in * math.cos(a0), cy + r_in * math.sin(a0)
    return (
        f"M {_f(x0o)} {_f(y0o)} "
        f"A {_f(r_out)} {_f(r_out)} 0 {large} 1 {_f(x1o)} {_f(y1o)} "
        f"L {_f(x1i)} {_f(y1i)} "
        f"A {_f(r_in)} {_f(r_in)} 0 {large} 0 {_f(x0i)} {_f(y0i)} Z"
    )


def donut(svg: _Svg, cx, cy, shares: dict[str, float], colors: dict[str, str]) -> None:
    """Fixed-radius donut with percentage and muscle labels beside the arcs."""
    r_out, r_in = 42.0, 22.0
    angle = -math.pi / 2
    for name in shares:
        share = shares[name]
        if share <= 0:
            continue
        a1 = angle + share * 2 * math.pi
        color = colors.get(name, "#999999")
        svg.add(f'<path d="{_donut_arc(cx, cy, r_out, r_in, angle, a1)}" fill="{color}"/>')
        angle = a1
    ly = cy - r_out
    for name, share in shares.items():
        color = colors.get(name, "#999999")
        svg.add(
            f'<rect x="{_f(cx + r_out + 12)}" y="{_f(ly - 7)}" width="8" height="8" '
            f'fill="{color}"/>'
        )
        svg.text(cx + r_out + 24, ly, f"{name} {share * 100:.1f}%", size=10)
        ly += 13


def presentation_svg(
    doc: PresentationDoc, colors: dict[str, str] | None = None, width: int = 1100
) -> str:
    """Grid page: one row per patient, one column per finding group."""
    columns: list[str] = []
    rows: list[str] = []
    for cell in doc.cells:
        if cell.column not in columns:
            columns.append(cell.column)
        if cell.row not in rows:
            rows.append(cell.row)
    colors = colors or {}
    default_shades = [s for pair in GROUP_SHADES.values() for s in pair]

    margin, header_h = 24, 72
    cell_w = (width - 2 * margin) / max(1, len(columns))
    cell_h = 150
    height = int(header_h + max(1, len(rows)) * cell_h + margin)
    svg = _Svg(width, height)
    svg.text(margin, 30, doc.title or "(untitled presentation)", size=18, weight="bold")
    if doc.subtitle:
        svg.text(margin, 50, doc.subtitle, size=12, color="#555")

    for j, col in enumerate(columns):
        svg.text(margin + j * cell_w + cell_w / 2, header_h - 6, col, size=12,
                 anchor="middle", weight="bold")
    for i, row in enumerate(rows):
        svg.text(margin, header_h + i * cell_h + 16, row, size=11, color="#555")

    for cell in doc.cells:
        i, j = rows.index(cell.row), columns.index(cell.column)
        x = margin + j * cell_w
        y = header_h + i * cell_h
        svg.add(
            f'<rect x="{_f(x)}" y="{_f(y)}" width="{_f(cell_w - 8)}" '
            f'height="{_f(cell_h - 8)}" fill="none" stroke="#dddddd"/>'
        )
        cell_colors = dict(colors)
        for idx, name in enumerate(cell.shares):
            cell_colors.setdefault(name, default_shades[idx % len(default_shades)])
        donut(svg, x + 64, y + cell_h / 2 - 4, cell.shares, cell_colors)
        svg.text(x + 8, y + cell_h - 28,
                 f"{cell.side} [{cell.interval[0]:.2f}, {cell.interval[1]:.2f}] s",
                 size=9, color="#777")
        if cell.annotation:
            svg.text(x + 8, y + cell_h - 14, cell.annotation, size=10)
    return svg.to_string()


def session_svg(session: Session, width: int = 800) -> str:
    """Plain summary page of a session's saved state."""
    lines = [f"session {session.id}" + (f" — {session.owner}" if session.owner else "")]
    for t in session.truncations:
        lines.append(
            f"truncation: {t.patient_id}/{t.motion_type}/{t.side} -> [{t.t0:.2f}, {t.t1:.2f}] s"
        )
    for c in session.comparisons:
        muted = ", ".join(c.muted) if c.muted else "none"
        lines.append(
            f"comparison: {c.patient_id}/{c.motion_type} tau={c.tau:.2f} muted: {muted}"
        )
    for b in session.brushes:
        lines.append(
            f"brush {b.id}: {b.patient_id}/{b.motion_type}/{b.side} "
            f"[{b.t0:.2f}, {b.t1:.2f}] s {b.note}"
        )
    height = 40 + 18 * len(lines) + 20
    svg = _Svg(width, height)
    svg.text(24, 28, lines[0], size=15, weight="bold")
    y = 54
    for line in lines[1:]:
        svg.text(24, y, line, size=11)
        y += 18
    return svg.to_string()
