"""Standalone deterministic SVG rendering of portraits and parameter
diagrams: tagged polylines, equilibrium glyphs (cross for saddles, dot for
centers), and labeled axes. Identical input produces byte-identical output.
"""
from __future__ import annotations

import math
from typing import Iterable, Sequence

from .writers import VERSION

WIDTH, HEIGHT = 840, 620
MARGIN = 60.0

_TAG_STYLE = {
    "m3": "stroke:#1f77b4;stroke-width:1.6",
    "m4": "stroke:#2ca02c;stroke-width:1.6",
    "m5+": "stroke:#d62728;stroke-width:1.6",
    "m5-": "stroke:#ff7f0e;stroke-width:1.6",
    "m6": "stroke:#9467bd;stroke-width:1.8;stroke-dasharray:6 3",
    "saddle": "stroke:#d62728;stroke-width:1.2",
    "regular": "stroke:#777777;stroke-width:0.7",
    "unstable": "stroke:#d62728;stroke-width:0.9",
    "stable": "stroke:#1f77b4;stroke-width:0.9",
}
_DEFAULT_STYLE = "stroke:#444444;stroke-width:1.0"


def _fmt(x: float) -> str:
    return f"{x:.3f}"


def _nice_ticks(lo: float, hi: float, target: int = 6) -> list[float]:
    span = hi - lo
    if span <= 0:
        return [lo]
    raw = span / target
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    else:  # pragma: no cover
        step = 10.0 * mag
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-12 * max(1.0, abs(hi)):
        ticks.append(round(t, 12))
        t += step
    return ticks


class SvgCanvas:
    def __init__(self, x_range: tuple[float, float], y_range: tuple[float, float],
                 x_label: str, y_label: str, title: str, metadata: dict | None = None):
        self.x0, self.x1 = x_range
        self.y0, self.y1 = y_range
        if not (self.x1 > self.x0 and self.y1 > self.y0):
            raise ValueError("empty axis range")
        self.parts: list[str] = []
        self.x_label, self.y_label, self.title = x_label, y_label, title
        self.metadata = metadata or {}

    def _sx(self, x: float) -> float:
        return MARGIN + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - 2 * MARGIN)

    def _sy(self, y: float) -> float:
        return HEIGHT - MARGIN - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - 2 * MARGIN)

    def polyline(self, points: Sequence[tuple[float, float]], tag: str) -> None:
        if len(points) < 2:
            return
        style = _TAG_STYLE.get(tag, _DEFAULT_STYLE)
        coords = " ".join(f"{_fmt(self._sx(x))},{_fmt(self._sy(y))}" for x, y in points)
        self.parts.append(
            f'<polyline class="{tag}" style="fill:none;{style}" points="{coords}"/>'
        )

    def segments(self, segs: Iterable[tuple[float, float, float, float]], tag: str) -> None:
        style = _TAG_STYLE.get(tag, _DEFAULT_STYLE)
        for x0, y0, x1, y1 in segs:
            self.parts.append(
                f'<line class="{tag}" style="{style}" '
                f'x1="{_fmt(self._sx(x0))}" y1="{_fmt(self._sy(y0))}" '
                f'x2="{_fmt(self._sx(x1))}" y2="{_fmt(self._sy(y1))}"/>'
            )

    def glyph(self, x: float, y: float, kind: str) -> None:
        sx, sy = self._sx(x), self._sy(y)
        if kind == "saddle":
            d = 4.0
            self.parts.append(
                f'<path class="saddle-glyph" style="stroke:#000000;stroke-width:1.4" '
                f'd="M {_fmt(sx - d)} {_fmt(sy - d)} L {_fmt(sx + d)} {_fmt(sy + d)} '
                f'M {_fmt(sx - d)} {_fmt(sy + d)} L {_fmt(sx + d)} {_fmt(sy - d)}"/>'
            )
        elif kind == "center":
            self.parts.append(
                f'<circle class="center-glyph" style="fill:#000000" '
                f'cx="{_fmt(sx)}" cy="{_fmt(sy)}" r="2.6"/>'
            )
        else:
            self.parts.append(
                f'<rect class="degenerate-glyph" style="fill:none;stroke:#000000" '
                f'x="{_fmt(sx - 3)}" y="{_fmt(sy - 3)}" width="6" height="6"/>'
            )

    def render(self) -> str:
        axes: list[str] = []
        frame = (
            f'<rect x="{_fmt(MARGIN)}" y="{_fmt(MARGIN)}" '
            f'width="{_fmt(WIDTH - 2 * MARGIN)}" height="{_fmt(HEIGHT - 2 * MARGIN)}" '
            'style="fill:none;stroke:#000000;stroke-width:1"/>'
        )
        axes.append(frame)
        for t in _nice_ticks(self.x0, self.x1):
            sx = self._sx(t)
            axes.append(
                f'<line x1="{_fmt(sx)}" y1="{_fmt(HEIGHT - MARGIN)}" '
                f'x2="{_fmt(sx)}" y2="{_fmt(HEIGHT - MARGIN + 5)}" style="stroke:#000"/>'
            )
            axes.append(
                f'<text x="{_fmt(sx)}" y="{_fmt(HEIGHT - MARGIN + 18)}" '
                f'text-anchor="middle" font-size="11">{t:g}</text>'
            )
        for t in _nice_ticks(self.y0, self.y1):
            sy = self._sy(t)
            axes.append(
                f'<line x1="{_fmt(MARGIN - 5)}" y1="{_fmt(sy)}" '
                f'x2="{_fmt(MARGIN)}" y2="{_fmt(sy)}" style="stroke:#000"/>'
            )
            axes.append(
                f'<text x="{_fmt(MARGIN - 8)}" y="{_fmt(sy + 4)}" '
                f'text-anchor="end" font-size="11">{t:g}</text>'
            )
        axes.append(
            f'<text x="{_fmt(WIDTH / 2)}" y="{_fmt(HEIGHT - 14)}" text-anchor="middle" '
            f'font-size="13">{self.x_label}</text>'
        )
        axes.append(
            f'<text x="16" y="{_fmt(HEIGHT / 2)}" text-anchor="middle" font-size="13" '
            f'transform="rotate(-90 16 {_fmt(HEIGHT / 2)})">{self.y_label}</text>'
        )
        axes.append(
            f'<text x="{_fmt(WIDTH / 2)}" y="28" text-anchor="middle" font-size="15">'
            f"{self.title}</text>"
        )
        meta_items = "".join(
            f"<rezone:item key=\"{k}\">{self.metadata[k]}</rezone:item>"
            for k in sorted(self.metadata)
        )
        return (
            '<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
            f'viewBox="0 0 {WIDTH} {HEIGHT}">\n'
            f'<metadata xmlns:rezone="urn:rezone">'
            f"<rezone:item key=\"version\">{VERSION}</rezone:item>{meta_items}</metadata>\n"
            + "\n".join(axes + self.parts)
            + "\n</svg>\n"
        )


def render_portrait_svg(portrait, metadata: dict | None = None) -> str:
    u_min, u_max, v_min, v_max = portrait.window
    canvas = SvgCanvas(
        (v_min, v_max), (u_min, u_max), "v", "u", "phase portrait", metadata
    )
    for level in portrait.levels:
        if level.kind != "saddle":
            canvas.segments(level.segments, "regular")
    for level in portrait.levels:
        if level.kind == "saddle":
            canvas.segments(level.segments, "saddle")
    for eq in portrait.equilibria:
        canvas.glyph(eq.state.v, eq.state.u, eq.kind)
    return canvas.render()


def render_diagram_svg(diagram, metadata: dict | None = None) -> str:
    mu1_lo, mu1_hi, mu2_lo, mu2_hi = diagram.window
    canvas = SvgCanvas(
        (mu1_lo, mu1_hi), (mu2_lo, mu2_hi), "mu1", "mu2", "parameter plane", metadata
    )
    for curve in diagram.analytic_curves:
        canvas.polyline(curve.points, curve.curve_id)
    for curve in diagram.reconnection_curves:
        canvas.polyline(curve.points, curve.curve_id)
    for (mu1, mu2), sig in diagram.region_samples:
        canvas.glyph(mu1, mu2, "center" if not sig.has_off_axis else "saddle")
    return canvas.render()


def render_manifolds_svg(bundle, metadata: dict | None = None) -> str:
    import numpy as np

    pts = np.vstack(bundle.unstable + bundle.stable)
    u_lo, u_hi = float(pts[:, 0].min()), float(pts[:, 0].max())
    v_lo, v_hi = float(pts[:, 1].min()), float(pts[:, 1].max())
    pad_u = 0.05 * max(1e-6, u_hi - u_lo)
    pad_v = 0.05 * max(1e-6, v_hi - v_lo)
    canvas = SvgCanvas(
        (v_lo - pad_v, v_hi + pad_v),
        (u_lo - pad_u, u_hi + pad_u),
        "v",
        "u",
        "invariant manifolds",
        metadata,
    )
    for branch in bundle.unstable:
        canvas.polyline([(v, u) for u, v in branch], "unstable")
    for branch in bundle.stable:
        canvas.polyline([(v, u) for u, v in branch], "stable")
    canvas.glyph(bundle.fixed_point.v, bundle.fixed_point.u, "saddle")
    return canvas.render()
