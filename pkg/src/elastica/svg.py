"""Minimal self-contained SVG plots (inline styles, no external resources)."""

from __future__ import annotations

from dataclasses import dataclass, field
from xml.sax.saxutils import escape

import numpy as np

MARGIN = 0.05


@dataclass
class Plot:
    """Collects polylines, markers and labels in data coordinates.

    ``equal_aspect`` uses one scale for both axes so shapes are not distorted.
    """

    width: float = 640.0
    height: float = 480.0
    equal_aspect: bool = False
    title: str = ""
    _lines: list = field(default_factory=list)
    _marks: list = field(default_factory=list)
    _labels: list = field(default_factory=list)

    def line(self, x, y, color="#1f4e9c", width=1.5, dash=None):
        self._lines.append((np.asarray(x, float), np.asarray(y, float), color, width, dash))

    def marker(self, x, y, color="#c0392b", r=4.0):
        self._marks.append((float(x), float(y), color, r))

    def label(self, x, y, text, color="#222222"):
        self._labels.append((float(x), float(y), text, color))

    def _bounds(self):
        xs = [a for x, *_ in self._lines for a in (x.min(), x.max())] + [m[0] for m in self._marks]
        ys = [a for _, y, *_ in self._lines for a in (y.min(), y.max())] + [m[1] for m in self._marks]
        x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
        if self.equal_aspect:
            span = max(x1 - x0, y1 - y0, 1e-12)
            cx, cy = 0.5 * (x0 + x1), 0.5 * (y0 + y1)
            x0, x1, y0, y1 = cx - span / 2, cx + span / 2, cy - span / 2, cy + span / 2
        dx = max(x1 - x0, 1e-12) * MARGIN
        dy = max(y1 - y0, 1e-12) * MARGIN
        return x0 - dx, x1 + dx, y0 - dy, y1 + dy

    def render(self) -> str:
        x0, x1, y0, y1 = self._bounds()
        w, h = self.width, self.height
        if self.equal_aspect:
            h = w * (y1 - y0) / (x1 - x0)

        def px(x):
            return (np.asarray(x) - x0) / (x1 - x0) * w

        def py(y):
            return (y1 - np.asarray(y)) / (y1 - y0) * h

        out = [f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {w:.2f} {h:.2f}" '
               f'width="{w:.0f}" height="{h:.0f}">',
               f'<rect x="0" y="0" width="{w:.2f}" height="{h:.2f}" style="fill:#ffffff;stroke:none"/>']
        if self.title:
            out.append(f'<title>{escape(self.title)}</title>')
        for x, y, color, width, dash in self._lines:
            pts = " ".join(f"{a:.3f},{b:.3f}" for a, b in zip(px(x), py(y)))
            style = f"fill:none;stroke:{color};stroke-width:{width}"
            if dash:
                style += f";stroke-dasharray:{dash}"
            out.append(f'<polyline points="{pts}" style="{style}"/>')
        for x, y, color, r in self._marks:
            out.append(f'<circle cx="{float(px(x)):.3f}" cy="{float(py(y)):.3f}" r="{r}" '
                       f'style="fill:{color};stroke:none"/>')
        for x, y, text, color in self._labels:
            out.append(f'<text x="{float(px(x)) + 6:.3f}" y="{float(py(y)) - 6:.3f}" '
                       f'style="font-family:sans-serif;font-size:13px;fill:{color}">{escape(text)}</text>')
        out.append("</svg>")
        return "\n".join(out) + "\n"
