"""Plain SVG rendering of shadow polygons and planar normal fans.

Coordinates are exact rationals until the final float conversion, so the
output is byte-identical across runs apart from the version comment.
"""
from __future__ import annotations

from typing import Optional, Sequence

from .analysis import ShadowPolygon
from .errors import DegenerateProjection
from .exact import QVector, Scalar
from .pivot import PathRecord
from .polytope import NormalFan

SIZE = 480
MARGIN = 30


def _header(version: str, title: str) -> list[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f"<!-- shadowbound {version} -->",
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">',
        f"<title>{title}</title>",
        f'<rect width="{SIZE}" height="{SIZE}" fill="white"/>',
    ]


def _scaler(points: Sequence[tuple[Scalar, Scalar]]):
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    span = max(x1 - x0, y1 - y0)
    if span == 0:
        raise DegenerateProjection("all points coincide")
    scale = (SIZE - 2 * MARGIN) / span

    def to_px(p):
        # SVG y grows downward
        return (round(float(MARGIN + (p[0] - x0) * scale), 3),
                round(float(SIZE - MARGIN - (p[1] - y0) * scale), 3))

    return to_px


def shadow_polygon_svg(poly: ShadowPolygon, path: Optional[PathRecord] = None, version: str = "") -> str:
    """Hull of the projected vertices, with the path (if given) drawn on top."""
    pts = poly.projected_points
    to_px = _scaler(pts)
    out = _header(version, f"shadow polygon, {poly.hull_size} hull vertices")
    hull_px = [to_px(pts[i]) for i in poly.hull]
    out.append('<polygon class="hull" fill="#e8eef8" stroke="#335" stroke-width="1.5" points="'
               + " ".join(f"{x},{y}" for x, y in hull_px) + '"/>')
    for x, y in sorted({to_px(p) for p in pts}):
        out.append(f'<circle class="vertex" cx="{x}" cy="{y}" r="2" fill="#888"/>')
    for x, y in hull_px:
        out.append(f'<circle class="hull-vertex" cx="{x}" cy="{y}" r="3.5" fill="#335"/>')
    if path is not None and poly.vertices:
        index = {v.tight: i for i, v in enumerate(poly.vertices)}
        path_px = [to_px(pts[index[v.tight]]) for v in path.vertices if v.tight in index]
        out.append('<polyline class="path" fill="none" stroke="#c22" stroke-width="2.5" points="'
                   + " ".join(f"{x},{y}" for x, y in path_px) + '"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def fan_2d_svg(fan: NormalFan, w: Sequence[Scalar], c: Sequence[Scalar], version: str = "") -> str:
    """Planar normal fan as wedges from the origin plus the segment w -> c."""
    w, c = QVector(w), QVector(c)
    if len(w) != 2:
        raise ValueError("fan plots need n = 2")
    rays = [tuple(r) for C in fan.cones.values() for r in C.rays]
    radius = max(max(abs(x) for r in rays for x in r), w.norm_inf(), c.norm_inf())
    frame = [(-radius, -radius), (radius, radius)]
    to_px = _scaler(frame)
    origin = to_px((0, 0))
    palette = ["#f4d6d6", "#d6ecd6", "#d6def4", "#f4ecd0", "#e6d6f4", "#d0f0f0"]
    out = _header(version, f"normal fan, {len(fan.cones)} cones")
    for i, (tight, C) in enumerate(fan.cones.items()):
        r1, r2 = C.rays
        # scale rays to the frame edge so every wedge is visible
        p1 = to_px(tuple(x * radius / max(abs(y) for y in r1) for x in r1))
        p2 = to_px(tuple(x * radius / max(abs(y) for y in r2) for x in r2))
        label = ",".join(map(str, tight))
        out.append(f'<polygon class="cone" data-tight="{label}" fill="{palette[i % len(palette)]}" '
                   f'stroke="#555" stroke-width="1" points="{origin[0]},{origin[1]} {p1[0]},{p1[1]} {p2[0]},{p2[1]}"/>')
    pw, pc = to_px(tuple(w)), to_px(tuple(c))
    out.append(f'<line class="segment" x1="{pw[0]}" y1="{pw[1]}" x2="{pc[0]}" y2="{pc[1]}" stroke="#c22" stroke-width="2"/>')
    out.append(f'<text x="{pw[0]}" y="{pw[1]}" font-size="12">w</text>')
    out.append(f'<text x="{pc[0]}" y="{pc[1]}" font-size="12">c</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
