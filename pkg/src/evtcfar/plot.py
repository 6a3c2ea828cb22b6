"""Static ROC plot as hand-written SVG (log PFA axis).

Plain string output keeps the file byte-stable across runs and platforms.
"""
from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 640, 440
LEFT, RIGHT, TOP, BOTTOM = 70, 20, 30, 60
COLORS = ("#d62728", "#1f77b4", "#2ca02c", "#9467bd")


def _xy(pfa, pd, pfa_min, pd_min):
    pw = WIDTH - LEFT - RIGHT
    ph = HEIGHT - TOP - BOTTOM
    lx = (np.log10(np.maximum(pfa, pfa_min)) - math.log10(pfa_min)) / -math.log10(pfa_min)
    ly = (pd - pd_min) / (1.0 - pd_min)
    return LEFT + lx * pw, TOP + (1.0 - np.clip(ly, 0.0, 1.0)) * ph


def roc_svg(curves: dict, title: str = "ROC", pfa_min: float = 1e-5, pd_min: float = 0.0) -> str:
    """Render ``{label: RocCurve}`` as an SVG document."""
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.1f}" y="18" text-anchor="middle" font-size="14">{escape(title)}</text>',
    ]
    x0, y0 = LEFT, HEIGHT - BOTTOM
    x1, y1 = WIDTH - RIGHT, TOP
    out.append(f'<rect x="{x0}" y="{y1}" width="{x1 - x0}" height="{y0 - y1}" '
               'fill="none" stroke="black"/>')
    for e in range(round(math.log10(pfa_min)), 1):
        gx, _ = _xy(np.array([10.0 ** e]), np.array([0.0]), pfa_min, pd_min)
        out.append(f'<line x1="{gx[0]:.1f}" y1="{y1}" x2="{gx[0]:.1f}" y2="{y0}" stroke="#ddd"/>')
        out.append(f'<text x="{gx[0]:.1f}" y="{y0 + 16}" text-anchor="middle">1e{e}</text>')
    for j in range(6):
        v = pd_min + (1.0 - pd_min) * j / 5
        _, gy = _xy(np.array([1.0]), np.array([v]), pfa_min, pd_min)
        out.append(f'<line x1="{x0}" y1="{gy[0]:.1f}" x2="{x1}" y2="{gy[0]:.1f}" stroke="#ddd"/>')
        out.append(f'<text x="{x0 - 6}" y="{gy[0] + 4:.1f}" text-anchor="end">{v:.2f}</text>')
    out.append(f'<text x="{(x0 + x1) / 2:.1f}" y="{HEIGHT - 15}" text-anchor="middle">'
               'probability of false alarm</text>')
    out.append(f'<text x="18" y="{(y0 + y1) / 2:.1f}" text-anchor="middle" '
               f'transform="rotate(-90 18 {(y0 + y1) / 2:.1f})">probability of detection</text>')
    for j, (label, curve) in enumerate(curves.items()):
        color = COLORS[j % len(COLORS)]
        px, py = _xy(curve.pfa, curve.pd, pfa_min, pd_min)
        # staircase between successive operating points, deduplicated at 0.1 px
        sx = np.repeat(px, 2)[1:]
        sy = np.repeat(py, 2)[:-1]
        pts = np.round(np.column_stack([sx, sy]), 1)
        keep = np.ones(len(pts), dtype=bool)
        keep[1:] = np.any(pts[1:] != pts[:-1], axis=1)
        path = " ".join(f"{a:.1f},{b:.1f}" for a, b in pts[keep])
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{path}"/>')
        ly = y1 + 18 + 16 * j
        out.append(f'<line x1="{x1 - 150}" y1="{ly}" x2="{x1 - 125}" y2="{ly}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{x1 - 118}" y="{ly + 4}">{escape(str(label))}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
