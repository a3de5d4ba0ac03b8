"""Minimal SVG rendering of point clouds and optimization snapshots.

Output is deterministic text: fixed float formatting, label colors assigned
by sorted label order, a shared bounding box across all frames of a
trajectory so the animation does not jump.
"""

from __future__ import annotations

import numpy as np

__all__ = ["render_points_svg", "render_trajectory_frames"]

_PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
    "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
)


def _bbox(frames, margin_frac=0.06):
    pts = np.vstack([f[:, :2] if f.shape[1] >= 2 else np.column_stack([f[:, 0], np.zeros(len(f))]) for f in frames])
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    span = np.maximum(hi - lo, 1e-9)
    pad = margin_frac * float(span.max())
    return lo[0] - pad, lo[1] - pad, hi[0] + pad, hi[1] + pad


def _color_map(labels):
    if labels is None:
        return None
    uniq = sorted(set(labels))
    return {lab: _PALETTE[i % len(_PALETTE)] for i, lab in enumerate(uniq)}


def _frame_svg(points, labels, colors, box, width=480) -> str:
    x0, y0, x1, y1 = box
    w, h = x1 - x0, y1 - y0
    height = int(round(width * h / w))
    r = 0.008 * max(w, h)
    pts = np.asarray(points, dtype=np.float64)
    if pts.shape[1] < 2:
        pts = np.column_stack([pts[:, 0], np.zeros(len(pts))])
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="{x0:.6f} {y0:.6f} {w:.6f} {h:.6f}">',
        f'<rect x="{x0:.6f}" y="{y0:.6f}" width="{w:.6f}" height="{h:.6f}" fill="white"/>',
    ]
    for k in range(len(pts)):
        fill = colors[labels[k]] if colors is not None else _PALETTE[0]
        # svg y grows downward; mirror inside the same box
        cy = (y0 + y1) - pts[k, 1]
        lines.append(f'<circle cx="{pts[k, 0]:.6f}" cy="{cy:.6f}" r="{r:.6f}" fill="{fill}"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def render_points_svg(points, labels=None, width=480) -> str:
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if labels is not None and len(labels) != len(points):
        raise ValueError(f"expected {len(points)} labels, got {len(labels)}")
    box = _bbox([points])
    return _frame_svg(points, labels, _color_map(labels), box, width)


def render_trajectory_frames(records, labels=None, width=480) -> list[tuple[int, str]]:
    """One SVG per snapshot record, all sharing one bounding box."""
    snaps = [(d["step"], np.asarray(d["points"], dtype=np.float64)) for d in records if d.get("points") is not None]
    if not snaps:
        raise ValueError("trajectory has no point snapshots to render")
    if labels is not None and any(len(labels) != len(p) for _, p in snaps):
        raise ValueError("label count does not match snapshot point count")
    box = _bbox([p for _, p in snaps])
    colors = _color_map(labels)
    return [(step, _frame_svg(pts, labels, colors, box, width)) for step, pts in snaps]
