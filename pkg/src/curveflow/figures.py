"""Matplotlib renderers for the report paths of the CLI.

Every figure is written as SVG next to the delimited data it depicts, and
the output is deterministic: fixed hash salt, no embedded creation date,
data-derived limits only.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

matplotlib.rcParams["svg.hashsalt"] = "curveflow"
matplotlib.rcParams["path.simplify"] = False

_SVG_META = {"Date": None}

__all__ = [
    "render_curve",
    "render_curve_family",
    "render_stability_region",
    "render_filmstrip",
]


def _save(fig, path):
    fig.savefig(path, format="svg", metadata=_SVG_META)
    plt.close(fig)


def render_curve(curve, path, title: str = ""):
    """Single closed curve, equal aspect, closed polyline."""
    pts = np.vstack([curve.points, curve.points[:1]])
    fig, ax = plt.subplots(figsize=(4.0, 4.0))
    ax.plot(pts[:, 0], pts[:, 1], "-", color="#1f4e79", lw=1.0)
    ax.set_aspect("equal")
    ax.set_xticks([])
    ax.set_yticks([])
    if title:
        ax.set_title(title, fontsize=9)
    for side in ("top", "right", "left", "bottom"):
        ax.spines[side].set_visible(False)
    _save(fig, path)


def render_curve_family(curves, labels, path):
    """Row of curves at a common scale, one panel each."""
    n = len(curves)
    fig, axes = plt.subplots(1, n, figsize=(2.2 * n, 2.4))
    if n == 1:
        axes = [axes]
    for ax, curve, label in zip(axes, curves, labels):
        pts = np.vstack([curve.points, curve.points[:1]])
        ax.plot(pts[:, 0], pts[:, 1], "-", color="#1f4e79", lw=0.8)
        ax.set_aspect("equal")
        ax.set_xticks([])
        ax.set_yticks([])
        ax.set_title(label, fontsize=8)
        for side in ("top", "right", "left", "bottom"):
            ax.spines[side].set_visible(False)
    fig.tight_layout()
    _save(fig, path)


def render_stability_region(c_values, rows, path, guides=(1.0 / 9.0, 1.0, 1.5),
                            title: str = ""):
    """Horizontal stable segment per omega over the scanned c range.

    rows: mapping omega -> {"thresholds": Thresholds, "stable_mask": [...]}
    as produced by the stability grid.  Dashed vertical guides mark the
    canonical parameter thresholds.
    """
    c_lo, c_hi = c_values[0], c_values[-1]
    omegas = sorted(rows)
    fig, ax = plt.subplots(figsize=(6.4, 0.24 * len(omegas) + 1.2))
    for omega in omegas:
        th = rows[omega]["thresholds"]
        lo = max(th.c_minus_float, c_lo)
        hi = min(th.c_plus_float, c_hi)
        if hi > lo:
            ax.hlines(omega, lo, hi, color="0.45", lw=3.0)
    for g in guides:
        if c_lo <= g <= c_hi:
            ax.axvline(g, color="0.2", ls="--", lw=0.7)
    ax.set_xlim(c_lo, c_hi)
    ax.set_ylim(omegas[0] - 0.8, omegas[-1] + 0.8)
    ax.set_xlabel("c")
    ax.set_ylabel("winding")
    if title:
        ax.set_title(title, fontsize=9)
    fig.tight_layout()
    _save(fig, path)


def render_filmstrip(snapshots, path, rescale: bool = True):
    """Row of curve snapshots along a run, optionally rescaled to unit size."""
    n = len(snapshots)
    if n == 0:
        raise ValueError("no snapshots to render")
    fig, axes = plt.subplots(1, n, figsize=(1.8 * n, 2.0))
    if n == 1:
        axes = [axes]
    for ax, (t, curve) in zip(axes, snapshots):
        pts = curve.points - curve.points.mean(axis=0)
        if rescale:
            scale = np.abs(pts).max()
            if scale > 0:
                pts = pts / scale
        closed = np.vstack([pts, pts[:1]])
        ax.plot(closed[:, 0], closed[:, 1], "-", color="#1f4e79", lw=0.8)
        ax.set_aspect("equal")
        ax.set_xticks([])
        ax.set_yticks([])
        ax.set_title(f"t={t:.3g}", fontsize=7)
        for side in ("top", "right", "left", "bottom"):
            ax.spines[side].set_visible(False)
    fig.tight_layout()
    _save(fig, path)
