"""SVG figures for limit shapes, frozen boundaries and sampled profiles."""
from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .core import Partition, profile_of  # noqa: E402
from .limitshape import ShapeGrid, shape_W  # noqa: E402


def _finish(fig, ax, path, title, equal=True):
    ax.set_title(title, fontsize=9)
    if equal:
        ax.set_aspect("equal", adjustable="datalim")
    fig.tight_layout()
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg")
    plt.close(fig)


def profile_xy(lam: Partition, N: int, scale: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    bp = profile_of(lam, N).breakpoints
    u = np.array([float(a) for a, _ in bp]) / scale
    v = np.array([float(b) for _, b in bp]) / scale
    # extend with |u| on both sides so the overlay reads as a whole curve
    pad = max(1.0, float(np.abs(u).max()) * 0.2)
    return (np.concatenate([[u[0] - pad], u, [u[-1] + pad]]),
            np.concatenate([[abs(u[0] - pad)], v, [abs(u[-1] + pad)]]))


def plot_shape(sg: ShapeGrid | None, path, samples: Sequence[tuple[Partition, int]] = (),
               curve: np.ndarray | None = None, title: str = "") -> None:
    """W(u) with |u| and any number of sampled profiles scaled by 1/N."""
    fig, ax = plt.subplots(figsize=(6, 4))
    if curve is None and sg is not None:
        curve = np.array(shape_W(sg))
    lo, hi = -1.5, 1.5
    if curve is not None and len(curve):
        ok = np.isfinite(curve).all(axis=1)
        c = curve[ok][np.argsort(curve[ok][:, 0])]
        ax.plot(c[:, 0], c[:, 1], color="C3", lw=1.5, label="limit shape")
        lo, hi = min(lo, c[:, 0].min() - 0.5), max(hi, c[:, 0].max() + 0.5)
    for lam, N in samples:
        u, v = profile_xy(lam, N, N)
        ax.plot(u, v, color="C0", lw=0.8, alpha=0.8, label=f"sample N={N}")
        lo, hi = min(lo, u.min()), max(hi, u.max())
    u = np.linspace(lo, hi, 3)
    ax.plot(u, np.abs(u), color="0.6", lw=0.7, ls="--")
    ax.set_xlabel("u")
    ax.set_ylabel("W")
    if samples or curve is not None:
        ax.legend(fontsize=7, loc="upper center")
    _finish(fig, ax, path, title)


def plot_boundary(sg: ShapeGrid, path, title: str = "") -> None:
    """Frozen boundary in the (xi, tau) plane with the cross-section curve L(tau)."""
    fig, ax = plt.subplots(figsize=(5, 4))
    if sg.boundary:
        z = np.array([b.z for b in sg.boundary])
        xi = np.array([b.xi for b in sg.boundary])
        tau = np.array([b.tau for b in sg.boundary])
        # break the polyline where the parameter jumps across a pole or a filtered gap
        gaps = np.nonzero(np.abs(np.diff(xi)) + np.abs(np.diff(tau)) > 0.05)[0] + 1
        for k, (a, b) in enumerate(zip(np.r_[0, gaps], np.r_[gaps, len(z)])):
            ax.plot(xi[a:b], tau[a:b], color="k", lw=1, label="frozen boundary" if k == 0 else None)
    if sg.L is not None:
        ax.plot(sg.L, sg.tau_grid, color="C3", lw=1.2, label="L(tau)")
    ax.set_xlim(0, sg.xi_max)
    ax.set_ylim(0, 1)
    ax.set_xlabel("xi")
    ax.set_ylabel("tau")
    ax.legend(fontsize=7)
    _finish(fig, ax, path, title, equal=False)


def plot_height(sg: ShapeGrid, path, title: str = "") -> None:
    fig, ax = plt.subplots(figsize=(5, 4))
    cs = ax.contourf(sg.xi_grid, sg.tau_grid, sg.H, levels=21, cmap="viridis")
    fig.colorbar(cs, ax=ax, shrink=0.8)
    ax.set_xlabel("xi")
    ax.set_ylabel("tau")
    ax.set_title(title, fontsize=9)
    fig.tight_layout()
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg")
    plt.close(fig)
