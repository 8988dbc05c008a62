"""Matplotlib renderers for the CLI report path.

Every figure is written to a file next to the delimited output; nothing is
shown interactively.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = [
    "region_figure",
    "farfield_figure",
    "bound_margin_figure",
    "wrap_region_figure",
    "mask_figure",
]

_POINT_STYLE = dict(marker="o", linestyle="none", markersize=5, zorder=5)


def _save(fig, path: str) -> str:
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def region_figure(path: str, curves: dict, points=None, title: str = "",
                  xlabel: str = "Re", ylabel: str = "Im") -> str:
    """Curves = {label: (param array, complex samples)}; points = [(label, z)]."""
    fig, ax = plt.subplots(figsize=(5.0, 4.2))
    for label, (_, z) in curves.items():
        z = np.asarray(z)
        ax.plot(z.real, z.imag, label=label, linewidth=1.4)
    for label, z in points or []:
        ax.plot([complex(z).real], [complex(z).imag], label=label, **_POINT_STYLE)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    return _save(fig, path)


def farfield_figure(path: str, mu: np.ndarray, values: np.ndarray,
                    title: str = "far-field amplitude") -> str:
    fig, ax = plt.subplots(figsize=(5.0, 4.0))
    ax.plot(mu, np.abs(values), label="|amplitude|", linewidth=1.4)
    ax.plot(mu, values.real, label="Re", linewidth=0.9, alpha=0.7)
    ax.plot(mu, values.imag, label="Im", linewidth=0.9, alpha=0.7)
    ax.set_xlabel("cos(scattering angle)")
    ax.set_ylabel("amplitude")
    ax.set_title(title)
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    return _save(fig, path)


def bound_margin_figure(path: str, x: np.ndarray, lhs: np.ndarray, rhs: np.ndarray,
                        xlabel: str = "k0 a") -> str:
    fig, ax = plt.subplots(figsize=(5.0, 4.0))
    ax.plot(x, lhs, label="scaled backscatter", linewidth=1.4)
    finite = np.isfinite(rhs)
    if finite.any():
        ax.plot(np.asarray(x)[finite], np.asarray(rhs)[finite], label="bound",
                linewidth=1.4, linestyle="--")
    ax.set_xlabel(xlabel)
    ax.set_ylabel("dimensionless amplitude")
    ax.set_title("backscatter bound vs exact solve")
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    return _save(fig, path)


def wrap_region_figure(path: str, vertices: np.ndarray, value: complex,
                       title: str = "wrap-around region") -> str:
    fig, ax = plt.subplots(figsize=(4.6, 4.6))
    verts = np.concatenate([vertices, vertices[:1]])
    ax.plot(verts.real, verts.imag, linewidth=1.4, label="half-plane boundary")
    ax.fill(verts.real, verts.imag, alpha=0.15)
    ax.plot([complex(value).real], [complex(value).imag], label="exact solve", **_POINT_STYLE)
    ax.set_xlabel("Re")
    ax.set_ylabel("Im")
    ax.set_title(title)
    ax.set_aspect("equal")
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    return _save(fig, path)


def mask_figure(path: str, mask: np.ndarray, title: str = "inclusion mask") -> str:
    fig, ax = plt.subplots(figsize=(4.2, 4.2))
    if mask.ndim == 3:
        mask = mask[mask.shape[0] // 2]
        title += " (mid slice)"
    ax.imshow(mask, origin="lower", cmap="gray_r", interpolation="nearest")
    ax.set_title(title)
    ax.set_xticks([])
    ax.set_yticks([])
    return _save(fig, path)
