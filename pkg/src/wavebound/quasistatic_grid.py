"""Spectral periodic-cell solver for the polarizability of a pixelated inclusion.

The inclusion is a sharp indicator chi(x) on an n^d grid (n a power of two)
embedded in a periodic unit cell of matrix material.  The cell problem

    d(x) = eps(x) e(x),   e = e0 + grad(phi),  div(d) = 0,  phi periodic

is written as a Lippmann-Schwinger fixed point around the matrix medium,

    (I + G chi (eps1 - eps0)) e_s = -G [chi (eps1 - eps0) e0],

where G projects onto mean-zero curl-free fields (Fourier symbol
xi xi^T / (eps0 |xi|^2)).  The projected system is solved with GMRES: the
plain damped iteration stalls or diverges once Re(eps1) <= 0 (the purely
imaginary permittivity sweep needs exactly that quadrant), while GMRES on
the same operator is deterministic and converges for every permittivity
off the discrete singular segment.

The dipole column per applied unit field is (1/|Omega|) * integral over
the inclusion of (eps1 - eps0) e(x), and a periodic cell only approximates
the isolated inclusion to first order in the fill fraction, so production
estimates are extrapolated linearly in the fill to zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse.linalg import LinearOperator, gmres

__all__ = [
    "PixelInclusion",
    "PolarizabilityEstimate",
    "GridConvergenceError",
    "disk_inclusion",
    "square_inclusion",
    "ellipse_inclusion",
    "annulus_inclusion",
    "mask_from_file",
    "solve_dipole",
    "solve_polarizability",
    "extrapolate_dilute",
]


class GridConvergenceError(RuntimeError):
    """GMRES failed to reach the requested residual; carries the history."""

    def __init__(self, message: str, residual_history):
        super().__init__(message)
        self.residual_history = list(residual_history)


@dataclass(frozen=True)
class PixelInclusion:
    """Boolean indicator grid of the inclusion inside a periodic cell."""

    mask: np.ndarray
    cell_length: float = 1.0

    def __post_init__(self):
        m = np.asarray(self.mask, dtype=bool)
        object.__setattr__(self, "mask", m)
        if m.ndim not in (2, 3):
            raise ValueError("mask must be 2-D or 3-D")
        n = m.shape[0]
        if any(s != n for s in m.shape):
            raise ValueError("mask must be square/cubic")
        if n & (n - 1) != 0 or n < 4:
            raise ValueError("grid size must be a power of two (>= 4)")
        if not m.any():
            raise ValueError("mask has no inclusion pixels")
        guard = n // 4
        idx = np.nonzero(m)
        for ax in range(m.ndim):
            if idx[ax].min() < guard or idx[ax].max() >= n - guard:
                raise ValueError(f"inclusion must keep a guard margin of {guard} pixels")

    @property
    def dim(self) -> int:
        return self.mask.ndim

    @property
    def n(self) -> int:
        return self.mask.shape[0]

    @property
    def fill_fraction(self) -> float:
        return float(self.mask.mean())

    @property
    def volume(self) -> float:
        return self.fill_fraction * self.cell_length**self.dim


@dataclass(frozen=True)
class PolarizabilityEstimate:
    """alpha/|Omega| matrix with the residual and extrapolation bookkeeping."""

    alpha_over_volume: np.ndarray  # (d, d) complex
    residual: float
    fill_fraction: float
    extrapolation_info: dict | None = None

    @property
    def trace_per_dim(self) -> complex:
        d = self.alpha_over_volume.shape[0]
        return complex(np.trace(self.alpha_over_volume)) / d


# ---------------------------------------------------------------------------
# Procedural masks
# ---------------------------------------------------------------------------

def _centered_coords(n: int, dim: int):
    ax = (np.arange(n) + 0.5) / n - 0.5
    return np.meshgrid(*([ax] * dim), indexing="ij")


def disk_inclusion(n: int, fill_fraction: float, dim: int = 2) -> PixelInclusion:
    """Rasterized disk (d=2) or ball (d=3) of the requested fill fraction."""
    coords = _centered_coords(n, dim)
    r2 = sum(c**2 for c in coords)
    if dim == 2:
        radius = np.sqrt(fill_fraction / np.pi)
    else:
        radius = (fill_fraction * 3.0 / (4.0 * np.pi)) ** (1.0 / 3.0)
    return PixelInclusion(r2 <= radius**2)


def square_inclusion(n: int, fill_fraction: float, dim: int = 2) -> PixelInclusion:
    """Axis-aligned square (d=2) or cube (d=3)."""
    coords = _centered_coords(n, dim)
    half = 0.5 * fill_fraction ** (1.0 / dim)
    mask = np.ones_like(coords[0], dtype=bool)
    for c in coords:
        mask &= np.abs(c) <= half
    return PixelInclusion(mask)


def ellipse_inclusion(n: int, fill_fraction: float, aspect: float, dim: int = 2) -> PixelInclusion:
    """Ellipse with semi-axis ratio ``aspect`` = a_x/a_y (d=2 only)."""
    if dim != 2:
        raise ValueError("ellipse mask implemented for d=2")
    x, y = _centered_coords(n, 2)
    ay = np.sqrt(fill_fraction / (np.pi * aspect))
    ax_ = aspect * ay
    return PixelInclusion((x / ax_) ** 2 + (y / ay) ** 2 <= 1.0)


def annulus_inclusion(n: int, fill_fraction: float, core_fraction: float) -> PixelInclusion:
    """Annulus (d=2) whose solid area is ``fill_fraction`` of the cell."""
    x, y = _centered_coords(n, 2)
    outer2 = fill_fraction / (np.pi * (1.0 - core_fraction))
    r2 = x**2 + y**2
    return PixelInclusion((r2 <= outer2) & (r2 > core_fraction * outer2))


def mask_from_file(path: str) -> PixelInclusion:
    """Load a mask from .npy (bool/0-1 array) or plain-text PBM (P1)."""
    if path.endswith(".npy"):
        return PixelInclusion(np.load(path) != 0)
    with open(path, "r", encoding="ascii") as fh:
        tokens = []
        for line in fh:
            line = line.split("#", 1)[0]
            tokens.extend(line.split())
    if not tokens or tokens[0] != "P1":
        raise ValueError("only plain PBM (P1) or .npy masks are supported")
    w, h = int(tokens[1]), int(tokens[2])
    bits = np.array([int(t) for t in tokens[3 : 3 + w * h]], dtype=int)
    if bits.size != w * h:
        raise ValueError("PBM pixel count does not match header")
    return PixelInclusion(bits.reshape(h, w) != 0)


# ---------------------------------------------------------------------------
# Spectral projection and the GMRES solve
# ---------------------------------------------------------------------------

def _spectral_projector(n: int, dim: int):
    """Fourier symbols for the mean-zero curl-free projection.

    The unpaired Nyquist frequency of an even grid has no mirror partner,
    which would break the reflection symmetry of the discrete operator
    (and with it the exact symmetry of the polarizability matrix), so the
    projection is zeroed on every mode carrying a Nyquist component.
    """
    k = np.fft.fftfreq(n, d=1.0 / n)
    grids = np.meshgrid(*([k] * dim), indexing="ij")
    k2 = sum(g**2 for g in grids)
    k2.flat[0] = 1.0
    keep = np.ones_like(k2, dtype=bool)
    for g in grids:
        keep &= np.abs(g) != n // 2
    keep.flat[0] = False
    return grids, k2, keep


def _apply_gamma(tau: np.ndarray, grids, k2, keep, eps0: complex) -> np.ndarray:
    axes = tuple(range(1, tau.ndim))
    th = np.fft.fftn(tau, axes=axes)
    dot = sum(g * th[i] for i, g in enumerate(grids))
    dot *= keep
    proj = np.stack([g * dot for g in grids]) / k2
    return np.fft.ifftn(proj, axes=axes) / eps0


def solve_dipole(
    inclusion: PixelInclusion,
    eps1: complex,
    applied_direction,
    eps0: complex = 1.0,
    rtol: float = 1e-10,
    restart: int = 200,
    max_restarts: int = 20,
):
    """Dipole column of alpha/|Omega| for a unit applied field.

    Returns ``(column, info)`` where ``column`` is the (d,) complex dipole
    per unit inclusion volume and ``info`` is a dict with the final true
    relative residual and the GMRES residual history.
    """
    if not np.isfinite(complex(eps1)):
        raise ValueError("eps1 must be finite")
    mask = inclusion.mask
    dim, n = inclusion.dim, inclusion.n
    e0dir = np.asarray(applied_direction, dtype=float)
    if e0dir.shape != (dim,):
        raise ValueError(f"applied_direction must have {dim} components")
    nrm = np.linalg.norm(e0dir)
    if nrm == 0:
        raise ValueError("applied_direction must be nonzero")
    e0dir = e0dir / nrm

    chi = mask.astype(float)
    p = inclusion.fill_fraction
    de = complex(eps1) - complex(eps0)
    e0 = np.stack([np.full(mask.shape, c, dtype=complex) for c in e0dir])

    if de == 0:
        return np.zeros(dim, dtype=complex), {"residual": 0.0, "history": []}

    grids, k2, keep = _spectral_projector(n, dim)

    def apply_op(vec):
        e = vec.reshape((dim,) + mask.shape)
        return (e + _apply_gamma(de * chi * e, grids, k2, keep, eps0)).ravel()

    rhs = -_apply_gamma(de * chi * e0, grids, k2, keep, eps0).ravel()
    size = dim * n**dim
    op = LinearOperator((size, size), matvec=apply_op, dtype=complex)
    history: list[float] = []
    sol, code = gmres(
        op,
        rhs,
        rtol=rtol,
        atol=0.0,
        restart=min(restart, size),
        maxiter=max_restarts,
        callback=lambda r: history.append(float(r)),
        callback_type="pr_norm",
    )
    resid = float(np.linalg.norm(apply_op(sol) - rhs) / np.linalg.norm(rhs))
    if code != 0 or resid > 10 * rtol:
        raise GridConvergenceError(
            f"cell solve stalled at relative residual {resid:.3e} (target {rtol:.1e}); "
            "eps1 may sit on the singular segment of the periodic operator",
            history,
        )
    es = sol.reshape((dim,) + mask.shape)
    etot = e0 + es
    column = np.array([de * (chi * etot[i]).mean() / p for i in range(dim)])
    return column, {"residual": resid, "history": history}


def solve_polarizability(
    inclusion: PixelInclusion,
    eps1: complex,
    eps0: complex = 1.0,
    rtol: float = 1e-10,
) -> PolarizabilityEstimate:
    """Full alpha/|Omega| matrix (one cell solve per coordinate direction)."""
    dim = inclusion.dim
    cols = []
    worst = 0.0
    for j in range(dim):
        direction = np.zeros(dim)
        direction[j] = 1.0
        col, info = solve_dipole(inclusion, eps1, direction, eps0=eps0, rtol=rtol)
        cols.append(col)
        worst = max(worst, info["residual"])
    alpha = np.stack(cols, axis=1)
    return PolarizabilityEstimate(alpha, worst, inclusion.fill_fraction)


def extrapolate_dilute(estimates) -> PolarizabilityEstimate:
    """Linear-in-fill extrapolation of periodic-cell estimates to zero fill.

    Needs two or more estimates whose fill fractions decrease by at least a
    factor of two; uses the two smallest fills and reports the extrapolation
    increment (relative to the smallest-fill value) as an error proxy.
    """
    ests = list(estimates)
    if len(ests) < 2:
        raise ValueError("need at least two fill fractions")
    fills = [e.fill_fraction for e in ests]
    if any(f2 >= f1 for f1, f2 in zip(fills, fills[1:])):
        raise ValueError("fill fractions must decrease monotonically")
    if any(f1 / f2 < 2.0 for f1, f2 in zip(fills, fills[1:])):
        raise ValueError("fill fractions must be at least a factor 2 apart")
    a1, a2 = ests[-2].alpha_over_volume, ests[-1].alpha_over_volume
    p1, p2 = fills[-2], fills[-1]
    alpha0 = a2 + (a2 - a1) * (p2 / (p1 - p2))
    increment = float(np.max(np.abs(alpha0 - a2)))
    scale = float(np.max(np.abs(alpha0)))
    info = {
        "fills": fills,
        "increment": increment,
        "relative_increment": increment / scale if scale > 0 else 0.0,
    }
    return PolarizabilityEstimate(
        alpha0,
        max(e.residual for e in ests),
        0.0,
        extrapolation_info=info,
    )
