"""Closed-form quasistatic polarizabilities of canonical inclusions.

These serve as attainment witnesses for the bound regions (the solid ball
or disk and the vanishingly thin shell sit exactly on the lens corners)
and as oracles for the pixel-grid solver.  The surrounding medium has unit
permittivity; chi1 = eps1 - 1 is the inclusion susceptibility.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mobius_bounds import PoleError, UnsupportedDimensionError

__all__ = [
    "InclusionShape",
    "PlasmonPoleError",
    "ball_polarizability",
    "ellipsoid_polarizability",
    "thin_shell_polarizability",
    "coated_polarizability",
    "shape_trace_polarizability",
]


class PlasmonPoleError(ValueError):
    """A depolarization factor hit the resonance 1 + L*chi1 = 0."""

    def __init__(self, index: int, factor: float):
        self.index = index
        self.factor = factor
        super().__init__(f"resonant denominator at factor index {index} (L={factor})")


@dataclass(frozen=True)
class InclusionShape:
    """Canonical shape selector for trace-polarizability evaluation."""

    kind: str  # "sphere_or_disk" | "ellipse_or_ellipsoid" | "coated_sphere_or_shell"
    dim: int
    depolarization_factors: tuple[float, ...] | None = None
    core_fraction: float | None = None

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise UnsupportedDimensionError(f"dim must be 2 or 3, got {self.dim}")
        if self.kind == "ellipse_or_ellipsoid":
            f = self.depolarization_factors
            if f is None or len(f) != self.dim:
                raise ValueError("need one depolarization factor per dimension")
            if any(not 0.0 <= x <= 1.0 for x in f):
                raise ValueError("depolarization factors must lie in [0, 1]")
            if abs(sum(f) - 1.0) > 1e-12:
                raise ValueError("depolarization factors must sum to 1")
        elif self.kind == "coated_sphere_or_shell":
            if self.core_fraction is None or not 0.0 <= self.core_fraction < 1.0:
                raise ValueError("core_fraction must lie in [0, 1)")
        elif self.kind != "sphere_or_disk":
            raise ValueError(f"unknown shape kind {self.kind!r}")


def ball_polarizability(chi1: complex, dim: int) -> complex:
    """Tr(alpha)/(d |Omega|) of a solid ball (d=3) or disk (d=2): d chi1/(chi1+d)."""
    chi = complex(chi1)
    if dim not in (2, 3):
        raise UnsupportedDimensionError(f"dim must be 2 or 3, got {dim}")
    if chi == -dim:
        raise PoleError("chi1 = -d is the ball resonance")
    return dim * chi / (chi + dim)


def ellipsoid_polarizability(chi1: complex, factors) -> np.ndarray:
    """Diagonal entries of alpha/|Omega| for an ellipse/ellipsoid.

    Entry i is chi1/(1 + L_i chi1); the interior field is uniform, so the
    closed form is exact.  The trace average reduces to the ball value when
    every factor equals 1/d.
    """
    chi = complex(chi1)
    f = np.asarray(factors, dtype=float)
    if f.ndim != 1 or len(f) not in (2, 3):
        raise UnsupportedDimensionError("need 2 or 3 depolarization factors")
    if np.any(f < 0) or np.any(f > 1) or abs(f.sum() - 1.0) > 1e-12:
        raise ValueError("depolarization factors must lie in [0,1] and sum to 1")
    den = 1.0 + f * chi
    small = np.abs(den) <= 1e-300
    if np.any(small):
        i = int(np.argmax(small))
        raise PlasmonPoleError(i, float(f[i]))
    return chi / den


def thin_shell_polarizability(chi1: complex, dim: int) -> complex:
    """Tr(alpha)/(d |Omega|) of a vanishingly thin shell: chi1 - chi1^2/(d(1+chi1))."""
    chi = complex(chi1)
    if dim not in (2, 3):
        raise UnsupportedDimensionError(f"dim must be 2 or 3, got {dim}")
    if chi == -1:
        raise PoleError("chi1 = -1 is the thin-shell resonance")
    return chi - chi**2 / (dim * (1.0 + chi))


def coated_polarizability(chi1: complex, core_fraction: float, dim: int) -> complex:
    """Tr(alpha)/(d |Omega|) of a concentric shell of phase-1 material.

    The core (volume fraction ``core_fraction`` of the outer ball) is matrix
    material; only the annulus carries the susceptibility.  |Omega| is the
    annulus volume.  Solves the two-interface transmission problem for the
    dipole potential:

        core     phi = -A r cos(theta)
        shell    phi = (-B r + C r^{-(d-1)}) cos(theta)
        outside  phi = (-r + D r^{-(d-1)}) cos(theta)

    with continuity of phi and of eps * dphi/dr at both interfaces.  The
    value returned is d*D/(1 - core_fraction) for unit outer radius, which
    converges to the thin-shell closed form as core_fraction -> 1 and to
    the ball value as core_fraction -> 0.
    """
    chi = complex(chi1)
    if dim not in (2, 3):
        raise UnsupportedDimensionError(f"dim must be 2 or 3, got {dim}")
    if not 0.0 <= core_fraction < 1.0:
        raise ValueError("core_fraction must lie in [0, 1)")
    if core_fraction == 0.0:
        return ball_polarizability(chi, dim)
    eps1 = chi + 1.0
    q = dim - 1  # exponent of the decaying dipole solution
    rc = core_fraction ** (1.0 / dim)  # core radius for unit outer radius

    # unknowns (A, B, C, D); applied field has unit strength
    mat = np.array(
        [
            [rc, -rc, rc**-q, 0.0],
            [1.0, -eps1, -eps1 * q * rc ** (-q - 1), 0.0],
            [0.0, 1.0, -1.0, 1.0],
            [0.0, eps1, eps1 * q, -q],
        ],
        dtype=complex,
    )
    rhs = np.array([0.0, 0.0, 1.0, 1.0], dtype=complex)
    try:
        A, B, C, D = np.linalg.solve(mat, rhs)
    except np.linalg.LinAlgError as exc:  # resonant shell
        raise PoleError(f"coated-shape transmission problem singular: {exc}") from exc
    return dim * D / (1.0 - core_fraction)


def shape_trace_polarizability(shape: InclusionShape, chi1: complex) -> complex:
    """Tr(alpha)/(d |Omega|) for any canonical shape."""
    if shape.kind == "sphere_or_disk":
        return ball_polarizability(chi1, shape.dim)
    if shape.kind == "ellipse_or_ellipsoid":
        entries = ellipsoid_polarizability(chi1, shape.depolarization_factors)
        return complex(np.mean(entries))
    return coated_polarizability(chi1, shape.core_fraction, shape.dim)
