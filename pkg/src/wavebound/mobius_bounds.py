"""Bound regions for the complex polarizability of a lossy inclusion.

Implements, for a two-phase medium with unit matrix permittivity and
inclusion susceptibility chi1 = eps1 - 1:

* the Hashin-Shtrikman interval for real chi1 (trace of the polarizability
  tensor per d*volume),
* the Bergman-Milton lens for complex chi1, bounded by two circular arcs
  that are fractional-linear images of the parameter interval [0, 1],
* Milton's tighter two-dimensional region, bounded by a circular arc and
  a straight chord through the same two corner points,
* the corresponding finite-volume-fraction regions for the effective
  permittivity of a dilute isotropic suspension,
* the fractional-linear transforms between complex effective bulk/shear
  moduli and their Y-tensors, together with the dilute polarizability form.

Membership tests represent every bounding curve by its full circle (or
line) and pick the admissible side with an interior witness, which makes
the geometry robust against arc orientation and against degeneration of
the lens onto a line segment.

Note on the two-dimensional region: the straight bounding curve is the
chord between the disk corner 2*chi1/(2+chi1) and the shell corner
chi1*(2+chi1)/(2*(1+chi1)).  Its parametrisation is fixed by the dilute
limit of the finite-volume-fraction curves, which makes both endpoints
shared with the circular-arc curve.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Contrast",
    "MobiusArc",
    "BoundRegion",
    "RealInterval",
    "PointRegion",
    "ElasticModuliPair",
    "PoleError",
    "NonRealContrastError",
    "DegenerateRegionError",
    "UnsupportedDimensionError",
    "SingularTransformError",
    "LossSignError",
    "hs_interval",
    "bm_arcs",
    "bm_region",
    "milton2d_curves",
    "milton2d_region",
    "bm_composite_arcs",
    "milton_composite_arcs",
    "bm_composite_region",
    "polarizability_region",
    "region_contains",
    "region_margin",
    "elastic_y_transform",
    "effective_from_y",
    "polarizability_to_y",
    "sample_arcs_csv_rows",
]

ABS_TOL_FLOOR = 1e-14


class PoleError(ValueError):
    """A formula was evaluated at a pole of its fractional-linear map."""


class NonRealContrastError(ValueError):
    """An operation restricted to real susceptibility received a complex one."""


class DegenerateRegionError(ValueError):
    """Real susceptibility: the lens collapses; use hs_interval instead."""


class UnsupportedDimensionError(ValueError):
    """Operation defined only for a specific spatial dimension."""


class SingularTransformError(ValueError):
    """Y-transform hit a vanishing denominator or zero contrast."""


class LossSignError(ValueError):
    """Input violates the configured passivity sign convention."""


@dataclass(frozen=True)
class Contrast:
    """Inclusion susceptibility chi1 = eps1 - 1 and spatial dimension d."""

    chi1: complex
    dim: int
    loss_convention: str = "exp(-iwt)"  # or "exp(+iwt)" / "unchecked"

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise UnsupportedDimensionError(f"dim must be 2 or 3, got {self.dim}")
        if self.loss_convention == "exp(-iwt)" and complex(self.chi1).imag < 0:
            raise LossSignError("Im(chi1) < 0 is active gain under exp(-iwt); rejected")
        if self.loss_convention == "exp(+iwt)" and complex(self.chi1).imag > 0:
            raise LossSignError("Im(chi1) > 0 is active gain under exp(+iwt); rejected")

    @property
    def eps1(self) -> complex:
        return complex(self.chi1) + 1.0

    @property
    def is_real(self) -> bool:
        return complex(self.chi1).imag == 0.0


@dataclass(frozen=True)
class MobiusArc:
    """Image of the real interval [param_lo, param_hi] under t -> (a t + b)/(c t + d)."""

    coeff_a: complex
    coeff_b: complex
    coeff_c: complex
    coeff_d: complex
    param_lo: float = 0.0
    param_hi: float = 1.0

    def __post_init__(self):
        det = self.coeff_a * self.coeff_d - self.coeff_b * self.coeff_c
        scale = max(abs(self.coeff_a), abs(self.coeff_b), abs(self.coeff_c), abs(self.coeff_d))
        if abs(det) <= 1e-14 * scale**2:
            raise ValueError("degenerate fractional-linear map (a d - b c ~ 0)")
        if self.param_hi <= self.param_lo:
            raise ValueError("param_hi must exceed param_lo")
        pole = self.pole()
        for t in (self.param_lo, self.param_hi):
            if pole is not None and abs(t - pole) <= 1e-14 * (1 + abs(pole)):
                raise PoleError(f"map has a pole at an endpoint t={t}")

    @classmethod
    def through(cls, samples: list[tuple[float, complex]], param_lo: float = 0.0,
                param_hi: float = 1.0) -> "MobiusArc":
        """The unique fractional-linear map through three (t, z) samples."""
        if len(samples) != 3:
            raise ValueError("exactly three samples determine the map")
        rows = []
        for t, z in samples:
            rows.append([t, 1.0, -z * t, -z])
        _, _, vh = np.linalg.svd(np.asarray(rows, dtype=complex))
        a, b, c, d = vh[-1].conj()
        return cls(a, b, c, d, param_lo, param_hi)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        den = self.coeff_c * t + self.coeff_d
        if np.any(np.abs(den) <= 1e-300):
            raise PoleError("evaluation at a pole of the map")
        return (self.coeff_a * t + self.coeff_b) / den

    def pole(self) -> float | None:
        """Real parameter at which the map blows up, if any."""
        if self.coeff_c == 0:
            return None
        p = -self.coeff_d / self.coeff_c
        if abs(p.imag) <= 1e-12 * (1 + abs(p)):
            return float(p.real)
        return None

    @property
    def passes_through_infinity(self) -> bool:
        p = self.pole()
        return p is not None and self.param_lo <= p <= self.param_hi

    @property
    def endpoints(self) -> tuple[complex, complex]:
        return complex(self(self.param_lo)), complex(self(self.param_hi))

    def samples(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        t = np.linspace(self.param_lo, self.param_hi, n)
        return t, self(t)


def _circumcircle(z1: complex, z2: complex, z3: complex):
    """Circle (center, radius) through three points, or None if collinear."""
    ax, ay = z1.real, z1.imag
    bx, by = z2.real, z2.imag
    cx, cy = z3.real, z3.imag
    det = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    span = max(abs(z1 - z2), abs(z2 - z3), abs(z1 - z3), 1e-300)
    if abs(det) <= 1e-12 * span**2:
        return None
    sq = (abs(z1) ** 2, abs(z2) ** 2, abs(z3) ** 2)
    ux = (sq[0] * (by - cy) + sq[1] * (cy - ay) + sq[2] * (ay - by)) / det
    uy = (sq[0] * (cx - bx) + sq[1] * (ax - cx) + sq[2] * (bx - ax)) / det
    center = ux + 1j * uy
    return center, abs(z1 - center)


@dataclass(frozen=True)
class _Constraint:
    """Half-plane / disk constraint, or a two-sided band when the witness
    sits on the curve itself (degenerate lens)."""

    kind: str          # "circle" or "line"
    anchor: complex    # circle center, or a point on the line
    aux: complex       # radius (real) for circles, unit direction for lines
    side: int          # +1 inside/left, -1 outside/right, 0 on-curve band

    def margin(self, z: complex) -> float:
        if self.kind == "circle":
            s = abs(z - self.anchor) - self.aux.real
        else:
            s = ((z - self.anchor) / self.aux).imag
        if self.side == 0:
            return -abs(s)
        return -s * self.side if self.kind == "circle" else s * self.side

    @classmethod
    def from_curve(cls, p0: complex, pm: complex, p1: complex, witness: complex) -> "_Constraint":
        scale = 1.0 + max(abs(p0), abs(pm), abs(p1))
        circ = _circumcircle(p0, pm, p1)
        if circ is None:
            direction = (p1 - p0) / abs(p1 - p0)
            s = ((witness - p0) / direction).imag
            side = 0 if abs(s) <= 1e-11 * scale else (1 if s > 0 else -1)
            return cls("line", p0, direction, side)
        center, radius = circ
        s = abs(witness - center) - radius
        side = 0 if abs(s) <= 1e-11 * scale else (1 if s < 0 else -1)
        return cls("circle", center, radius + 0j, side)


@dataclass(frozen=True)
class BoundRegion:
    """Lens bounded by two arcs sharing endpoints, with optional extra cuts.

    Membership is the intersection of the witness-side constraints of each
    bounding curve's full circle (or line).
    """

    arc1: MobiusArc
    arc2: MobiusArc
    interior_witness: complex
    extra_constraints: tuple[_Constraint, ...] = ()
    endpoint_tol: float = 1e-12
    _constraints: tuple[_Constraint, ...] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        cons = []
        for arc in (self.arc1, self.arc2):
            t0, t1 = arc.param_lo, arc.param_hi
            p0, pm, p1 = arc(t0), arc(0.5 * (t0 + t1)), arc(t1)
            cons.append(_Constraint.from_curve(p0, pm, p1, self.interior_witness))
        cons.extend(self.extra_constraints)
        object.__setattr__(self, "_constraints", tuple(cons))
        scale = 1.0 + abs(self.interior_witness)
        if self.margin(self.interior_witness) < -1e-10 * scale:
            raise ValueError("interior witness fails its own region constraints")

    def margin(self, z: complex) -> float:
        """Signed distance to the region: positive inside, negative outside."""
        return min(c.margin(complex(z)) for c in self._constraints)

    def contains(self, z: complex, tol: float = 1e-9) -> bool:
        eff = max(tol * (1.0 + abs(z)), ABS_TOL_FLOOR)
        return self.margin(z) >= -eff

    @property
    def corners(self) -> tuple[complex, complex]:
        return self.arc1.endpoints


@dataclass(frozen=True)
class RealInterval:
    """Degenerate (real susceptibility) region: a segment of the real axis."""

    lo: float
    hi: float

    def margin(self, z: complex) -> float:
        z = complex(z)
        return min(z.real - self.lo, self.hi - z.real, -abs(z.imag))

    def contains(self, z: complex, tol: float = 1e-9) -> bool:
        eff = max(tol * (1.0 + abs(z)), ABS_TOL_FLOOR)
        return self.margin(z) >= -eff


@dataclass(frozen=True)
class PointRegion:
    """Fully degenerate region (no contrast, or pure phase-1 composite)."""

    value: complex

    def margin(self, z: complex) -> float:
        return -abs(complex(z) - self.value)

    def contains(self, z: complex, tol: float = 1e-9) -> bool:
        eff = max(tol * (1.0 + abs(z)), ABS_TOL_FLOOR)
        return self.margin(z) >= -eff


# ---------------------------------------------------------------------------
# Trace-polarizability bounds (dilute limit), per d*|Omega|
# ---------------------------------------------------------------------------

def hs_interval(contrast: Contrast) -> tuple[float, float]:
    """Hashin-Shtrikman interval for Tr(alpha)/(d |Omega|) at real chi1.

    Returns the two attainable ends sorted ascending: the solid ball/disk
    gives d*chi1/(chi1+d) and the vanishingly thin shell gives
    chi1 - chi1^2/(d (1+chi1)).
    """
    chi = complex(contrast.chi1)
    if chi.imag != 0.0:
        raise NonRealContrastError("hs_interval requires real chi1")
    x, d = chi.real, contrast.dim
    if x == -d or x == -1.0:
        raise PoleError("chi1 at a pole of the bound formulas (-1 or -d)")
    if x <= -1.0:
        raise ValueError("chi1 must exceed -1 (positive permittivity)")
    ball = x - x * x / (x + d)
    shell = x - x * x / (d * (1.0 + x))
    return (ball, shell) if ball <= shell else (shell, ball)


def _bm_point1(chi: complex, d: int, v) -> complex:
    return chi - chi**2 / (1 + chi + (d - 1) / (v / (1 + chi) + (1 - v)))


def _bm_point2(chi: complex, d: int, w) -> complex:
    return chi - chi**2 / (1 + chi + (d - 1) * (w * chi + 1))


def bm_arcs(contrast: Contrast) -> tuple[MobiusArc, MobiusArc]:
    """The two Bergman-Milton bounding arcs for Tr(alpha)/(d |Omega|)."""
    chi, d = complex(contrast.chi1), contrast.dim
    ts = (0.0, 0.5, 1.0)
    arc1 = MobiusArc.through([(t, _bm_point1(chi, d, t)) for t in ts])
    arc2 = MobiusArc.through([(t, _bm_point2(chi, d, t)) for t in ts])
    return arc1, arc2


def bm_region(contrast: Contrast) -> BoundRegion:
    """Bergman-Milton lens for complex chi1 (strictly lossy).

    The arcs share both endpoints: the ball corner chi1 - chi1^2/(chi1+d)
    and the shell corner chi1 - chi1^2/(d(1+chi1)).
    """
    if contrast.is_real:
        raise DegenerateRegionError("real chi1: lens degenerates, use hs_interval")
    arc1, arc2 = bm_arcs(contrast)
    witness = 0.5 * (complex(arc1(0.5)) + complex(arc2(0.5)))
    region = BoundRegion(arc1, arc2, witness)
    _check_shared_endpoints(arc1, arc2)
    return region


def _check_shared_endpoints(arc1: MobiusArc, arc2: MobiusArc) -> None:
    for pa, pb in zip(arc1.endpoints, arc2.endpoints):
        if abs(pa - pb) > 1e-12 * (1.0 + abs(pa)):
            raise ValueError("bounding arcs fail to share an endpoint")


def milton2d_curves(contrast: Contrast) -> tuple[MobiusArc, MobiusArc]:
    """Milton's two-dimensional bound curves for Tr(alpha)/(2 |Omega|).

    The first is a circular arc from the disk corner (v=0) to the shell
    corner (v=1); the second is the straight chord back, linear in w.  Both
    parametrisations are the dilute limit of the finite-volume-fraction
    curves, so the endpoints pair up exactly.
    """
    if contrast.dim != 2:
        raise UnsupportedDimensionError("the tightened curves exist only for dim=2")
    chi = complex(contrast.chi1)
    arc = MobiusArc(
        coeff_a=0j, coeff_b=2 * chi * (2 + chi),
        coeff_c=-chi**2, coeff_d=(2 + chi) ** 2,
    )
    shell = chi * (2 + chi) / (2 * (1 + chi))
    slope = -chi**3 / (2 * (chi + 1) * (chi + 2))
    line = MobiusArc(coeff_a=slope, coeff_b=shell, coeff_c=0j, coeff_d=1.0 + 0j)
    return arc, line


def milton2d_region(contrast: Contrast) -> BoundRegion | RealInterval:
    """Two-dimensional tightened region: BM lens cut by the Milton curves.

    Degenerates to the HS interval for real chi1, and to a segment of a line
    when the two Milton curves become collinear (e.g. eps1 on the unit
    circle of the imaginary axis).
    """
    if contrast.is_real:
        lo, hi = hs_interval(contrast)
        return RealInterval(lo, hi)
    arc1, arc2 = bm_arcs(contrast)
    m1, m2 = milton2d_curves(contrast)
    witness = 0.5 * (complex(m1(0.5)) + complex(m2(0.5)))
    extra = tuple(
        _Constraint.from_curve(complex(c(0.0)), complex(c(0.5)), complex(c(1.0)), witness)
        for c in (m1, m2)
    )
    return BoundRegion(arc1, arc2, witness, extra_constraints=extra)


def polarizability_region(contrast: Contrast, milton: bool = False):
    """Region object for membership tests; routes real chi1 to the interval."""
    if contrast.is_real:
        lo, hi = hs_interval(contrast)
        return RealInterval(lo, hi)
    if milton:
        if contrast.dim != 2:
            raise UnsupportedDimensionError("milton=True requires dim=2")
        return milton2d_region(contrast)
    return bm_region(contrast)


def region_contains(region, z: complex, tol: float = 1e-9) -> bool:
    """True if z lies in the closed region, expanded by tol*(1+|z|)."""
    return region.contains(z, tol)


def region_margin(region, z: complex) -> float:
    """Signed distance into the region (positive strictly inside)."""
    return region.margin(z)


# ---------------------------------------------------------------------------
# Finite volume fraction: effective permittivity of a dilute suspension
# ---------------------------------------------------------------------------

def _composite_point1(eps1: complex, p: float, d: int, v) -> complex:
    den = (1 - p) * eps1 + p + (d - 1) / (v / eps1 + (1 - v))
    return 1 + p * (eps1 - 1) - p * (1 - p) * (eps1 - 1) ** 2 / den


def _composite_point2(eps1: complex, p: float, d: int, w) -> complex:
    den = (1 - p) * eps1 + p + (d - 1) * (w * eps1 + (1 - w))
    return 1 + p * (eps1 - 1) - p * (1 - p) * (eps1 - 1) ** 2 / den


def bm_composite_arcs(eps1: complex, p: float, dim: int) -> tuple[MobiusArc, MobiusArc]:
    """Bergman-Milton arcs bounding the effective permittivity at fraction p."""
    _validate_fraction(p)
    ts = (0.0, 0.5, 1.0)
    a1 = MobiusArc.through([(t, _composite_point1(eps1, p, dim, t)) for t in ts])
    a2 = MobiusArc.through([(t, _composite_point2(eps1, p, dim, t)) for t in ts])
    return a1, a2


def milton_composite_arcs(eps1: complex, p: float) -> tuple[MobiusArc, MobiusArc]:
    """Milton's two-dimensional effective-permittivity curves at fraction p."""
    _validate_fraction(p)
    e = complex(eps1)

    def c1(v):
        num = (p * e + 1 - p + e) * (e + 1) - (1 - p) * v * (e - 1) ** 2
        den = ((1 - p) * e + p + 1) * (e + 1) - (1 - p) * v * (e - 1) ** 2
        return num / den

    def c2(w):
        num = e * ((p * e + 2 - p) * (e + 1) - p * w * (e - 1) ** 2)
        den = ((1 - p) * e + p + e) * (e + 1) - p * w * (e - 1) ** 2
        return num / den

    ts = (0.0, 0.5, 1.0)
    return (
        MobiusArc.through([(t, c1(t)) for t in ts]),
        MobiusArc.through([(t, c2(t)) for t in ts]),
    )


def bm_composite_region(eps1: complex, p: float, dim: int):
    """Region containing the effective permittivity of the dilute composite.

    Degenerate inputs (no contrast, or p in {0, 1}) collapse to a point;
    real eps1 collapses to the real HS interval.
    """
    _validate_fraction(p)
    e = complex(eps1)
    if e == 1.0 or p in (0.0, 1.0):
        return PointRegion(1.0 + p * (e - 1.0))
    if e.imag == 0.0:
        vals = []
        for t in np.linspace(0.0, 1.0, 21):
            vals.append(_composite_point1(e, p, dim, t).real)
            vals.append(_composite_point2(e, p, dim, t).real)
        return RealInterval(min(vals), max(vals))
    a1, a2 = bm_composite_arcs(e, p, dim)
    witness = 0.5 * (complex(a1(0.5)) + complex(a2(0.5)))
    return BoundRegion(a1, a2, witness)


def milton_composite_region(eps1: complex, p: float):
    """Two-dimensional tightened composite region (BM lens cut by Milton curves)."""
    base = bm_composite_region(eps1, p, 2)
    if not isinstance(base, BoundRegion):
        return base
    m1, m2 = milton_composite_arcs(eps1, p)
    witness = 0.5 * (complex(m1(0.5)) + complex(m2(0.5)))
    extra = tuple(
        _Constraint.from_curve(complex(c(0.0)), complex(c(0.5)), complex(c(1.0)), witness)
        for c in (m1, m2)
    )
    return BoundRegion(base.arc1, base.arc2, witness, extra_constraints=extra)


def _validate_fraction(p: float) -> None:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"volume fraction must lie in [0, 1], got {p}")


# ---------------------------------------------------------------------------
# Elastic moduli: Y-transforms and the dilute polarizability limit
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ElasticModuliPair:
    """Complex inclusion moduli against a real matrix at volume fraction p."""

    kappa1: complex
    mu1: complex
    kappa0: float
    mu0: float
    volume_fraction: float
    loss_convention: str = "exp(-iwt)"

    def __post_init__(self):
        if self.kappa0 <= 0 or self.mu0 <= 0:
            raise ValueError("matrix moduli must be positive")
        _validate_fraction(self.volume_fraction)
        if self.loss_convention == "exp(-iwt)":
            if complex(self.kappa1).imag > 0 or complex(self.mu1).imag > 0:
                raise LossSignError("passive moduli need Im(kappa1) <= 0, Im(mu1) <= 0 under exp(-iwt)")
        elif self.loss_convention == "exp(+iwt)":
            if complex(self.kappa1).imag < 0 or complex(self.mu1).imag < 0:
                raise LossSignError("passive moduli need Im >= 0 under exp(+iwt)")


def _y_transform(m1: complex, m0: float, p: float, m_star: complex) -> complex:
    den = p * m1 + (1 - p) * m0 - m_star
    if abs(den) <= 1e-300:
        raise SingularTransformError("effective modulus at the transform pole")
    return -(1 - p) * m1 - p * m0 + p * (1 - p) * (m1 - m0) ** 2 / den


def _y_inverse(m1: complex, m0: float, p: float, y: complex) -> complex:
    den = y + (1 - p) * m1 + p * m0
    if abs(den) <= 1e-300:
        raise SingularTransformError("y value at the inverse-transform pole")
    return p * m1 + (1 - p) * m0 - p * (1 - p) * (m1 - m0) ** 2 / den


def elastic_y_transform(moduli: ElasticModuliPair, kappa_star: complex,
                        mu_star: complex) -> tuple[complex, complex]:
    """Y-transforms (y_kappa, y_mu) of complex effective bulk/shear moduli."""
    _require_contrast(moduli)
    p = moduli.volume_fraction
    return (
        _y_transform(complex(moduli.kappa1), moduli.kappa0, p, complex(kappa_star)),
        _y_transform(complex(moduli.mu1), moduli.mu0, p, complex(mu_star)),
    )


def effective_from_y(moduli: ElasticModuliPair, y_kappa: complex,
                     y_mu: complex) -> tuple[complex, complex]:
    """Inverse map: (y_kappa, y_mu) back to effective (kappa*, mu*)."""
    _require_contrast(moduli)
    p = moduli.volume_fraction
    return (
        _y_inverse(complex(moduli.kappa1), moduli.kappa0, p, complex(y_kappa)),
        _y_inverse(complex(moduli.mu1), moduli.mu0, p, complex(y_mu)),
    )


def polarizability_to_y(alpha_kappa_per_volume: complex, alpha_mu_per_volume: complex,
                        moduli: ElasticModuliPair) -> tuple[complex, complex]:
    """Dilute-limit Y values from average bulk/shear polarizabilities (per volume)."""

    def one(m1: complex, m0: float, a: complex) -> complex:
        den = m1 - m0 * (1 + a)
        if abs(den) <= 1e-300:
            raise SingularTransformError("polarizability at the dilute-transform pole")
        return -m1 + (m1 - m0) ** 2 / den

    return (
        one(complex(moduli.kappa1), moduli.kappa0, complex(alpha_kappa_per_volume)),
        one(complex(moduli.mu1), moduli.mu0, complex(alpha_mu_per_volume)),
    )


def _require_contrast(moduli: ElasticModuliPair) -> None:
    if complex(moduli.kappa1) == moduli.kappa0 or complex(moduli.mu1) == moduli.mu0:
        raise SingularTransformError("zero contrast (kappa1=kappa0 or mu1=mu0) is degenerate")


# ---------------------------------------------------------------------------
# Export helper
# ---------------------------------------------------------------------------

def sample_arcs_csv_rows(arcs: dict[str, MobiusArc], n: int = 201):
    """Rows (param, re, im, curve_id) sampling each arc for CSV export."""
    rows = []
    for name, arc in arcs.items():
        t, z = arc.samples(n)
        for ti, zi in zip(t, z):
            rows.append((float(ti), float(zi.real), float(zi.imag), name))
    return rows
