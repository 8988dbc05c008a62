import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wavebound.mobius_bounds import (
    BoundRegion,
    Contrast,
    DegenerateRegionError,
    ElasticModuliPair,
    LossSignError,
    MobiusArc,
    NonRealContrastError,
    PointRegion,
    PoleError,
    RealInterval,
    SingularTransformError,
    UnsupportedDimensionError,
    bm_arcs,
    bm_composite_arcs,
    bm_composite_region,
    bm_region,
    effective_from_y,
    elastic_y_transform,
    hs_interval,
    milton2d_curves,
    milton2d_region,
    milton_composite_region,
    polarizability_region,
    polarizability_to_y,
    region_contains,
    region_margin,
)
from wavebound.shape_polarizability import ball_polarizability, thin_shell_polarizability

LOSSY = st.builds(
    complex,
    st.floats(-3.0, 3.0, allow_nan=False),
    st.floats(0.02, 3.0, allow_nan=False),
)


# ---------------------------------------------------------------------- arcs

def test_arc_through_three_points_roundtrip():
    pts = [(0.0, 1 + 2j), (0.5, 2 - 1j), (1.0, -0.5 + 0.25j)]
    arc = MobiusArc.through(pts)
    for t, z in pts:
        assert abs(arc(t) - z) < 1e-12 * (1 + abs(z))


def test_arc_pole_detection():
    arc = MobiusArc(1.0, 0.0, 1.0, -2.0)  # pole at t=2, outside [0,1]
    assert arc.pole() == pytest.approx(2.0)
    assert not arc.passes_through_infinity
    arc2 = MobiusArc(1.0, 0.0, 1.0, -0.5, param_lo=0.0, param_hi=1.0)
    assert arc2.passes_through_infinity
    with pytest.raises(PoleError):
        arc2(0.5)


def test_degenerate_map_rejected():
    with pytest.raises(ValueError):
        MobiusArc(1.0, 2.0, 2.0, 4.0)  # ad - bc = 0


@given(LOSSY, st.sampled_from([2, 3]))
@settings(max_examples=60, deadline=None)
def test_cross_ratio_of_arc_samples_is_real(chi1, dim):
    # four points of a fractional-linear image of the real line lie on a circle
    arc1, arc2 = bm_arcs(Contrast(chi1, dim))
    for arc in (arc1, arc2):
        z = arc(np.array([0.1, 0.35, 0.6, 0.95]))
        cr = (z[0] - z[2]) * (z[1] - z[3]) / ((z[0] - z[3]) * (z[1] - z[2]))
        assert abs(cr.imag) < 1e-10 * (1 + abs(cr))


# ------------------------------------------------------------------ interval

def test_hs_interval_no_contrast():
    assert hs_interval(Contrast(0.0, 3)) == (0.0, 0.0)


def test_hs_interval_examples():
    lo, hi = hs_interval(Contrast(1.0, 3))
    assert lo == pytest.approx(0.75, abs=1e-15)
    assert hi == pytest.approx(1.0 - 1.0 / 6.0, abs=1e-15)
    # sphere closed form d*chi/(chi+d) is the lower end for positive contrast
    assert lo == pytest.approx(3.0 * 1.0 / (1.0 + 3.0), abs=1e-15)
    lo2, hi2 = hs_interval(Contrast(1.0, 2))
    assert lo2 == pytest.approx(2.0 / 3.0, abs=1e-15)
    assert hi2 == pytest.approx(0.75, abs=1e-15)


def test_hs_interval_errors():
    with pytest.raises(NonRealContrastError):
        hs_interval(Contrast(1.0 + 0.1j, 3))
    with pytest.raises((PoleError, ValueError)):
        hs_interval(Contrast(-1.0, 3))


def test_hs_interval_negative_contrast_sorted():
    lo, hi = hs_interval(Contrast(-0.5, 3))
    assert lo < hi


# ----------------------------------------------------------------- BM region

def test_bm_arc_corner_value():
    arc1, arc2 = bm_arcs(Contrast(1j, 3))
    ball = complex(arc1(0.0))
    assert abs(ball - (0.3 + 0.9j)) < 1e-12  # 1j + 1/(3+1j)
    assert abs(complex(arc2(0.0)) - ball) < 1e-12


@given(LOSSY, st.sampled_from([2, 3]))
@settings(max_examples=80, deadline=None)
def test_bm_endpoints_shared(chi1, dim):
    arc1, arc2 = bm_arcs(Contrast(chi1, dim))
    for pa, pb in zip(arc1.endpoints, arc2.endpoints):
        assert abs(pa - pb) <= 1e-12 * (1 + abs(pa))


def test_bm_region_requires_loss():
    with pytest.raises(DegenerateRegionError):
        bm_region(Contrast(1.0, 3))
    with pytest.raises(LossSignError):
        Contrast(1.0 - 0.5j, 3)


def test_bm_region_membership_basics():
    region = bm_region(Contrast(1j, 3))
    assert region_contains(region, complex(region.arc1(0.5)), tol=1e-9)  # boundary point
    assert not region_contains(region, 10 + 10j)
    # the ball value is a lens corner
    assert region_contains(region, ball_polarizability(1j, 3), tol=1e-9)


def test_bm_midpoint_inside_circle_fit_oracle():
    # midpoint of one arc lies inside the circle through the other arc's samples
    chi = 0.5 + 0.5j
    arc1, arc2 = bm_arcs(Contrast(chi, 2))
    z0, zm, z1 = complex(arc2(0.0)), complex(arc2(0.5)), complex(arc2(1.0))
    # brute-force circumcircle
    ax, ay, bx, by, cx, cy = z0.real, z0.imag, zm.real, zm.imag, z1.real, z1.imag
    d = 2 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    ux = ((ax**2 + ay**2) * (by - cy) + (bx**2 + by**2) * (cy - ay) + (cx**2 + cy**2) * (ay - by)) / d
    uy = ((ax**2 + ay**2) * (cx - bx) + (bx**2 + by**2) * (ax - cx) + (cx**2 + cy**2) * (bx - ax)) / d
    center, radius = ux + 1j * uy, abs(z0 - (ux + 1j * uy))
    mid1 = complex(arc1(0.5))
    assert abs(mid1 - center) < radius
    assert region_contains(bm_region(Contrast(chi, 2)), mid1, tol=1e-9)


@given(LOSSY, st.sampled_from([2, 3]))
@settings(max_examples=40, deadline=None)
def test_corner_attainment(chi1, dim):
    region = bm_region(Contrast(chi1, dim))
    assert region_contains(region, ball_polarizability(chi1, dim), tol=1e-9)
    assert region_contains(region, thin_shell_polarizability(chi1, dim), tol=1e-9)


def test_hs_consistency_small_loss():
    # arcs converge pointwise to the real interval as the loss vanishes
    chi = 1.0 + 1e-6j
    arc1, arc2 = bm_arcs(Contrast(chi, 3))
    lo, hi = hs_interval(Contrast(1.0, 3))
    for arc in (arc1, arc2):
        _, z = arc.samples(33)
        assert np.max(np.abs(z.imag)) < 1e-5
        assert np.all(z.real > lo - 1e-5) and np.all(z.real < hi + 1e-5)


# -------------------------------------------------------------- Milton (d=2)

def test_milton_curves_real_contrast_endpoints():
    m1, m2 = milton2d_curves(Contrast(1.0, 2))
    assert complex(m1(0.0)) == pytest.approx(2.0 / 3.0, abs=1e-14)
    assert complex(m1(1.0)) == pytest.approx(0.75, abs=1e-14)
    # straight curve starts where the arc ends and runs back to the disk corner
    assert abs(complex(m2(0.0)) - complex(m1(1.0))) < 1e-14
    assert abs(complex(m2(1.0)) - complex(m1(0.0))) < 1e-14


def test_milton_curves_dim3_rejected():
    with pytest.raises(UnsupportedDimensionError):
        milton2d_curves(Contrast(1j, 3))


@given(LOSSY)
@settings(max_examples=60, deadline=None)
def test_milton_shared_endpoints(chi1):
    m1, m2 = milton2d_curves(Contrast(chi1, 2))
    shell = chi1 * (2 + chi1) / (2 * (1 + chi1))
    assert abs(complex(m2(0.0)) - shell) < 1e-12 * (1 + abs(shell))
    assert abs(complex(m1(1.0)) - complex(m2(0.0))) < 1e-12 * (1 + abs(shell))
    assert abs(complex(m1(0.0)) - complex(m2(1.0))) < 1e-12 * (1 + abs(shell))


@given(LOSSY)
@settings(max_examples=60, deadline=None)
def test_milton_tightening_curves_inside_bm(chi1):
    # every sampled point of the tightened curves lies in the BM lens
    region = bm_region(Contrast(chi1, 2))
    m1, m2 = milton2d_curves(Contrast(chi1, 2))
    for curve in (m1, m2):
        _, z = curve.samples(101)
        for zz in z:
            assert region_contains(region, zz, tol=1e-9)


def test_milton_region_degenerate_imaginary_unit():
    # eps1 = i: both curves collapse onto the imaginary axis and the region
    # becomes the segment [i, 2i]
    reg = milton2d_region(Contrast(-1.0 + 1.0j, 2))
    assert region_contains(reg, 1.5j, tol=1e-9)
    assert not region_contains(reg, 2.5j, tol=1e-6)     # beyond the disk corner
    assert not region_contains(reg, 0.2 + 1.5j, tol=1e-6)  # off the axis
    assert region_contains(reg, 1e-4 + 1.5j, tol=1e-3)  # within stated tolerance


def test_milton_region_real_routes_to_interval():
    reg = milton2d_region(Contrast(2.0, 2))
    assert isinstance(reg, RealInterval)
    lo, hi = hs_interval(Contrast(2.0, 2))
    assert reg.contains(0.5 * (lo + hi))
    assert not reg.contains(hi + 0.1)


def test_polarizability_region_dispatch():
    assert isinstance(polarizability_region(Contrast(1.0, 3)), RealInterval)
    assert isinstance(polarizability_region(Contrast(1j, 3)), BoundRegion)
    assert isinstance(polarizability_region(Contrast(1j, 2), milton=True), BoundRegion)


# ------------------------------------------------------------- composite BM

def test_composite_degenerate_points():
    reg = bm_composite_region(1.0, 0.3, 3)
    assert isinstance(reg, PointRegion) and reg.value == 1.0
    reg2 = bm_composite_region(2.0, 1.0, 3)
    assert isinstance(reg2, PointRegion) and reg2.value == 2.0


@pytest.mark.parametrize("p", [1e-3, 1e-4])
def test_composite_dilute_limit_matches_polarizability_arcs(p):
    eps1 = 1.0 + 1.0j
    comp1, comp2 = bm_composite_arcs(eps1, p, 3)
    pol1, pol2 = bm_arcs(Contrast(eps1 - 1.0, 3))
    ts = np.linspace(0.0, 1.0, 9)
    for comp, pol in ((comp1, pol1), (comp2, pol2)):
        scaled = (comp(ts) - 1.0) / p
        err = np.max(np.abs(scaled - pol(ts)))
        assert err < 5.0 * p  # first-order agreement in the fill fraction


def test_composite_region_contains_dilute_value():
    eps1, p = 1.5 + 0.8j, 0.2
    reg = bm_composite_region(eps1, p, 3)
    z = complex(bm_composite_arcs(eps1, p, 3)[0](0.4))
    assert region_contains(reg, z, tol=1e-9)
    million = milton_composite_region(eps1, p)
    zin = complex(bm_composite_arcs(eps1, p, 2)[0](0.0))
    assert region_contains(million, zin, tol=1e-6)


def test_composite_fraction_validation():
    with pytest.raises(ValueError):
        bm_composite_region(1 + 1j, 1.2, 3)


# ------------------------------------------------------------- elastic maps

def _moduli(p=0.25):
    return ElasticModuliPair(2.0 - 0.2j, 1.0 - 0.1j, 1.0, 0.5, p)


def test_elastic_roundtrip():
    rng = np.random.default_rng(7)
    mod = _moduli()
    for _ in range(20):
        y_k = complex(rng.normal(), rng.normal())
        y_m = complex(rng.normal(), rng.normal())
        ks, ms = effective_from_y(mod, y_k, y_m)
        back = elastic_y_transform(mod, ks, ms)
        assert abs(back[0] - y_k) < 1e-12 * (1 + abs(y_k))
        assert abs(back[1] - y_m) < 1e-12 * (1 + abs(y_m))


def test_elastic_direct_value():
    # independent evaluation of the transform at a frozen input
    mod = ElasticModuliPair(2.0 - 0.2j, 1.0 - 0.05j, 1.0, 1.0, 0.25)
    k1, k0, p, ks = 2.0 - 0.2j, 1.0, 0.25, 1.2 - 0.05j
    expected = -(1 - p) * k1 - p * k0 + p * (1 - p) * (k1 - k0) ** 2 / (p * k1 + (1 - p) * k0 - ks)
    y_k, _ = elastic_y_transform(mod, ks, 0.9 - 0.02j)
    assert abs(y_k - expected) < 1e-14 * (1 + abs(expected))


def test_elastic_zero_contrast_rejected():
    mod = ElasticModuliPair(1.0 + 0.0j, 0.5 + 0.0j, 1.0, 0.5, 0.3)
    with pytest.raises(SingularTransformError):
        elastic_y_transform(mod, 1.1, 0.55)


def test_elastic_loss_sign_enforced():
    with pytest.raises(LossSignError):
        ElasticModuliPair(2.0 + 0.2j, 1.0, 1.0, 0.5, 0.3)
    ElasticModuliPair(2.0 + 0.2j, 1.0, 1.0, 0.5, 0.3, loss_convention="unchecked")


def test_polarizability_to_y_collapse():
    mod = _moduli()
    y_k, y_m = polarizability_to_y(0.0, 0.0, mod)
    assert abs(y_k - (-mod.kappa0)) < 1e-14
    assert abs(y_m - (-mod.mu0)) < 1e-14


def test_polarizability_to_y_direct_value():
    mod = ElasticModuliPair(2.0 - 0.2j, 1.0 - 0.1j, 1.0, 0.5, 0.25)
    a_k = 0.4 - 0.1j
    expected = -(2.0 - 0.2j) + (2.0 - 0.2j - 1.0) ** 2 / ((2.0 - 0.2j) - 1.0 * (1 + a_k))
    y_k, _ = polarizability_to_y(a_k, 0.1 + 0.0j, mod)
    assert abs(y_k - expected) < 1e-14 * (1 + abs(expected))


@pytest.mark.parametrize("p", [1e-4])
def test_polarizability_to_y_dilute_consistency(p):
    # effective moduli built from the dilute law match the direct transform to O(p)
    kappa1, mu1 = 2.0 - 0.2j, 1.2 - 0.15j
    kappa0, mu0 = 1.0, 0.7
    a_k, a_m = 0.4 - 0.1j, 0.3 - 0.05j
    mod = ElasticModuliPair(kappa1, mu1, kappa0, mu0, p)
    ks = (1 + p * a_k) * kappa0
    ms = (1 + p * a_m) * mu0
    y_direct = elastic_y_transform(mod, ks, ms)
    y_dilute = polarizability_to_y(a_k, a_m, mod)
    for a, b in zip(y_direct, y_dilute):
        assert abs(a - b) < 50 * p * (1 + abs(b))


# ------------------------------------------------------------------- margins

def test_region_margin_sign():
    region = bm_region(Contrast(1j, 3))
    inside = region.interior_witness
    assert region_margin(region, inside) > 0
    assert region_margin(region, 10 + 10j) < 0
