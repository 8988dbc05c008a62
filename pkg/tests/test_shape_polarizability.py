import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wavebound.mobius_bounds import (
    Contrast,
    PoleError,
    bm_region,
    hs_interval,
    milton2d_region,
    region_contains,
)
from wavebound.shape_polarizability import (
    InclusionShape,
    PlasmonPoleError,
    ball_polarizability,
    coated_polarizability,
    ellipsoid_polarizability,
    shape_trace_polarizability,
    thin_shell_polarizability,
)

LOSSY = st.builds(
    complex,
    st.floats(-3.0, 3.0, allow_nan=False),
    st.floats(0.02, 3.0, allow_nan=False),
)


def test_ball_values():
    assert ball_polarizability(0.0, 3) == 0.0
    assert ball_polarizability(1.0, 3) == pytest.approx(0.75)
    assert hs_interval(Contrast(1.0, 3))[0] == pytest.approx(0.75)
    v = ball_polarizability(1j, 2)
    assert abs(v - (0.4 + 0.8j)) < 1e-14  # 2i/(2+i)


def test_ball_pole():
    with pytest.raises(PoleError):
        ball_polarizability(-3.0, 3)


def test_thin_shell_values():
    assert thin_shell_polarizability(0.0, 2) == 0.0
    assert thin_shell_polarizability(1.0, 2) == pytest.approx(0.75)
    with pytest.raises(PoleError):
        thin_shell_polarizability(-1.0, 3)


def test_ellipsoid_reduces_to_ball():
    for d in (2, 3):
        entries = ellipsoid_polarizability(0.7 + 0.3j, [1.0 / d] * d)
        assert abs(np.mean(entries) - ball_polarizability(0.7 + 0.3j, d)) < 1e-14


def test_ellipsoid_extreme_factors_attain_upper_end():
    entries = ellipsoid_polarizability(1.0, [0.0, 1.0])
    np.testing.assert_allclose(entries, [1.0, 0.5], rtol=1e-15)
    assert np.mean(entries) == pytest.approx(hs_interval(Contrast(1.0, 2))[1])


def test_ellipsoid_direct_value():
    entries = ellipsoid_polarizability(1j, [0.2, 0.8])
    assert abs(entries[0] - 1j / (1 + 0.2j)) < 1e-14
    assert abs(entries[1] - 1j / (1 + 0.8j)) < 1e-14


def test_ellipsoid_plasmon_pole_reports_index():
    chi = -2.0 + 0j  # 1 + 0.5*chi = 0
    with pytest.raises(PlasmonPoleError) as err:
        ellipsoid_polarizability(chi, [0.5, 0.5])
    assert err.value.index == 0


def test_ellipsoid_factor_validation():
    with pytest.raises(ValueError):
        ellipsoid_polarizability(1j, [0.2, 0.2])


@pytest.mark.parametrize("dim", [2, 3])
def test_coated_limits(dim):
    chi = 1j
    # zero core: solid ball
    assert abs(coated_polarizability(chi, 0.0, dim) - ball_polarizability(chi, dim)) < 1e-13
    # thin shell limit
    shell = thin_shell_polarizability(chi, dim)
    val = coated_polarizability(chi, 0.999, dim)
    assert abs(val - shell) < 1e-2 * (1 + abs(shell))
    # convergence is first order in the remaining thickness
    v1 = coated_polarizability(chi, 0.99, dim)
    v2 = coated_polarizability(chi, 0.999, dim)
    assert abs(v2 - shell) < 0.2 * abs(v1 - shell)


@pytest.mark.parametrize("dim", [2, 3])
@pytest.mark.parametrize("f", [0.1, 0.5, 0.9])
def test_coated_interpolates_inside_bounds(dim, f):
    chi = 0.5 + 0.7j
    val = coated_polarizability(chi, f, dim)
    assert region_contains(bm_region(Contrast(chi, dim)), val, tol=1e-9)


@given(LOSSY, st.sampled_from([2, 3]))
@settings(max_examples=200, deadline=None)
def test_every_shape_value_inside_bm_region(chi1, dim):
    region = bm_region(Contrast(chi1, dim))
    vals = [
        ball_polarizability(chi1, dim),
        thin_shell_polarizability(chi1, dim),
        coated_polarizability(chi1, 0.5, dim),
        complex(np.mean(ellipsoid_polarizability(
            chi1, [0.3, 0.7] if dim == 2 else [0.2, 0.3, 0.5]))),
    ]
    for v in vals:
        assert region_contains(region, v, tol=1e-9)
    if dim == 2:
        reg2 = milton2d_region(Contrast(chi1, 2))
        for v in vals:
            assert region_contains(reg2, v, tol=1e-9)


def test_corner_attainment_exact():
    chi = 0.8 + 1.3j
    for dim in (2, 3):
        ball = ball_polarizability(chi, dim)
        shell = thin_shell_polarizability(chi, dim)
        assert abs(ball - (chi - chi**2 / (chi + dim))) < 1e-12 * (1 + abs(ball))
        assert abs(shell - (chi - chi**2 / (dim * (1 + chi)))) < 1e-12 * (1 + abs(shell))


def test_ellipsoid_trace_moves_monotonically_between_corners():
    # interpolate factors from equal (ball) to extreme (plate); the distance
    # to the ball corner grows monotonically along the way
    chi = 0.5 + 0.5j
    ball = ball_polarizability(chi, 2)
    ds = []
    for s in np.linspace(0.0, 1.0, 11):
        f = [0.5 * (1 - s), 0.5 * (1 + s)]
        tr = complex(np.mean(ellipsoid_polarizability(chi, f)))
        ds.append(abs(tr - ball))
    assert all(b >= a - 1e-14 for a, b in zip(ds, ds[1:]))


def test_shape_dispatch():
    ball = InclusionShape("sphere_or_disk", 3)
    ell = InclusionShape("ellipse_or_ellipsoid", 2, depolarization_factors=(0.25, 0.75))
    coat = InclusionShape("coated_sphere_or_shell", 2, core_fraction=0.5)
    chi = 0.3 + 0.4j
    assert shape_trace_polarizability(ball, chi) == ball_polarizability(chi, 3)
    assert abs(shape_trace_polarizability(ell, chi)
               - np.mean(ellipsoid_polarizability(chi, [0.25, 0.75]))) < 1e-15
    assert shape_trace_polarizability(coat, chi) == coated_polarizability(chi, 0.5, 2)


def test_shape_validation():
    with pytest.raises(ValueError):
        InclusionShape("ellipse_or_ellipsoid", 2, depolarization_factors=(0.2, 0.3))
    with pytest.raises(ValueError):
        InclusionShape("coated_sphere_or_shell", 3, core_fraction=1.0)
    with pytest.raises(ValueError):
        InclusionShape("hyperboloid", 3)
