import math

import numpy as np
import pytest
from numpy.polynomial.legendre import leggauss

from wavebound.acoustic_mie import (
    AcousticMedia,
    BranchAmbiguityError,
    PlaneWave,
    StationaryPhaseError,
    TailNotConvergedError,
    backscatter_bound,
    ball_phase_integral,
    default_l_max,
    far_field,
    far_field_mu,
    interior_pressure,
    nondimensional_backscatter,
    optical_theorem_residual,
    oscillatory_asymptotic,
    oscillatory_quadrature,
    power_budget,
    rayleigh_far_field,
    scattered_pressure,
    scattered_radial_velocity,
    scattering_bilinear,
    solve_sphere,
    wrap_around_region,
)
from wavebound.specfun import spherical_h1_all, spherical_jn_all

WAVE = PlaneWave(1.0 + 0.0j)


def make_media(k0a, rho_ratio=1.3 * (1 + 0.05j), kap_ratio=1.5 - 0.2j,
               rho0=1.2, kap0=0.8, a=1.0):
    omega = (k0a / a) * math.sqrt(kap0 / rho0)
    return AcousticMedia(rho0, kap0, rho_ratio * rho0, kap_ratio * kap0, omega)


# ------------------------------------------------------------------- solves

def test_media_validation():
    with pytest.raises(ValueError):
        AcousticMedia(1.0, 1.0, 1.0 - 0.1j, 1.0, 1.0)  # gain density
    with pytest.raises(ValueError):
        AcousticMedia(1.0, 1.0, 1.0, 1.0 + 0.1j, 1.0)  # gain modulus
    with pytest.raises(ValueError):
        AcousticMedia(-1.0, 1.0, 1.0, 1.0, 1.0)


def test_branch_ambiguity():
    media = AcousticMedia(1.0, 1.0, -2.0 + 0.0j, 1.0, 1.0)
    with pytest.raises(BranchAmbiguityError):
        _ = media.k1


def test_interior_branch_sign():
    media = make_media(1.0)
    assert media.k1.imag >= 0


def test_no_contrast_all_zero():
    media = AcousticMedia(1.2, 0.8, 1.2, 0.8, 1.0)
    sol = solve_sphere(media, WAVE, 1.0)
    assert np.all(sol.a_coeffs == 0)
    assert far_field_mu(sol, 1.0) == 0
    assert optical_theorem_residual(sol) == 0.0
    budget = power_budget(sol)
    assert budget.extinction == budget.absorbed == budget.scattered == 0.0


def test_boundary_conditions_collocation_oracle():
    # continuity of pressure and normal velocity at 20 surface points
    media = make_media(1.0, rho_ratio=1.2, kap_ratio=1.0 - 0.1j)
    a = 1.0
    sol = solve_sphere(media, WAVE, a)
    mu = np.linspace(-1.0, 1.0, 20)
    ls = np.arange(sol.l_max + 1)
    from scipy.special import eval_legendre

    leg = eval_legendre(ls[:, None], mu[None, :])
    j0 = spherical_jn_all(sol.l_max, sol.k0 * a)
    pa_inc = np.sum(((2 * ls + 1) * 1j**ls * j0)[:, None] * leg, axis=0)
    p_out = pa_inc + scattered_pressure(sol, a, mu)
    p_in = interior_pressure(sol, a, mu)
    assert np.max(np.abs(p_out - p_in)) < 1e-8

    from wavebound.specfun import spherical_deriv

    j0p = spherical_deriv(j0, sol.k0 * a)
    dinc = np.sum(((2 * ls + 1) * 1j**ls * j0p * sol.k0)[:, None] * leg, axis=0)
    h0 = spherical_h1_all(sol.l_max, sol.k0 * a)
    h0p = spherical_deriv(h0, sol.k0 * a)
    dsc = np.sum(
        ((2 * ls + 1) * 1j**ls * sol.a_coeffs * h0p * sol.k0)[:, None] * leg, axis=0
    )
    j1 = spherical_jn_all(sol.l_max, sol.k1 * a)
    j1p = spherical_deriv(j1, sol.k1 * a)
    din = np.sum(((2 * ls + 1) * 1j**ls * sol.b_coeffs * j1p * sol.k1)[:, None] * leg, axis=0)
    v_out = (dinc + dsc) / media.rho0
    v_in = din / media.rho1
    assert np.max(np.abs(v_out - v_in)) < 1e-8


def test_lossless_unitarity():
    for k0a in (1.0, 5.0):
        media = make_media(k0a, rho_ratio=1.2, kap_ratio=0.8)
        sol = solve_sphere(media, WAVE, 1.0)
        s_matrix = np.abs(1.0 + 2.0 * sol.a_coeffs)
        assert np.max(np.abs(s_matrix - 1.0)) < 1e-10


def test_tail_convergence_and_error():
    media = make_media(2.0)
    sol = solve_sphere(media, WAVE, 1.0)
    assert sol.tail_ratio() < 1e-12
    with pytest.raises(TailNotConvergedError):
        solve_sphere(media, WAVE, 1.0, l_max=3)


def test_desk_scale_guard():
    media = make_media(60.0)
    with pytest.raises(ValueError):
        solve_sphere(media, WAVE, 1.0)


# -------------------------------------------------------------------- power

def test_power_budget_energy_conservation():
    media = make_media(1.0)
    sol = solve_sphere(media, WAVE, 1.0)
    b = power_budget(sol)
    assert abs(b.extinction - (b.absorbed + b.scattered)) < 1e-12 * b.extinction
    assert b.absorbed > 0 and b.scattered > 0
    assert abs(b.absorbed - b.absorbed_interior) < 1e-6 * b.extinction


def test_lossless_absorption_vanishes():
    media = make_media(1.0, rho_ratio=1.2, kap_ratio=0.8)
    sol = solve_sphere(media, WAVE, 1.0)
    b = power_budget(sol)
    assert abs(b.absorbed) < 1e-10 * b.scattered
    assert abs(b.extinction - b.scattered) < 1e-8 * b.scattered


@pytest.mark.parametrize("k0a", [0.5, 1.0, 2.0, 5.0])
def test_optical_theorem_three_routes(k0a):
    media = make_media(k0a)
    sol = solve_sphere(media, WAVE, 1.0)
    assert optical_theorem_residual(sol) < 1e-8


def test_near_field_flux_matches_modal_scattered_power():
    # integrate the scattered energy flux through the sphere r = 20 a
    media = make_media(1.0)
    a = 1.0
    sol = solve_sphere(media, WAVE, a)
    r = 20.0 * a
    mu, w = leggauss(160)
    p = scattered_pressure(sol, r, mu)
    vr = scattered_radial_velocity(sol, r, mu)
    integrand = (1j * np.conj(p) * vr).imag  # = Re conj(P) v_r
    flux = 0.5 * 2 * math.pi * r**2 * float(np.sum(w * integrand))
    b = power_budget(sol)
    assert abs(flux - b.scattered) < 1e-6 * b.scattered


# ---------------------------------------------------------- bilinear identity

@pytest.mark.parametrize("angle", [0.0, 0.5, 0.5 * math.pi, math.pi, 2.2])
def test_bilinear_far_field_equals_volume(angle):
    media = make_media(0.8, rho_ratio=1.4 * (1 + 0.1j), kap_ratio=0.7 - 0.15j)
    sol = solve_sphere(media, WAVE, 1.0)
    out = (math.sin(angle), 0.0, math.cos(angle))
    res = scattering_bilinear(sol, out)
    assert res.relative_gap < 1e-8
    expected = 4 * math.pi * far_field(sol, out) / (media.omega * media.rho0)
    assert abs(res.value - expected) < 1e-14 * abs(expected)


def test_bilinear_forward_is_optical_theorem_input():
    media = make_media(1.3)
    sol = solve_sphere(media, WAVE, 1.0)
    res = scattering_bilinear(sol, WAVE.direction)
    w_from_bilinear = 0.5 * (np.conj(WAVE.amplitude) * res.volume_value).imag
    assert abs(w_from_bilinear - power_budget(sol).extinction) < 1e-8 * power_budget(sol).extinction


def test_reciprocity_in_angle():
    media = make_media(2.0)
    sol = solve_sphere(media, WAVE, 1.0)
    for th in (0.3, 1.1, 2.0):
        plus = far_field(sol, (math.sin(th), 0.0, math.cos(th)))
        minus = far_field(sol, (-math.sin(th), 0.0, math.cos(th)))
        assert abs(plus - minus) < 1e-12 * (1 + abs(plus))


def test_low_frequency_rayleigh_limit():
    media_maker = lambda k0a: make_media(k0a, rho_ratio=1.7 * (1 + 0.1j),
                                         kap_ratio=0.6 - 0.15j, rho0=1.1, kap0=0.9)
    for ct in (1.0, -1.0, 0.3):
        errs = []
        for k0a in (0.1, 0.05, 0.025):
            media = media_maker(k0a)
            sol = solve_sphere(media, WAVE, 1.0)
            exact = far_field_mu(sol, ct)
            approx = rayleigh_far_field(media, 1.0, ct)
            errs.append(abs(exact / approx - 1.0))
        assert errs[0] / errs[1] > 3.0 and errs[1] / errs[2] > 3.0  # O((k0 a)^2)


# ----------------------------------------------------- oscillatory integrals

def test_oscillatory_trivial_and_value():
    assert oscillatory_asymptotic(lambda t: 0.0, -2.0, 100.0) == 0.0
    # f = 1 + t vanishes at the lower endpoint: single-endpoint contribution
    val = oscillatory_asymptotic(lambda t: 1.0 + t, -2.0, 1e3)
    assert abs(val - 1j) < 1e-14


def test_oscillatory_zero_slope_rejected():
    with pytest.raises(StationaryPhaseError):
        oscillatory_asymptotic(lambda t: 1.0, 0.0, 10.0)


@pytest.mark.parametrize(
    "f",
    [
        lambda t: 1.0 + t,
        lambda t: np.exp(0.3 * t) + 0.2j * t**2,
        lambda t: np.cos(t),
    ],
)
def test_oscillatory_error_decays_like_1_over_r(f):
    rs = np.array([1e2, 1e3, 1e4])
    errs = [abs(oscillatory_quadrature(f, -2.0, r) - oscillatory_asymptotic(f, -2.0, r))
            for r in rs]
    slope = np.polyfit(np.log(rs), np.log(errs), 1)[0]
    assert -1.3 <= slope <= -0.7


def test_lower_endpoint_only_contribution():
    # f(-1) = 0 kills the oscillating term; the value is then r-independent
    f = lambda t: (1.0 + t) ** 2
    v1 = oscillatory_asymptotic(f, -1.5, 10.0)
    v2 = oscillatory_asymptotic(f, -1.5, 1000.0)
    assert abs(v1 - v2) < 1e-14


# ------------------------------------------------------- backscatter bounds

def test_ball_phase_integral_against_quadrature():
    from numpy.polynomial.legendre import leggauss

    for (k0, a, ph) in [(1.3, 0.7, 0.3), (0.2, 1.0, 1.1), (4.0, 1.0, 2.2)]:
        xg, wg = leggauss(200)
        r = 0.5 * a * (xg + 1)
        wr = 0.5 * a * wg
        mu, wmu = leggauss(200)
        val = 0.0
        for ri, wi in zip(r, wr):
            val += wi * 2 * np.pi * ri**2 * np.sum(wmu * np.sin(k0 * ri * mu + ph) ** 2)
        assert abs(ball_phase_integral(k0, a, ph) - val) < 1e-10


def test_backscatter_bound_matched_density_analytic_rhs():
    media = make_media(1.0, rho_ratio=1.0, kap_ratio=1.0 - 0.1j, rho0=1.0, kap0=1.0)
    bnd = backscatter_bound(media, WAVE, 1.0)
    assert abs(bnd.rhs_86 - 0.1) < 1e-14
    assert bnd.lhs <= bnd.rhs_86
    assert bnd.margin >= 0


def test_backscatter_bound_no_contrast():
    media = AcousticMedia(1.0, 1.0, 1.0, 1.0, 1.0)
    bnd = backscatter_bound(media, WAVE, 1.0)
    assert bnd.lhs == 0.0 and bnd.rhs_86 == 0.0


def test_backscatter_bound_lossless_with_contrast_is_vacuous():
    media = make_media(1.0, rho_ratio=1.3, kap_ratio=0.8)
    bnd = backscatter_bound(media, WAVE, 1.0)
    assert math.isinf(bnd.rhs_86)
    assert math.isinf(bnd.margin)


def test_time_shift_family_bounds_hold():
    media = make_media(1.0, rho_ratio=1.0, kap_ratio=1.0 - 0.1j, rho0=1.0, kap0=1.0)
    sol = solve_sphere(media, WAVE, 1.0)
    bnd = backscatter_bound(media, WAVE, 1.0, solution=sol)
    z = nondimensional_backscatter(sol)
    for j in range(16):
        phase = 2 * math.pi * j / 16
        t0 = phase / (2 * media.omega)
        lhs = (np.exp(1j * phase) * z).imag
        assert lhs <= bnd.rhs_85_of_t0(t0) + 1e-12


def test_time_shift_tighter_than_static_bound():
    media = make_media(1.0, rho_ratio=1.0, kap_ratio=1.0 - 0.1j, rho0=1.0, kap0=1.0)
    bnd = backscatter_bound(media, WAVE, 1.0)
    t0s = np.linspace(0, math.pi / media.omega, 32)
    assert max(bnd.rhs_85_of_t0(t) for t in t0s) <= bnd.rhs_86 + 1e-14


def test_wrap_region_contains_value_and_zero():
    media = make_media(1.0)
    reg = wrap_around_region(media, WAVE, 1.0)
    assert reg.margin > 0
    assert reg.contains(reg.mie_value)
    assert reg.contains(0.0)  # no scattering is always admissible
    assert len(reg.vertices) >= 3


def test_wrap_region_centrally_symmetric_when_bounds_shift_symmetric():
    # a time shift by pi/(2 omega) swaps the two phase-integral weights, so
    # rhs is shift symmetric exactly when the density and modulus loss terms
    # are equal; the half-plane family is then symmetric under z -> -z
    media = make_media(1.0, rho_ratio=1.0 + 0.1j, kap_ratio=1.0 - 0.1j,
                       rho0=1.0, kap0=1.0)
    reg = wrap_around_region(media, WAVE, 1.0, n_angles=16)
    for j in range(16):
        assert abs(reg.bounds[(j + 8) % 16] - reg.bounds[j]) < 1e-12
    # unbalanced losses break the shift symmetry
    media2 = make_media(1.0, rho_ratio=1.0, kap_ratio=1.0 - 0.1j, rho0=1.0, kap0=1.0)
    reg2 = wrap_around_region(media2, WAVE, 1.0, n_angles=16)
    assert np.ptp(reg2.bounds) > 1e-3


def test_wrap_region_needs_enough_angles():
    media = make_media(1.0)
    with pytest.raises(ValueError):
        wrap_around_region(media, WAVE, 1.0, n_angles=3)


def test_default_l_max_grows():
    assert default_l_max(0.5) >= 13
    assert default_l_max(5.0) > default_l_max(0.5)
