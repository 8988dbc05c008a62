"""Acceptance suite: one function per exit criterion, shared by the test
module and the ``verify-all`` CLI subcommand.

Every criterion returns a CriterionResult with a pass flag and a short
metric line; ``run_acceptance`` executes them in order and reports one
line per criterion.  Tolerances are fixed here, not configurable.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import acoustic_mie as mie
from . import mobius_bounds as mb
from . import quasistatic_grid as qg
from . import shape_polarizability as sp
from . import y_problem as yp

__all__ = ["CriterionResult", "run_acceptance", "CRITERIA"]


@dataclass(frozen=True)
class CriterionResult:
    index: int
    name: str
    passed: bool
    detail: str
    seconds: float


def _lossy_chi(rng, n):
    return rng.uniform(-3.0, 3.0, n) + 1j * rng.uniform(0.05, 3.0, n)


# --------------------------------------------------------------------------
# 1. bound-corner attainment
# --------------------------------------------------------------------------

def criterion_corner_attainment(rng) -> tuple[bool, str]:
    worst = 0.0
    for chi in _lossy_chi(rng, 100):
        for d in (2, 3):
            ball = sp.ball_polarizability(chi, d)
            shell = sp.thin_shell_polarizability(chi, d)
            corner_ball = chi - chi**2 / (chi + d)
            corner_shell = chi - chi**2 / (d * (1 + chi))
            arc1, arc2 = mb.bm_arcs(mb.Contrast(chi, d))
            for got, want in (
                (ball, corner_ball),
                (shell, corner_shell),
                (ball, complex(arc1(0.0))),
                (shell, complex(arc2(1.0))),
            ):
                worst = max(worst, abs(got - want) / (1.0 + abs(want)))
    return worst < 1e-12, f"max corner mismatch {worst:.2e} (tol 1e-12)"


# --------------------------------------------------------------------------
# 2. square-inclusion sweep inside the tightened 2-D region
# --------------------------------------------------------------------------

def _grid_trace(maker, n, eps1, fills=(1.0 / 16.0, 1.0 / 64.0), rtol=1e-9):
    ests = []
    for f in fills:
        inc = maker(n, f)
        col, info = qg.solve_dipole(inc, eps1, [1.0, 0.0], rtol=rtol)
        # square/disk symmetry: the trace average equals the xx entry
        alpha = np.diag([col[0], col[0]]).astype(complex)
        ests.append(qg.PolarizabilityEstimate(alpha, info["residual"], inc.fill_fraction))
    return qg.extrapolate_dilute(ests).trace_per_dim


def criterion_square_sweep(n_square: int = 256, n_disk: int = 512) -> tuple[bool, str]:
    sweep = np.geomspace(0.1, 10.0, 7)
    failures = []
    worst_margin = math.inf
    for eps1 in list(sweep.astype(complex)) + list(1j * sweep):
        if eps1 == 1.0:
            continue
        value = _grid_trace(qg.square_inclusion, n_square, eps1)
        # real permittivities route to the interval; lossy ones to the
        # tightened two-dimensional region
        region = mb.polarizability_region(mb.Contrast(complex(eps1) - 1.0, 2), milton=True)
        ok = mb.region_contains(region, value, tol=1e-3)
        worst_margin = min(worst_margin, mb.region_margin(region, value))
        if not ok:
            failures.append(f"eps1={eps1}")
    disk_errs = []
    for eps1 in (2.0 + 0.0j, 1j):
        value = _grid_trace(qg.disk_inclusion, n_disk, eps1)
        exact = sp.ball_polarizability(eps1 - 1.0, 2)
        disk_errs.append(abs(value - exact) / abs(exact))
    ok = not failures and all(e <= 0.02 for e in disk_errs)
    detail = (
        f"sweep min margin {worst_margin:.2e} (membership tol 1e-3), "
        f"disk boundary errors {', '.join(f'{e:.3%}' for e in disk_errs)} (tol 2%)"
    )
    if failures:
        detail += f"; outside region at {failures}"
    return ok, detail


# --------------------------------------------------------------------------
# 3. power identity on random instances and hand-solved networks
# --------------------------------------------------------------------------

def criterion_power_identity(rng) -> tuple[bool, str]:
    worst = 0.0
    solved = 0
    while solved < 50:
        n = int(rng.integers(4, 65))
        dim_e = int(rng.integers(1, n))
        dim_v = int(rng.integers(1, n))
        qe = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))[0][:, :dim_e]
        qv = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))[0][:, :dim_v]
        pi_h = np.eye(n) - qv @ qv.conj().T
        ll = pi_h @ (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) @ pi_h
        inst = yp.YProblemInstance(qe, qv, ll)
        e1 = qv @ (rng.normal(size=dim_v) + 1j * rng.normal(size=dim_v))
        try:
            res = yp.power_identity_residual(inst, e1)
        except yp.NonUniqueSolutionError:
            continue
        scale = max(np.linalg.norm(e1) ** 2 * np.linalg.norm(ll), 1.0)
        worst = max(worst, res / scale)
        solved += 1

    # hand-solved networks: series divider, parallel pair, Wheatstone bridge
    def loop(*zs):
        n_e = 1 + len(zs)
        m = np.zeros((n_e, n_e))
        for j in range(n_e):
            m[j, j], m[(j + 1) % n_e, j] = 1.0, -1.0
        return yp.NetworkSpec(m, tuple((1 + i, z) for i, z in enumerate(zs)), (0,))

    z1, z2 = 1.0 + 0.5j, 3.0 - 1.0j
    nets = [
        (loop(z1, z2), 1.0 / (z1 + z2)),
        (yp.NetworkSpec(np.array([[1.0, 1.0, 1.0], [-1.0, -1.0, -1.0]]),
                        ((1, z1), (2, z2)), (0,)), 1.0 / z1 + 1.0 / z2),
    ]
    edges = [(0, 3), (0, 1), (0, 2), (1, 3), (2, 3), (1, 2)]
    m = np.zeros((4, 6))
    for j, (u, v) in enumerate(edges):
        m[u, j], m[v, j] = 1.0, -1.0
    zz = (1.0 + 0.2j, 2.0 - 0.3j, 3.0 + 0.0j, 1.5 + 1.0j, 0.7 - 0.1j)
    wheat = yp.NetworkSpec(m, tuple((1 + i, z) for i, z in enumerate(zz)), (0,))
    # nodal oracle for the bridge
    ynode = np.zeros((4, 4), dtype=complex)
    for e, z in wheat.impedance_edges:
        a, b = np.nonzero(m[:, e])[0]
        ynode[a, a] += 1 / z
        ynode[b, b] += 1 / z
        ynode[a, b] -= 1 / z
        ynode[b, a] -= 1 / z
    keep = [0, 1, 2]
    rhs = -ynode[np.ix_(keep, keep)][:, 0] * 1.0
    v = np.zeros(3, dtype=complex)
    v[0] = 1.0
    v[1:] = np.linalg.solve(ynode[np.ix_(keep, keep)][1:, 1:], rhs[1:])
    oracle = (ynode[np.ix_([0], keep)] @ v)[0]
    nets.append((wheat, oracle))

    net_worst = 0.0
    for spec, expected in nets:
        inst = yp.network_to_instance(spec)
        y = yp.extract_y_star(inst).matrix[0, 0]
        net_worst = max(net_worst, abs(y - expected) / abs(expected))
        e1 = inst.basis_v[:, 0]
        res = yp.power_identity_residual(inst, e1)
        worst = max(worst, res / max(np.linalg.norm(inst.operator_l), 1.0))
    ok = worst < 1e-10 and net_worst < 1e-12
    return ok, f"max power residual {worst:.2e} (tol 1e-10), network mismatch {net_worst:.2e} (tol 1e-12)"


# --------------------------------------------------------------------------
# 4. discrete polarizability equals the grid solve at matched resolution
# --------------------------------------------------------------------------

def criterion_discrete_equivalence() -> tuple[bool, str]:
    n = 8
    c = (n - 1) / 2.0
    yy, xx = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    mask = (xx - c) ** 2 + (yy - c) ** 2 <= 4.0
    eps1 = 2.0 + 0.7j
    inst = yp.grid_cell_instance(mask, eps1)
    alpha_y = yp.discrete_polarizability(inst, eps1, 1.0, mask)
    est = qg.solve_polarizability(qg.PixelInclusion(mask), eps1, rtol=1e-12)
    gap = float(np.max(np.abs(alpha_y - est.alpha_over_volume)))
    return gap < 1e-8, f"max entrywise gap {gap:.2e} (tol 1e-8)"


# --------------------------------------------------------------------------
# 5-6. optical theorem and far-field/volume identity
# --------------------------------------------------------------------------

def _media_for(k0a, rho_ratio, kap_ratio, rho0=1.0, kap0=1.0, a=1.0):
    omega = (k0a / a) * math.sqrt(kap0 / rho0)
    return mie.AcousticMedia(rho0, kap0, rho_ratio * rho0, kap_ratio * kap0, omega)


def criterion_optical_theorem() -> tuple[bool, str]:
    wave = mie.PlaneWave(1.0)
    worst = 0.0
    for k0a in (0.5, 1.0, 2.0, 5.0):
        media = _media_for(k0a, 1.3 * (1 + 0.05j), 1.5 - 0.2j)
        sol = mie.solve_sphere(media, wave, 1.0)
        worst = max(worst, mie.optical_theorem_residual(sol))
    return worst < 1e-6, f"max three-route residual {worst:.2e} (tol 1e-6)"


def criterion_bilinear_identity(rng) -> tuple[bool, str]:
    wave = mie.PlaneWave(1.0)
    worst = 0.0
    for _ in range(10):
        k0a = rng.uniform(0.3, 3.0)
        media = _media_for(
            k0a,
            rng.uniform(0.6, 1.8) * (1 + 1j * rng.uniform(0.01, 0.3)),
            rng.uniform(0.6, 1.8) * (1 - 1j * rng.uniform(0.01, 0.3)),
        )
        sol = mie.solve_sphere(media, wave, 1.0)
        theta = rng.uniform(0.0, math.pi)
        phi = rng.uniform(0.0, 2 * math.pi)
        out = (math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta))
        worst = max(worst, mie.scattering_bilinear(sol, out).relative_gap)
    return worst < 1e-6, f"max far-field/volume gap {worst:.2e} (tol 1e-6)"


# --------------------------------------------------------------------------
# 7-8. backscatter bound sweep and wrap-around region
# --------------------------------------------------------------------------

def _bound_sweep():
    wave = mie.PlaneWave(1.0)
    out = []
    for k0a in np.linspace(0.5, 5.0, 5):
        for imk in np.linspace(-0.5, -0.01, 5):
            for rr, ri in zip(np.linspace(0.5, 2.0, 5), np.linspace(0.01, 0.5, 5)):
                media = _media_for(k0a, rr + 1j * ri, 1.0 + 1j * imk)
                sol = mie.solve_sphere(media, wave, 1.0)
                out.append((k0a, imk, rr, ri, media, sol))
    return wave, out


def criterion_backscatter_bound() -> tuple[bool, str]:
    wave, sweep = _bound_sweep()
    violations = 0
    min_margin = math.inf
    for _, _, _, _, media, sol in sweep:
        bnd = mie.backscatter_bound(media, wave, 1.0, solution=sol)
        min_margin = min(min_margin, bnd.margin)
        if bnd.margin < 0:
            violations += 1
    # matched-density analytic case: rhs exactly 0.1 bounds the solve for k0a <= 5
    worst_lhs = 0.0
    for k0a in np.linspace(0.1, 5.0, 40):
        media = _media_for(k0a, 1.0, 1.0 - 0.1j)
        bnd = mie.backscatter_bound(media, wave, 1.0)
        worst_lhs = max(worst_lhs, bnd.lhs)
        if abs(bnd.rhs_86 - 0.1) > 1e-12:
            violations += 1
    ok = violations == 0 and min_margin >= 0 and worst_lhs <= 0.1
    return ok, (
        f"sweep violations {violations}, min margin {min_margin:.3e}, "
        f"matched-density max lhs {worst_lhs:.4f} vs rhs 0.1000"
    )


def criterion_wrap_region() -> tuple[bool, str]:
    wave, sweep = _bound_sweep()
    min_margin = math.inf
    for _, _, _, _, media, sol in sweep:
        reg = mie.wrap_around_region(media, wave, 1.0, n_angles=16, solution=sol)
        min_margin = min(min_margin, reg.margin)
    return min_margin > 0, f"min half-plane margin {min_margin:.3e} (strictly interior)"


# --------------------------------------------------------------------------
# 9-10. oscillatory asymptotics and lossless unitarity
# --------------------------------------------------------------------------

def criterion_oscillatory_slope() -> tuple[bool, str]:
    rs = np.array([1e2, 1e3, 1e4])
    slopes = []
    for f in (lambda t: 1.0 + t,
              lambda t: np.exp(0.3 * t) + 0.2j * t**2,
              lambda t: np.cos(t)):
        errs = [
            abs(mie.oscillatory_quadrature(f, -2.0, r) - mie.oscillatory_asymptotic(f, -2.0, r))
            for r in rs
        ]
        slopes.append(float(np.polyfit(np.log(rs), np.log(errs), 1)[0]))
    ok = all(-1.3 <= s <= -0.7 for s in slopes)
    return ok, "log-log error slopes " + ", ".join(f"{s:.2f}" for s in slopes) + " (window [-1.3, -0.7])"


def criterion_lossless_unitarity() -> tuple[bool, str]:
    wave = mie.PlaneWave(1.0)
    worst = 0.0
    for k0a in (1.0, 5.0):
        media = _media_for(k0a, 1.2, 0.8)
        sol = mie.solve_sphere(media, wave, 1.0)
        worst = max(worst, float(np.max(np.abs(np.abs(1 + 2 * sol.a_coeffs) - 1.0))))
    return worst < 1e-10, f"max | |1+2a_l| - 1 | = {worst:.2e} (tol 1e-10)"


CRITERIA = (
    ("bound-corner attainment", lambda rng: criterion_corner_attainment(rng)),
    ("square sweep inside 2-D region", lambda rng: criterion_square_sweep()),
    ("power identity / networks", lambda rng: criterion_power_identity(rng)),
    ("discrete cell equivalence", lambda rng: criterion_discrete_equivalence()),
    ("optical theorem three routes", lambda rng: criterion_optical_theorem()),
    ("far-field/volume identity", lambda rng: criterion_bilinear_identity(rng)),
    ("backscatter bound sweep", lambda rng: criterion_backscatter_bound()),
    ("wrap-around region", lambda rng: criterion_wrap_region()),
    ("oscillatory asymptotics", lambda rng: criterion_oscillatory_slope()),
    ("lossless unitarity", lambda rng: criterion_lossless_unitarity()),
)


def run_acceptance(seed: int = 20240901, indices=None, echo=print) -> list[CriterionResult]:
    """Run the acceptance criteria (all by default), one report line each."""
    results = []
    for i, (name, fn) in enumerate(CRITERIA, start=1):
        if indices is not None and i not in indices:
            continue
        rng = np.random.default_rng(seed + i)
        t0 = time.perf_counter()
        try:
            passed, detail = fn(rng)
        except Exception as exc:  # a crash is a failure, not an abort
            passed, detail = False, f"raised {type(exc).__name__}: {exc}"
        dt = time.perf_counter() - t0
        res = CriterionResult(i, name, passed, detail, dt)
        results.append(res)
        if echo is not None:
            status = "PASS" if passed else "FAIL"
            echo(f"[{status}] criterion {i:2d} {name}: {detail} ({dt:.1f}s)")
    return results
