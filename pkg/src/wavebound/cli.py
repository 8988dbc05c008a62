"""Command-line front end.

Every operation is a subcommand; inputs either come from flags (simple
bound queries) or from a schema-checked JSON config (solvers and sweeps).
Complex numbers in delimited output are always two columns re, im.
Output files are written atomically into --out.

Exit codes: 0 success, 2 configuration/validation error, 3 numerical
failure (non-convergence or a violated identity/bound).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import acoustic_mie as mie
from . import mobius_bounds as mb
from . import quasistatic_grid as qg
from . import report
from . import shape_polarizability as sp
from . import y_problem as yp
from .acceptance import run_acceptance
from .config import ConfigError, Field, load_json, parse_complex, validate

NUMERICAL_ERRORS = (
    qg.GridConvergenceError,
    mie.TailNotConvergedError,
    mie.PowerMismatchError,
    mie.InconsistentBoundError,
    mie.BranchAmbiguityError,
    yp.NonUniqueSolutionError,
)


class IdentityViolation(RuntimeError):
    """A verified identity or bound failed beyond tolerance."""


# ---------------------------------------------------------------- file IO

def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def _write_csv(path: str, header, rows) -> None:
    lines = [",".join(header)] if header else []
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    _atomic_write(path, "\n".join(lines) + "\n")


def _write_json(path: str, obj) -> None:
    _atomic_write(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _cmat(matrix: np.ndarray) -> dict:
    m = np.asarray(matrix, dtype=complex)
    return {"re": m.real.tolist(), "im": m.imag.tolist()}


def _out(args, name: str) -> str:
    return os.path.join(args.out, name)


def _threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("WAVEBOUND_THREADS")
    return max(1, int(env)) if env else 1


def _map(args, fn, items):
    n = _threads(args)
    if n == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


# ------------------------------------------------------------- media setup

_MEDIA_SCHEMA = {
    "rho0": Field((int, float)),
    "kappa0": Field((int, float)),
    "rho1": Field((int, float, list, str)),
    "kappa1": Field((int, float, list, str)),
    "omega": Field((int, float)),
    "radius": Field((int, float)),
    "p_a": Field((int, float, list, str), required=False, default=1.0),
}


def _media_wave(cfg: dict, extra_schema: dict | None = None, where: str = "config"):
    schema = dict(_MEDIA_SCHEMA)
    schema.update(extra_schema or {})
    got = validate(cfg, schema, where)
    try:
        media = mie.AcousticMedia(
            float(got["rho0"]), float(got["kappa0"]),
            parse_complex(got["rho1"], "rho1"), parse_complex(got["kappa1"], "kappa1"),
            float(got["omega"]),
        )
        wave = mie.PlaneWave(parse_complex(got["p_a"], "p_a"))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return media, wave, float(got["radius"]), got


def _media_at_k0a(media: mie.AcousticMedia, radius: float, k0a: float) -> mie.AcousticMedia:
    omega = (k0a / radius) * media.sound_speed
    return mie.AcousticMedia(media.rho0, media.kappa0, media.rho1, media.kappa1, omega)


# ------------------------------------------------------------- subcommands

def cmd_hs_interval(args) -> int:
    chi = complex(args.chi1)
    lo, hi = mb.hs_interval(mb.Contrast(chi, args.dim))
    _write_csv(_out(args, "hs_interval.csv"), (), [(lo, hi)])
    print(f"{_fmt(lo)},{_fmt(hi)}")
    return 0


def cmd_bounds_region(args) -> int:
    chi = complex(args.chi1)
    if args.fraction is not None:
        eps1 = chi + 1.0
        a1, a2 = mb.bm_composite_arcs(eps1, args.fraction, args.dim)
        arcs = {"bm1": a1, "bm2": a2}
        if args.dim == 2:
            m1, m2 = mb.milton_composite_arcs(eps1, args.fraction)
            arcs.update({"milton1": m1, "milton2": m2})
        title = "effective-permittivity bound region"
    else:
        contrast = mb.Contrast(chi, args.dim)
        a1, a2 = mb.bm_arcs(contrast)
        arcs = {"bm1": a1, "bm2": a2}
        if args.dim == 2 and chi.imag > 0:
            m1, m2 = mb.milton2d_curves(contrast)
            arcs.update({"milton1": m1, "milton2": m2})
        title = "trace-polarizability bound region"
    rows = mb.sample_arcs_csv_rows(arcs, args.samples)
    _write_csv(_out(args, "bounds_region.csv"), ("param", "re", "im", "curve_id"), rows)
    curves = {name: arc.samples(args.samples) for name, arc in arcs.items()}
    report.region_figure(_out(args, "bounds_region.png"), curves, title=title)
    print(f"wrote {len(rows)} samples of {len(arcs)} curves")
    return 0


def cmd_milton2d(args) -> int:
    chi = complex(args.chi1)
    m1, m2 = mb.milton2d_curves(mb.Contrast(chi, 2))
    rows = mb.sample_arcs_csv_rows({"milton_arc": m1, "milton_chord": m2}, args.samples)
    _write_csv(_out(args, "milton2d.csv"), ("param", "re", "im", "curve_id"), rows)
    report.region_figure(
        _out(args, "milton2d.png"),
        {"arc": m1.samples(args.samples), "chord": m2.samples(args.samples)},
        title="tightened two-dimensional bound curves",
    )
    print(f"shared corners at {complex(m1(0.0)):.6g} and {complex(m1(1.0)):.6g}")
    return 0


def cmd_shape_alpha(args) -> int:
    chi = complex(args.chi1)
    if args.shape == "ball":
        value = sp.ball_polarizability(chi, args.dim)
    elif args.shape == "shell":
        value = sp.thin_shell_polarizability(chi, args.dim)
    elif args.shape == "coated":
        value = sp.coated_polarizability(chi, args.core_fraction, args.dim)
    else:
        factors = [float(x) for x in args.factors.split(",")]
        entries = sp.ellipsoid_polarizability(chi, factors)
        rows = [(i, e.real, e.imag) for i, e in enumerate(entries)]
        _write_csv(_out(args, "shape_alpha.csv"), ("axis", "re", "im"), rows)
        print(",".join(f"{e.real!r},{e.imag!r}" for e in entries))
        return 0
    _write_csv(_out(args, "shape_alpha.csv"), ("re", "im"), [(value.real, value.imag)])
    print(f"{value.real!r},{value.imag!r}")
    return 0


_GRID_SHAPE_SCHEMA = {
    "kind": Field((str,)),
    "fill_fractions": Field((list,), required=False, default=None),
    "aspect": Field((int, float), required=False, default=2.0),
    "core_fraction": Field((int, float), required=False, default=0.5),
    "path": Field((str,), required=False, default=None),
}

_GRID_SCHEMA = {
    "n": Field((int,)),
    "dim": Field((int,), required=False, default=2),
    "eps1": Field((int, float, list, str)),
    "eps0": Field((int, float, list, str), required=False, default=1.0),
    "rtol": Field((int, float), required=False, default=1e-9),
    "shape": Field((dict,)),
}


def _make_inclusions(shape: dict, n: int, dim: int):
    got = validate(shape, _GRID_SHAPE_SCHEMA, "shape")
    kind = got["kind"]
    if kind == "file":
        if not got["path"]:
            raise ConfigError("shape.path required for kind 'file'")
        return [qg.mask_from_file(got["path"])]
    fills = got["fill_fractions"] or [1.0 / 16.0, 1.0 / 64.0]
    makers = {
        "disk": lambda f: qg.disk_inclusion(n, f, dim=dim),
        "square": lambda f: qg.square_inclusion(n, f, dim=dim),
        "ellipse": lambda f: qg.ellipse_inclusion(n, f, got["aspect"], dim=dim),
        "annulus": lambda f: qg.annulus_inclusion(n, f, got["core_fraction"]),
    }
    if kind not in makers:
        raise ConfigError(f"unknown shape kind '{kind}'")
    return [makers[kind](float(f)) for f in fills]


def cmd_grid_alpha(args) -> int:
    cfg = validate(load_json(args.config), _GRID_SCHEMA, "grid-alpha config")
    eps1 = parse_complex(cfg["eps1"], "eps1")
    eps0 = parse_complex(cfg["eps0"], "eps0")
    inclusions = _make_inclusions(cfg["shape"], cfg["n"], cfg["dim"])
    ests = [
        qg.solve_polarizability(inc, eps1, eps0=eps0, rtol=float(cfg["rtol"]))
        for inc in inclusions
    ]
    final = qg.extrapolate_dilute(ests) if len(ests) > 1 else ests[0]
    payload = {
        "alpha_re": final.alpha_over_volume.real.tolist(),
        "alpha_im": final.alpha_over_volume.imag.tolist(),
        "residual": final.residual,
        "extrapolation_info": final.extrapolation_info,
        "trace_per_dim": [final.trace_per_dim.real, final.trace_per_dim.imag],
    }
    _write_json(_out(args, "grid_alpha.json"), payload)
    report.mask_figure(_out(args, "grid_mask.png"), inclusions[-1].mask)
    print(f"trace/dim = {final.trace_per_dim:.8g} (residual {final.residual:.2e})")
    return 0


_YSOLVE_SCHEMA = {
    "basis_e": Field((dict,)),
    "basis_v": Field((dict,)),
    "operator_l": Field((dict,)),
    "e1": Field((dict,), required=False, default=None),
}


def _cmat_in(obj: dict, where: str) -> np.ndarray:
    got = validate(obj, {"re": Field((list,)), "im": Field((list,), required=False, default=None)}, where)
    re = np.asarray(got["re"], dtype=float)
    im = np.zeros_like(re) if got["im"] is None else np.asarray(got["im"], dtype=float)
    if im.shape != re.shape:
        raise ConfigError(f"{where}: re/im shapes differ")
    return re + 1j * im


def cmd_y_solve(args) -> int:
    cfg = validate(load_json(args.config), _YSOLVE_SCHEMA, "y-solve config")
    try:
        inst = yp.YProblemInstance(
            _cmat_in(cfg["basis_e"], "basis_e"),
            _cmat_in(cfg["basis_v"], "basis_v"),
            _cmat_in(cfg["operator_l"], "operator_l"),
        )
    except ValueError as exc:
        raise ConfigError(f"invalid instance: {exc}") from exc
    ystar = yp.extract_y_star(inst).matrix
    payload = {"y_star": _cmat(ystar)}
    if cfg["e1"] is not None:
        e1 = _cmat_in(cfg["e1"], "e1").ravel()
        sol = yp.solve_y(inst, e1)
        payload["power_identity_residual"] = yp.power_identity_residual(inst, e1)
        payload["residual_e"] = sol.residual_e
        payload["residual_j"] = sol.residual_j
    _write_json(_out(args, "y_star.json"), payload)
    print(f"Y* is {ystar.shape[0]}x{ystar.shape[1]}")
    return 0


def cmd_network_y(args) -> int:
    try:
        spec = yp.network_from_json(load_json(args.config))
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"invalid network: {exc}") from exc
    ystar = yp.extract_y_star(yp.network_to_instance(spec)).matrix
    _write_json(_out(args, "network_y.json"), {"y_star": _cmat(ystar)})
    for row in ystar:
        print(",".join(f"{v.real!r},{v.imag!r}" for v in row))
    return 0


def cmd_mie_solve(args) -> int:
    cfg = load_json(args.config)
    media, wave, radius, got = _media_wave(
        cfg, {"l_max": Field((int,), required=False, default=None),
              "n_angles": Field((int,), required=False, default=181)},
    )
    sol = mie.solve_sphere(media, wave, radius, l_max=got["l_max"])
    rows = [
        (l, sol.a_coeffs[l].real, sol.a_coeffs[l].imag,
         sol.b_coeffs[l].real, sol.b_coeffs[l].imag)
        for l in range(sol.l_max + 1)
    ]
    _write_csv(_out(args, "mie_modes.csv"), ("l", "a_re", "a_im", "b_re", "b_im"), rows)
    mu = np.linspace(-1.0, 1.0, got["n_angles"])
    ff = np.asarray(mie.far_field_mu(sol, mu))
    # nondimensional group 4 pi P_inf / (p_a k0^2 |Omega|), matching the
    # backscatter-bound normalisation; raw amplitudes behind --raw
    scale = abs(wave.amplitude) * sol.k0**2 * sol.volume / (4.0 * math.pi)
    if args.raw:
        header = ("costheta", "scaled_re", "scaled_im", "re", "im")
        ff_rows = [(m, (f / scale).real, (f / scale).imag, f.real, f.imag)
                   for m, f in zip(mu, ff)]
    else:
        header = ("costheta", "scaled_re", "scaled_im")
        ff_rows = [(m, (f / scale).real, (f / scale).imag) for m, f in zip(mu, ff)]
    _write_csv(_out(args, "mie_farfield.csv"), header, ff_rows)
    budget = mie.power_budget(sol)
    _write_json(_out(args, "mie_powers.json"), {
        "absorbed": budget.absorbed,
        "scattered": budget.scattered,
        "extinction": budget.extinction,
        "absorbed_interior": budget.absorbed_interior,
        "k0a": sol.k0 * radius,
        "l_max": sol.l_max,
    })
    report.farfield_figure(_out(args, "mie_farfield.png"), mu, ff)
    print(f"l_max {sol.l_max}, extinction {budget.extinction:.8g}")
    return 0


def cmd_optical_check(args) -> int:
    cfg = load_json(args.config)
    media, wave, radius, got = _media_wave(
        cfg, {"sweeps": Field((dict,), required=False, default=None),
              "tol": Field((int, float), required=False, default=1e-6)},
    )
    k0as = [media.k0 * radius]
    if got["sweeps"]:
        sweeps = validate(got["sweeps"], {"k0a": Field((list,))}, "sweeps")
        k0as = [float(x) for x in sweeps["k0a"]]

    def one(k0a):
        m = _media_at_k0a(media, radius, k0a)
        sol = mie.solve_sphere(m, wave, radius)
        budget = mie.power_budget(sol)
        resid = mie.optical_theorem_residual(sol)
        fwd = mie.far_field_mu(sol, 1.0)
        w_fwd = 2 * math.pi * (np.conj(wave.amplitude) * fwd).imag / (m.omega * m.rho0)
        return (k0a, budget.extinction, w_fwd, budget.absorbed_interior + budget.scattered, resid)

    rows = _map(args, one, k0as)
    _write_csv(
        _out(args, "optical_check.csv"),
        ("k0a", "w_budget", "w_forward", "w_volume", "residual"),
        rows,
    )
    worst = max(r[4] for r in rows)
    print(f"max optical-theorem residual {worst:.3e} over {len(rows)} case(s)")
    if worst > float(got["tol"]):
        raise IdentityViolation(
            f"optical-theorem residual {worst:.3e} exceeds tolerance {got['tol']}"
        )
    return 0


def cmd_backscatter_bound(args) -> int:
    cfg = load_json(args.config)
    media, wave, radius, got = _media_wave(
        cfg, {"sweeps": Field((dict,), required=False, default=None),
              "t0": Field((int, float), required=False, default=0.0)},
    )
    k0as = [media.k0 * radius]
    if got["sweeps"]:
        sweeps = validate(got["sweeps"], {"k0a": Field((list,))}, "sweeps")
        k0as = [float(x) for x in sweeps["k0a"]]

    def one(k0a):
        m = _media_at_k0a(media, radius, k0a)
        bnd = mie.backscatter_bound(m, wave, radius, t0=float(got["t0"]))
        return (k0a, bnd.lhs, bnd.rhs_86, bnd.rhs_85_value, bnd.margin)

    rows = _map(args, one, k0as)
    _write_csv(
        _out(args, "backscatter_bound.csv"),
        ("k0a", "lhs", "rhs_86", "rhs_85_at_t0", "margin"),
        rows,
    )
    x = np.array([r[0] for r in rows])
    report.bound_margin_figure(
        _out(args, "backscatter_bound.png"),
        x, np.array([r[1] for r in rows]), np.array([r[2] for r in rows]),
    )
    worst = min(r[4] for r in rows)
    print(f"min bound margin {worst:.4e} over {len(rows)} case(s)")
    if worst < 0:
        raise IdentityViolation(f"backscatter bound violated (margin {worst:.3e})")
    return 0


def cmd_wrap_region(args) -> int:
    cfg = load_json(args.config)
    media, wave, radius, got = _media_wave(
        cfg, {"n_angles": Field((int,), required=False, default=16)},
    )
    reg = mie.wrap_around_region(media, wave, radius, n_angles=got["n_angles"])
    _write_csv(
        _out(args, "wrap_region_halfplanes.csv"),
        ("phase", "bound"),
        [(p, b) for p, b in zip(reg.phases, reg.bounds)],
    )
    _write_csv(
        _out(args, "wrap_region_polygon.csv"),
        ("re", "im"),
        [(v.real, v.imag) for v in reg.vertices],
    )
    _write_json(_out(args, "wrap_region.json"), {
        "value": [reg.mie_value.real, reg.mie_value.imag],
        "margin": reg.margin,
        "n_vertices": len(reg.vertices),
    })
    report.wrap_region_figure(_out(args, "wrap_region.png"), reg.vertices, reg.mie_value)
    print(f"margin {reg.margin:.4e} with {len(reg.vertices)} polygon vertices")
    if reg.margin < 0:
        raise IdentityViolation(f"exact value escapes the wrap region (margin {reg.margin:.3e})")
    return 0


def cmd_verify_all(args) -> int:
    indices = None
    if args.criteria:
        indices = {int(x) for x in args.criteria.split(",")}
    results = run_acceptance(seed=args.seed, indices=indices, echo=print)
    lines = [
        f"[{'PASS' if r.passed else 'FAIL'}] criterion {r.index:2d} {r.name}: "
        f"{r.detail} ({r.seconds:.1f}s)"
        for r in results
    ]
    n_fail = sum(not r.passed for r in results)
    lines.append(f"{len(results) - n_fail}/{len(results)} criteria passed")
    _atomic_write(_out(args, "acceptance_report.txt"), "\n".join(lines) + "\n")
    print(lines[-1])
    return 0 if n_fail == 0 else 3


# ------------------------------------------------------------------ parser

def _complex_arg(text: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wavebound",
        description=(
            "Bounds on complex quasistatic polarizability, finite-dimensional "
            "Y-problems, and acoustic scattering identities for a penetrable "
            "lossy sphere."
        ),
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=".", help="output directory")
    common.add_argument("--seed", type=int, default=20240901,
                        help="seed for randomized sweeps")
    common.add_argument("--threads", type=int, default=None,
                        help="worker threads for sweeps (default WAVEBOUND_THREADS or 1)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("hs-interval", parents=[common],
                       help="interval bounds on the trace polarizability for real contrast")
    p.add_argument("--chi1", type=_complex_arg, required=True)
    p.add_argument("--dim", type=int, choices=(2, 3), default=3)
    p.set_defaults(fn=cmd_hs_interval)

    p = sub.add_parser("bounds-region", parents=[common],
                       help="lens-shaped bound region (circular-arc curves) for lossy contrast")
    p.add_argument("--chi1", type=_complex_arg, required=True)
    p.add_argument("--dim", type=int, choices=(2, 3), default=3)
    p.add_argument("--samples", type=int, default=201)
    p.add_argument("--fraction", type=float, default=None,
                   help="volume fraction: bound the effective permittivity instead")
    p.set_defaults(fn=cmd_bounds_region)

    p = sub.add_parser("milton2d", parents=[common],
                       help="tightened two-dimensional bound curves (arc plus chord)")
    p.add_argument("--chi1", type=_complex_arg, required=True)
    p.add_argument("--samples", type=int, default=201)
    p.set_defaults(fn=cmd_milton2d)

    p = sub.add_parser("shape-alpha", parents=[common],
                       help="closed-form polarizability of a canonical shape")
    p.add_argument("--shape", choices=("ball", "shell", "ellipsoid", "coated"), required=True)
    p.add_argument("--chi1", type=_complex_arg, required=True)
    p.add_argument("--dim", type=int, choices=(2, 3), default=3)
    p.add_argument("--factors", default=None,
                   help="comma-separated depolarization factors (ellipsoid)")
    p.add_argument("--core-fraction", type=float, default=0.5, dest="core_fraction")
    p.set_defaults(fn=cmd_shape_alpha)

    p = sub.add_parser("grid-alpha", parents=[common],
                       help="pixel-grid polarizability with dilute extrapolation")
    p.add_argument("--config", required=True)
    p.set_defaults(fn=cmd_grid_alpha)

    p = sub.add_parser("y-solve", parents=[common],
                       help="solve a finite-dimensional Y-problem given its bases")
    p.add_argument("--config", required=True)
    p.set_defaults(fn=cmd_y_solve)

    p = sub.add_parser("network-y", parents=[common],
                       help="response matrix of a complex-impedance network")
    p.add_argument("--config", required=True)
    p.set_defaults(fn=cmd_network_y)

    p = sub.add_parser("mie-solve", parents=[common],
                       help="partial-wave solution for a penetrable lossy sphere")
    p.add_argument("--config", required=True)
    p.add_argument("--raw", action="store_true",
                   help="also emit raw dimensional far-field amplitudes")
    p.set_defaults(fn=cmd_mie_solve)

    p = sub.add_parser("optical-check", parents=[common],
                       help="extinction power by three routes; fails on disagreement")
    p.add_argument("--config", required=True)
    p.set_defaults(fn=cmd_optical_check)

    p = sub.add_parser("backscatter-bound", parents=[common],
                       help="shape-independent backscatter bound vs the exact solve")
    p.add_argument("--config", required=True)
    p.set_defaults(fn=cmd_backscatter_bound)

    p = sub.add_parser("wrap-region", parents=[common],
                       help="half-plane region wrapping the complex backscatter amplitude")
    p.add_argument("--config", required=True)
    p.set_defaults(fn=cmd_wrap_region)

    p = sub.add_parser("verify-all", parents=[common],
                       help="run the full acceptance suite and write a pass/fail report")
    p.add_argument("--criteria", default=None,
                   help="comma-separated criterion indices (default: all)")
    p.set_defaults(fn=cmd_verify_all)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except IdentityViolation as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
