"""Command-line driver.

Subcommands: spectrum, stability-map, evolve, wave, delay, verify.
Exit codes: 0 success, 2 validation error (before any computation),
3 numerical failure (after flushing partial results).  Randomised
batteries use a fixed default seed so identical configurations produce
byte-identical output files; the seed is recorded in the output header.
"""

from __future__ import annotations

import argparse
import io
import json
import sys

import numpy as np

from . import __version__
from .analytic import SystemParams
from .blocks import (osc_check, triangular_block_semigroup,
                     triangular_semigroup_check)
from .delays import delay_independence_report
from .discrete import assemble, discrete_resolvent, discrete_spectrum
from .errors import NumericalFailure
from .evolution import evolve, wave_evolve
from .spectral import (SearchWindow, default_re_min, find_spectrum,
                       real_spectral_bound, ues_closed_form)

DEFAULT_SEED = 0xD7DB
SCHEMA_VERSION = 1


def _fmt(x):
    return f"{float(x):.17g}"


def _parse_range(text):
    """lo:hi:count range (count an integer) or lo:hi:step (step with a dot)."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"range must be lo:hi:count or lo:hi:step, got {text!r}")
    lo, hi = float(parts[0]), float(parts[1])
    if "." in parts[2] or "e" in parts[2].lower():
        step = float(parts[2])
        if step <= 0:
            raise ValueError("range step must be positive")
        n = int(round((hi - lo) / step)) + 1
        return np.array([lo + i * step for i in range(n) if lo + i * step <= hi + 1e-12])
    count = int(parts[2])
    if count < 1:
        raise ValueError("range count must be >= 1")
    return np.linspace(lo, hi, count) if count > 1 else np.array([lo])


def _write(path, text):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _params_from(args):
    return SystemParams(args.alpha, args.beta, args.k)


def cmd_spectrum(args) -> int:
    params = _params_from(args)
    if args.re_min is not None:
        re_min = args.re_min
    else:
        # cover the five rightmost roots for the discrete pairing
        from .spectral import dirichlet_eigenvalue
        re_min = min(default_re_min(params), dirichlet_eigenvalue(params, 5) - 10.0)
    re_max = args.re_max if args.re_max is not None else 10.0
    window = SearchWindow(re_min, re_max, args.im_min, args.im_max, args.density)
    report = find_spectrum(params, window)

    op = assemble(params, args.n)
    ev = discrete_spectrum(op)[:5]
    pairing = []
    for z in ev:
        if report.roots:
            pairing.append(min(abs(z - r) for r in report.roots))
        else:
            pairing.append(float("nan"))

    doc = {
        "schema_version": SCHEMA_VERSION,
        "seed": args.seed,
        "command": "spectrum",
        "params": {"alpha": [params.alpha.real, params.alpha.imag],
                   "beta": [params.beta.real, params.beta.imag], "k": params.k},
        "window": {"re_min": window.re_min, "re_max": window.re_max,
                   "im_min": window.im_min, "im_max": window.im_max,
                   "grid_density": window.grid_density},
        "roots": [{"re": z.real, "im": z.imag, "residual": r}
                  for z, r in zip(report.roots, report.residuals)],
        "sigma_d_points": report.sigma_d_points,
        "spectral_bound": report.spectral_bound,
        "verdict": report.verdict,
        "discrete": {
            "n_interior": args.n,
            "rightmost": [[z.real, z.imag] for z in ev],
            "pairing_errors": pairing,
        },
    }
    _write(args.output, json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return 0


def cmd_stability_map(args) -> int:
    alphas = _parse_range(args.alpha)
    betas = _parse_range(args.beta)
    lines = [f"# schema_version={SCHEMA_VERSION} seed={args.seed} k={_fmt(args.k)}",
             "alpha,beta,closed_form_ues,spectral_bound,agree"]
    disagreements = 0
    total = 0
    partial = False
    try:
        for a in alphas:
            for b in betas:
                params = SystemParams(a, b, args.k)
                ues = ues_closed_form(params)
                bound = real_spectral_bound(params)
                agree = int((bound < 0) == ues or abs(bound) <= 1e-6)
                if not agree:
                    disagreements += 1
                total += 1
                lines.append(f"{_fmt(a)},{_fmt(b)},{int(ues)},{_fmt(bound)},{agree}")
    except NumericalFailure as exc:
        partial = True
        print(f"error: {exc}", file=sys.stderr)
    _write(args.output, "\n".join(lines) + "\n")
    print(f"stability map: {total} points, {disagreements} disagreements "
          f"(boundary band |bound| <= 1e-6 excluded)")
    return 3 if partial else 0


def cmd_evolve(args) -> int:
    params = _params_from(args)
    op = assemble(params, args.n)
    rng = np.random.default_rng(args.seed)
    if args.ic == "constant":
        u0 = np.ones(op.size)
    else:
        u0 = rng.random(op.size)
    traj = evolve(op, u0, args.T, args.dt, scheme=args.scheme)
    header = (f"# schema_version={SCHEMA_VERSION} seed={args.seed} command=evolve "
              f"alpha={_fmt(params.alpha.real)} beta={_fmt(params.beta.real)} "
              f"k={_fmt(params.k)} n={args.n} dt={_fmt(args.dt)} T={_fmt(args.T)} "
              f"scheme={args.scheme} ic={args.ic}\n")
    buf = io.StringIO()
    traj.to_csv(buf)
    _write(args.output, header + buf.getvalue())
    return 0


def cmd_wave(args) -> int:
    params = SystemParams(args.alpha, args.beta, 0.0)
    n = args.n + 2
    x = np.linspace(0.0, 1.0, n)
    if args.ic == "sine":
        f, g = np.sin(np.pi * x), np.zeros(n)
    elif args.ic == "bump":
        f, g = x * (1.0 - x), np.zeros(n)
    else:
        f, g = np.zeros(n), np.zeros(n)
    traj = wave_evolve(params, f, g, args.T, args.dt)
    lines = [f"# schema_version={SCHEMA_VERSION} seed={args.seed} command=wave "
             f"alpha={_fmt(params.alpha.real)} beta={_fmt(params.beta.real)} "
             f"n={args.n} dt={_fmt(args.dt)} T={_fmt(args.T)} ic={args.ic}",
             "time,energy,displacement_0,displacement_1"]
    for i, t in enumerate(traj.times):
        lines.append(f"{_fmt(t)},{_fmt(traj.energies[i])},"
                     f"{_fmt(traj.displacements[i, 0].real)},"
                     f"{_fmt(traj.displacements[i, -1].real)}")
    _write(args.output, "\n".join(lines) + "\n")
    return 0


def cmd_delay(args) -> int:
    r_values = _parse_range(args.r_sweep)
    report = delay_independence_report([[args.a]], [[args.psi]], list(r_values))
    doc = json.loads(report.to_json())
    doc["seed"] = args.seed
    _write(args.output, json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return 0


def _verify_battery(quick, seed):
    """Yield (name, value, threshold, ok) for each structural check."""
    rng = np.random.default_rng(seed)
    n_osc = 100 if quick else 10_000
    n_grid = 64 if quick else 200

    violations = 0
    for _ in range(n_osc):
        M_inv = rng.normal(size=(4, 4)) + 0.2 * np.eye(4)
        if abs(np.linalg.det(M_inv)) < 1e-6:
            continue
        res = osc_check(M_inv[:2, :2], M_inv[:2, 2:], M_inv[2:, :2], M_inv[2:, 2:])
        if not res.equivalence_holds:
            violations += 1
    yield ("coupling_criterion_violations", float(violations), 0.0, violations == 0)

    worst = 0.0
    for _ in range(5 if quick else 100):
        A = rng.normal(size=(3, 3)) - 2.5 * np.eye(3)
        D = rng.normal(size=(3, 3)) - 2.5 * np.eye(3)
        L = rng.normal(size=(3, 3))
        worst = max(worst, triangular_semigroup_check(A, D, L, 1.0, 512 if quick else 2048))
    yield ("triangular_flow_block_error", worst, 1e-6, worst <= 1e-6)

    A = rng.normal(size=(3, 3)) - 2.5 * np.eye(3)
    D = rng.normal(size=(3, 3)) - 2.5 * np.eye(3)
    L = rng.normal(size=(3, 3))
    law = float(np.abs(triangular_block_semigroup(A, D, L, 0.7, 2048)
                       @ triangular_block_semigroup(A, D, L, 0.5, 2048)
                       - triangular_block_semigroup(A, D, L, 1.2, 2048)).max())
    yield ("triangular_flow_composition", law, 1e-8, law <= 1e-8)

    from .discrete import dirichlet_relation_residual
    params = SystemParams(1.0, -2.0, 1.0)
    res = dirichlet_relation_residual(params, 1.0, n_grid)
    thr = 1e-2 if quick else 1e-3
    yield ("dirichlet_resolvent_relation", res, thr, res <= thr)

    params = SystemParams(1.0, 1.0, 0.0)
    op = assemble(params, 64)
    worst = 0.0
    for lam in (1e2, 1e3):
        R = discrete_resolvent(op, lam)
        worst = min(worst, float(R.real.min()))
    yield ("resolvent_positivity_min_entry", worst, -1e-12, worst >= -1e-12)

    a, b = rng.uniform(-2, 2, size=2)
    defect0 = assemble(SystemParams(a, b, 0.0), 64).symmetry_defect()
    yield ("weighted_symmetry_defect_k0", defect0, 1e-12, defect0 <= 1e-12)
    defect1 = assemble(SystemParams(a, b, 1.0), 64).symmetry_defect()
    yield ("weighted_symmetry_defect_k1_lower", defect1, 1e-4, defect1 > 1e-4)


def cmd_verify(args) -> int:
    quick = args.quick
    print(f"# schema_version={SCHEMA_VERSION} seed={args.seed} "
          f"mode={'quick' if quick else 'full'}")
    all_ok = True
    for name, value, threshold, ok in _verify_battery(quick, args.seed):
        all_ok &= ok
        print(f"{name}: value={value:.6g} threshold={threshold:.6g} "
              f"{'PASS' if ok else 'FAIL'}")
    return 0 if all_ok else 3


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dynbc",
                                description="spectra, stability and evolution for a "
                                            "diffusion-transport system with dynamical "
                                            "boundary conditions")
    p.add_argument("--version", action="version", version=f"dynbc {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, with_params=True):
        if with_params:
            sp.add_argument("--alpha", type=float, required=True)
            sp.add_argument("--beta", type=float, required=True)
            sp.add_argument("--k", type=float, default=0.0)
        sp.add_argument("--seed", type=lambda s: int(s, 0), default=DEFAULT_SEED)
        sp.add_argument("-o", "--output", default=None,
                        help="output file (default: stdout)")

    sp = sub.add_parser("spectrum", help="characteristic roots vs discrete eigenvalues")
    common(sp)
    sp.add_argument("--n", type=int, default=256, help="interior grid points")
    sp.add_argument("--re-min", type=float, default=None)
    sp.add_argument("--re-max", type=float, default=None)
    sp.add_argument("--im-min", type=float, default=-5.0)
    sp.add_argument("--im-max", type=float, default=5.0)
    sp.add_argument("--density", type=int, default=4)
    sp.set_defaults(func=cmd_spectrum)

    sp = sub.add_parser("stability-map", help="closed-form stability vs spectral bound")
    sp.add_argument("--alpha", required=True, help="range lo:hi:count")
    sp.add_argument("--beta", required=True, help="range lo:hi:count")
    sp.add_argument("--k", type=float, default=0.0)
    common(sp, with_params=False)
    sp.set_defaults(func=cmd_stability_map)

    sp = sub.add_parser("evolve", help="implicit time integration")
    common(sp)
    sp.add_argument("--n", type=int, default=64)
    sp.add_argument("--dt", type=float, default=1e-2)
    sp.add_argument("--T", type=float, default=1.0)
    sp.add_argument("--scheme", choices=("BackwardEuler", "CrankNicolson"),
                    default="CrankNicolson")
    sp.add_argument("--ic", choices=("constant", "random"), default="constant")
    sp.set_defaults(func=cmd_evolve)
    sp.add_argument("--constant-ic", dest="ic", action="store_const", const="constant",
                    help="shorthand for --ic constant")

    sp = sub.add_parser("wave", help="second-order system via first-order reduction")
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--beta", type=float, required=True)
    common(sp, with_params=False)
    sp.add_argument("--n", type=int, default=200)
    sp.add_argument("--dt", type=float, default=1e-3)
    sp.add_argument("--T", type=float, default=1.0)
    sp.add_argument("--ic", choices=("sine", "bump", "zero"), default="sine")
    sp.set_defaults(func=cmd_wave)

    sp = sub.add_parser("delay", help="delay-independence of stability")
    sp.add_argument("--a", type=float, required=True)
    sp.add_argument("--psi", type=float, required=True)
    sp.add_argument("--r-sweep", required=True, help="range lo:hi:step")
    common(sp, with_params=False)
    sp.set_defaults(func=cmd_delay)

    sp = sub.add_parser("verify", help="structural identity battery")
    sp.add_argument("--quick", action="store_true")
    common(sp, with_params=False)
    sp.set_defaults(func=cmd_verify)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors, matching the validation code
        return int(exc.code) if exc.code else 0
    try:
        validate(args)
    except ValueError as exc:
        print(f"invalid arguments: {exc}", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"invalid arguments: {exc}", file=sys.stderr)
        return 2
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


def validate(args) -> None:
    """Cheap precondition checks before any computation."""
    if getattr(args, "k", None) is not None and args.k < 0:
        raise ValueError(f"k must be >= 0, got {args.k}")
    for name in ("dt", "T"):
        v = getattr(args, name, None)
        if v is not None and v <= 0:
            raise ValueError(f"{name} must be positive, got {v}")
    n = getattr(args, "n", None)
    if n is not None and n < 8:
        raise ValueError(f"n must be >= 8, got {n}")
    density = getattr(args, "density", None)
    if density is not None and density < 4:
        raise ValueError(f"density must be >= 4, got {density}")
    for name in ("alpha", "beta", "r_sweep"):
        v = getattr(args, name, None)
        if isinstance(v, str) and name != "r_sweep":
            _parse_range(v)
    if getattr(args, "r_sweep", None) is not None:
        _parse_range(args.r_sweep)


if __name__ == "__main__":
    raise SystemExit(main())
