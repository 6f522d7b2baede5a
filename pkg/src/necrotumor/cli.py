"""Command-line front end.

Subcommands mirror the library modules: parameter validation
(`check`), stationary states (`stationary`), radius dynamics
(`evolve`), linear stability (`spectrum`), the radial obstacle-problem
cross-check (`oracle`), the axisymmetric mode-response measurement
(`mode-response`), and the combined verification run (`all`).

Options can come from a `key = value` config file (--config); flags
given on the command line override the file.  The output directory can
additionally be overridden by the NECROTUMOR_OUTDIR environment
variable.  Exit codes: 0 success, 1 usage error, 2 parameter
validation error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import dynamics, kernels, oracle, radial, spectrum
from .params import ARTIFACT_VERSION, ModelParams, ParameterError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3

_CONFIG_KEYS = {
    "sigma_hat": float,
    "mu": float,
    "nu": float,
    "gamma": float,
    "tol": float,
    "R": float,
    "R0": float,
    "T": float,
    "k": int,
    "k_max": int,
    "n": int,
    "ns": int,
    "nt": int,
    "eps": str,   # comma-separated list
    "outdir": str,
}


def _read_config(path: str) -> dict:
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        key, _, val = line.partition("=")
        key = key.strip()
        if key not in _CONFIG_KEYS:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = _CONFIG_KEYS[key](val.strip())
    return values


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="necrotumor",
        description="necrotic-tumor free-boundary model toolkit",
    )
    ap.add_argument("--config", help="key = value configuration file")
    ap.add_argument("--sigma-hat", dest="sigma_hat", type=float, default=None,
                    help="nutrient threshold (0, 1)")
    ap.add_argument("--mu", type=float, default=None, help="proliferation rate")
    ap.add_argument("--nu", type=float, default=None, help="death rate")
    ap.add_argument("--gamma", type=float, default=None,
                    help="surface tension coefficient")
    ap.add_argument("--tol", type=float, default=None,
                    help="solver tolerance (default 1e-12)")
    ap.add_argument("--outdir", default=None, help="output directory")
    sub = ap.add_subparsers(dest="command", required=True)

    sub.add_parser("check", help="validate parameters and report derived constants")

    sp = sub.add_parser("stationary", help="radial stationary state and profiles")
    sp.add_argument("--R", type=float, default=None,
                    help="also export the profile at this radius (default R_s)")

    sp = sub.add_parser("evolve", help="integrate the radius dynamics")
    sp.add_argument("--R0", type=float, default=None, help="initial radius")
    sp.add_argument("--T", type=float, default=None, help="horizon (default 200)")

    sp = sub.add_parser("spectrum", help="mode table, gamma*, stability verdict")
    sp.add_argument("--k-max", dest="k_max", type=int, default=None,
                    help="largest degree scanned for gamma* (default 256)")

    sp = sub.add_parser("oracle", help="obstacle-problem cross-check of the closed forms")
    sp.add_argument("--R", type=float, default=None, help="domain radius (default R_s)")
    sp.add_argument("--n", type=int, default=None, help="base grid size (default 256)")

    sp = sub.add_parser("mode-response", help="free-boundary mode gains + axisymmetric check")
    sp.add_argument("--k", type=int, default=None, help="measured degree (default 2)")
    sp.add_argument("--ns", type=int, default=None, help="radial grid size (default 256)")
    sp.add_argument("--nt", type=int, default=None, help="angular grid size (default 64)")
    sp.add_argument("--eps", default=None, help="comma-separated eps list (default 0.01,0.02)")

    sub.add_parser("all", help="full verification suite with pass/fail summary")
    return ap


def _merge_options(args) -> dict:
    opts = {}
    if args.config:
        opts.update(_read_config(args.config))
    for key in _CONFIG_KEYS:
        val = getattr(args, key, None)
        if val is not None:
            opts[key] = val
    env_outdir = os.environ.get("NECROTUMOR_OUTDIR")
    if env_outdir:
        opts["outdir"] = env_outdir
    opts.setdefault("sigma_hat", 0.5)
    opts.setdefault("mu", 1.0)
    opts.setdefault("nu", 0.25)
    opts.setdefault("gamma", 0.0)
    opts.setdefault("tol", 1e-12)
    opts.setdefault("outdir", ".")
    return opts


def _write_json(path: Path, payload: dict):
    payload = {"version": ARTIFACT_VERSION, **payload}
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def cmd_check(p: ModelParams, opts, outdir: Path) -> int:
    Rstar = radial.solve_Rstar(p, opts["tol"])
    st = radial.solve_Rs(p, opts["tol"])
    report = {
        "params": p.as_dict(),
        "R_star": Rstar,
        "R_s": st.R_s,
        "K_s": st.K_s,
        "g_at_1": st.g_at_1,
        "backend": kernels.BACKEND,
    }
    _write_json(outdir / "check.json", report)
    print(f"parameters valid; R* = {Rstar:.12g}, R_s = {st.R_s:.12g}, "
          f"K_s = {st.K_s:.12g}")
    return EXIT_OK


def cmd_stationary(p: ModelParams, opts, outdir: Path) -> int:
    st = radial.solve_Rs(p, opts["tol"])
    R = opts.get("R", st.R_s)
    profile = radial.sample_profile(R, p)
    radial.export_profile_csv(outdir / "profile.csv", profile, tol=opts["tol"])
    radial.export_state_json(outdir / "stationary.json", st)
    print(f"R* = {radial.solve_Rstar(p):.12g}  R_s = {st.R_s:.12g}  "
          f"K_s = {st.K_s:.12g}  K({R:.6g}) = {profile.K:.12g}")
    return EXIT_OK


def cmd_evolve(p: ModelParams, opts, outdir: Path) -> int:
    st = radial.solve_Rs(p, opts["tol"])
    R0 = opts.get("R0", 0.5 * st.R_s)
    T = opts.get("T", 200.0)
    traj = dynamics.integrate(p, R0, T)
    traj.export_csv(outdir / "trajectory.csv")
    traj.export_json(outdir / "trajectory.json")
    print(f"R({T:g}) = {traj.R[-1]:.12g} (R_s = {st.R_s:.12g}); "
          f"onset_time = {traj.onset_time}")
    return EXIT_OK


def cmd_spectrum(p: ModelParams, opts, outdir: Path) -> int:
    st = radial.solve_Rs(p, opts["tol"])
    report = spectrum.compute_spectrum(st, gamma=p.gamma,
                                       k_max=opts.get("k_max", 256))
    report.export_csv(outdir / "spectrum.csv")
    report.export_json(outdir / "spectrum.json")
    print(f"gamma* = {report.gamma_star:.12g} at k = {report.argmax_k} "
          f"(tail certified: {report.certified})")
    print(f"verdict at gamma = {p.gamma:g}: {report.verdict}")
    return EXIT_OK


def cmd_oracle(p: ModelParams, opts, outdir: Path) -> int:
    st = radial.solve_Rs(p, opts["tol"])
    R = opts.get("R", st.R_s)
    n = opts.get("n", 256)
    K = radial.solve_K(R, p)
    rows = []
    errs = []
    for m in (n, 2 * n, 4 * n):
        vi = oracle.solve_radial_vi(R, p, n=m, tol=min(opts["tol"], 1e-12))
        err = float(np.max(np.abs(vi.sigma - radial.eval_U(vi.r, R, p))))
        errs.append(err)
        rows.append({
            "n": m, "sup_error": err, "free_boundary": vi.free_boundary,
            "free_boundary_error": abs(vi.free_boundary - K),
            "sweeps": vi.sweeps, "complementarity": vi.complementarity,
        })
    order = float(np.log2(errs[0] / errs[2]) / 2.0)
    vi = oracle.solve_radial_vi(R, p, n=n, tol=min(opts["tol"], 1e-12))
    with open(outdir / "oracle_profile.csv", "w") as fh:
        fh.write(
            f"# necrotumor v{ARTIFACT_VERSION} oracle profile R={R!r} n={n} "
            f"sigma_hat={p.sigma_hat!r} mu={p.mu!r} nu={p.nu!r} tol={opts['tol']!r}\n"
        )
        fh.write("r,sigma_oracle,sigma_closed_form\n")
        closed = np.asarray(radial.eval_U(vi.r, R, p))
        for r, a, b in zip(vi.r, vi.sigma, closed):
            fh.write(f"{r!r},{a!r},{b!r}\n")
    _write_json(outdir / "oracle.json", {
        "params": p.as_dict(), "R": R, "K_closed_form": K,
        "refinements": rows, "aggregate_order": order,
        "backend": kernels.BACKEND,
    })
    print(f"sup errors {errs} -> aggregate order {order:.2f}; "
          f"free boundary {rows[-1]['free_boundary']:.6g} vs K = {K:.6g}")
    return EXIT_OK if order >= 1.5 else EXIT_NUMERICAL


def cmd_mode_response(p: ModelParams, opts, outdir: Path) -> int:
    st = radial.solve_Rs(p, opts["tol"])
    k = opts.get("k", 2)
    eps_values = tuple(float(e) for e in str(opts.get("eps", "0.01,0.02")).split(","))
    gains = {kk: spectrum.ModeSolution(kk, st).zeta_gain for kk in range(0, 9)}
    measured = oracle.measure_mode_gain(st.R_s, p, k, eps_values=eps_values,
                                        ns=opts.get("ns", 256),
                                        nt=opts.get("nt", 64))
    _write_json(outdir / "mode_response.json", {
        "params": p.as_dict(), "R_s": st.R_s, "K_s": st.K_s,
        "analytic_gains": gains, "measured": {
            "k": k, "gains": {str(e): g for e, g in measured["gains"].items()},
            "richardson": measured.get("richardson"),
            "K_ref": measured["K_ref"],
        },
    })
    ref = measured.get("richardson", list(measured["gains"].values())[-1])
    rel = abs(ref - gains[k]) / abs(gains[k])
    print(f"zeta_{k}: analytic {gains[k]:.6g}, measured {ref:.6g} "
          f"(rel dev {rel:.2%})")
    return EXIT_OK if rel <= 0.10 else EXIT_NUMERICAL


def cmd_all(p: ModelParams, opts, outdir: Path) -> int:
    failures = []
    results = {}

    def record(name, ok, detail):
        results[name] = {"pass": bool(ok), "detail": detail}
        if not ok:
            failures.append(name)
        print(f"  [{'PASS' if ok else 'FAIL'}] {name}: {detail}")

    st = radial.solve_Rs(p, opts["tol"])
    print(f"verification suite (sigma_hat={p.sigma_hat}, mu={p.mu}, nu={p.nu})")

    m0 = spectrum.ModeSolution(0, st)
    m1 = spectrum.ModeSolution(1, st)
    a1 = m1.a_of(1.0)
    record("threshold-identities",
           m0.a_of(1.0) < 0.0 and abs(a1) <= 1e-8 * abs(st.g_at_1 * st.R_s),
           f"a0={m0.a_of(1.0):.3e}, a1={a1:.3e}")

    r = np.linspace(st.K_s, st.R_s, 257)[1:]
    u1_ref = st.R_s * st.sigma_prime(r) / (r * st.sigma_s_prime_at_Rs)
    err = float(np.max(np.abs(m1.ubar(r) - u1_ref)))
    record("mode-1-closed-form", err <= 1e-9, f"sup err {err:.3e}")

    gs, kstar, cert, _ = spectrum.find_gamma_star(st, k_max=64)
    record("gamma-star", gs > 0.0 and cert,
           f"gamma*={gs:.6g} at k={kstar}, certified={cert}")

    rep = spectrum.compute_spectrum(st, gamma=2.0 * gs, k_max=64, k_report=64)
    bad = [int(k) for k in rep.k_table if k != 1 and rep.a_k[k] >= 0.0]
    record("stability-at-2gamma-star", not bad,
           rep.verdict if not bad else f"a_k >= 0 at k={bad}")

    tr = dynamics.integrate(p, 0.5 * st.R_s, 200.0)
    record("dynamics-convergence", abs(tr.R[-1] - st.R_s) < 1e-5,
           f"|R(200)-R_s|={abs(tr.R[-1] - st.R_s):.3e}")

    vi = oracle.solve_radial_vi(st.R_s, p, n=512, tol=1e-12)
    err = float(np.max(np.abs(vi.sigma - radial.eval_U(vi.r, st.R_s, p))))
    record("radial-oracle",
           err < 1e-4 and abs(vi.free_boundary - st.K_s) < 2 * vi.h,
           f"sup err {err:.3e}, fb err {abs(vi.free_boundary - st.K_s):.3e}")

    _write_json(outdir / "verification.json", {
        "params": p.as_dict(), "results": results, "failures": failures,
    })
    if failures:
        print(f"{len(failures)} suite(s) failed: {', '.join(failures)}")
        return EXIT_NUMERICAL
    print("all suites green")
    return EXIT_OK


_COMMANDS = {
    "check": cmd_check,
    "stationary": cmd_stationary,
    "evolve": cmd_evolve,
    "spectrum": cmd_spectrum,
    "oracle": cmd_oracle,
    "mode-response": cmd_mode_response,
    "all": cmd_all,
}


def main(argv=None) -> int:
    ap = _build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        opts = _merge_options(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        p = ModelParams(opts["sigma_hat"], opts["mu"], opts["nu"], opts["gamma"])
    except ParameterError as exc:
        print(f"invalid parameters: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    outdir = Path(opts["outdir"])
    outdir.mkdir(parents=True, exist_ok=True)
    try:
        return _COMMANDS[args.command](p, opts, outdir)
    except (oracle.ConvergenceError, RuntimeError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
