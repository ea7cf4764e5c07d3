"""Command-line interface: ``simulate``, ``fit``, ``entangle`` and ``verify``.

Exit codes: 0 success, 1 verification failure, 2 input or domain error,
3 fit did not converge (outputs are still written).

Every command writes ``manifest.json`` echoing its effective parameters.
Options may also come from a JSON file given with ``--config``; keys are
option names with dashes replaced by underscores, and explicit flags win.
The default output directory is ``$DIMER_ENTANGLEMENT_OUTPUT_DIR`` or the
current directory.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    PARAMETERS,
    CompositeModel,
    FitConfig,
    FitResult,
    entanglement_profile,
    estimate_te,
    fit_curve,
    initial_model,
    model_chi,
    subtract_impurity,
    synthesize_curve,
    temperature_grid,
)
from .entanglement import (
    concurrence_wootters,
    concurrence_x_form,
    dimer_concurrence,
    entanglement_of_formation,
    entanglement_temperature,
    random_x_state,
)
from .errors import DomainError
from .io import ParseError, read_curve, write_curve, write_table
from .magnetics import bleaney_bowers_chi, curie_chi_dimer, peak_height_ratio, peak_ratio, te_over_tmax
from .separability import Term, canonical_decomposition, verify_decomposition
from .spin import DimerParams, limit_state, susceptibility_numeric, thermal_state

OUTPUT_ENV = "DIMER_ENTANGLEMENT_OUTPUT_DIR"

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_INPUT_ERROR = 2
EXIT_NOT_CONVERGED = 3


class UsageError(Exception):
    pass


def _write_json(path: Path, data) -> None:
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")


def _write_manifest(out: Path, args, outputs) -> None:
    params = {k: v for k, v in vars(args).items() if k not in ("func", "config")}
    _write_json(
        out / "manifest.json",
        {
            "command": args.command,
            "version": __version__,
            "units": "cgs",
            "parameters": params,
            "outputs": sorted(outputs),
        },
    )


def _output_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_simulate(args) -> int:
    try:
        model = CompositeModel(DimerParams(args.j_over_kb, args.g), p=args.p, theta=args.theta)
        grid = temperature_grid(args.tmin, args.tmax, args.step)
        if model.p > 0 and np.any(grid <= model.theta):
            raise DomainError("Weiss temperature must lie below the temperature grid")
        curve = synthesize_curve(model, grid, args.noise, args.seed, args.label)
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    out = _output_dir(args)
    write_curve(out / "curve.csv", curve)
    _write_manifest(out, args, ["curve.csv", "manifest.json"])
    print(f"wrote {len(curve)} points to {out / 'curve.csv'}")
    return EXIT_OK


def _parse_free(text: str) -> list[str]:
    names = [n.strip() for n in text.split(",") if n.strip()]
    for n in names:
        if n not in PARAMETERS:
            raise UsageError(f"unknown parameter {n!r}; choose from {', '.join(PARAMETERS)}")
    return names


def _parse_freeze(items) -> dict[str, float]:
    frozen = {}
    for item in items or []:
        name, sep, value = item.partition("=")
        if not sep or name.strip() not in PARAMETERS:
            raise UsageError(f"--freeze expects NAME=VALUE with NAME in {', '.join(PARAMETERS)}, got {item!r}")
        try:
            frozen[name.strip()] = float(value)
        except ValueError:
            raise UsageError(f"--freeze value for {name} is not a number: {value!r}") from None
    return frozen


def _subtract_with_notes(curve, model):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        corrected = subtract_impurity(curve, model)
    for w in caught:
        print(f"note: {w.message}")
    return corrected


def cmd_fit(args) -> int:
    curve = read_curve(args.input)
    free = _parse_free(args.free)
    frozen = _parse_freeze(args.freeze)
    free = [n for n in free if n not in frozen]
    try:
        init = initial_model(curve)
        explicit = {"J": args.init_j, "g": args.init_g, "p": args.init_p, "theta": args.init_theta}
        explicit = {k: v for k, v in explicit.items() if v is not None}
        init = init.with_values(**explicit, **frozen)
        config = FitConfig(tol=args.tol, max_iter=args.max_iter)
        result = fit_curve(curve, free, init, config)
    except DomainError as exc:
        raise UsageError(str(exc)) from None

    out = _output_dir(args)
    _write_json(out / "fit.json", result.to_dict())
    model_values = np.asarray(model_chi(result.model, curve.t))
    weights = np.ones_like(curve.t) if curve.sigma is None else curve.sigma
    write_table(
        out / "residuals.csv",
        ["temperature_K", "chi_cm3_per_mol", "chi_model", "residual", "normalized_residual"],
        zip(curve.t, curve.chi, model_values, curve.chi - model_values, (curve.chi - model_values) / weights),
    )
    corrected = _subtract_with_notes(curve, result.model)
    write_curve(out / "corrected_curve.csv", corrected)
    _write_manifest(out, args, ["fit.json", "residuals.csv", "corrected_curve.csv", "manifest.json"])

    v = result.model.values()
    print(
        f"J/k_B = {v['J']:.4f} K  g = {v['g']:.5f}  p = {v['p']:.5f}  theta = {v['theta']:.4f} K  "
        f"({result.iterations} iterations, converged={result.converged})"
    )
    return EXIT_OK if result.converged else EXIT_NOT_CONVERGED


def cmd_entangle(args) -> int:
    curve = read_curve(args.input)
    fitted = None
    if args.fit:
        try:
            fitted = FitResult.from_dict(json.loads(Path(args.fit).read_text()))
        except (OSError, ValueError, KeyError) as exc:
            raise UsageError(f"cannot read fit file {args.fit}: {exc}") from None
    if args.subtract_impurity:
        if fitted is None:
            raise UsageError("--subtract-impurity requires --fit")
        curve = _subtract_with_notes(curve, fitted.model)
    g = args.g if args.g is not None else (fitted.model.dimer.g if fitted else 2.0)

    profile = entanglement_profile(curve, g)
    te = estimate_te(curve, g, fitted)
    header = ["t", "chi", "C", "E", "clamped"]
    columns = [profile.t, profile.chi, profile.concurrence, profile.entanglement, profile.clamped.astype(int)]
    if fitted is not None:
        c_theory = np.atleast_1d(dimer_concurrence(fitted.model.dimer, profile.t))
        header += ["C_theory", "E_theory"]
        columns += [c_theory, np.atleast_1d(entanglement_of_formation(c_theory))]

    out = _output_dir(args)
    write_table(out / "profile.csv", header, zip(*columns))
    report = te.to_dict()
    report["g"] = g
    _write_json(out / "te.json", report)
    _write_manifest(out, args, ["profile.csv", "te.json", "manifest.json"])
    shown = {k: (None if v is None else round(v, 2)) for k, v in te.to_dict().items()}
    print(f"T_E estimates (K): {shown}")
    return EXIT_OK


def _verify_checks(grid: str, perturb: str | None):
    checks = []

    def add(name, ok, detail):
        checks.append((name, bool(ok), detail))

    for kind in ("at_te", "triplet_mixed"):
        decomp = canonical_decomposition(kind)
        if perturb and perturb.partition(":")[0] == kind:
            k = int(perturb.partition(":")[2] or 0)
            w, a, b = decomp.terms[k]
            decomp.terms[k] = Term(-w, a, b)
        report = verify_decomposition(decomp, limit_state(kind), 1e-14)
        detail = f"residual {report.max_abs_residual:.1e}" if report.ok else "; ".join(report.problems)
        add(f"decomposition {kind} reconstructs limit state", report.ok, detail)
        if report.ok:
            c = concurrence_wootters(limit_state(kind))
            add(f"decomposition {kind} has zero concurrence", c <= 1e-12, f"C = {c:.1e}")

    for name, value, printed in (
        ("k_B T_max / |J|", peak_ratio(), 1.2472),
        ("|J| chi_max / (N_A g^2 mu_B^2)", peak_height_ratio(), 0.2011),
        ("T_E / T_max", te_over_tmax(), 1.4596),
    ):
        shown = math.floor(value * 1e4) / 1e4
        add(f"constant {name}", shown == printed, f"{shown:.4f} ({value:.8f})")

    rng = np.random.default_rng(2024)
    n_j = 20 if grid == "coarse" else 200
    worst = 0.0
    for j in -rng.uniform(0.1, 500.0, n_j):
        t_e = entanglement_temperature(DimerParams(j))
        ratio = bleaney_bowers_chi(DimerParams(j), t_e) / (2.0 / 3.0 * curie_chi_dimer(2.0, t_e))
        worst = max(worst, abs(ratio - 1.0))
    add("crossing identity at T_E", worst <= 1e-10, f"max rel dev {worst:.1e}")

    js = np.linspace(-200, 200, 9 if grid == "coarse" else 41)
    ts = np.logspace(-1, 3, 9 if grid == "coarse" else 41)
    worst = 0.0
    for j in js:
        for t in ts:
            ref = bleaney_bowers_chi(DimerParams(j), t)
            num = susceptibility_numeric(DimerParams(j), t, 1.0)
            if max(ref, num) > 1e-290:
                worst = max(worst, abs(num - ref) / ref)
    add("Bleaney-Bowers vs Zeeman finite difference", worst <= 1e-6, f"max rel dev {worst:.1e}")

    n_states = 500 if grid == "coarse" else 10_000
    worst = max(
        abs(concurrence_x_form(rho) - concurrence_wootters(rho))
        for rho in (random_x_state(rng) for _ in range(n_states))
    )
    add("X-form vs Wootters concurrence", worst <= 1e-10, f"max abs dev {worst:.1e} over {n_states} states")

    afm, fm = DimerParams(-68.0), DimerParams(68.0)
    for label, rho, kind in (
        ("t -> 0, J < 0", thermal_state(afm, 1e-3), "zero_temp_afm"),
        ("t -> inf", thermal_state(afm, 1e12), "infinite_temp"),
        ("t = T_E", thermal_state(afm, entanglement_temperature(afm)), "at_te"),
        ("t -> 0, J > 0", thermal_state(fm, 1e-3), "triplet_mixed"),
    ):
        dev = float(np.max(np.abs(rho - limit_state(kind))))
        add(f"thermal state {label}", dev <= 1e-9, f"max dev {dev:.1e}")
    return checks


def cmd_verify(args) -> int:
    checks = _verify_checks(args.grid, args.perturb)
    width = max(len(name) for name, _, _ in checks)
    for name, ok, detail in checks:
        print(f"{'PASS' if ok else 'FAIL'}  {name:<{width}}  {detail}")
    failed = [name for name, ok, _ in checks if not ok]
    print(f"{len(checks) - len(failed)}/{len(checks)} checks passed")
    return EXIT_OK if not failed else EXIT_VERIFY_FAILED


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    parser = argparse.ArgumentParser(
        prog="dimer-entanglement",
        description="Thermal entanglement of Heisenberg dimers from magnetic susceptibility.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    default_out = os.environ.get(OUTPUT_ENV, ".")

    def common(p):
        p.add_argument("--out", default=default_out, help="output directory")
        p.add_argument("--config", help="JSON file of option defaults")

    sim = sub.add_parser("simulate", help="write a synthetic chi(T) curve")
    sim.add_argument("--j-over-kb", type=float, default=-68.0, help="exchange J/k_B in K")
    sim.add_argument("--g", type=float, default=2.0)
    sim.add_argument("--p", type=float, default=0.017, help="impurity fraction")
    sim.add_argument("--theta", type=float, default=0.0, help="impurity Weiss temperature in K")
    sim.add_argument("--tmin", type=float, default=5.0)
    sim.add_argument("--tmax", type=float, default=300.0)
    sim.add_argument("--step", type=float, default=2.5)
    sim.add_argument("--noise", type=float, default=0.0, help="Gaussian noise sigma in cm^3/mol")
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--label", default="synthetic dimer")
    common(sim)
    sim.set_defaults(func=cmd_simulate)

    fit = sub.add_parser("fit", help="fit the dimer + impurity model")
    fit.add_argument("input", help="curve CSV")
    fit.add_argument("--free", default="J,g,p", help="comma-separated free parameters from J,g,p,theta")
    fit.add_argument("--freeze", action="append", metavar="NAME=VALUE", help="fix a parameter")
    fit.add_argument("--init-j", type=float)
    fit.add_argument("--init-g", type=float)
    fit.add_argument("--init-p", type=float)
    fit.add_argument("--init-theta", type=float)
    fit.add_argument("--tol", type=float, default=1e-8)
    fit.add_argument("--max-iter", type=int, default=200)
    common(fit)
    fit.set_defaults(func=cmd_fit)

    ent = sub.add_parser("entangle", help="concurrence, entanglement and T_E from a curve")
    ent.add_argument("input", help="curve CSV (raw or impurity-corrected)")
    ent.add_argument("--g", type=float, help="g-factor (default: from --fit, else 2)")
    ent.add_argument("--fit", help="fit.json to supply the fitted J and theory columns")
    ent.add_argument("--subtract-impurity", action="store_true", help="remove the fitted impurity term first")
    common(ent)
    ent.set_defaults(func=cmd_entangle)

    ver = sub.add_parser("verify", help="run the built-in consistency checks")
    ver.add_argument("--grid", choices=("coarse", "fine"), default="coarse")
    ver.add_argument("--perturb", help=argparse.SUPPRESS)
    common(ver)
    ver.set_defaults(func=cmd_verify)

    return parser, {"simulate": sim, "fit": fit, "entangle": ent, "verify": ver}


def main(argv=None) -> int:
    parser, subparsers = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        try:
            config = json.loads(Path(args.config).read_text())
        except (OSError, ValueError) as exc:
            print(f"error: cannot read config {args.config}: {exc}", file=sys.stderr)
            return EXIT_INPUT_ERROR
        subparsers[args.command].set_defaults(**{k.replace("-", "_"): v for k, v in config.items()})
        args = parser.parse_args(argv)
    started = time.perf_counter()
    try:
        code = args.func(args)
    except (UsageError, ParseError, DomainError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    if args.command != "verify":
        print(f"done in {time.perf_counter() - started:.2f} s")
    return code


if __name__ == "__main__":
    sys.exit(main())
