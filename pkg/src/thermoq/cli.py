"""Command-line front end.

Subcommands: steady | evolve | sweep | optimize-e2 | carnot | compare.

Machine-readable output (JSON or CSV) goes to stdout or the --out file;
human-oriented summaries and diagnostics go to stderr.  Exit codes:
0 success, 2 validation error, 3 solver degeneracy, 4 search failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .collision import default_dt, evolve, heat_currents, trace_distance_to_product
from .config import RunConfig, load_config_file, resolve_config
from .errors import (
    DegenerateGeneratorError,
    SearchError,
    ThermoqError,
    ValidationError,
)
from .model import carnot_e2
from .operators import ket, ketbra
from .qutrit import compare, random_comparison_search
from .reports import steady_state
from .sweep import (
    SweepSpec,
    config_header_lines,
    optimize_e2,
    run_sweep,
    scan_optimal_e2,
    write_scan_csv,
    write_sweep_csv,
    write_trajectory_csv,
)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_DEGENERATE = 3
EXIT_SEARCH = 4


def _common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="PATH", help="JSON config file; flags override it")
    p.add_argument("--model", choices=("collision", "bosonic", "qutrit", "compare"))
    for flag, field in (
        ("--e1", "e1"), ("--e2", "e2"),
        ("--tc", "t_c"), ("--tr", "t_r"), ("--th", "t_h"),
        ("--pc", "p_c"), ("--pr", "p_r"), ("--ph", "p_h"),
        ("--gamma-c", "gamma_c"), ("--gamma-r", "gamma_r"), ("--gamma-h", "gamma_h"),
        ("--qutrit-pc-scale", "qutrit_pc_scale"),
    ):
        p.add_argument(flag, dest=field, type=float, metavar="X")
    p.add_argument("--out", metavar="PATH", help="write machine output here instead of stdout")
    p.add_argument("--plot", action="store_true",
                   help="also render an SVG figure next to --out")
    p.add_argument("--seed", type=int, default=0, metavar="N",
                   help="seed for randomized modes")
    p.add_argument("--verbose", action="store_true", help="chattier stderr")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="thermoq",
        description="Two-qubit absorption refrigerator with reversed bath "
                    "couplings: steady states, currents, sweeps, optimization, "
                    "and the three-level comparison.",
    )
    parser.add_argument("--version", action="version", version=f"thermoq {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("steady", help="stationary state and heat currents")
    _common_flags(p)

    p = sub.add_parser("evolve", help="integrate the master equation, emit a trajectory CSV")
    _common_flags(p)
    p.add_argument("--t-final", type=float, default=100.0, metavar="T")
    p.add_argument("--dt", type=float, default=None, metavar="DT",
                   help="integration step (default resolves the fastest scale)")
    p.add_argument("--samples", type=int, default=201, metavar="N",
                   help="number of emitted sample times")
    p.add_argument("--rho0", default="ground", metavar="STATE",
                   help="initial state: ground | mixed | stationary | basis:<label>")

    p = sub.add_parser("sweep", help="grid over one parameter, emit a CSV table")
    _common_flags(p)
    p.add_argument("--sweep", required=True, metavar="SPEC",
                   help="param:min:max:count[:log], e.g. th:1.2:100:50")

    p = sub.add_parser("optimize-e2", help="maximize Q_c over the E2 gap")
    _common_flags(p)
    p.add_argument("--e2-max", type=float, default=12.0, metavar="X")
    p.add_argument("--xtol", type=float, default=1e-6, metavar="X")
    p.add_argument("--scan", metavar="SPEC",
                   help="tabulate E2_opt over a T_h grid: min:max:count[:log]")

    p = sub.add_parser("carnot", help="locate and verify the reversible point")
    _common_flags(p)

    p = sub.add_parser("compare", help="two-qubit fridge vs the three-level benchmark")
    _common_flags(p)
    p.add_argument("--search", type=int, default=0, metavar="N",
                   help="additionally run N random comparison draws")

    return parser


def _overrides(args: argparse.Namespace) -> dict[str, Any]:
    fields = (
        "model", "e1", "e2", "t_c", "t_r", "t_h", "p_c", "p_r", "p_h",
        "gamma_c", "gamma_r", "gamma_h", "qutrit_pc_scale",
    )
    return {f: getattr(args, f) for f in fields if getattr(args, f, None) is not None}


def _resolve(args: argparse.Namespace) -> RunConfig:
    file_values = load_config_file(args.config) if args.config else None
    return resolve_config(file_values, _overrides(args))


def _emit_json(payload: dict[str, Any], out: str | None) -> None:
    text = json.dumps(payload, indent=2, allow_nan=False)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        sys.stdout.write(text + "\n")


def _open_out(out: str | None):
    if out:
        return open(out, "w", encoding="utf-8", newline="")
    return None


def _plot_path(out: str | None) -> str:
    if not out:
        raise ValidationError("--plot needs --out to know where the figure goes")
    return str(Path(out).with_suffix(".svg"))


def _say(args, *lines: str) -> None:
    for line in lines:
        print(line, file=sys.stderr)


def _fmt(x: float | None) -> str:
    if x is None:
        return "n/a"
    if math.isinf(x):
        return "inf"
    return f"{x:.6g}"


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_steady(args) -> int:
    config = _resolve(args)
    if config.model == "compare":
        raise ValidationError(
            "model 'compare' has no single steady state; use the compare subcommand"
        )
    report = steady_state(config.generator())
    payload = {"config": config.to_dict(), **report.to_dict()}
    _emit_json(payload, args.out)
    _say(
        args,
        f"[steady] model={report.model} basis={'|'.join(report.labels)}",
        f"[steady] r1={_fmt(report.r1)} r_c={_fmt(report.r_c)} "
        f"T_V={_fmt(report.t_v)} cooling={str(report.cooling).lower()}",
        f"[steady] Q_c={_fmt(report.q_c)} Q_h={_fmt(report.q_h)} Q_r={_fmt(report.q_r)}",
        f"[steady] eta={_fmt(report.efficiency)} eta_C={_fmt(report.eta_carnot)} "
        f"residual={report.residual:.2e}",
    )
    return EXIT_OK


_RHO0_CHOICES = ("ground", "mixed", "stationary")


def _initial_state(gen, name: str) -> np.ndarray:
    if name == "ground":
        return ketbra(gen.dim, 0, 0)
    if name == "mixed":
        return np.eye(gen.dim, dtype=complex) / gen.dim
    if name == "stationary":
        return gen.stationary_state()
    if name.startswith("basis:"):
        label = name.split(":", 1)[1]
        if label not in gen.labels:
            raise ValidationError(
                f"unknown basis label {label!r}; this model has {gen.labels}"
            )
        k = gen.labels.index(label)
        return ketbra(gen.dim, k, k)
    raise ValidationError(
        f"unknown --rho0 {name!r}; use one of {_RHO0_CHOICES} or basis:<label>"
    )


def cmd_evolve(args) -> int:
    config = _resolve(args)
    if config.model == "compare":
        raise ValidationError("model 'compare' cannot be evolved; pick one machine")
    gen = config.generator()
    rho0 = _initial_state(gen, args.rho0)
    trajectory = evolve(gen, rho0, args.t_final, dt=args.dt, samples=args.samples)
    extra = {
        "t_final": args.t_final,
        "dt": args.dt if args.dt is not None else default_dt(gen),
        "rho0": args.rho0,
        "samples": args.samples,
    }
    fh = _open_out(args.out)
    try:
        write_trajectory_csv(fh or sys.stdout, config, trajectory, extra)
    finally:
        if fh:
            fh.close()
    if args.plot:
        from .plotting import save_line_plot

        series = {
            f"p_{lab}": trajectory.populations[:, i]
            for i, lab in enumerate(trajectory.labels)
        }
        path = save_line_plot(
            _plot_path(args.out), trajectory.times, series,
            xlabel="t", ylabel="population", title=f"{gen.model} trajectory",
        )
        _say(args, f"[evolve] figure: {path}")
    _say(args, f"[evolve] {args.samples} samples to t={args.t_final} emitted")
    return EXIT_OK


def cmd_sweep(args) -> int:
    config = _resolve(args)
    sweep = SweepSpec.parse(args.sweep)
    rows = run_sweep(config, sweep)
    fh = _open_out(args.out)
    try:
        write_sweep_csv(fh or sys.stdout, config, sweep, rows)
    finally:
        if fh:
            fh.close()
    n_bad = sum(1 for r in rows if r.status != "ok")
    if args.plot:
        from .plotting import save_line_plot

        good = [r for r in rows if r.status == "ok"]
        xs = [r.value for r in good]
        if config.model == "compare":
            series = {
                "Q_c two-qubit": [r.comparison.q_c_pair for r in good],
                "Q_c qutrit": [r.comparison.q_c_qutrit for r in good],
            }
        else:
            series = {"Q_c": [r.report.q_c for r in good]}
        path = save_line_plot(
            _plot_path(args.out), xs, series,
            xlabel=sweep.param, ylabel="Q_c", logx=sweep.log,
            title=f"{config.model}: Q_c vs {sweep.param}",
        )
        _say(args, f"[sweep] figure: {path}")
    _say(args, f"[sweep] {len(rows)} rows ({n_bad} flagged) over {sweep.param}")
    return EXIT_OK


def cmd_optimize_e2(args) -> int:
    config = _resolve(args)
    if config.model == "compare":
        raise ValidationError("pick one machine model to optimize")
    if args.scan:
        grid_spec = SweepSpec.parse(f"th:{args.scan}")
        rows = scan_optimal_e2(config, grid_spec.grid(), e2_max=args.e2_max,
                               xtol=args.xtol)
        fh = _open_out(args.out)
        try:
            write_scan_csv(fh or sys.stdout, config, rows)
        finally:
            if fh:
                fh.close()
        if args.plot:
            from .plotting import save_line_plot

            path = save_line_plot(
                _plot_path(args.out),
                [r["t_h"] for r in rows],
                {"E2_opt": [r["e2_opt"] for r in rows]},
                xlabel="t_h", ylabel="E2_opt", logx=grid_spec.log,
                title="optimal gap vs hot temperature",
            )
            _say(args, f"[optimize-e2] figure: {path}")
        _say(args, f"[optimize-e2] scanned {len(rows)} hot temperatures")
        return EXIT_OK
    result = optimize_e2(config, e2_max=args.e2_max, xtol=args.xtol)
    payload = {"config": config.to_dict(), **result.to_dict()}
    _emit_json(payload, args.out)
    _say(args, f"[optimize-e2] E2_opt={result.e2_opt:.8f} Q_c={result.q_c_opt:.6e}")
    return EXIT_OK


def cmd_carnot(args) -> int:
    config = _resolve(args)
    baths = config.baths()
    e2_star = carnot_e2(config.e1, baths)
    cfg_star = config.with_param("e2", e2_star)
    if cfg_star.model in ("compare", "qutrit"):
        # the factorization statement lives on the two-qubit machine
        cfg_star = RunConfig(**{**cfg_star.to_dict(), "model": "collision"}).validate()
        _say(args, f"[carnot] verifying on the collision model (requested "
                   f"{config.model})")
    gen = cfg_star.generator()
    rho = gen.stationary_state()
    td = trace_distance_to_product(gen, rho)
    currents = heat_currents(gen, rho)
    max_q = max(abs(v) for v in currents.values())
    verified = td < 1e-9 and max_q < 1e-9
    payload = {
        "config": config.to_dict(),
        "e2_carnot": e2_star,
        "model": gen.model,
        "trace_distance_to_product": td,
        "currents": currents,
        "max_abs_current": max_q,
        "verified": verified,
    }
    _emit_json(payload, args.out)
    _say(
        args,
        f"[carnot] E2*={e2_star:.10f} (reversible point)",
        f"[carnot] product-form distance={td:.2e} max|Q|={max_q:.2e} "
        f"verified={str(verified).lower()}",
    )
    if not verified:
        raise DegenerateGeneratorError(
            f"Carnot verification failed: trace distance {td:.3e}, max |Q| {max_q:.3e}"
        )
    return EXIT_OK


def cmd_compare(args) -> int:
    config = _resolve(args)
    report = compare(config.spec(), config.baths(), config.rates(),
                     config.qutrit_pc_scale)
    payload = {"config": config.to_dict(), **report.to_dict()}
    if args.search > 0:
        outcome = random_comparison_search(
            draws=args.search, seed=args.seed,
            cold_rate_scale=config.qutrit_pc_scale,
        )
        payload["search"] = outcome.to_dict()
        _say(args, f"[compare] search: {outcome.pair_wins} two-qubit wins, "
                   f"{outcome.qutrit_wins} qutrit wins, {outcome.ties} ties "
                   f"over {outcome.draws} draws")
    _emit_json(payload, args.out)
    _say(
        args,
        f"[compare] Q_c two-qubit={report.q_c_pair:.6e} "
        f"qutrit={report.q_c_qutrit:.6e} winner={report.winner}",
    )
    return EXIT_OK


_COMMANDS = {
    "steady": cmd_steady,
    "evolve": cmd_evolve,
    "sweep": cmd_sweep,
    "optimize-e2": cmd_optimize_e2,
    "carnot": cmd_carnot,
    "compare": cmd_compare,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.verbose:
            _say(args, f"[config] resolved: {json.dumps(_resolve(args).to_dict())}")
        return _COMMANDS[args.command](args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except DegenerateGeneratorError as exc:
        print(f"error: degenerate solve: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except SearchError as exc:
        print(f"error: search failed: {exc}", file=sys.stderr)
        return EXIT_SEARCH
    except ThermoqError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE


def entry() -> None:
    sys.exit(main())
