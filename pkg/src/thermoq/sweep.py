"""Parameter sweeps, CSV emission, and scalar optimization of Q_c over E2.

Sweep evaluation is embarrassingly parallel; rows are always emitted in grid
order regardless of worker count (THERMOQ_THREADS caps the pool; 0 = one per
CPU).  CSV output is byte-deterministic: fixed scientific formatting with 17
significant digits and a sorted config echo in the header comments.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import IO, Any, Callable, Iterable

import numpy as np

from .config import PARAM_ALIASES, RunConfig
from .errors import SearchError, ThermoqError, ValidationError
from .qutrit import ComparisonReport, compare
from .reports import SteadyStateReport, steady_state

GOLDEN_XTOL = 1e-6
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class SweepSpec:
    """One-dimensional grid over a named parameter."""

    param: str
    lo: float
    hi: float
    count: int
    log: bool = False

    def __post_init__(self):
        if self.param not in PARAM_ALIASES:
            raise ValidationError(
                f"cannot sweep {self.param!r}; choose from {sorted(PARAM_ALIASES)}"
            )
        if self.count < 2:
            raise ValidationError(f"sweep needs count >= 2, got {self.count}")
        if not (math.isfinite(self.lo) and math.isfinite(self.hi) and self.lo < self.hi):
            raise ValidationError(f"sweep needs min < max, got ({self.lo}, {self.hi})")
        if self.log and self.lo <= 0:
            raise ValidationError("log-spaced sweep needs a positive minimum")

    @classmethod
    def parse(cls, text: str) -> "SweepSpec":
        """Parse the CLI syntax param:min:max:count[:log]."""
        parts = text.split(":")
        if len(parts) not in (4, 5):
            raise ValidationError(
                f"bad sweep spec {text!r}; expected param:min:max:count[:log]"
            )
        log = False
        if len(parts) == 5:
            if parts[4] not in ("log", "lin"):
                raise ValidationError(
                    f"bad sweep scale {parts[4]!r}; expected 'log' or 'lin'"
                )
            log = parts[4] == "log"
        try:
            lo, hi, count = float(parts[1]), float(parts[2]), int(parts[3])
        except ValueError as exc:
            raise ValidationError(f"bad sweep spec {text!r}: {exc}") from exc
        return cls(param=parts[0], lo=lo, hi=hi, count=count, log=log)

    def grid(self) -> np.ndarray:
        if self.log:
            return np.geomspace(self.lo, self.hi, self.count)
        return np.linspace(self.lo, self.hi, self.count)


@dataclass(frozen=True)
class SweepRow:
    """One grid point: either a solved report or a flagged skip."""

    index: int
    value: float
    status: str  # 'ok' | 'error'
    report: SteadyStateReport | None = None
    comparison: ComparisonReport | None = None
    error: str = ""


def thread_count() -> int:
    """Worker count for sweep evaluation, from THERMOQ_THREADS (0 = auto)."""
    raw = os.environ.get("THERMOQ_THREADS", "")
    if raw == "":
        return max(1, min(8, os.cpu_count() or 1))
    try:
        n = int(raw)
    except ValueError as exc:
        raise ValidationError(f"THERMOQ_THREADS must be an integer, got {raw!r}") from exc
    if n < 0:
        raise ValidationError(f"THERMOQ_THREADS must be >= 0, got {n}")
    if n == 0:
        return os.cpu_count() or 1
    return n


def _solve_point(config: RunConfig, param: str, value: float) -> SweepRow:
    # index filled by the caller; -1 marks unset
    try:
        cfg = config.with_param(param, float(value))
    except ValidationError as exc:
        return SweepRow(-1, float(value), "error", error=str(exc))
    try:
        if cfg.model == "compare":
            rep = compare(cfg.spec(), cfg.baths(), cfg.rates(), cfg.qutrit_pc_scale)
            return SweepRow(-1, float(value), "ok", comparison=rep)
        return SweepRow(-1, float(value), "ok", report=steady_state(cfg.generator()))
    except ThermoqError as exc:
        return SweepRow(-1, float(value), "error", error=str(exc))


def run_sweep(config: RunConfig, sweep: SweepSpec) -> list[SweepRow]:
    """Evaluate every grid point; solver failures become flagged rows rather
    than aborting the run.  Output order always matches the grid."""
    grid = sweep.grid()
    workers = thread_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda v: _solve_point(config, sweep.param, v), grid))
    else:
        rows = [_solve_point(config, sweep.param, v) for v in grid]
    return [
        SweepRow(i, row.value, row.status, row.report, row.comparison, row.error)
        for i, row in enumerate(rows)
    ]


# ---------------------------------------------------------------------------
# CSV emission
# ---------------------------------------------------------------------------

def format_cell(value: Any) -> str:
    """Fixed CSV cell formatting: 17-significant-digit scientific for floats,
    true/false for booleans, empty for missing."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "%.16e" % float(value)
    return str(value)


def config_header_lines(config: RunConfig, extra: dict[str, Any] | None = None) -> list[str]:
    """Fully resolved config echoed as sorted comment lines."""
    items = dict(config.to_dict())
    if extra:
        items.update(extra)
    return [f"# {key} = {items[key]}" for key in sorted(items)]


def write_sweep_csv(
    fh: IO[str],
    config: RunConfig,
    sweep: SweepSpec,
    rows: Iterable[SweepRow],
) -> None:
    extra = {
        "sweep": f"{sweep.param}:{sweep.lo}:{sweep.hi}:{sweep.count}"
                 + (":log" if sweep.log else ""),
    }
    for line in config_header_lines(config, extra):
        fh.write(line + "\n")
    if config.model == "compare":
        fh.write(f"{sweep.param},status,q_c_two_qubit,q_c_qutrit,winner,error\n")
        for row in rows:
            cmp_rep = row.comparison
            cells = [
                format_cell(row.value),
                row.status,
                format_cell(cmp_rep.q_c_pair if cmp_rep else None),
                format_cell(cmp_rep.q_c_qutrit if cmp_rep else None),
                cmp_rep.winner if cmp_rep else "",
                row.error.replace(",", ";"),
            ]
            fh.write(",".join(cells) + "\n")
        return
    scalar_names = SteadyStateReport.SCALAR_FIELDS
    fh.write(",".join([sweep.param, "status", *scalar_names, "error"]) + "\n")
    for row in rows:
        scalars = row.report.scalars() if row.report else {}
        cells = [format_cell(row.value), row.status]
        cells += [format_cell(scalars.get(name)) for name in scalar_names]
        cells.append(row.error.replace(",", ";"))
        fh.write(",".join(cells) + "\n")


def write_trajectory_csv(fh, config: RunConfig, trajectory, extra=None) -> None:
    """Stream a trajectory: time, populations, then all off-diagonal
    magnitudes in row-major order."""
    for line in config_header_lines(config, extra or {}):
        fh.write(line + "\n")
    labels = trajectory.labels
    dim = len(labels)
    pop_cols = [f"p_{lab}" for lab in labels]
    coh_cols = [
        f"c_{labels[i]}_{labels[j]}"
        for i in range(dim) for j in range(dim) if i != j
    ]
    fh.write(",".join(["t", *pop_cols, *coh_cols]) + "\n")
    for t, state in zip(trajectory.times, trajectory.states):
        cells = [format_cell(float(t))]
        cells += [format_cell(float(state[i, i].real)) for i in range(dim)]
        cells += [
            format_cell(float(abs(state[i, j])))
            for i in range(dim) for j in range(dim) if i != j
        ]
        fh.write(",".join(cells) + "\n")


# ---------------------------------------------------------------------------
# E2 optimization
# ---------------------------------------------------------------------------

def golden_section_max(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    xtol: float = GOLDEN_XTOL,
) -> tuple[float, float]:
    """Maximize a unimodal scalar function on [lo, hi] by golden-section
    search; returns (argmax, max).  Interval shrinks by the inverse golden
    ratio per step, so the iteration count is fixed by xtol."""
    if not lo < hi:
        raise ValidationError(f"bad bracket ({lo}, {hi})")
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > xtol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


@dataclass(frozen=True)
class OptimizeResult:
    e2_opt: float
    q_c_opt: float
    bracket: tuple[float, float]

    def to_dict(self) -> dict[str, Any]:
        return {
            "e2_opt": self.e2_opt,
            "q_c_opt": self.q_c_opt,
            "bracket": list(self.bracket),
        }


def optimize_e2(
    config: RunConfig,
    e2_max: float = 12.0,
    xtol: float = GOLDEN_XTOL,
    coarse: int = 201,
) -> OptimizeResult:
    """Locate the E2 maximizing the stationary cold current.

    A coarse grid over (E1, e2_max] brackets the maximum; the bracket must be
    interior (a boundary argmax raises SearchError, reporting the boundary
    point), then golden-section polishes to |dE2| < xtol.  The objective is
    the full null-space solve, so the result is convention-free.
    """
    if not (math.isfinite(e2_max) and e2_max > config.e1):
        raise ValidationError(f"e2_max must exceed e1={config.e1}, got {e2_max}")
    if coarse < 5:
        raise ValidationError(f"coarse grid needs >= 5 points, got {coarse}")

    def q_c_at(e2: float) -> float:
        cfg = config.with_param("e2", float(e2))
        return steady_state(cfg.generator()).q_c

    lo = config.e1 * (1.0 + 1e-9)
    grid = np.linspace(lo, e2_max, coarse)
    values = [q_c_at(v) for v in grid]
    k = int(np.argmax(values))
    if k == 0 or k == coarse - 1:
        raise SearchError(
            f"no interior maximum of Q_c(E2) in ({config.e1:.6g}, {e2_max:.6g}); "
            f"best grid point sits on the boundary at E2={grid[k]:.6g} "
            f"with Q_c={values[k]:.6e}"
        )
    e2_opt, q_opt = golden_section_max(q_c_at, float(grid[k - 1]), float(grid[k + 1]), xtol)
    return OptimizeResult(e2_opt=e2_opt, q_c_opt=q_opt, bracket=(float(grid[k - 1]), float(grid[k + 1])))


def scan_optimal_e2(
    config: RunConfig,
    th_grid: np.ndarray,
    e2_max: float = 12.0,
    xtol: float = GOLDEN_XTOL,
) -> list[dict[str, float]]:
    """Tabulate the optimal gap over a hot-temperature grid."""
    out = []
    for th in th_grid:
        cfg = config.with_param("th", float(th))
        res = optimize_e2(cfg, e2_max=e2_max, xtol=xtol)
        out.append({"t_h": float(th), "e2_opt": res.e2_opt, "q_c_opt": res.q_c_opt})
    return out


def write_scan_csv(fh, config: RunConfig, rows: list[dict[str, float]]) -> None:
    for line in config_header_lines(config, {"scan": "e2_opt over t_h"}):
        fh.write(line + "\n")
    fh.write("t_h,e2_opt,q_c_opt\n")
    for row in rows:
        fh.write(
            ",".join(format_cell(row[k]) for k in ("t_h", "e2_opt", "q_c_opt")) + "\n"
        )
