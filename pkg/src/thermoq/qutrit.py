"""Three-level benchmark refrigerator and the head-to-head comparison.

The standard single-cycle absorption fridge on a qutrit is the baseline the
two-qubit machine is judged against.  To make the comparison fair the qutrit
is built from the same gap parameters and bath resources: its cold transition
|0> <-> |1> carries 2 e1 (the two-qubit machine also draws 2 e1 from the cold
bath per cycle, just split over two strokes), the hot transition |1> <-> |2>
carries e2 - e1, and the sink transition |0> <-> |2> carries e1 + e2.  Both
machines then share the virtual temperature, the cooling window, the Carnot
point and the efficiency 2 e1 / (e2 - e1).

Dynamics reuse the collision formalism of :mod:`thermoq.collision` verbatim,
with identical per-bath collision rates.  The cross-model rate calibration is
convention-bound, so an optional multiplier on the qutrit's cold rate is
exposed (default 1, meaning equal rates).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .collision import (
    CollisionGenerator,
    Interaction,
    cycle_edges_in_order,
    cycle_stationary,
    fridge_generator,
    heat_currents,
    q_c_closed_form,
)
from .errors import ValidationError
from .model import BathTriple, CouplingRates, FridgeSpec, bath_population

QUTRIT_LABELS = ("0", "1", "2")


@dataclass(frozen=True)
class QutritSpec:
    """Level energies (0, 2 e1, e1 + e2) of the benchmark qutrit, derived
    from the two-qubit machine under comparison."""

    e1: float
    e2: float

    def __post_init__(self):
        # reuse the pair-machine constraints: 0 < e1 < e2
        FridgeSpec(self.e1, self.e2)

    @classmethod
    def from_fridge(cls, spec: FridgeSpec) -> "QutritSpec":
        return cls(e1=spec.e1, e2=spec.e2)

    @property
    def levels(self) -> tuple[float, float, float]:
        return (0.0, 2.0 * self.e1, self.e1 + self.e2)

    @property
    def cold_quantum(self) -> float:
        return 2.0 * self.e1

    @property
    def hot_quantum(self) -> float:
        return self.e2 - self.e1

    @property
    def sink_quantum(self) -> float:
        return self.e1 + self.e2


def qutrit_h0(spec: QutritSpec) -> np.ndarray:
    return np.diag(spec.levels).astype(complex)


def qutrit_generator(
    spec: QutritSpec | FridgeSpec,
    baths: BathTriple,
    rates: CouplingRates,
    cold_rate_scale: float = 1.0,
    g: float = 1.0,
) -> CollisionGenerator:
    """Collision generator of the three-level fridge.

    ``cold_rate_scale`` multiplies the qutrit's cold collision rate; the
    default 1.0 keeps the rates identical to the two-qubit machine, which is
    the comparison convention used throughout.
    """
    if isinstance(spec, FridgeSpec):
        spec = QutritSpec.from_fridge(spec)
    if not (math.isfinite(cold_rate_scale) and cold_rate_scale > 0):
        raise ValidationError(
            f"cold_rate_scale must be positive and finite, got {cold_rate_scale}"
        )
    interactions = (
        Interaction(
            bath="c",
            pairs=((0, 1),),
            energy=spec.cold_quantum,
            beta=baths.beta_c,
            p=rates.p_c * cold_rate_scale,
            g=g,
        ),
        Interaction(
            bath="h",
            pairs=((1, 2),),
            energy=spec.hot_quantum,
            beta=baths.beta_h,
            p=rates.p_h,
            g=g,
        ),
        Interaction(
            bath="r",
            pairs=((0, 2),),
            energy=spec.sink_quantum,
            beta=baths.beta_r,
            p=rates.p_r,
            g=g,
        ),
    )
    return CollisionGenerator(
        h0=qutrit_h0(spec),
        interactions=interactions,
        labels=QUTRIT_LABELS,
        model="qutrit",
    )


def qutrit_q_c_closed_form(
    spec: QutritSpec | FridgeSpec,
    baths: BathTriple,
    rates: CouplingRates,
    cold_rate_scale: float = 1.0,
) -> float:
    """Stationary cold current of the qutrit from the ring-tree closed form:
    one cold stroke of 2 e1 per cycle, flux from the cold edge's net flow."""
    if isinstance(spec, FridgeSpec):
        spec = QutritSpec.from_fridge(spec)
    gen = qutrit_generator(spec, baths, rates, cold_rate_scale=cold_rate_scale)
    fwd, bwd = cycle_edges_in_order(gen, (0, 1, 2))
    pi = cycle_stationary(fwd, bwd)
    flux = pi[0] * fwd[0] - pi[1] * bwd[0]
    return spec.cold_quantum * flux


# ---------------------------------------------------------------------------
# Head-to-head comparison
# ---------------------------------------------------------------------------

TIE_ATOL = 1e-10


@dataclass(frozen=True)
class ComparisonReport:
    """Cold currents of both machines at one shared parameter point."""

    q_c_pair: float
    q_c_qutrit: float
    winner: str  # 'two_qubit' | 'qutrit' | 'tie'
    params: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "q_c_two_qubit": self.q_c_pair,
            "q_c_qutrit": self.q_c_qutrit,
            "winner": self.winner,
            "params": dict(self.params),
        }


def _decide_winner(q_pair: float, q_qutrit: float) -> str:
    if abs(q_pair) < TIE_ATOL and abs(q_qutrit) < TIE_ATOL:
        return "tie"
    if q_pair > q_qutrit:
        return "two_qubit"
    if q_qutrit > q_pair:
        return "qutrit"
    return "tie"


def _params_echo(spec, baths, rates, cold_rate_scale) -> dict[str, Any]:
    return {
        "e1": spec.e1,
        "e2": spec.e2,
        "t_c": baths.t_c,
        "t_r": baths.t_r,
        "t_h": baths.t_h,
        "p_c": rates.p_c,
        "p_r": rates.p_r,
        "p_h": rates.p_h,
        "qutrit_pc_scale": cold_rate_scale,
    }


def compare(
    spec: FridgeSpec,
    baths: BathTriple,
    rates: CouplingRates,
    cold_rate_scale: float = 1.0,
) -> ComparisonReport:
    """Solve both machines at identical resources and report the larger Q_c.

    Both stationary states come from the full null-space solve; the closed
    forms are only used by the randomized search, where speed matters.
    """
    pair_gen = fridge_generator(spec, baths, rates)
    pair_rho = pair_gen.stationary_state()
    q_pair = heat_currents(pair_gen, pair_rho)["c"]

    qutrit_gen = qutrit_generator(spec, baths, rates, cold_rate_scale=cold_rate_scale)
    qutrit_rho = qutrit_gen.stationary_state()
    q_qutrit = heat_currents(qutrit_gen, qutrit_rho)["c"]

    return ComparisonReport(
        q_c_pair=q_pair,
        q_c_qutrit=q_qutrit,
        winner=_decide_winner(q_pair, q_qutrit),
        params=_params_echo(spec, baths, rates, cold_rate_scale),
    )


def compare_closed_form(
    spec: FridgeSpec,
    baths: BathTriple,
    rates: CouplingRates,
    cold_rate_scale: float = 1.0,
) -> ComparisonReport:
    """Same comparison through the ring-tree closed forms (no linear algebra);
    used by the randomized search and cross-checked against :func:`compare`."""
    q_pair = q_c_closed_form(spec, baths, rates)
    q_qutrit = qutrit_q_c_closed_form(spec, baths, rates, cold_rate_scale)
    return ComparisonReport(
        q_c_pair=q_pair,
        q_c_qutrit=q_qutrit,
        winner=_decide_winner(q_pair, q_qutrit),
        params=_params_echo(spec, baths, rates, cold_rate_scale),
    )


@dataclass(frozen=True)
class SearchOutcome:
    """Tally of a randomized comparison search."""

    draws: int
    pair_wins: int
    qutrit_wins: int
    ties: int
    example_pair_win: dict[str, Any] | None
    example_qutrit_win: dict[str, Any] | None

    def to_dict(self) -> dict[str, Any]:
        return {
            "draws": self.draws,
            "two_qubit_wins": self.pair_wins,
            "qutrit_wins": self.qutrit_wins,
            "ties": self.ties,
            "example_two_qubit_win": self.example_pair_win,
            "example_qutrit_win": self.example_qutrit_win,
        }


def random_parameters(rng: np.random.Generator) -> tuple[FridgeSpec, BathTriple, CouplingRates]:
    """One random valid parameter draw spanning deep-cold through mild
    gradients; wide enough that both machines get to win somewhere."""
    e1 = float(10.0 ** rng.uniform(-0.5, 0.3))
    e2 = float(e1 * rng.uniform(1.2, 6.0))
    t_c = float(e1 * 10.0 ** rng.uniform(-0.7, 0.4))
    t_r = float(t_c * rng.uniform(1.0, 1.6))
    t_h = float(t_r * 10.0 ** rng.uniform(0.3, 1.8))
    p_c, p_r, p_h = (float(10.0 ** rng.uniform(-0.7, 0.7)) for _ in range(3))
    return (
        FridgeSpec(e1, e2),
        BathTriple(t_c, t_r, t_h),
        CouplingRates(p_c, p_r, p_h),
    )


def random_comparison_search(
    draws: int = 200,
    seed: int | None = 0,
    cold_rate_scale: float = 1.0,
) -> SearchOutcome:
    """Random scan over valid parameters, tallying which machine cools harder.

    Uses the closed-form currents for speed; one example point per regime is
    kept so callers can re-verify it with the full solver.
    """
    if draws < 1:
        raise ValidationError(f"need at least one draw, got {draws}")
    rng = np.random.default_rng(seed)
    pair_wins = qutrit_wins = ties = 0
    example_pair = example_qutrit = None
    for _ in range(draws):
        spec, baths, rates = random_parameters(rng)
        report = compare_closed_form(spec, baths, rates, cold_rate_scale)
        if report.winner == "two_qubit":
            pair_wins += 1
            if example_pair is None:
                example_pair = report.to_dict()
        elif report.winner == "qutrit":
            qutrit_wins += 1
            if example_qutrit is None:
                example_qutrit = report.to_dict()
        else:
            ties += 1
    return SearchOutcome(
        draws=draws,
        pair_wins=pair_wins,
        qutrit_wins=qutrit_wins,
        ties=ties,
        example_pair_win=example_pair,
        example_qutrit_win=example_qutrit,
    )
