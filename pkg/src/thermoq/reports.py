"""Stationary-state reports: solve, cross-check, and package the physics.

`steady_state` is the single entry point for every machine flavor (collision,
bosonic, qutrit).  It solves the full vectorized generator for the stationary
state, then re-derives the populations through two independent routes (the
classical rate matrix, and the ring-tree closed form whenever the transition
graph is a single ring) and refuses to emit a report if the routes disagree.
All thermodynamic quantities are reconstructed from the generator's own
interaction data, so a report never needs the original parameter objects.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from .collision import (
    _signed_current,
    cycle_edges_in_order,
    cycle_stationary,
    stationarity_residual,
    stationary_r1,
)
from .errors import DegenerateGeneratorError, ThermoqError
from .model import carnot_efficiency  # noqa: F401  (re-exported convenience)

RESIDUAL_ATOL = 1e-10
OFFDIAG_ATOL = 1e-10
CROSS_CHECK_ATOL = 1e-10
BOUNDARY_ATOL = 1e-10


@dataclass(frozen=True)
class SteadyStateReport:
    """Everything the CLI and the sweep engine report about one solve."""

    model: str
    labels: tuple[str, ...]
    rho: np.ndarray
    populations: np.ndarray
    residual: float
    r1: float
    r_c: float
    cooling: bool
    beta_v: float
    q_c: float
    q_h: float
    q_r: float
    efficiency: float
    efficiency_realized: float | None
    eta_carnot: float
    entropy_production: float
    params: dict[str, Any]

    @property
    def t_v(self) -> float | None:
        """Virtual temperature; None when beta_v <= 0 (inverted or infinite)."""
        if self.beta_v > 0:
            return 1.0 / self.beta_v
        return None

    # fixed scalar order shared by the CSV writers
    SCALAR_FIELDS = (
        "r1",
        "r_c",
        "beta_v",
        "t_v",
        "q_c",
        "q_h",
        "q_r",
        "efficiency",
        "efficiency_realized",
        "eta_carnot",
        "entropy_production",
        "residual",
        "cooling",
    )

    def scalars(self) -> dict[str, Any]:
        return {name: getattr(self, name) for name in self.SCALAR_FIELDS}

    def to_dict(self) -> dict[str, Any]:
        """JSON-ready view.  Non-finite values map to None plus a flag, since
        JSON has no inf; the basis ordering is part of the payload."""
        eta_c = self.eta_carnot
        return {
            "model": self.model,
            "basis": list(self.labels),
            "params": dict(self.params),
            "populations": [float(p) for p in self.populations],
            "rho_re": np.real(self.rho).tolist(),
            "rho_im": np.imag(self.rho).tolist(),
            "residual": self.residual,
            "r1": self.r1,
            "r_c": self.r_c,
            "cooling": self.cooling,
            "beta_v": self.beta_v,
            "t_v": self.t_v,
            "t_v_nonpositive": self.beta_v <= 0,
            "q_c": self.q_c,
            "q_h": self.q_h,
            "q_r": self.q_r,
            "efficiency": self.efficiency,
            "efficiency_realized": self.efficiency_realized,
            "eta_carnot": None if math.isinf(eta_c) else eta_c,
            "eta_carnot_unbounded": math.isinf(eta_c),
            "entropy_production": self.entropy_production,
        }


def _ring_order(gen) -> tuple[int, ...] | None:
    """Visit order if the coupled transitions form one ring over all levels,
    else None (the tree closed form then simply is not applicable)."""
    adjacency: dict[int, set[int]] = {k: set() for k in range(gen.dim)}
    n_edges = 0
    for e in gen.transition_edges():
        if e.upper in adjacency[e.lower]:
            return None  # doubled edge
        adjacency[e.lower].add(e.upper)
        adjacency[e.upper].add(e.lower)
        n_edges += 1
    if n_edges != gen.dim or any(len(v) != 2 for v in adjacency.values()):
        return None
    order = [0]
    prev = None
    while len(order) < gen.dim:
        nxt = [v for v in adjacency[order[-1]] if v != prev]
        if not nxt:
            return None
        prev = order[-1]
        order.append(min(nxt))
    if order[0] not in adjacency[order[-1]] or len(set(order)) != gen.dim:
        return None
    return tuple(order)


def _cross_check_populations(gen, diagonal: np.ndarray) -> None:
    """Confirm the null-space diagonal against the rate-matrix route and,
    on ring topologies, the spanning-tree closed form."""
    pi_rate = gen.stationary_populations()
    dev = float(np.max(np.abs(pi_rate - diagonal)))
    if dev > CROSS_CHECK_ATOL:
        raise DegenerateGeneratorError(
            f"rate-matrix stationary populations deviate from the null-space "
            f"solve by {dev:.3e} (model {gen.model})"
        )
    order = _ring_order(gen)
    if order is not None:
        fwd, bwd = cycle_edges_in_order(gen, order)
        pi_ring = np.empty(gen.dim)
        pi_ring[list(order)] = cycle_stationary(fwd, bwd)
        dev = float(np.max(np.abs(pi_ring - diagonal)))
        if dev > CROSS_CHECK_ATOL:
            raise DegenerateGeneratorError(
                f"ring-tree closed form deviates from the null-space solve "
                f"by {dev:.3e} (model {gen.model})"
            )


def _bath_parameters(gen) -> dict[str, Any]:
    out: dict[str, Any] = {"model": gen.model}
    for ia in gen.interactions:
        out[f"energy_{ia.bath}"] = ia.energy
        out[f"beta_{ia.bath}"] = ia.beta
        out[f"t_{ia.bath}"] = math.inf if ia.beta == 0 else 1.0 / ia.beta
        out[f"p_{ia.bath}"] = ia.p
    return out


def steady_state(gen) -> SteadyStateReport:
    """Solve one generator and assemble the full report.

    Raises DegenerateGeneratorError when the generator's null space is not a
    clean one-dimensional physical state, when the stationary state carries
    coherences, or when any independent re-derivation of the populations
    disagrees beyond 1e-10.
    """
    rho = gen.stationary_state()
    residual = stationarity_residual(gen, rho)
    if residual > RESIDUAL_ATOL:
        raise DegenerateGeneratorError(
            f"stationary residual {residual:.3e} exceeds {RESIDUAL_ATOL:.0e}"
        )
    offdiag = float(np.max(np.abs(rho - np.diag(np.diag(rho)))))
    if offdiag > OFFDIAG_ATOL:
        raise DegenerateGeneratorError(
            f"stationary state carries coherences (max off-diagonal {offdiag:.3e})"
        )
    populations = np.real(np.diag(rho))
    _cross_check_populations(gen, populations)

    for bath in ("c", "r", "h"):
        if bath not in gen.by_bath:
            raise ThermoqError(f"generator lacks a '{bath}' bath; cannot report")
    cold = gen.by_bath["c"]
    sink = gen.by_bath["r"]
    hot = gen.by_bath["h"]

    # thermodynamic identifiers recovered from the interaction data: the
    # cold heat per cycle is E_r - E_h for both machine flavors
    q_cold_cycle = sink.energy - hot.energy
    if q_cold_cycle <= 0:
        raise ThermoqError("sink quantum must exceed hot quantum")
    beta_v = (sink.beta * sink.energy - hot.beta * hot.energy) / q_cold_cycle
    efficiency = q_cold_cycle / hot.energy
    if cold.beta > sink.beta:
        eta_carnot = (sink.beta - hot.beta) / (cold.beta - sink.beta)
    else:
        eta_carnot = math.inf

    q_c = _signed_current(gen, rho, "c")
    q_h = _signed_current(gen, rho, "h")
    q_r = _signed_current(gen, rho, "r")
    r1 = stationary_r1(populations, cold.pairs)
    r_c = cold.r

    cooling = q_c > BOUNDARY_ATOL
    # the sign identities are exact theory; a decisive mismatch means the
    # solve cannot be trusted
    if q_c > BOUNDARY_ATOL and r1 - r_c < -BOUNDARY_ATOL:
        raise ThermoqError(f"sign inconsistency: q_c={q_c:.3e} but r1-r_c={r1 - r_c:.3e}")
    if q_c < -BOUNDARY_ATOL and r1 - r_c > BOUNDARY_ATOL:
        raise ThermoqError(f"sign inconsistency: q_c={q_c:.3e} but r1-r_c={r1 - r_c:.3e}")

    efficiency_realized = q_c / q_h if abs(q_h) > 1e-12 else None
    entropy_production = sink.beta * q_r - cold.beta * q_c - hot.beta * q_h

    return SteadyStateReport(
        model=gen.model,
        labels=tuple(gen.labels),
        rho=rho,
        populations=populations,
        residual=residual,
        r1=r1,
        r_c=r_c,
        cooling=cooling,
        beta_v=beta_v,
        q_c=q_c,
        q_h=q_h,
        q_r=q_r,
        efficiency=efficiency,
        efficiency_realized=efficiency_realized,
        eta_carnot=eta_carnot,
        entropy_production=entropy_production,
        params=_bath_parameters(gen),
    )


# the bosonic generator shares the whole reporting surface
steady_state_bosonic = steady_state
