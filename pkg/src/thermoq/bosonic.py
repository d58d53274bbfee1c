"""Lindblad dynamics with bosonic reservoirs, as a continuous-coupling
cross-check on the collision model.

Each machine transition pair couples to an Ohmic-like bosonic bath through
a weak-coupling dissipator

    D_j(rho) = Gamma_j ( A_j rho A_j^+ - {A_j^+ A_j, rho}/2 )
             + Gamma_j' ( A_j^+ rho A_j - {A_j A_j^+, rho}/2 ),

with A_j the lowering operator over the pair set, decay rate
Gamma_j = gamma_j E_j^3 (1 + N_j), excitation rate Gamma_j' = e^{-beta E}
Gamma_j, and N_j the thermal occupation at the transition quantum.  Detailed
balance per transition matches the collision model, so for rates chosen via
:func:`equivalence_map` both generators share the same stationary state
exactly (the bosonic currents come out uniformly twice as large, reflecting
the phase average that weights each collision's swap by one half).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .collision import (
    TWO_QUBIT_LABELS,
    CollisionGenerator,
    TransitionEdge,
    fridge_h0,
    fridge_interactions,
    stationary_density,
    stationary_distribution,
)
from .errors import ValidationError
from .model import BathTriple, CouplingRates, FridgeSpec


@dataclass(frozen=True)
class BosonicCoupling:
    """Raw coupling constants gamma_j of the spectral densities, one per bath."""

    gamma_c: float
    gamma_r: float
    gamma_h: float

    def __post_init__(self):
        for name in ("gamma_c", "gamma_r", "gamma_h"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValidationError(f"{name} must be positive and finite, got {v}")

    def by_bath(self) -> dict[str, float]:
        return {"c": self.gamma_c, "r": self.gamma_r, "h": self.gamma_h}


def thermal_occupation(energy: float, beta: float) -> float:
    """Bose occupation 1/(e^{beta E} - 1); infinite-temperature input is
    rejected because the bosonic rates diverge there."""
    if energy <= 0:
        raise ValidationError(f"mode energy must be positive, got {energy}")
    if beta <= 0:
        raise ValidationError(f"bosonic bath needs beta > 0, got {beta}")
    return 1.0 / math.expm1(beta * energy)


def decay_rates(energy: float, beta: float, gamma: float) -> tuple[float, float]:
    """(downward, upward) Lindblad rates for one transition:
    Gamma = gamma E^3 (1 + N) and its detailed-balance partner."""
    n = thermal_occupation(energy, beta)
    down = gamma * energy ** 3 * (1.0 + n)
    return down, down * math.exp(-beta * energy)


def jump_operators(spec: FridgeSpec) -> dict[str, tuple[np.ndarray, np.ndarray]]:
    """Bare (raising, lowering) operator pairs of the two-qubit machine,
    keyed by bath: cold raises qubit 1 on both sectors, hot exchanges the
    single-excitation states, the sink raises the double flip."""
    dim = 4
    out = {}
    for bath, pairs in (("c", ((0, 1), (2, 3))), ("h", ((1, 2),)), ("r", ((0, 3),))):
        raise_op = np.zeros((dim, dim), dtype=complex)
        for lo, up in pairs:
            raise_op[up, lo] = 1.0
        out[bath] = (raise_op, raise_op.conj().T)
    return out


class LindbladGenerator:
    """Lindblad master-equation generator sharing the collision generator's
    surface (rhs, liouvillian, rate_matrix, stationary_state, edges, currents)
    so the reporting layer treats both interchangeably."""

    exhaust = "r"

    def __init__(self, h0, interactions, gammas: dict[str, float], labels,
                 model: str = "bosonic"):
        # reuse the collision generator's structural validation, then replace
        # the dynamics with dissipators
        base = CollisionGenerator(h0, interactions, labels, model=model)
        self.h0 = base.h0
        self.dim = base.dim
        self.labels = base.labels
        self.model = model
        self.interactions = base.interactions
        self.by_bath = base.by_bath
        missing = [ia.bath for ia in self.interactions if ia.bath not in gammas]
        if missing:
            raise ValidationError(f"no coupling constant for baths {missing}")
        self.gammas = {ia.bath: float(gammas[ia.bath]) for ia in self.interactions}
        for bath, g in self.gammas.items():
            if not (math.isfinite(g) and g > 0):
                raise ValidationError(f"gamma for bath '{bath}' must be positive")
        self._ops = {}
        for ia in self.interactions:
            lower = np.zeros((self.dim, self.dim), dtype=complex)
            for lo, up in ia.pairs:
                lower[lo, up] = 1.0
            if ia.beta <= 0:
                raise ValidationError(
                    f"bosonic bath '{ia.bath}' needs a finite temperature"
                )
            down, up_rate = decay_rates(ia.energy, ia.beta, self.gammas[ia.bath])
            self._ops[ia.bath] = (lower, down, up_rate)

    def weighted_jump_operators(self, bath: str) -> tuple[np.ndarray, np.ndarray]:
        """Weighted jump pair (sqrt(down) * A, sqrt(up) * A^+)."""
        lower, down, up = self._ops[bath]
        return math.sqrt(down) * lower, math.sqrt(up) * lower.conj().T

    def transition_rates(self, bath: str) -> tuple[float, float]:
        """(up, down) classical rates of each pair coupled to ``bath``."""
        _, down, up = self._ops[bath]
        return up, down

    def dissipator(self, bath: str, rho: np.ndarray) -> np.ndarray:
        rho = np.asarray(rho, dtype=complex)
        out = np.zeros_like(rho)
        for op in self.weighted_jump_operators(bath):
            opd = op.conj().T
            anti = opd @ op
            out += op @ rho @ opd - 0.5 * (anti @ rho + rho @ anti)
        return out

    def rhs(self, rho: np.ndarray) -> np.ndarray:
        rho = np.asarray(rho, dtype=complex)
        out = 1j * (rho @ self.h0 - self.h0 @ rho)
        for ia in self.interactions:
            out += self.dissipator(ia.bath, rho)
        return out

    def energy_gain_rate(self, bath: str, rho: np.ndarray) -> float:
        """Tr[D_bath(rho) H0]: energy flow from this bath into the machine."""
        return float(np.trace(self.dissipator(bath, rho) @ self.h0).real)

    @cached_property
    def _liouvillian(self) -> np.ndarray:
        d2 = self.dim * self.dim
        L = np.empty((d2, d2), dtype=complex)
        for j in range(d2):
            unit = np.zeros(d2, dtype=complex)
            unit[j] = 1.0
            L[:, j] = self.rhs(unit.reshape(self.dim, self.dim)).reshape(-1)
        return L

    def liouvillian(self) -> np.ndarray:
        return self._liouvillian

    def transition_edges(self) -> tuple[TransitionEdge, ...]:
        edges = []
        energies = np.diag(self.h0).real
        for ia in self.interactions:
            up, down = self.transition_rates(ia.bath)
            for lo, hi in ia.pairs:
                edges.append(
                    TransitionEdge(
                        bath=ia.bath,
                        lower=lo,
                        upper=hi,
                        energy=float(energies[hi] - energies[lo]),
                        up_rate=up,
                        down_rate=down,
                    )
                )
        return tuple(edges)

    @cached_property
    def _rate_matrix(self) -> np.ndarray:
        w = np.zeros((self.dim, self.dim))
        for e in self.transition_edges():
            w[e.upper, e.lower] += e.up_rate
            w[e.lower, e.lower] -= e.up_rate
            w[e.lower, e.upper] += e.down_rate
            w[e.upper, e.upper] -= e.down_rate
        return w

    def rate_matrix(self) -> np.ndarray:
        return self._rate_matrix

    def stationary_populations(self) -> np.ndarray:
        return stationary_distribution(self.rate_matrix())

    def stationary_state(self) -> np.ndarray:
        return stationary_density(self.liouvillian(), self.dim)


def equivalence_gammas(interactions) -> dict[str, float]:
    """Coupling constants that make each bosonic transition reproduce its
    collision counterpart's detailed balance: gamma = p r / (E^3 (1 + N)),
    so the downward Lindblad rate equals p r exactly.

    With these gammas the bosonic up/down rates are exactly twice the
    collision model's p rbar / 2 and p r / 2, so stationary states agree
    and every current doubles.
    """
    out = {}
    for ia in interactions:
        if ia.beta <= 0:
            raise ValidationError(
                f"bath '{ia.bath}': no bosonic equivalent at infinite temperature"
            )
        n = thermal_occupation(ia.energy, ia.beta)
        out[ia.bath] = ia.p * ia.r / (ia.energy ** 3 * (1.0 + n))
    return out


def equivalence_map(
    rates: CouplingRates, baths: BathTriple, spec: FridgeSpec
) -> BosonicCoupling:
    """Collision-equivalent coupling constants for the two-qubit machine."""
    gammas = equivalence_gammas(fridge_interactions(spec, baths, rates))
    return BosonicCoupling(
        gamma_c=gammas["c"], gamma_r=gammas["r"], gamma_h=gammas["h"]
    )


def bosonic_generator(h0, interactions, labels, coupling=None,
                      model: str = "bosonic") -> LindbladGenerator:
    """Build a Lindblad generator over the same interaction structure.

    ``coupling`` may be a :class:`BosonicCoupling`, a bath -> gamma mapping,
    or None, in which case the collision-equivalent constants are used.
    """
    if coupling is None:
        gammas = equivalence_gammas(interactions)
    elif isinstance(coupling, BosonicCoupling):
        gammas = coupling.by_bath()
    else:
        gammas = dict(coupling)
    return LindbladGenerator(h0, interactions, gammas, labels, model=model)


def fridge_bosonic_generator(
    spec: FridgeSpec,
    baths: BathTriple,
    rates: CouplingRates,
    coupling: BosonicCoupling | dict | None = None,
) -> LindbladGenerator:
    """Lindblad generator of the two-qubit machine.  Without an explicit
    ``coupling`` the collision-equivalent constants are used, which pins the
    stationary state to the collision model's."""
    return bosonic_generator(
        fridge_h0(spec),
        fridge_interactions(spec, baths, rates),
        TWO_QUBIT_LABELS,
        coupling=coupling,
    )


def lindblad_rhs(gen: LindbladGenerator, rho: np.ndarray) -> np.ndarray:
    """Full Lindblad right-hand side (free evolution plus all dissipators)."""
    return gen.rhs(rho)
