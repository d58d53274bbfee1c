"""Collision-model dynamics for reset-style thermal machines.

The machine exchanges energy with each bath through brief pairwise
collisions with resonant thermal ancilla qubits, arriving as independent
Poisson streams.  Averaging each collision over its interaction phase
turns the stroboscopic picture into a Markovian master equation

    d rho / dt = i [rho, H0] + sum_j p_j (Omega_j(rho) - rho),

where ``Omega_j`` is the phase-averaged collision map of bath ``j``.  For a
resonant exchange coupling on a set of machine transition pairs, the phase
average collapses to an exact three-operator Kraus form (derived from
U(t) = P + cos(gt) C - i sin(gt) X on the machine+ancilla space):

    Omega(rho) = Tr_anc[ P rho_J P + (C rho_J C + X rho_J X) / 2 ],

with rho_J = rho (x) tau_anc, P the projector on uncoupled levels,
C the projector on coupled levels and X the swap generator.  The map is
independent of the coupling strength g, completely positive and trace
preserving by construction (P + C = 1, X^2 = C).

Populations and coherences decouple under this generator whenever the
machine Hamiltonian is nondegenerate, so stationary states are diagonal
and also solvable through a classical rate matrix; both routes are exposed
and cross-checked by the reporting layer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import DegenerateGeneratorError, ValidationError
from .model import BathTriple, CouplingRates, FridgeSpec, bath_population
from .operators import partial_trace, trace_distance, validate_state

# machine basis |q1 q2> with qubit 1 varying fastest: index = 2*q2 + q1
TWO_QUBIT_LABELS = ("00", "10", "01", "11")

RESONANCE_ATOL = 1e-12
NULLSPACE_RTOL = 1e-10


def basis_index(q1: int, q2: int) -> int:
    """Dense index of |q1 q2> under the qubit-1-fastest layout."""
    if q1 not in (0, 1) or q2 not in (0, 1):
        raise ValidationError(f"qubit occupations must be 0 or 1, got ({q1}, {q2})")
    return 2 * q2 + q1


@dataclass(frozen=True)
class Interaction:
    """One bath's resonant exchange coupling.

    Attributes:
        bath: short label ('c', 'r', 'h').
        pairs: machine level pairs ``(lower, upper)`` the ancilla swaps with;
            every pair must have the same gap, equal to ``energy``.
        energy: ancilla gap (= transition quantum).
        beta: ancilla inverse temperature (0 allowed: infinite temperature).
        p: Poisson collision rate.
        g: exchange coupling strength; the averaged map does not depend on
            it, but the explicit collision unitary does.
    """

    bath: str
    pairs: tuple[tuple[int, int], ...]
    energy: float
    beta: float
    p: float
    g: float = 1.0

    def __post_init__(self):
        if not self.pairs:
            raise ValidationError(f"interaction '{self.bath}' couples no levels")
        if not (math.isfinite(self.energy) and self.energy > 0):
            raise ValidationError(
                f"interaction '{self.bath}' needs a positive gap, got {self.energy}"
            )
        if not (math.isfinite(self.beta) and self.beta >= 0):
            raise ValidationError(
                f"interaction '{self.bath}' needs beta >= 0, got {self.beta}"
            )
        if not (math.isfinite(self.p) and self.p > 0):
            raise ValidationError(
                f"interaction '{self.bath}' needs a positive rate, got {self.p}"
            )

    @property
    def r(self) -> float:
        """Ancilla ground population."""
        return bath_population(self.energy, self.beta)

    @property
    def rbar(self) -> float:
        """Ancilla excited population."""
        return 1.0 - self.r

    def ancilla_state(self) -> np.ndarray:
        return np.diag([self.r, self.rbar]).astype(complex)

    @property
    def up_rate(self) -> float:
        """Effective classical rate for each lower -> upper transition."""
        return 0.5 * self.p * self.rbar

    @property
    def down_rate(self) -> float:
        """Effective classical rate for each upper -> lower transition."""
        return 0.5 * self.p * self.r


@dataclass(frozen=True)
class TransitionEdge:
    """Classical view of one coupled transition: bath label, level pair,
    quantum, and the effective up/down rates."""

    bath: str
    lower: int
    upper: int
    energy: float
    up_rate: float
    down_rate: float


def interaction_hamiltonian(ia: Interaction, dim: int) -> np.ndarray:
    """Exchange Hamiltonian on the machine (x) ancilla space (ancilla index
    fastest).  Couples |upper, anc 0> <-> |lower, anc 1> for every pair with
    strength ``g``; commutes with the free Hamiltonian on resonance."""
    h = np.zeros((2 * dim, 2 * dim), dtype=complex)
    for lo, up in ia.pairs:
        a = 2 * up      # |upper> (x) |anc ground>
        b = 2 * lo + 1  # |lower> (x) |anc excited>
        h[a, b] = ia.g
        h[b, a] = ia.g
    return h


def _kraus_triplet(ia: Interaction, dim: int):
    """(P, C, X) on the joint space: uncoupled projector, coupled projector,
    and swap generator.  X^2 = C and P + C = 1."""
    c = np.zeros((2 * dim, 2 * dim), dtype=complex)
    x = np.zeros_like(c)
    for lo, up in ia.pairs:
        a = 2 * up
        b = 2 * lo + 1
        c[a, a] = 1.0
        c[b, b] = 1.0
        x[a, b] = 1.0
        x[b, a] = 1.0
    p = np.eye(2 * dim, dtype=complex) - c
    return p, c, x


def time_averaged_map(ia: Interaction, tau, rho) -> np.ndarray:
    """Phase-averaged collision map of one interaction applied to ``rho``,
    with the ancilla state ``tau`` passed explicitly.

    ``tau`` must be the interaction's own thermal qubit (diagonal, matching
    the gap/temperature populations); anything else is rejected because the
    resonance bookkeeping of the closed Kraus form assumes it.
    """
    tau = validate_state(tau, name="ancilla state")
    if tau.shape != (2, 2):
        raise ValidationError(f"ancilla must be a qubit state, got shape {tau.shape}")
    if abs(tau[0, 1]) > 1e-12 or abs(tau[1, 0]) > 1e-12:
        raise ValidationError("ancilla state must be diagonal (thermal)")
    if abs(tau[0, 0].real - ia.r) > 1e-9:
        raise ValidationError(
            f"ancilla ground population {tau[0, 0].real:.12g} is not the "
            f"interaction's thermal value {ia.r:.12g}"
        )
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValidationError(f"state must be a square matrix, got {rho.shape}")
    dim = rho.shape[0]
    p, c, x = _kraus_triplet(ia, dim)
    joint = np.kron(rho, tau)
    out = p @ joint @ p + 0.5 * (c @ joint @ c + x @ joint @ x)
    return partial_trace(out, keep=0, dims=(dim, 2))


class CollisionGenerator:
    """Master-equation generator for a machine with resonant collision baths.

    Args:
        h0: machine Hamiltonian; must be diagonal in the working basis.
        interactions: one :class:`Interaction` per bath, unique labels.
        labels: basis-state names, one per machine level.
        model: short tag carried into reports ('collision', 'qutrit', ...).
    """

    exhaust = "r"

    def __init__(self, h0, interactions, labels, model: str = "collision"):
        h0 = np.asarray(h0, dtype=complex)
        if h0.ndim != 2 or h0.shape[0] != h0.shape[1]:
            raise ValidationError(f"h0 must be square, got shape {h0.shape}")
        dim = h0.shape[0]
        if np.max(np.abs(h0 - np.diag(np.diag(h0)))) > 1e-12:
            raise ValidationError("h0 must be diagonal in the working basis")
        if np.max(np.abs(np.diag(h0).imag)) > 1e-12:
            raise ValidationError("h0 must be real on the diagonal")
        labels = tuple(str(s) for s in labels)
        if len(labels) != dim:
            raise ValidationError(f"{dim} levels but {len(labels)} labels")

        self.h0 = h0
        self.dim = dim
        self.labels = labels
        self.model = model
        self.interactions = tuple(interactions)

        seen = set()
        energies = np.diag(h0).real
        for ia in self.interactions:
            if ia.bath in seen:
                raise ValidationError(f"duplicate bath label '{ia.bath}'")
            seen.add(ia.bath)
            for lo, up in ia.pairs:
                if not (0 <= lo < dim and 0 <= up < dim) or lo == up:
                    raise ValidationError(
                        f"bath '{ia.bath}' pair ({lo}, {up}) invalid for {dim} levels"
                    )
                gap = energies[up] - energies[lo]
                if gap <= 0:
                    raise ValidationError(
                        f"bath '{ia.bath}' pair ({lo}, {up}) is not ordered "
                        f"low-to-high (gap {gap})"
                    )
                # the collision map is exact only on resonance
                if abs(gap - ia.energy) > RESONANCE_ATOL * max(1.0, abs(ia.energy)):
                    raise ValidationError(
                        f"bath '{ia.bath}' ancilla gap {ia.energy} is off-resonant "
                        f"with machine gap {gap} on pair ({lo}, {up})"
                    )
        if not self.interactions:
            raise ValidationError("generator needs at least one bath interaction")
        self.by_bath = {ia.bath: ia for ia in self.interactions}
        self._kraus = {ia.bath: _kraus_triplet(ia, dim) for ia in self.interactions}

    # -- dynamics ----------------------------------------------------------

    def omega(self, bath: str, rho: np.ndarray) -> np.ndarray:
        """Phase-averaged collision map of one bath applied to ``rho``."""
        ia = self.by_bath[bath]
        p, c, x = self._kraus[bath]
        joint = np.kron(np.asarray(rho, dtype=complex), ia.ancilla_state())
        out = p @ joint @ p + 0.5 * (c @ joint @ c + x @ joint @ x)
        return partial_trace(out, keep=0, dims=(self.dim, 2))

    def rhs(self, rho: np.ndarray) -> np.ndarray:
        """Full master-equation right-hand side at state ``rho``."""
        rho = np.asarray(rho, dtype=complex)
        out = 1j * (rho @ self.h0 - self.h0 @ rho)
        for ia in self.interactions:
            out += ia.p * (self.omega(ia.bath, rho) - rho)
        return out

    def energy_gain_rate(self, bath: str, rho: np.ndarray) -> float:
        """Rate of machine energy change due to one bath's collisions,
        positive when the bath feeds energy into the machine.  Computed as
        p E Tr[(Omega(rho) - rho) Pi_up] with Pi_up the projector on the
        upper levels of the coupled pairs; on resonance this equals the
        Tr[. H0] energy flow."""
        ia = self.by_bath[bath]
        delta = self.omega(bath, rho) - np.asarray(rho, dtype=complex)
        gain = sum(delta[up, up] for _, up in ia.pairs)
        return float(ia.p * ia.energy * gain.real)

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
        """Dense matrix of the generator on row-major vectorized states."""
        return self._liouvillian

    # -- classical sector --------------------------------------------------

    def transition_edges(self) -> tuple[TransitionEdge, ...]:
        edges = []
        energies = np.diag(self.h0).real
        for ia in self.interactions:
            for lo, up in ia.pairs:
                edges.append(
                    TransitionEdge(
                        bath=ia.bath,
                        lower=lo,
                        upper=up,
                        energy=float(energies[up] - energies[lo]),
                        up_rate=ia.up_rate,
                        down_rate=ia.down_rate,
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
        """Classical generator on populations: d pi / dt = W pi."""
        return self._rate_matrix

    def stationary_populations(self) -> np.ndarray:
        """Stationary populations from the classical rate matrix."""
        return stationary_distribution(self.rate_matrix())

    def stationary_state(self) -> np.ndarray:
        """Unique stationary density operator, from the null space of the
        full vectorized generator.  Raises DegenerateGeneratorError if the
        null space is empty, multi-dimensional, or unnormalizable."""
        return stationary_density(self.liouvillian(), self.dim)


def _null_vector(mat: np.ndarray, what: str) -> np.ndarray:
    """One-dimensional null space of ``mat`` via SVD, with a degeneracy guard."""
    u, s, vh = np.linalg.svd(np.asarray(mat, dtype=complex))
    scale = max(float(s[0]), 1.0)
    tol = NULLSPACE_RTOL * scale
    if s[-1] > tol:
        raise DegenerateGeneratorError(
            f"{what} has no null vector (smallest singular value {s[-1]:.3e})"
        )
    if len(s) > 1 and s[-2] <= tol:
        raise DegenerateGeneratorError(
            f"{what} null space is degenerate (next singular value {s[-2]:.3e})"
        )
    return vh[-1].conj()


def stationary_distribution(rate_matrix: np.ndarray) -> np.ndarray:
    """Unique probability vector annihilated by a classical rate matrix."""
    pi = _null_vector(rate_matrix, what="rate matrix").real
    total = pi.sum()
    if abs(total) < 1e-12:
        raise DegenerateGeneratorError("rate-matrix null vector has zero sum")
    pi = pi / total
    if pi.min() < -1e-10:
        raise DegenerateGeneratorError(
            f"rate-matrix null vector not a distribution (min {pi.min():.3e})"
        )
    pi = np.clip(pi, 0.0, None)
    return pi / pi.sum()


def cycle_stationary(forward: np.ndarray, backward: np.ndarray) -> np.ndarray:
    """Stationary distribution of a birth-death chain closed into a ring.

    ``forward[i]`` is the rate from ring position i to i+1 (mod n) and
    ``backward[i]`` the reverse rate.  Uses the Markov-chain tree theorem:
    the ring's spanning trees are exactly the n paths obtained by cutting one
    edge, and each tree contributes the product of its rates directed toward
    the target vertex.  Exact in rational arithmetic; here evaluated in
    floats, so it serves as an independent closed-form cross-check on the
    null-space solvers.
    """
    f = np.asarray(forward, dtype=float)
    b = np.asarray(backward, dtype=float)
    n = len(f)
    if n < 2 or len(b) != n:
        raise ValidationError("cycle needs matching forward/backward rate lists")
    if np.any(f <= 0) or np.any(b <= 0):
        raise ValidationError("cycle rates must all be positive")
    weights = np.zeros(n)
    for cut in range(n):  # remove edge (cut, cut+1): path cut+1, ..., cut
        order = [(cut + 1 + j) % n for j in range(n)]
        pos = {s: j for j, s in enumerate(order)}
        for v in range(n):
            w = 1.0
            for e in range(n):
                if e == cut:
                    continue
                # edge e joins ring sites e and e+1, adjacent on the path
                if pos[(e + 1) % n] <= pos[v]:
                    w *= f[e]  # edge sits below v on the path: direct it up
                else:
                    w *= b[e]
            weights[v] += w
    return weights / weights.sum()


def cycle_edges_in_order(gen, order) -> tuple[np.ndarray, np.ndarray]:
    """(forward, backward) rate arrays of a generator whose coupled pairs
    form one ring visiting the machine states in ``order``.

    Raises ValidationError when the transition graph is not exactly that
    ring, so callers cannot silently apply the tree formula off-topology.
    """
    edges = {}
    for e in gen.transition_edges():
        key = frozenset((e.lower, e.upper))
        if key in edges:
            raise ValidationError("transition graph has a doubled edge; not a ring")
        edges[key] = e
    n = len(order)
    if len(edges) != n or set(order) != set(range(gen.dim)) or n != gen.dim:
        raise ValidationError("transition graph does not form a single ring")
    fwd = np.empty(n)
    bwd = np.empty(n)
    for i in range(n):
        a, bnext = order[i], order[(i + 1) % n]
        e = edges.get(frozenset((a, bnext)))
        if e is None:
            raise ValidationError(f"ring edge {a} -> {bnext} missing from generator")
        if e.lower == a:
            fwd[i], bwd[i] = e.up_rate, e.down_rate
        else:
            fwd[i], bwd[i] = e.down_rate, e.up_rate
    return fwd, bwd


def stationary_density(liouvillian: np.ndarray, dim: int) -> np.ndarray:
    """Unique density operator annihilated by a vectorized generator."""
    v = _null_vector(liouvillian, what="generator")
    rho = v.reshape(dim, dim)
    rho = 0.5 * (rho + rho.conj().T)
    tr = float(np.trace(rho).real)
    if abs(tr) < 1e-12:
        raise DegenerateGeneratorError("stationary null vector is traceless")
    rho = rho / tr
    try:
        return validate_state(rho, name="stationary state")
    except ValidationError as exc:
        raise DegenerateGeneratorError(f"stationary solve unphysical: {exc}") from exc


# ---------------------------------------------------------------------------
# The reversed-coupling two-qubit refrigerator
# ---------------------------------------------------------------------------

def fridge_h0(spec: FridgeSpec) -> np.ndarray:
    """Machine Hamiltonian diag(0, e1, e2, e1 + e2) in the |00>,|10>,|01>,|11>
    basis (qubit 1 fastest)."""
    return np.diag([0.0, spec.e1, spec.e2, spec.e1 + spec.e2]).astype(complex)


def fridge_interactions(
    spec: FridgeSpec, baths: BathTriple, rates: CouplingRates, g: float = 1.0
) -> tuple[Interaction, ...]:
    """The three reversed couplings: cold flips qubit 1 (both pairs), hot
    exchanges the single-excitation states, sink drives the double flip."""
    return (
        Interaction(
            bath="c",
            pairs=((0, 1), (2, 3)),
            energy=spec.cold_quantum,
            beta=baths.beta_c,
            p=rates.p_c,
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
            pairs=((0, 3),),
            energy=spec.sink_quantum,
            beta=baths.beta_r,
            p=rates.p_r,
            g=g,
        ),
    )


def fridge_generator(
    spec: FridgeSpec, baths: BathTriple, rates: CouplingRates, g: float = 1.0
) -> CollisionGenerator:
    """Collision generator of the two-qubit reversed-coupling refrigerator."""
    return CollisionGenerator(
        h0=fridge_h0(spec),
        interactions=fridge_interactions(spec, baths, rates, g=g),
        labels=TWO_QUBIT_LABELS,
        model="collision",
    )


STATIONARY_RESIDUAL_ATOL = 1e-10


def stationarity_residual(gen, rho: np.ndarray) -> float:
    """Max-norm of the master-equation right-hand side at ``rho``."""
    return float(np.max(np.abs(gen.rhs(rho))))


def _require_stationary(gen, rho: np.ndarray) -> None:
    resid = stationarity_residual(gen, rho)
    if resid > STATIONARY_RESIDUAL_ATOL:
        raise ValidationError(
            f"heat currents are defined at stationarity only; residual {resid:.3e} "
            f"exceeds {STATIONARY_RESIDUAL_ATOL:.0e}"
        )


def _signed_current(gen, rho: np.ndarray, bath: str) -> float:
    raw = gen.energy_gain_rate(bath, rho)
    return -raw if bath == getattr(gen, "exhaust", "r") else raw


def heat_current(gen, rho: np.ndarray, bath: str) -> float:
    """Signed stationary heat current of one bath.

    Positive means heat absorbed by the machine for supply baths, and heat
    delivered to the bath for the exhaust ('r'), so a working refrigerator
    reports all three currents positive.  Rejects states that are not
    stationary to within the shared residual tolerance."""
    _require_stationary(gen, rho)
    return _signed_current(gen, rho, bath)


def heat_currents(gen, rho: np.ndarray) -> dict[str, float]:
    """All bath currents at ``rho`` under the sign convention of
    :func:`heat_current`."""
    _require_stationary(gen, rho)
    return {ia.bath: _signed_current(gen, rho, ia.bath) for ia in gen.interactions}


# ---------------------------------------------------------------------------
# Closed forms for the two-qubit machine (single-cycle graph)
# ---------------------------------------------------------------------------

def _populations_xd(spec: FridgeSpec, baths: BathTriple, rates: CouplingRates):
    """Shared pieces of the closed-form solution: ancilla populations, the
    cooling numerator X and the normalization D."""
    r_c = bath_population(spec.cold_quantum, baths.beta_c)
    r_r = bath_population(spec.sink_quantum, baths.beta_r)
    r_h = bath_population(spec.hot_quantum, baths.beta_h)
    cb, rb, hb = 1.0 - r_c, 1.0 - r_r, 1.0 - r_h
    pc, pr, ph = rates.p_c, rates.p_r, rates.p_h
    x = cb * cb * r_r * hb - r_c * r_c * rb * r_h
    d = (1.0 / pc + 1.0 / pr) * (r_c * r_h + cb * hb) + (1.0 / pc + 1.0 / ph) * (
        r_c * rb + cb * r_r
    )
    return (r_c, r_r, r_h, cb, rb, hb, pc, pr, ph, x, d)


def two_qubit_stationary_closed_form(
    spec: FridgeSpec, baths: BathTriple, rates: CouplingRates
) -> np.ndarray:
    """Stationary populations (pi_00, pi_10, pi_01, pi_11) of the two-qubit
    machine from the spanning-tree solution of its 4-state cycle."""
    r_c, r_r, r_h, cb, rb, hb, pc, pr, ph, _, d = _populations_xd(spec, baths, rates)
    pi = np.array(
        [
            r_c * (r_c * r_h / pr + cb * r_r / ph)
            + r_r * (r_c * r_h + cb * hb) / pc,
            cb * (r_c * r_h / pr + cb * r_r / ph)
            + r_h * (r_c * rb + cb * r_r) / pc,
            r_c * (cb * hb / pr + r_c * rb / ph)
            + hb * (r_c * rb + cb * r_r) / pc,
            cb * (cb * hb / pr + r_c * rb / ph)
            + rb * (r_c * r_h + cb * hb) / pc,
        ]
    )
    return pi / d


def cycle_flux(spec: FridgeSpec, baths: BathTriple, rates: CouplingRates) -> float:
    """Net cycles per unit time around 00 -> 10 -> 01 -> 11 -> 00 at the
    stationary state, positive in the cooling direction."""
    *_, x, d = _populations_xd(spec, baths, rates)
    return x / (2.0 * d)


def q_c_closed_form(spec: FridgeSpec, baths: BathTriple, rates: CouplingRates) -> float:
    """Stationary cold heat current e1 * X / D (two cold quanta per cycle)."""
    *_, x, d = _populations_xd(spec, baths, rates)
    return spec.e1 * x / d


def q_c_hot_limit(spec: FridgeSpec, baths: BathTriple, rates: CouplingRates) -> float:
    """Cold current in the infinite hot-temperature limit (beta_h -> 0, so
    the hot ancillas are unbiased)."""
    r_c = bath_population(spec.cold_quantum, baths.beta_c)
    r_r = bath_population(spec.sink_quantum, baths.beta_r)
    cb, rb = 1.0 - r_c, 1.0 - r_r
    pc, pr, ph = rates.p_c, rates.p_r, rates.p_h
    x = cb * cb * r_r - r_c * r_c * rb
    d = 0.5 * (1.0 / pc + 1.0 / pr) + (1.0 / pc + 1.0 / ph) * (r_c * rb + cb * r_r)
    return 0.5 * spec.e1 * x / d


def carnot_product_state(spec: FridgeSpec, baths: BathTriple) -> np.ndarray:
    """Factorized form the stationary state takes at the reversible point:
    qubit 1 thermal at the cold temperature, qubit 2 with populations
    proportional to (r_c r_h, rbar_c rbar_h)."""
    r_c = bath_population(spec.cold_quantum, baths.beta_c)
    r_h = bath_population(spec.hot_quantum, baths.beta_h)
    q2 = np.array([r_c * r_h, (1.0 - r_c) * (1.0 - r_h)])
    q2 = q2 / q2.sum()
    # qubit 1 varies fastest, so its factor is the second kron argument
    return np.kron(np.diag(q2), np.diag([r_c, 1.0 - r_c])).astype(complex)


def trace_distance_to_product(gen, rho: np.ndarray) -> float:
    """Distance of ``rho`` from the reversible-point product form; defined
    for the two-qubit machine layout only."""
    if gen.dim != 4 or tuple(gen.labels) != TWO_QUBIT_LABELS:
        raise ValidationError("product form is defined for the two-qubit machine only")
    cold = gen.by_bath["c"]
    hot = gen.by_bath["h"]
    sink = gen.by_bath["r"]
    e1 = cold.energy
    e2 = sink.energy - e1
    spec = FridgeSpec(e1, e2)
    r_c, r_h = cold.r, hot.r
    q2 = np.array([r_c * r_h, (1.0 - r_c) * (1.0 - r_h)])
    q2 = q2 / q2.sum()
    prod = np.kron(np.diag(q2), np.diag([r_c, 1.0 - r_c])).astype(complex)
    assert abs(spec.hot_quantum - hot.energy) < 1e-9  # layout sanity
    return trace_distance(rho, prod)


def stationary_r1(populations: np.ndarray, cold_pairs) -> float:
    """Ground-state weight of the cooled transition: the population on the
    lower levels of the cold pairs, normalized over the levels the cold bath
    touches.  Cooling means this exceeds the cold-ancilla ground population."""
    pi = np.asarray(populations, dtype=float)
    lower = sum(pi[lo] for lo, _ in cold_pairs)
    upper = sum(pi[up] for _, up in cold_pairs)
    total = lower + upper
    if total <= 0:
        raise ValidationError("cold pairs carry no population")
    return float(lower / total)


# ---------------------------------------------------------------------------
# Time evolution
# ---------------------------------------------------------------------------

@dataclass
class Trajectory:
    """Sampled solution of the master equation."""

    times: np.ndarray
    states: np.ndarray
    labels: tuple[str, ...] = field(default=())

    @property
    def populations(self) -> np.ndarray:
        """Real diagonal of every sampled state, shape (n_samples, dim)."""
        return np.real(np.einsum("tii->ti", self.states))

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


def default_dt(gen) -> float:
    """Integration step resolving both the fastest collision rate and the
    largest Bohr frequency: 0.01 / max(rates, spectral span of h0)."""
    energies = np.diag(np.asarray(gen.h0)).real
    span = float(energies.max() - energies.min())
    fastest = max(ia.p for ia in gen.interactions)
    return 0.01 / max(fastest, span, 1e-12)


_RELAXED = dict(trace_atol=1e-9, hermitian_atol=1e-9, positivity_atol=-1e-8)


def evolve(
    gen,
    rho0: np.ndarray,
    t_final: float,
    dt: float | None = None,
    samples: int = 201,
) -> Trajectory:
    """Integrate the master equation with classical RK4 on the vectorized
    state, sampling ``samples`` evenly spaced times including both endpoints.

    The step is rounded down so every sampling interval holds an integer
    number of steps.  Sampled states are validated (with relaxed positivity
    for transient numerical dips); on failure the whole run is retried with
    the step halved, up to ten times.
    """
    rho0 = validate_state(rho0, name="initial state", **_RELAXED)
    if not (math.isfinite(t_final) and t_final > 0):
        raise ValidationError(f"t_final must be positive and finite, got {t_final}")
    if samples < 2:
        raise ValidationError(f"need at least 2 samples, got {samples}")
    if dt is None:
        dt = default_dt(gen)
    if not (math.isfinite(dt) and dt > 0):
        raise ValidationError(f"dt must be positive and finite, got {dt}")

    liouv = gen.liouvillian()
    times = np.linspace(0.0, t_final, samples)
    interval = times[1] - times[0]

    last_error: ValidationError | None = None
    for attempt in range(11):
        step_dt = dt / (2 ** attempt)
        n_sub = max(1, math.ceil(interval / step_dt))
        h = interval / n_sub
        try:
            states = _rk4_run(liouv, rho0, times, n_sub, h)
            return Trajectory(times=times, states=states, labels=tuple(gen.labels))
        except ValidationError as exc:
            last_error = exc
    raise RuntimeError(
        f"integration failed even at dt/{2 ** 10}: {last_error}"
    )


def _rk4_run(liouv, rho0, times, n_sub, h) -> np.ndarray:
    dim = rho0.shape[0]
    states = np.empty((len(times), dim, dim), dtype=complex)
    states[0] = rho0
    v = rho0.reshape(-1).astype(complex)
    for i in range(1, len(times)):
        for _ in range(n_sub):
            k1 = liouv @ v
            k2 = liouv @ (v + 0.5 * h * k1)
            k3 = liouv @ (v + 0.5 * h * k2)
            k4 = liouv @ (v + h * k3)
            v = v + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        rho = v.reshape(dim, dim)
        states[i] = validate_state(rho, name=f"state at t={times[i]:.6g}", **_RELAXED)
    return states
