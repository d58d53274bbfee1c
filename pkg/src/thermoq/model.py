"""Machine parameters and analytic thermodynamics.

The refrigerator couples a two-qubit machine (gaps ``e1 < e2``) to three
thermal reservoirs:

* a cold bath at ``t_c`` driving both flips of qubit 1 (quantum of ``e1``),
* a room/sink bath at ``t_r`` driving the double flip |00> <-> |11>
  (quantum of ``e1 + e2``),
* a hot bath at ``t_h`` driving the exchange |10> <-> |01>
  (quantum of ``e2 - e1``).

Units: hbar = k_B = 1 throughout; temperatures and energies are plain floats.

Everything in this module is closed-form: no dynamics, just the parameter
containers, the single-cycle energy ledger, the virtual-temperature analysis
and the Carnot point.  Dynamical predictions live in :mod:`thermoq.collision`
and :mod:`thermoq.bosonic`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.optimize import brentq

from .errors import SearchError, ValidationError


def _require_positive(value: float, name: str) -> float:
    v = float(value)
    if not math.isfinite(v) or v <= 0:
        raise ValidationError(f"{name} must be a positive finite number, got {value!r}")
    return v


@dataclass(frozen=True)
class FridgeSpec:
    """Energy structure of the two-qubit machine: gaps ``e1`` of qubit 1 and
    ``e2`` of qubit 2, with ``0 < e1 < e2`` required so the hot quantum
    ``e2 - e1`` stays positive."""

    e1: float
    e2: float

    def __post_init__(self):
        _require_positive(self.e1, "e1")
        _require_positive(self.e2, "e2")
        if self.e2 <= self.e1:
            raise ValidationError(
                f"need e2 > e1 for a finite hot quantum, got e1={self.e1}, e2={self.e2}"
            )

    @property
    def cold_quantum(self) -> float:
        return self.e1

    @property
    def sink_quantum(self) -> float:
        return self.e1 + self.e2

    @property
    def hot_quantum(self) -> float:
        return self.e2 - self.e1


@dataclass(frozen=True)
class BathTriple:
    """Reservoir temperatures, ordered 0 < t_c <= t_r <= t_h."""

    t_c: float
    t_r: float
    t_h: float

    def __post_init__(self):
        _require_positive(self.t_c, "t_c")
        _require_positive(self.t_r, "t_r")
        _require_positive(self.t_h, "t_h")
        if not (self.t_c <= self.t_r <= self.t_h):
            raise ValidationError(
                f"temperatures must satisfy t_c <= t_r <= t_h, got "
                f"({self.t_c}, {self.t_r}, {self.t_h})"
            )

    @property
    def beta_c(self) -> float:
        return 1.0 / self.t_c

    @property
    def beta_r(self) -> float:
        return 1.0 / self.t_r

    @property
    def beta_h(self) -> float:
        return 1.0 / self.t_h


@dataclass(frozen=True)
class CouplingRates:
    """Poisson collision rates (collision model) per bath, all positive."""

    p_c: float
    p_r: float
    p_h: float

    def __post_init__(self):
        _require_positive(self.p_c, "p_c")
        _require_positive(self.p_r, "p_r")
        _require_positive(self.p_h, "p_h")

    @property
    def slowest(self) -> float:
        return min(self.p_c, self.p_r, self.p_h)

    @property
    def fastest(self) -> float:
        return max(self.p_c, self.p_r, self.p_h)


def bath_population(energy: float, beta: float) -> float:
    """Ground-state population r = 1/(1 + e^{-beta E}) of a thermal qubit
    with gap ``energy`` at inverse temperature ``beta``."""
    if energy < 0:
        raise ValidationError(f"bath qubit gap must be >= 0, got {energy}")
    if beta < 0:
        raise ValidationError(f"inverse temperature must be >= 0, got {beta}")
    return 1.0 / (1.0 + math.exp(-beta * energy))


@dataclass(frozen=True)
class BathQubit:
    """A resonant thermal ancilla: gap, inverse temperature, and the derived
    ground population ``r`` (excited population is ``rbar = 1 - r``)."""

    energy: float
    beta: float

    @property
    def r(self) -> float:
        return bath_population(self.energy, self.beta)

    @property
    def rbar(self) -> float:
        return 1.0 - self.r

    def gibbs_diagonal(self) -> tuple[float, float]:
        return (self.r, self.rbar)


def bath_qubits(spec: FridgeSpec, baths: BathTriple) -> dict[str, BathQubit]:
    """The three ancilla species, keyed 'c', 'r', 'h', each resonant with its
    transition quantum and thermal at its own bath temperature."""
    return {
        "c": BathQubit(spec.cold_quantum, baths.beta_c),
        "r": BathQubit(spec.sink_quantum, baths.beta_r),
        "h": BathQubit(spec.hot_quantum, baths.beta_h),
    }


# ---------------------------------------------------------------------------
# Single-cycle energy ledger
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CycleStroke:
    """One leg of the cooling cycle: which populations move, which bath pays,
    and how much machine energy changes (positive = machine absorbs)."""

    transition: str
    bath: str
    energy: float


@dataclass(frozen=True)
class CycleLedger:
    """Energy bookkeeping for one full traversal of the 4-state cycle
    00 -> 10 -> 01 -> 11 -> 00.

    ``q_c``/``q_h`` are the heats drawn from the cold and hot baths per cycle;
    ``q_r`` is the heat dumped into the sink, fixed to ``q_c + q_h`` so the
    ledger balances identically.
    """

    strokes: tuple[CycleStroke, ...]
    q_c: float
    q_h: float

    @property
    def q_r(self) -> float:
        return self.q_c + self.q_h

    @property
    def efficiency(self) -> float:
        return self.q_c / self.q_h


def cycle_ledger(spec: FridgeSpec) -> CycleLedger:
    """Enumerate the cycle strokes and tally per-cycle heats.

    The cold bath acts twice per traversal (each qubit-1 flip costs ``e1``),
    the hot bath once (``e2 - e1`` absorbed), and the sink once
    (``e1 + e2`` released on the double de-excitation).
    """
    e1, e2 = spec.e1, spec.e2
    strokes = (
        CycleStroke("00->10", "c", +e1),
        CycleStroke("10->01", "h", e2 - e1),
        CycleStroke("01->11", "c", +e1),
        CycleStroke("11->00", "r", -(e1 + e2)),
    )
    # sanity: strokes must net to zero machine energy
    net = sum(s.energy for s in strokes)
    if abs(net) > 1e-12 * spec.sink_quantum:
        raise AssertionError(f"cycle does not close: net machine energy {net}")
    return CycleLedger(strokes=strokes, q_c=2.0 * e1, q_h=e2 - e1)


def cooling_efficiency(spec: FridgeSpec, baths: BathTriple | None = None) -> float:
    """Coefficient of performance q_c / q_h = 2 e1 / (e2 - e1), exact for the
    reversed-coupling machine because every cycle moves the same quanta.

    When ``baths`` is given, the equivalent inverse-temperature form
    (beta_r - beta_h)/(beta_v - beta_r) is evaluated too and both are
    required to agree to 1e-12 relative."""
    eta = 2.0 * spec.e1 / (spec.e2 - spec.e1)
    # the beta form is 0/0 when t_r = t_h (no work resource), so skip it there
    if baths is not None and baths.beta_r > baths.beta_h:
        alt = efficiency_from_temperatures(spec, baths)
        if abs(alt - eta) > 1e-12 * max(1.0, abs(eta)):
            raise AssertionError(
                f"efficiency forms disagree: {eta!r} (gap ratio) vs {alt!r} (beta form)"
            )
    return eta


# ---------------------------------------------------------------------------
# Virtual temperature and the cooling window
# ---------------------------------------------------------------------------

def virtual_beta(spec: FridgeSpec, baths: BathTriple) -> float:
    """Inverse virtual temperature of the composite contact seen by qubit 1.

    The sink and hot couplings jointly prepare the pair (|00>,|11>) vs
    (|10>,|01>) population ratio; dividing the log-ratio by the cold quantum
    gives an effective inverse temperature

        beta_v = [beta_r (e2 + e1) - beta_h (e2 - e1)] / (2 e1).

    Cooling of qubit 1 happens when beta_v > beta_c.  Note beta_v can be
    negative (population inversion) for beta_h large enough.
    """
    return (baths.beta_r * spec.sink_quantum - baths.beta_h * spec.hot_quantum) / (
        2.0 * spec.e1
    )


def virtual_temperature(spec: FridgeSpec, baths: BathTriple) -> float:
    """1 / virtual_beta; +inf at the inversion threshold, negative beyond it."""
    bv = virtual_beta(spec, baths)
    if bv == 0.0:
        return math.inf
    return 1.0 / bv


def cooling_predicate(spec: FridgeSpec, baths: BathTriple) -> bool:
    """True when the machine refrigerates qubit 1 (beta_v > beta_c)."""
    return virtual_beta(spec, baths) > baths.beta_c


def cycle_entropy(spec: FridgeSpec, baths: BathTriple) -> float:
    """Total bath entropy change per completed cooling cycle,

        delta_s = beta_r (e2 + e1) - beta_h (e2 - e1) - 2 beta_c e1
                = 2 e1 (beta_v - beta_c),

    strictly positive exactly inside the cooling window and zero at the
    reversible point, so a forward cycle is thermodynamically allowed iff
    it cools."""
    return 2.0 * spec.e1 * (virtual_beta(spec, baths) - baths.beta_c)


def efficiency_from_temperatures(spec: FridgeSpec, baths: BathTriple) -> float:
    """COP written through the bath inverse temperatures,

        eta = (beta_r - beta_h) / (beta_v - beta_r),

    algebraically identical to 2 e1 / (e2 - e1) for this machine."""
    denom = virtual_beta(spec, baths) - baths.beta_r
    if denom == 0.0:
        raise ValidationError("virtual and sink inverse temperatures coincide")
    return (baths.beta_r - baths.beta_h) / denom


def carnot_efficiency(baths: BathTriple) -> float:
    """Reversible COP bound (beta_r - beta_h)/(beta_c - beta_r); +inf when
    t_c = t_r (no bound: the cold bath is not colder than the sink)."""
    denom = baths.beta_c - baths.beta_r
    if denom <= 0.0:
        return math.inf
    return (baths.beta_r - baths.beta_h) / denom


def carnot_e2(e1: float, baths: BathTriple, *, bracket_max: float = 1e6) -> float:
    """Gap ``e2`` at which the machine runs reversibly (beta_v = beta_c).

    Closed form: e2* = e1 (2 beta_c - beta_r - beta_h) / (beta_r - beta_h),
    located here by a bracketed root solve on beta_v(e2) - beta_c so the
    returned point is certified to the solver tolerance rather than assumed.

    Raises SearchError when no reversible point exists with e2 > e1
    (in particular whenever t_c = t_r, where the cooling window is empty).
    """
    e1 = _require_positive(e1, "e1")
    bc, br, bh = baths.beta_c, baths.beta_r, baths.beta_h
    if br <= bh:
        raise SearchError(
            "sink and hot baths at equal temperature: beta_v is e2-independent"
        )

    def gap(e2: float) -> float:
        return virtual_beta(FridgeSpec(e1, e2), baths) - bc

    lo = e1 * (1.0 + 1e-12)
    hi = e1 * bracket_max
    # beta_v increases linearly in e2 with slope (br - bh)/(2 e1) > 0, so a
    # sign change over the bracket is both necessary and sufficient.
    if gap(lo) >= 0.0 or gap(hi) <= 0.0:
        raise SearchError(
            f"no reversible gap in ({lo:.6g}, {hi:.6g}): the cooling window "
            "does not open for e2 > e1 at these temperatures"
        )
    root = brentq(gap, lo, hi, xtol=1e-14, rtol=1e-15)
    # certify: beta_v at the root matches beta_c tightly
    if abs(gap(root)) > 1e-10:
        raise SearchError(f"root solve left residual {gap(root):.3e}")
    return float(root)
