"""thermoq: two-qubit absorption refrigerator with reversed bath couplings.

Simulation of a four-level machine cooled by collision-model or bosonic
Lindblad baths: dynamics, stationary states, heat currents, efficiency,
virtual-temperature analysis, Carnot point, parameter sweeps, and the
head-to-head comparison against the standard three-level fridge.
"""

from .bosonic import (
    BosonicCoupling,
    LindbladGenerator,
    bosonic_generator,
    decay_rates,
    equivalence_gammas,
    equivalence_map,
    fridge_bosonic_generator,
    jump_operators,
    lindblad_rhs,
    thermal_occupation,
)
from .collision import (
    TWO_QUBIT_LABELS,
    CollisionGenerator,
    Interaction,
    Trajectory,
    TransitionEdge,
    basis_index,
    carnot_product_state,
    cycle_flux,
    cycle_stationary,
    default_dt,
    evolve,
    fridge_generator,
    fridge_h0,
    fridge_interactions,
    heat_current,
    heat_currents,
    interaction_hamiltonian,
    q_c_closed_form,
    q_c_hot_limit,
    stationarity_residual,
    stationary_r1,
    time_averaged_map,
    trace_distance_to_product,
    two_qubit_stationary_closed_form,
)
from .errors import (
    DegenerateGeneratorError,
    SearchError,
    ThermoqError,
    ValidationError,
)
from .model import (
    BathQubit,
    BathTriple,
    CouplingRates,
    CycleLedger,
    CycleStroke,
    FridgeSpec,
    bath_population,
    bath_qubits,
    carnot_e2,
    carnot_efficiency,
    cooling_efficiency,
    cooling_predicate,
    cycle_entropy,
    cycle_ledger,
    efficiency_from_temperatures,
    virtual_beta,
    virtual_temperature,
)
from .operators import (
    dagger,
    gibbs_state,
    is_hermitian,
    ket,
    ketbra,
    partial_trace,
    tensor,
    trace_distance,
    validate_state,
)
from .qutrit import (
    QUTRIT_LABELS,
    ComparisonReport,
    QutritSpec,
    SearchOutcome,
    compare,
    compare_closed_form,
    qutrit_generator,
    qutrit_q_c_closed_form,
    random_comparison_search,
    random_parameters,
)
from .reports import SteadyStateReport, steady_state, steady_state_bosonic
from .config import DEFAULTS, MODELS, RunConfig, load_config_file, resolve_config
from .sweep import (
    OptimizeResult,
    SweepRow,
    SweepSpec,
    golden_section_max,
    optimize_e2,
    run_sweep,
    scan_optimal_e2,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
