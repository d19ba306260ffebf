"""Ideal relative flow distribution on directed networks.

Three independent routes to the same answer: a Markov stationary solve, a
constrained null-space solve, and multi-agent random-walk simulation; plus flow
propagation, scaling calibration against observed link flows, file formats, a
CLI, and a session-based what-if HTTP service.
"""

__version__ = "0.1.0"

from .calibrate import (
    CalibrationResult,
    extend_observed_to_augmented,
    fit_scale,
    unit_ideal_flow,
)
from .graph import (
    Arc,
    AugmentedNetwork,
    DirectedNetwork,
    augment_with_cloud,
    diameter,
    incidence,
    is_strongly_connected,
    remove_self_loops,
)
from .markov import (
    EntropyReport,
    capacity_transition,
    ideal_flow,
    is_premagic,
    network_entropy,
    node_entropy,
    normalize_min,
    perron_ratio_check,
    scale,
    snap_integers,
    stationary,
    transition_from_flows,
    uniform_transition,
)
from .nullspace import (
    build_constraints,
    node_loads,
    normalize_edges,
    solve_null,
    split_incidence,
    standard_flow,
)
from .simulate import (
    ConvergenceSeries,
    SimConfig,
    convergence_series,
    propagate_flow,
    relative_flow,
    simulate,
)

__all__ = [
    "__version__",
    "Arc",
    "AugmentedNetwork",
    "CalibrationResult",
    "ConvergenceSeries",
    "DirectedNetwork",
    "EntropyReport",
    "SimConfig",
    "augment_with_cloud",
    "build_constraints",
    "capacity_transition",
    "convergence_series",
    "diameter",
    "extend_observed_to_augmented",
    "fit_scale",
    "ideal_flow",
    "incidence",
    "is_premagic",
    "is_strongly_connected",
    "network_entropy",
    "node_entropy",
    "node_loads",
    "normalize_edges",
    "normalize_min",
    "perron_ratio_check",
    "propagate_flow",
    "relative_flow",
    "remove_self_loops",
    "scale",
    "simulate",
    "snap_integers",
    "solve_null",
    "split_incidence",
    "standard_flow",
    "stationary",
    "transition_from_flows",
    "uniform_transition",
    "unit_ideal_flow",
]
