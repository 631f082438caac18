"""High-precision laboratory for a near-periodic orbit of the planar
elliptic restricted three-body problem (Sun-Jupiter masses, e = 0.048).

The package provides extended-precision Taylor-series propagation of the
spacecraft equations of motion in pulsating coordinates, monodromy and
linear-stability analysis, differential correction of the near-periodic
seed, and immersion of the planar solution into an ecliptic J2000 frame
for comparison against Jupiter ephemeris records.
"""
from .dynamics import (
    PhaseState,
    SystemParams,
    UnitSystem,
    orbital_period,
    reference_initial_state,
    reference_params,
    unit_system,
)
from .errors import ErtbpError
from .frames import FrameParams, OrbitalFrame, build_frame, fitted_frame_params
from .horizons import EphemerisRecord, horizons_parse, load_fixture
from .monodromy import (
    Monodromy,
    StabilityReport,
    classify_stability,
    eigenvalues_4x4,
    state_transition_matrix,
)
from .precision import DEFAULT_DIGITS, working_precision
from .refine import ClosureResidual, RefinementReport, closure_residual, newton_refine
from .taylor import (
    IntegratorConfig,
    Trajectory,
    active_backend,
    reference_config,
    propagate,
    propagate_dense,
)

__version__ = "0.1.0"

__all__ = [
    "ClosureResidual",
    "DEFAULT_DIGITS",
    "EphemerisRecord",
    "ErtbpError",
    "FrameParams",
    "IntegratorConfig",
    "Monodromy",
    "OrbitalFrame",
    "PhaseState",
    "RefinementReport",
    "StabilityReport",
    "SystemParams",
    "Trajectory",
    "UnitSystem",
    "active_backend",
    "build_frame",
    "classify_stability",
    "closure_residual",
    "eigenvalues_4x4",
    "fitted_frame_params",
    "horizons_parse",
    "load_fixture",
    "newton_refine",
    "orbital_period",
    "propagate",
    "propagate_dense",
    "reference_config",
    "reference_initial_state",
    "reference_params",
    "state_transition_matrix",
    "unit_system",
    "working_precision",
    "__version__",
]
