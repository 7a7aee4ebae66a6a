"""1-D Lagrangian compressible Navier-Stokes solver with verification harness.

A viscous, heat-conducting ideal gas on the fixed mass-coordinate interval
(0, 1), with density-dependent viscosity and temperature-power conductivity,
under stress-free or no-slip (both insulated) boundaries. Every run carries
instruments that check the computable conservation identities and
boundedness functionals of the underlying theory.
"""

from .constitutive import (
    DerivedFields,
    MaterialParams,
    branch_weight,
    conductivity,
    derived_fields,
    pressure,
    sound_speed,
    stress,
    viscosity,
)
from .driver import CheckResult, RunResult, initial_state, run, verification_table
from .grid import (
    Grid,
    State,
    cell_integral,
    cumulative_u_integral,
    du_dx_cells,
    field_min,
    grad_l2_sq,
    node_weights,
    total_energy,
)
from .mms import MmsCase, build_case, manufactured_case, mms_sources
from .scenario import (
    ConfigError,
    ConvergenceLevel,
    ConvergenceReport,
    DiagnosticsReport,
    DiagnosticsRow,
    ProfileSpec,
    Scenario,
    TIMESERIES_COLUMNS,
    emit_snapshot,
    emit_timeseries,
    load_config,
    parse_config,
    parse_snapshot,
    parse_timeseries,
)
from .scheme import (
    BoundaryKind,
    InitialProfile,
    SolverAbort,
    StepControls,
    StepRejected,
    compatible_initial_data,
    compatibility_residual,
    continuity_step,
    dt_control,
    momentum_step,
    step,
    temperature_step,
    tridiagonal_solve,
)
from .verify import (
    BoundTracker,
    RepresentationAccumulator,
    boundary_stress_residual,
    energy_drift,
    initial_volume_factor,
    make_accumulator,
    make_tracker,
    representation_residual,
    stress_magnitude_scale,
    update_accumulator,
    update_bounds,
    velocity_band_check,
    velocity_integral_factor,
    viscosity_volume_factor,
)

__version__ = "0.1.0"
