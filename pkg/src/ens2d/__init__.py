"""Pseudo-spectral laboratory for 2D vorticity with a diffusing divergence field."""

from .errors import (
    EnsError,
    MeanNotZeroError,
    EdgeDecayError,
    BlowupError,
    ConservationBreachError,
    NegativeVorticityError,
    ConfigError,
)
from .grid import (
    GridSpec,
    ScalarField,
    make_grid,
    zero_field,
    derivative,
    laplacian,
    dealias,
    poisson_inverse,
)
from .fields import (
    SimState,
    SelfSimilarState,
    gaussian_G,
    oseen_vortex,
    mean_integral,
    first_moment,
    lp_norm,
    lpm_norm,
    weighted_w_norm,
    to_self_similar,
    from_self_similar,
)
from .profiles import (
    RadialProfile,
    solve_ws,
    ws_field,
    ws_max_location,
    ws_minus_g_norm,
    tilde_pair,
)
from .velocity import (
    VelocityField,
    curl,
    div,
    biot_savart,
    grad_inverse,
    make_background,
    reconstruct_velocity,
)
from .evolution import (
    StepControls,
    Trajectory,
    heat_evolve_exact,
    rhs_vorticity,
    cfl_dt,
    step,
    restart_rescale,
    evolve,
    apply_L,
    semigroup_apply,
)
from .diagnostics import (
    COLUMNS,
    DiagnosticsRow,
    relative_entropy,
    fisher_information,
    entropy_production_check,
    beta_cross_term,
    coercivity_check,
    theorem_monitors,
    make_row,
    decay_fit,
    envelope_fit,
    envelope_ratio,
)
from .scenarios import (
    SCENARIOS,
    GENERATORS,
    ScenarioConfig,
    ScenarioResult,
    build_config,
    parse_config_text,
    generate_ic,
    run_scenario,
    read_snapshot,
    write_snapshot,
)
from .acceptance import CriterionResult, run_all, run_one

__all__ = [
    "EnsError",
    "MeanNotZeroError",
    "EdgeDecayError",
    "BlowupError",
    "ConservationBreachError",
    "NegativeVorticityError",
    "ConfigError",
    "GridSpec",
    "ScalarField",
    "make_grid",
    "zero_field",
    "derivative",
    "laplacian",
    "dealias",
    "poisson_inverse",
    "SimState",
    "SelfSimilarState",
    "gaussian_G",
    "oseen_vortex",
    "mean_integral",
    "first_moment",
    "lp_norm",
    "lpm_norm",
    "weighted_w_norm",
    "to_self_similar",
    "from_self_similar",
    "RadialProfile",
    "solve_ws",
    "ws_field",
    "ws_max_location",
    "ws_minus_g_norm",
    "tilde_pair",
    "VelocityField",
    "curl",
    "div",
    "biot_savart",
    "grad_inverse",
    "make_background",
    "reconstruct_velocity",
    "StepControls",
    "Trajectory",
    "heat_evolve_exact",
    "rhs_vorticity",
    "cfl_dt",
    "step",
    "restart_rescale",
    "evolve",
    "apply_L",
    "semigroup_apply",
    "COLUMNS",
    "DiagnosticsRow",
    "relative_entropy",
    "fisher_information",
    "entropy_production_check",
    "beta_cross_term",
    "coercivity_check",
    "theorem_monitors",
    "make_row",
    "decay_fit",
    "envelope_fit",
    "envelope_ratio",
    "SCENARIOS",
    "GENERATORS",
    "ScenarioConfig",
    "ScenarioResult",
    "build_config",
    "parse_config_text",
    "generate_ic",
    "run_scenario",
    "read_snapshot",
    "write_snapshot",
    "CriterionResult",
    "run_all",
    "run_one",
]

__version__ = "0.1.0"
