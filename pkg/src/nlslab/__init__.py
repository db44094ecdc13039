"""Numerical laboratory for the 3D focusing cubic nonlinear Schrodinger
equation: ground states, mass-energy classification, split-step
evolution, and virial blow-up-time bounds."""

__version__ = "0.1.0"

from .grid import Grid, PERIODIC3D, RADIAL1D
from .field import (
    Field,
    InvariantReport,
    boundary_mass_fraction,
    compute_invariants,
    gn_functional,
    zero_field,
)
from .groundstate import GroundState, sample_soliton, solve_ground_state
from .thresholds import Classification, classify, galilean_reduce, solve_lambda
from .virial import (
    BlowupBound,
    Cutoff,
    LocalVirialReport,
    bound_finite_variance,
    bound_localized,
    bound_radial,
    eta_geq_R,
    radial_bound_radius,
    variance_and_rate,
    z_R_and_second_derivative,
)
from .evolution import (
    EvolveConfig,
    RunResult,
    conservation_audit,
    evolve,
    fit_blowup_rate,
    step,
)
from .modulation import ModulationFit, fit_modulation, rescale_to_unit_mass
from .series import DiagnosticSeries

__all__ = [
    "Grid", "PERIODIC3D", "RADIAL1D",
    "Field", "InvariantReport", "zero_field",
    "compute_invariants", "gn_functional", "boundary_mass_fraction",
    "GroundState", "solve_ground_state", "sample_soliton",
    "Classification", "solve_lambda", "galilean_reduce", "classify",
    "Cutoff", "LocalVirialReport", "BlowupBound", "DiagnosticSeries",
    "variance_and_rate", "z_R_and_second_derivative", "eta_geq_R",
    "bound_finite_variance", "bound_localized", "bound_radial",
    "radial_bound_radius",
    "EvolveConfig", "RunResult", "step", "evolve", "conservation_audit",
    "fit_blowup_rate",
    "ModulationFit", "fit_modulation", "rescale_to_unit_mass",
    "__version__",
]
