"""
uukin - Uehling-Uhlenbeck kinetics: collision operator, blow-up dynamics,
lattice memory kernels and boundary-layer scales
"""

__version__ = "0.1.0"

from .core import PhysicalParams, NonDimParams, nondimensionalize, RadialGrid, DistributionIso, initial_bose
from .collision import CollisionConfig, collision_rhs_iso, collision_mc, moments, equilibrium
from .dynamics import StepController, Trajectory, evolve, detect_blowup, fit_selfsimilar, extract_profile
from .lattice import Lattice3, DistributionLattice, PairCorrelation, KernelMode, solve_lattice
from .boundary_layer import physical_scales, asymptotic_data, evolve_hierarchy, wigner_form
from .errors import (
    KineticError,
    ErrorStruct,
    ErrorLevel,
    ErrorList,
    Warning,
    new_error,
    new_warning,
    new_fatal,
    get_errors,
    EXIT_CODES,
)

__all__ = [
    "PhysicalParams",
    "NonDimParams",
    "nondimensionalize",
    "RadialGrid",
    "DistributionIso",
    "initial_bose",
    "CollisionConfig",
    "collision_rhs_iso",
    "collision_mc",
    "moments",
    "equilibrium",
    "StepController",
    "Trajectory",
    "evolve",
    "detect_blowup",
    "fit_selfsimilar",
    "extract_profile",
    "Lattice3",
    "DistributionLattice",
    "PairCorrelation",
    "KernelMode",
    "solve_lattice",
    "physical_scales",
    "asymptotic_data",
    "evolve_hierarchy",
    "wigner_form",
    "KineticError",
    "ErrorStruct",
    "ErrorLevel",
    "ErrorList",
    "Warning",
    "new_error",
    "new_warning",
    "new_fatal",
    "get_errors",
    "EXIT_CODES",
]
