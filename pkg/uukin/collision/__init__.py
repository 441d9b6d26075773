"""
Uehling-Uhlenbeck collision operator, Monte-Carlo oracle and moments.
"""

from .operator import (
    CollisionConfig,
    InterpolationEnum,
    RateField,
    KERNEL_CONSTANT,
    q_factor,
    collision_rate,
    collision_rhs_iso,
)
from .montecarlo import MonteCarloEstimate, collision_mc
from .moments import (
    MomentReport,
    EquilibriumFit,
    entropy_density,
    moments,
    entropy_production,
    equilibrium,
    fit_equilibrium,
    critical_number,
    critical_energy,
    is_supercritical,
)

__all__ = [
    'CollisionConfig',
    'InterpolationEnum',
    'RateField',
    'KERNEL_CONSTANT',
    'q_factor',
    'collision_rate',
    'collision_rhs_iso',
    'MonteCarloEstimate',
    'collision_mc',
    'MomentReport',
    'EquilibriumFit',
    'entropy_density',
    'moments',
    'entropy_production',
    'equilibrium',
    'fit_equilibrium',
    'critical_number',
    'critical_energy',
    'is_supercritical',
]
