"""
Momentum-lattice formulation with pair correlations and memory.
"""

from .lattice import (
    Lattice3,
    DistributionLattice,
    PairCorrelation,
    QuadTable,
    KernelMode,
    initial_bose_lattice,
    quad_q,
    w_factor,
    DEFAULT_BUDGET,
)
from .kernel import broadened_kernel, kernel_mass, weak_convergence_check, WeakConvergenceTable, KernelPairing
from .hierarchy import (
    LatticeHistory,
    LatticeRun,
    CoupledRate,
    rhs_coupled,
    rhs_memory,
    rhs_markovian,
    rhs_broadened,
    phi_closed_form,
    phi_from_history,
    integrate_rk4,
    solve_coupled,
    solve_memory,
    solve_markovian,
    solve_lattice,
)
from .markov import markovian_limit_study, kernel_parameter, MarkovLimitTable, MarkovLimitRow
from .checkpoint import write_checkpoint, read_checkpoint, CHECKPOINT_VERSION

__all__ = [
    'Lattice3',
    'DistributionLattice',
    'PairCorrelation',
    'QuadTable',
    'KernelMode',
    'initial_bose_lattice',
    'quad_q',
    'w_factor',
    'DEFAULT_BUDGET',
    'broadened_kernel',
    'kernel_mass',
    'weak_convergence_check',
    'WeakConvergenceTable',
    'KernelPairing',
    'LatticeHistory',
    'LatticeRun',
    'CoupledRate',
    'rhs_coupled',
    'rhs_memory',
    'rhs_markovian',
    'rhs_broadened',
    'phi_closed_form',
    'phi_from_history',
    'integrate_rk4',
    'solve_coupled',
    'solve_memory',
    'solve_markovian',
    'solve_lattice',
    'markovian_limit_study',
    'kernel_parameter',
    'MarkovLimitTable',
    'MarkovLimitRow',
    'write_checkpoint',
    'read_checkpoint',
    'CHECKPOINT_VERSION',
]
