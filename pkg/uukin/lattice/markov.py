"""
Markovian-limit study: memory solution against the lattice delta limit.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from uukin.errors import ErrorList, new_fatal, new_warning
from uukin.lattice.hierarchy import solve_markovian, solve_memory
from uukin.lattice.lattice import DEFAULT_BUDGET, DistributionLattice, Lattice3

logger = logging.getLogger(__name__)


def kernel_parameter(lattice: Lattice3, t: float, eps: float) -> float:
    """
    a = Δp² t / ε².

    For 0 < a < 2π the lattice sum of K(Δε, t) over Δε ∈ Δp²ℤ is exactly
    π/Δp²; at a = π the kernel is that mass on Δε = 0 alone. Past 2π the
    on-shell term grows secularly and the lattice no longer has a delta limit.
    """
    return lattice.energy_quantum * t / eps ** 2


@dataclass(frozen=True)
class MarkovLimitRow:
    eps: float
    distance: float
    relative_distance: float
    kernel_parameter: float
    blowup: bool

    def to_dict(self) -> dict:
        return {
            "eps": self.eps,
            "distance": self.distance,
            "relative_distance": self.relative_distance,
            "kernel_parameter": self.kernel_parameter,
            "blowup": self.blowup,
        }


@dataclass
class MarkovLimitTable:
    t_end: float
    rows: List[MarkovLimitRow] = field(default_factory=list)
    warnings: ErrorList = field(default_factory=list)

    @property
    def distances(self) -> np.ndarray:
        return np.array([r.distance for r in self.rows])

    @property
    def monotone(self) -> bool:
        return bool(np.all(np.diff(self.distances) < 0))


def markovian_limit_study(
    f0: DistributionLattice,
    eps_list: Sequence[float],
    t_end: float,
    c: float = 1.0,
    dt: Optional[float] = None,
    blowup_ratio: float = 1e3,
    budget: int = DEFAULT_BUDGET,
) -> MarkovLimitTable:
    """
    Sup-norm distance at ``t_end`` between the memory solution and the
    lattice-Markovian solution, for each ε (t_end is the same for all).

    The time step defaults to min(t_end/50, ε²/(2Δp²)) so the product rule
    resolves q between snapshots. A solution whose max f grows past
    ``blowup_ratio`` times its start value flags the row: the window must be
    shortened.
    """
    if not eps_list:
        raise new_fatal("eps_list is empty")
    lattice = f0.lattice
    table = MarkovLimitTable(t_end)
    fmax0 = max(float(f0.values.max()), 1e-300)

    for eps in eps_list:
        if not eps > 0:
            raise new_fatal("eps values must be positive", {"eps": eps})
        step = dt if dt is not None else min(t_end / 50.0, eps ** 2 / (2.0 * lattice.energy_quantum))
        memory = solve_memory(f0, eps, t_end, step, c, budget)
        markov = solve_markovian(f0, t_end, step, c=c, budget=budget)

        diff = np.abs(memory.final_values - markov.final_values)
        distance = float(diff.max())
        ref = float(np.abs(markov.final_values).max()) or 1.0
        a = kernel_parameter(lattice, t_end, eps)
        blowup = max(float(memory.final_values.max()), float(markov.final_values.max())) >= blowup_ratio * fmax0
        row = MarkovLimitRow(eps, distance, distance / ref, a, blowup)
        table.rows.append(row)
        table.warnings.extend(memory.warnings)
        if blowup:
            table.warnings.append(new_warning("blow-up inside the window; shorten t_end",
                                              {"eps": eps, "t_end": t_end}))
        if a > 2.0 * math.pi:
            table.warnings.append(new_warning(
                "lattice kernel parameter past 2π; memory solution has no delta limit on this lattice",
                {"eps": eps, "kernel_parameter": a},
            ))
        logger.info("markov limit eps=%g: distance %.4e (a=%.3g)", eps, distance, a)
    for w in table.warnings:
        logger.warning(str(w))
    return table
