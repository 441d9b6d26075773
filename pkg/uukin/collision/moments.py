"""
Kinetic moments, entropy, Bose-Einstein equilibria and critical-mass helpers.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize, special

from uukin.core.distribution import DistributionIso
from uukin.core.grid import RadialGrid
from uukin.errors import new_fatal

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MomentReport:
    number: float
    energy: float
    entropy: float

    def to_dict(self) -> dict:
        return {"number": self.number, "energy": self.energy, "entropy": self.entropy}


@dataclass(frozen=True)
class EquilibriumFit:
    theta: float
    mu: float
    residual: float  # weighted RMS of f − f_eq


def entropy_density(values, c: float = 1.0) -> np.ndarray:
    """(c+f)ln(c+f) − f ln f − c ln c"""
    values = np.asarray(values, dtype=np.float64)
    return special.xlogy(c + values, c + values) - special.xlogy(values, values) - c * math.log(c)


def moments(f: DistributionIso, c: float = 1.0) -> MomentReport:
    grid = f.grid
    return MomentReport(
        number=grid.number(f.values),
        energy=grid.energy(f.values),
        entropy=grid.number(entropy_density(f.values, c)),
    )


def entropy_production(f: DistributionIso, rate, c: float = 1.0) -> float:
    """
    ds/dt = 2π Σ μ_i ln((c+f_i)/f_i) (df/dt)_i.

    Nodes with f = 0 are left out (the pairing is singular there).
    """
    rate = np.asarray(getattr(rate, "values", rate), dtype=np.float64)
    values = f.values
    occupied = values > 0.0
    weight = np.zeros_like(values)
    weight[occupied] = np.log((c + values[occupied]) / values[occupied])
    return f.grid.number(weight * rate)


def equilibrium(theta: float, mu: float, c: float, grid: RadialGrid) -> DistributionIso:
    """f(ε) = c/(e^{(ε−μ)/θ} − 1)"""
    if not theta > 0:
        raise new_fatal("theta must be positive", {"theta": theta})
    if not mu < 0:
        raise new_fatal("mu must be negative (non-normalizable otherwise)", {"mu": mu})
    if not c > 0:
        raise new_fatal("occupancy c must be positive", {"c": c})
    return DistributionIso(grid, c / np.expm1((grid.nodes - mu) / theta))


def fit_equilibrium(f: DistributionIso, c: float = 1.0) -> EquilibriumFit:
    """Least-squares (θ, μ) with the number-measure weights of the grid."""
    grid = f.grid
    sw = np.sqrt(grid.measure)
    target = f.values

    def residual(x):
        theta, mu = math.exp(x[0]), -math.exp(x[1])
        return sw * (c / np.expm1((grid.nodes - mu) / theta) - target)

    # start from the classical tail: f ≈ c e^{(μ−ε)/θ}
    m = moments(f, c)
    theta0 = max(m.energy / max(m.number, 1e-300) / 1.5, 1e-3)
    sol = optimize.least_squares(residual, x0=[math.log(theta0), 0.0], method="lm")
    theta, mu = math.exp(sol.x[0]), -math.exp(sol.x[1])
    rms = float(np.sqrt(np.sum(sol.fun ** 2) / max(np.sum(grid.measure), 1e-300)))
    logger.debug("equilibrium fit theta=%.6g mu=%.6g rms=%.3e", theta, mu, rms)
    return EquilibriumFit(theta, mu, rms)


def critical_number(theta: float, c: float = 1.0) -> float:
    """Particle number of the μ → 0⁻ equilibrium: 2πc θ^{3/2} Γ(3/2) ζ(3/2)."""
    if not theta > 0:
        raise new_fatal("theta must be positive", {"theta": theta})
    return 2.0 * math.pi * c * theta ** 1.5 * special.gamma(1.5) * special.zeta(1.5)


def critical_energy(theta: float, c: float = 1.0) -> float:
    return 2.0 * math.pi * c * theta ** 2.5 * special.gamma(2.5) * special.zeta(2.5)


def is_supercritical(f: DistributionIso, c: float = 1.0) -> bool:
    """
    True when N exceeds the critical number at the temperature whose
    critical equilibrium carries the same energy as ``f``.
    """
    m = moments(f, c)
    if m.energy <= 0.0:
        return m.number > 0.0
    theta = (m.energy / critical_energy(1.0, c)) ** 0.4
    return m.number > critical_number(theta, c)
