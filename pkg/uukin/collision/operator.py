"""
Isotropic Uehling-Uhlenbeck collision operator.

For isotropic f the angular integrations of

    ∂f/∂t(p₁) = 4π ∫ dp₂dp₃dp₄ δ(ε₁+ε₂−ε₃−ε₄) δ(p₁+p₂−p₃−p₄) q

reduce to an integral over the energy plane

    ∂f/∂t(ε₁) = (4π³/√ε₁) ∫∫ min(√ε₁,√ε₂,√ε₃,√ε₄) q dε₂ dε₃,   ε₄ = ε₁+ε₂−ε₃ ≥ 0.

The discrete operator is written in weak form over node triples (i, j, k):
each collision event is credited to the four participating cells (ε₄ is
split linearly between its two bracketing nodes, with the same weights that
reconstruct f₄), so the discrete number and energy sums of the rate vanish
exactly. Events with ε₄ above the grid are discarded. Below the first node
the entropy rule extrapolates; the other rules, and the entropy rule where
its extrapolation is refused, assign ε₄ to node 0, which is the only source
of energy drift and is reported.
"""

import logging
from dataclasses import dataclass
from functools import partial
from typing import Optional, Tuple

import numpy as np

from uukin.core.distribution import DistributionIso
from uukin.core.grid import RadialGrid
from uukin.core.interpolation import InterpolationEnum, bracket, reconstruct
from uukin.core.workers import chunk_ranges, ordered_map
from uukin.errors import new_fatal

logger = logging.getLogger(__name__)

# 4π from the equation times π² from the angular reduction
KERNEL_CONSTANT = 4.0 * np.pi ** 3
ROW_CHUNK = 16


@dataclass(frozen=True)
class CollisionConfig:
    """
    Discretization options of the collision operator.

    Attributes:
        occupancy_c: stimulated-emission constant c = (d/2πλ)³
        quadrature_order: order of the energy-plane rule (dual-cell rule, order 2)
        interpolation: rule for occupations at off-grid ε₄
        symmetrize: conservative four-slot form (False gives the plain
            quadrature of the reduced integral at each node)
        classical: drop the quadratic stimulated terms, q = c²(f₃f₄ − f₁f₂)
        threads: worker override, else $UUKIN_THREADS
    """
    occupancy_c: float = 1.0
    quadrature_order: int = 2
    interpolation: InterpolationEnum = InterpolationEnum.INTERP_ENTROPY
    symmetrize: bool = True
    classical: bool = False
    threads: Optional[int] = None

    def __post_init__(self):
        if not self.occupancy_c > 0:
            raise new_fatal("occupancy_c must be positive", {"occupancy_c": self.occupancy_c})
        if self.quadrature_order < 2:
            raise new_fatal("quadrature order must be >= 2", {"quadrature_order": self.quadrature_order})
        if self.quadrature_order != 2:
            raise new_fatal("only the order-2 dual-cell rule is implemented",
                            {"quadrature_order": self.quadrature_order})


@dataclass(frozen=True)
class RateField:
    """df/dt on the grid plus the discrete conservation residuals."""
    grid: RadialGrid
    values: np.ndarray
    number_rate: float
    energy_rate: float
    energy_drift: float  # energy_rate / E, 0 when E = 0

    @property
    def max_abs(self) -> float:
        return float(np.abs(self.values).max())


def q_factor(f1, f2, f3, f4, c):
    """q = f₃f₄(c+f₁)(c+f₂) − f₁f₂(c+f₃)(c+f₄); broadcasts over arrays."""
    return f3 * f4 * (c + f1) * (c + f2) - f1 * f2 * (c + f3) * (c + f4)


def _q_classical(f1, f2, f3, f4, c):
    return c * c * (f3 * f4 - f1 * f2)


def _row_block(rows: Tuple[int, int], grid: RadialGrid, values: np.ndarray, cfg: CollisionConfig):
    """Number-rate contributions of all events whose first slot lies in ``rows``."""
    lo, hi = rows
    nodes = grid.nodes
    n = nodes.size
    c = cfg.occupancy_c
    qfn = _q_classical if cfg.classical else q_factor

    e1 = nodes[lo:hi, None, None]
    e2 = nodes[None, :, None]
    e3 = nodes[None, None, :]
    e4 = e1 + e2 - e3
    valid = (e4 >= 0.0) & (e4 <= nodes[-1])
    e4 = np.where(valid, e4, 0.0)

    a, theta = bracket(nodes, e4)
    f1 = values[lo:hi, None, None]
    f2 = values[None, :, None]
    f3 = values[None, None, :]
    f4, theta = reconstruct(values, a, theta, cfg.interpolation, c)
    q = qfn(f1, f2, f3, f4, c)

    w = np.sqrt(np.minimum(np.minimum(e1, e2), np.minimum(e3, e4)))
    dv = grid.widths
    measure = dv[None, :, None] * dv[None, None, :]

    if not cfg.symmetrize:
        # plain quadrature of the reduced integral at each node of the block
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(e1 > 0.0, w / np.sqrt(e1), 1.0)
        plain = np.where(valid, ratio * q * measure, 0.0).sum(axis=(1, 2))
        out = np.zeros(n)
        out[lo:hi] = KERNEL_CONSTANT * plain
        return out

    events = np.where(valid, dv[lo:hi, None, None] * measure * w * q, 0.0)
    dn = np.zeros(n)
    dn[lo:hi] += events.sum(axis=(1, 2))
    dn += events.sum(axis=(0, 2))
    dn -= events.sum(axis=(0, 1))
    flat = events.ravel()
    dn -= np.bincount(a.ravel(), weights=flat * (1.0 - theta.ravel()), minlength=n)
    dn -= np.bincount(a.ravel() + 1, weights=flat * theta.ravel(), minlength=n)
    return dn


def collision_rate(values: np.ndarray, grid: RadialGrid, cfg: CollisionConfig) -> RateField:
    """Rate for a raw occupation array; ``values`` must be nonnegative."""
    values = np.asarray(values, dtype=np.float64)
    if np.any(values < 0.0):
        idx = int(np.argmin(values))
        raise new_fatal(
            "collision operator needs nonnegative f; clip or reject first",
            {"node": idx, "value": float(values[idx])},
        )

    blocks = ordered_map(
        partial(_row_block, grid=grid, values=values, cfg=cfg),
        chunk_ranges(grid.size, ROW_CHUNK),
        cfg.threads,
    )
    acc = np.zeros(grid.size)
    for block in blocks:
        acc += block

    if cfg.symmetrize:
        # slot weight 1/4 and the 2π of the number measure
        dn = 2.0 * np.pi * (KERNEL_CONSTANT / 4.0) * acc
        rate = dn / (2.0 * np.pi * grid.measure)
    else:
        rate = acc

    number_rate = grid.number(rate)
    energy_rate = grid.energy(rate)
    energy = grid.energy(values)
    drift = energy_rate / energy if energy > 0.0 else 0.0
    logger.debug("collision rate: max|df|=%.3e dN=%.3e dE/E=%.3e",
                 np.abs(rate).max(), number_rate, drift)
    return RateField(grid, rate, number_rate, energy_rate, drift)


def collision_rhs_iso(f: DistributionIso, cfg: Optional[CollisionConfig] = None) -> RateField:
    """df/dt of the isotropic UU equation on the grid of ``f``."""
    return collision_rate(f.values, f.grid, cfg or CollisionConfig())
