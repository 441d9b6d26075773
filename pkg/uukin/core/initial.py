"""
Bose-like initial data f₀ = zΘ(u)/(1 − zΘ(u)), u = ε/scale.
"""

import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np

from uukin.errors import new_fatal

from .distribution import DistributionIso
from .grid import RadialGrid

logger = logging.getLogger(__name__)


class ThetaEnum(int, Enum):
    THETA_EXP = 0        # Θ(u) = e^{-u}
    THETA_EXP_POLY = 1   # Θ(u) = e^{-u}(1 + A u)

    @classmethod
    def from_name(cls, name: str) -> "ThetaEnum":
        try:
            return cls["THETA_" + name.upper()]
        except KeyError:
            raise new_fatal(f"unknown theta profile '{name}'", {"theta": name}) from None


@dataclass(frozen=True)
class ThetaProfile:
    """Energy profile Θ of the macrocanonical initial state."""
    kind: ThetaEnum = ThetaEnum.THETA_EXP
    poly_a: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        if not self.scale > 0:
            raise new_fatal("theta scale must be positive", {"scale": self.scale})
        # e^{-u}(1+Au) must stay nonnegative on u >= 0
        if self.kind == ThetaEnum.THETA_EXP_POLY and self.poly_a < 0:
            raise new_fatal("theta poly_a must be nonnegative", {"poly_a": self.poly_a})

    @classmethod
    def from_name(cls, name: str, poly_a: float = 0.0, scale: float = 1.0) -> "ThetaProfile":
        return cls(ThetaEnum.from_name(name), poly_a, scale)

    @property
    def monotone(self) -> bool:
        # e^{-u}(1+Au) increases on [0, 1 - 1/A) when A > 1
        return self.kind == ThetaEnum.THETA_EXP or self.poly_a <= 1.0

    def __call__(self, eps) -> np.ndarray:
        u = np.asarray(eps, dtype=np.float64) / self.scale
        theta = np.exp(-u)
        if self.kind == ThetaEnum.THETA_EXP_POLY:
            theta = theta * (1.0 + self.poly_a * u)
        return theta


def initial_bose(z: float, theta_profile: ThetaProfile, grid: RadialGrid) -> DistributionIso:
    """
    Sample f₀ = zΘ/(1 − zΘ) on the grid.

    Raises a DomainError ("condensed initial data") when zΘ >= 1 at some node.
    """
    if not (z >= 0.0 and np.isfinite(z)):
        raise new_fatal("fugacity z must be nonnegative", {"z": z})

    ztheta = z * theta_profile(grid.nodes)
    peak = float(ztheta.max())
    if peak >= 1.0:
        node = int(np.argmax(ztheta))
        raise new_fatal(
            "condensed initial data: z*Theta >= 1",
            {"z": z, "node": node, "eps": float(grid.nodes[node]), "z_theta": peak},
        )

    values = ztheta / (1.0 - ztheta)
    logger.debug("initial_bose z=%g theta=%s max f0=%g", z, theta_profile.kind.name, values.max())
    return DistributionIso(grid, values)
