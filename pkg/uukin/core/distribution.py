"""Isotropic one-particle distribution on a radial grid."""

from dataclasses import dataclass

import numpy as np

from uukin.errors import new_fatal

from .grid import RadialGrid
from .interpolation import InterpolationEnum, bracket, reconstruct


@dataclass(frozen=True, eq=False)
class DistributionIso:
    """
    Occupations f_i >= 0 at the nodes of ``grid``.

    Values are copied and frozen on construction; every operation that
    changes f returns a new instance.
    """
    grid: RadialGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64, copy=True)
        if values.shape != self.grid.nodes.shape:
            raise new_fatal(
                "distribution shape does not match grid",
                {"values": list(values.shape), "grid": list(self.grid.nodes.shape)},
            )
        if not np.all(np.isfinite(values)):
            raise new_fatal("distribution values must be finite")
        if np.any(values < 0.0):
            idx = int(np.argmin(values))
            raise new_fatal(
                "distribution values must be nonnegative",
                {"node": idx, "eps": float(self.grid.nodes[idx]), "value": float(values[idx])},
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def zeros(cls, grid: RadialGrid) -> "DistributionIso":
        return cls(grid, np.zeros(grid.size))

    @property
    def max(self) -> float:
        return float(self.values.max())

    def interpolate(
        self,
        eps,
        c: float = 1.0,
        rule: InterpolationEnum = InterpolationEnum.INTERP_ENTROPY,
    ) -> np.ndarray:
        """Occupations at arbitrary ε by ``rule`` (see reconstruct), 0 beyond ε_max."""
        eps = np.asarray(eps, dtype=np.float64)
        nodes = self.grid.nodes
        a, theta = bracket(nodes, eps)
        f, _ = reconstruct(self.values, a, theta, rule, c)
        return np.where(eps > nodes[-1], 0.0, f)

    def with_values(self, values: np.ndarray) -> "DistributionIso":
        return DistributionIso(self.grid, values)

    def scaled(self, factor: float) -> "DistributionIso":
        return DistributionIso(self.grid, factor * self.values)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DistributionIso):
            return NotImplemented
        return self.grid == other.grid and np.array_equal(self.values, other.values)
