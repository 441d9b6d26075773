"""
Radial energy grids (ε = p²) with dual-cell quadrature weights.

Each node ε_i owns the cell [e_i, e_{i+1}] with e_0 = 0,
e_i = (ε_{i-1} + ε_i)/2 and e_N = ε_max. Moments are sums over cells:

    ∫ g(ε) √ε dε  ≈  Σ_i g(ε_i) μ_i,   μ_i = ∫_cell √ε dε
"""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from uukin.errors import new_fatal

DEFAULT_NODES = 256
DEFAULT_EPS_MIN = 1e-4
DEFAULT_EPS_MAX = 1e2


class SpacingEnum(int, Enum):
    SPACING_UNIFORM = 0
    SPACING_GEOMETRIC = 1

    @classmethod
    def from_name(cls, name: str) -> "SpacingEnum":
        try:
            return cls["SPACING_" + name.upper()]
        except KeyError:
            raise new_fatal(f"unknown grid spacing '{name}'", {"spacing": name}) from None


@dataclass(frozen=True, eq=False)
class RadialGrid:
    """
    Strictly increasing energy nodes on [ε_0, ε_max].

    Build with ``RadialGrid.geometric`` / ``RadialGrid.uniform`` or pass
    explicit nodes.
    """
    nodes: np.ndarray
    spacing: SpacingEnum = SpacingEnum.SPACING_GEOMETRIC
    edges: np.ndarray = field(init=False, repr=False)
    widths: np.ndarray = field(init=False, repr=False)
    measure: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=np.float64)
        if nodes.ndim != 1 or nodes.size < 2:
            raise new_fatal("grid needs at least 2 nodes", {"n": int(nodes.size)})
        if not np.all(np.isfinite(nodes)):
            raise new_fatal("grid nodes must be finite")
        if nodes[0] < 0.0:
            raise new_fatal("grid nodes must be nonnegative", {"eps_0": float(nodes[0])})
        if np.any(np.diff(nodes) <= 0.0):
            raise new_fatal("grid nodes must be strictly increasing")

        edges = np.empty(nodes.size + 1)
        edges[0] = 0.0
        edges[1:-1] = 0.5 * (nodes[:-1] + nodes[1:])
        edges[-1] = nodes[-1]
        nodes.setflags(write=False)
        edges.setflags(write=False)
        widths = np.diff(edges)
        measure = (2.0 / 3.0) * np.diff(edges ** 1.5)
        widths.setflags(write=False)
        measure.setflags(write=False)

        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "widths", widths)
        object.__setattr__(self, "measure", measure)

    @classmethod
    def geometric(cls, n: int = DEFAULT_NODES, eps_min: float = DEFAULT_EPS_MIN,
                  eps_max: float = DEFAULT_EPS_MAX) -> "RadialGrid":
        if n < 2:
            raise new_fatal("grid.n must be >= 2", {"n": n})
        if not 0.0 < eps_min < eps_max:
            raise new_fatal("geometric grid needs 0 < eps_min < eps_max",
                            {"eps_min": eps_min, "eps_max": eps_max})
        return cls(np.geomspace(eps_min, eps_max, n), SpacingEnum.SPACING_GEOMETRIC)

    @classmethod
    def uniform(cls, n: int = DEFAULT_NODES, eps_min: float = 0.0,
                eps_max: float = DEFAULT_EPS_MAX) -> "RadialGrid":
        if n < 2:
            raise new_fatal("grid.n must be >= 2", {"n": n})
        if not 0.0 <= eps_min < eps_max:
            raise new_fatal("uniform grid needs 0 <= eps_min < eps_max",
                            {"eps_min": eps_min, "eps_max": eps_max})
        return cls(np.linspace(eps_min, eps_max, n), SpacingEnum.SPACING_UNIFORM)

    @classmethod
    def build(cls, spacing: str, n: int, eps_min: float, eps_max: float) -> "RadialGrid":
        kind = SpacingEnum.from_name(spacing)
        if kind == SpacingEnum.SPACING_UNIFORM:
            return cls.uniform(n, eps_min, eps_max)
        return cls.geometric(n, eps_min, eps_max)

    @property
    def size(self) -> int:
        return int(self.nodes.size)

    @property
    def eps_max(self) -> float:
        return float(self.nodes[-1])

    @property
    def momenta(self) -> np.ndarray:
        return np.sqrt(self.nodes)

    def number(self, values: np.ndarray) -> float:
        """2π ∫ g √ε dε"""
        return float(2.0 * np.pi * np.dot(self.measure, values))

    def energy(self, values: np.ndarray) -> float:
        """2π ∫ g ε^{3/2} dε"""
        return float(2.0 * np.pi * np.dot(self.measure * self.nodes, values))

    def __len__(self) -> int:
        return self.size

    def __eq__(self, other) -> bool:
        if not isinstance(other, RadialGrid):
            return NotImplemented
        return self.spacing == other.spacing and np.array_equal(self.nodes, other.nodes)

    def __hash__(self) -> int:
        return hash((int(self.spacing), self.nodes.tobytes()))
