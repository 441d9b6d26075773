"""
Cubic momentum lattice, lattice distributions and the pair correlation φ.

Nodes are integer vectors k ∈ {−h..h}³ (h = (M−1)/2) with momentum p = Δp·k
and energy ε(p) = |p|². Flat node indices follow C order of (k_x, k_y, k_z).
Quadruples (A, B, C, D) with D = A + B − C are kept only when D lies on the
lattice (truncating addition).
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from uukin.collision.operator import q_factor
from uukin.core.initial import ThetaProfile
from uukin.errors import CODE_CAPACITY, new_fatal

logger = logging.getLogger(__name__)

DEFAULT_BUDGET = 256 * 1024 ** 2
# dense φ (complex128) plus quadruple tables and work arrays, per n³ entry
BYTES_PER_ENTRY = 41


class KernelMode(int, Enum):
    MODE_FULL_MEMORY = 0
    MODE_BROADENED_DELTA = 1
    MODE_MARKOVIAN = 2

    @classmethod
    def from_name(cls, name: str) -> "KernelMode":
        try:
            return cls["MODE_" + name.upper().replace("-", "_")]
        except KeyError:
            raise new_fatal(f"unknown kernel mode '{name}'", {"mode": name}) from None

    def check_eps(self, eps: Optional[float]):
        if self != KernelMode.MODE_MARKOVIAN and not (eps is not None and eps > 0):
            raise new_fatal(f"{self.name} needs eps > 0", {"eps": eps})


@dataclass(frozen=True)
class Lattice3:
    side: int
    spacing: float = 1.0

    def __post_init__(self):
        if self.side < 1 or self.side % 2 == 0:
            raise new_fatal("lattice side M must be odd and positive", {"M": self.side})
        if not self.spacing > 0:
            raise new_fatal("lattice spacing must be positive", {"dp": self.spacing})

    @property
    def half(self) -> int:
        return (self.side - 1) // 2

    @property
    def size(self) -> int:
        return self.side ** 3

    @property
    def indices(self) -> np.ndarray:
        """(n, 3) integer vectors in flat order."""
        return _indices(self.side)

    @property
    def momenta(self) -> np.ndarray:
        return self.spacing * self.indices

    @property
    def energy_index(self) -> np.ndarray:
        """|k|², so that ε = Δp² |k|²."""
        k = self.indices
        return np.einsum("ij,ij->i", k, k)

    @property
    def energies(self) -> np.ndarray:
        return self.spacing ** 2 * self.energy_index

    @property
    def energy_quantum(self) -> float:
        return self.spacing ** 2

    def flat(self, vector: Sequence[int]) -> Optional[int]:
        """Flat index of an integer vector, None off the lattice."""
        k = np.asarray(vector, dtype=np.int64)
        if np.any(np.abs(k) > self.half):
            return None
        return int(np.ravel_multi_index(tuple(k + self.half), (self.side,) * 3))

    def memory_estimate(self) -> int:
        return self.size ** 3 * BYTES_PER_ENTRY

    def check_capacity(self, budget: int = DEFAULT_BUDGET):
        need = self.memory_estimate()
        if need > budget:
            raise new_fatal(
                f"lattice M={self.side} needs ~{need / 1024 ** 2:.1f} MiB, budget is {budget / 1024 ** 2:.1f} MiB",
                {"M": self.side, "bytes": need, "budget": budget},
                code=CODE_CAPACITY,
            )

    def quads(self, budget: int = DEFAULT_BUDGET) -> "QuadTable":
        self.check_capacity(budget)
        return _quads(self.side)


@lru_cache(maxsize=8)
def _indices(side: int) -> np.ndarray:
    h = (side - 1) // 2
    axis = np.arange(-h, h + 1)
    grid = np.stack(np.meshgrid(axis, axis, axis, indexing="ij"), axis=-1).reshape(-1, 3)
    grid.setflags(write=False)
    return grid


@dataclass(frozen=True, eq=False)
class QuadTable:
    """On-lattice quadruples; ``flat`` indexes the dense (n, n, n) φ array."""
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray
    delta_index: np.ndarray  # |A|² + |B|² − |C|² − |D|²
    flat: np.ndarray
    swap: np.ndarray  # position of (C, D, A, B) in this table

    def __len__(self) -> int:
        return int(self.a.size)


@lru_cache(maxsize=4)
def _quads(side: int) -> QuadTable:
    n = side ** 3
    h = (side - 1) // 2
    k = _indices(side)
    e = np.einsum("ij,ij->i", k, k)

    a, b, c = np.meshgrid(np.arange(n), np.arange(n), np.arange(n), indexing="ij")
    a, b, c = a.ravel(), b.ravel(), c.ravel()
    dvec = k[a] + k[b] - k[c]
    ok = np.all(np.abs(dvec) <= h, axis=1)
    a, b, c, dvec = a[ok], b[ok], c[ok], dvec[ok]
    d = np.ravel_multi_index(tuple((dvec + h).T), (side,) * 3)
    flat = (a * n + b) * n + c

    position = np.full(n ** 3, -1, dtype=np.int64)
    position[flat] = np.arange(flat.size)
    swap = position[(c * n + d) * n + a]

    table = QuadTable(
        a=a, b=b, c=c, d=d,
        delta_index=(e[a] + e[b] - e[c] - e[d]).astype(np.int64),
        flat=flat,
        swap=swap,
    )
    logger.debug("lattice M=%d: %d quadruples", side, len(table))
    return table


@dataclass(frozen=True, eq=False)
class DistributionLattice:
    lattice: Lattice3
    values: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64, copy=True).reshape(-1)
        if values.size != self.lattice.size:
            raise new_fatal("lattice distribution size mismatch",
                            {"values": int(values.size), "nodes": self.lattice.size})
        if not np.all(np.isfinite(values)):
            raise new_fatal("lattice distribution must be finite")
        if np.any(values < 0.0):
            raise new_fatal("lattice distribution must be nonnegative",
                            {"min": float(values.min())})
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_function(cls, lattice: Lattice3, fn, time: float = 0.0) -> "DistributionLattice":
        """Sample an isotropic f(ε) at the lattice energies."""
        return cls(lattice, fn(lattice.energies), time)

    def number(self) -> float:
        return float(self.lattice.spacing ** 3 * self.values.sum())

    def energy(self) -> float:
        return float(self.lattice.spacing ** 3 * np.dot(self.lattice.energies, self.values))


def initial_bose_lattice(z: float, theta_profile: ThetaProfile, lattice: Lattice3) -> DistributionLattice:
    """f₀ = zΘ/(1 − zΘ) at the lattice energies; zΘ >= 1 anywhere is condensed data."""
    ztheta = z * theta_profile(lattice.energies)
    peak = float(ztheta.max())
    if peak >= 1.0:
        raise new_fatal("condensed initial data: z*Theta >= 1", {"z": z, "z_theta": peak})
    return DistributionLattice(lattice, ztheta / (1.0 - ztheta))


def quad_q(values: np.ndarray, quads: QuadTable, c: float) -> np.ndarray:
    """q at every quadruple of the table."""
    return q_factor(values[quads.a], values[quads.b], values[quads.c], values[quads.d], c)


def w_factor(f: DistributionLattice, quadruple, c: float = 1.0) -> float:
    """
    2 q[f] when ξ₁ + ξ₂ = η₁ + η₂ exactly on the index lattice, else 0.

    ``quadruple`` holds four integer vectors (ξ₁, ξ₂, η₁, η₂).
    """
    x1, x2, y1, y2 = (np.asarray(v, dtype=np.int64) for v in quadruple)
    if not np.array_equal(x1 + x2, y1 + y2):
        return 0.0
    nodes = [f.lattice.flat(v) for v in (x1, x2, y1, y2)]
    if any(i is None for i in nodes):
        return 0.0
    v = f.values
    return float(2.0 * q_factor(v[nodes[0]], v[nodes[1]], v[nodes[2]], v[nodes[3]], c))


@dataclass(eq=False)
class PairCorrelation:
    """
    φ(ξ₁, ξ₂; η₁) on the lattice, η₂ = ξ₁ + ξ₂ − η₁ implied.

    Stored densely as an (n, n, n) complex array; entries whose η₂ leaves
    the lattice stay zero.
    """
    lattice: Lattice3
    data: np.ndarray
    time: float = 0.0
    eps: float = 1.0
    meta: dict = field(default_factory=dict)

    @classmethod
    def zeros(cls, lattice: Lattice3, eps: float, budget: int = DEFAULT_BUDGET) -> "PairCorrelation":
        lattice.check_capacity(budget)
        n = lattice.size
        return cls(lattice, np.zeros((n, n, n), dtype=np.complex128), 0.0, eps)

    def on_quads(self, quads: QuadTable) -> np.ndarray:
        return self.data.reshape(-1)[quads.flat]

    def set_quads(self, quads: QuadTable, values: np.ndarray):
        self.data.reshape(-1)[quads.flat] = values

    def at(self, quadruple) -> complex:
        x1, x2, y1, y2 = (np.asarray(v, dtype=np.int64) for v in quadruple)
        if not np.array_equal(x1 + x2, y1 + y2):
            return 0j
        idx = [self.lattice.flat(v) for v in (x1, x2, y1)]
        if any(i is None for i in idx) or self.lattice.flat(y2) is None:
            return 0j
        return complex(self.data[idx[0], idx[1], idx[2]])

    def invariant_errors(self, quads: QuadTable) -> dict:
        """Largest violations of the exchange and conjugation symmetries."""
        n = self.lattice.size
        flat = self.data.reshape(-1)
        phi = flat[quads.flat]
        swap_xi = flat[(quads.b * n + quads.a) * n + quads.c]
        swap_eta = flat[(quads.a * n + quads.b) * n + quads.d]
        conj = np.conj(phi[quads.swap])
        scale = max(float(np.abs(phi).max(initial=0.0)), 1e-300)
        return {
            "exchange_xi": float(np.abs(phi - swap_xi).max(initial=0.0)) / scale,
            "exchange_eta": float(np.abs(phi - swap_eta).max(initial=0.0)) / scale,
            "conjugation": float(np.abs(phi - conj).max(initial=0.0)) / scale,
        }
