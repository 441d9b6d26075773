"""
Lattice solvers for the one-particle distribution with pair correlations.

Three formulations are provided on a Lattice3:

* coupled: f and φ advanced together, φ by an exponential step that treats
  the phase e^{−iΔε t/ε²} exactly;
* memory: f advanced by the time-nonlocal operator, φ never stored, the
  history integral recomputed from stored snapshots of f;
* Markovian-in-q: the broadened-delta kernel K(Δε, t) or its lattice delta
  limit, advanced with classical RK4.

Coupled and memory solvers share the product-integration rule (q linear in
time over a step, the exponential integrated exactly). On matched time grids
they therefore differ by round-off only.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from uukin.core.workers import chunk_ranges, ordered_map
from uukin.errors import (
    CODE_NUMERICAL,
    CODE_RESOLUTION,
    ErrorList,
    new_fatal,
    new_warning,
)
from uukin.lattice.kernel import broadened_kernel
from uukin.lattice.lattice import (
    DEFAULT_BUDGET,
    DistributionLattice,
    KernelMode,
    Lattice3,
    PairCorrelation,
    QuadTable,
    quad_q,
)

logger = logging.getLogger(__name__)

QUAD_CHUNK = 1 << 16
SERIES_CUTOFF = 1e-2
_SERIES_TERMS = 8


def _product_weights(z: np.ndarray, h: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    E = e^{−zh}, I0 = ∫₀ʰ e^{−zu} du and L = (1/h)∫₀ʰ u e^{−zu} du.

    Over a step, ∫ e^{−z(t₁−s)} q(s) ds = q₀ L + q₁ (I0 − L) for q linear
    between q₀ and q₁. Small |zh| uses the Taylor series.
    """
    z = np.asarray(z, dtype=np.complex128)
    x = z * h
    E = np.exp(-x)
    with np.errstate(divide="ignore", invalid="ignore"):
        I0 = (1.0 - E) / z
        L = (1.0 - E * (1.0 + x)) / (z * z * h)
    small = np.abs(x) < SERIES_CUTOFF
    if np.any(small):
        xs = x[small]
        term = np.ones_like(xs)
        i0 = np.zeros_like(xs)
        lin = np.zeros_like(xs)
        for n in range(_SERIES_TERMS):
            i0 += term / math.factorial(n + 1)
            lin += term / (math.factorial(n) * (n + 2))
            term = term * -xs
        I0[small] = h * i0
        L[small] = h * lin
    return E, I0, L


@dataclass(frozen=True, eq=False)
class _QuadSlice:
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray
    delta_index: np.ndarray

    @classmethod
    def of(cls, quads: QuadTable, selector) -> "_QuadSlice":
        return cls(quads.a[selector], quads.b[selector], quads.c[selector],
                   quads.d[selector], quads.delta_index[selector])


def _deposit(quads, weights: np.ndarray, n: int) -> np.ndarray:
    """Σ over quadruples of w·(δ_A + δ_B − δ_C − δ_D), the relabeling-symmetric sum."""
    return (np.bincount(quads.a, weights, n) + np.bincount(quads.b, weights, n)
            - np.bincount(quads.c, weights, n) - np.bincount(quads.d, weights, n))


@dataclass
class LatticeHistory:
    """Accepted f snapshots on a lattice, in strictly increasing time."""
    lattice: Lattice3
    times: List[float] = field(default_factory=list)
    values: List[np.ndarray] = field(default_factory=list)

    @classmethod
    def from_distributions(cls, snapshots: Sequence[DistributionLattice]) -> "LatticeHistory":
        if not snapshots:
            raise new_fatal("history needs at least one snapshot")
        history = cls(snapshots[0].lattice)
        for f in snapshots:
            history.append(f.time, f.values)
        return history

    def append(self, t: float, values: np.ndarray):
        if self.times and not t > self.times[-1]:
            raise new_fatal("history times must be strictly increasing",
                            {"t": t, "last": self.times[-1]}, code=CODE_NUMERICAL)
        v = np.asarray(values, dtype=np.float64).reshape(-1)
        if v.size != self.lattice.size:
            raise new_fatal("history snapshot size mismatch",
                            {"values": int(v.size), "nodes": self.lattice.size})
        self.times.append(float(t))
        self.values.append(v.copy())

    def __len__(self) -> int:
        return len(self.times)

    def knots(self, t: float, ds_max: Optional[float] = None) -> List[Tuple[float, Callable]]:
        """
        Quadrature knots on [t₀, t] as (time, values-source) pairs.

        A time between two snapshots ends with a knot whose q is linearly
        interpolated, which is the rule's own assumption inside a step.
        """
        if not self.times:
            raise new_fatal("empty history", code=CODE_RESOLUTION)
        tol = 1e-12 * max(1.0, abs(t))
        if t < self.times[0] - tol or t > self.times[-1] + tol:
            raise new_fatal(
                "history does not cover the requested time",
                {"t": t, "first": self.times[0], "last": self.times[-1]},
                code=CODE_RESOLUTION,
            )
        times = np.asarray(self.times)
        m = int(np.searchsorted(times, t + tol, side="right")) - 1
        knots = [(self.times[k], k) for k in range(m + 1)]
        if t - self.times[m] > tol:
            theta = (t - self.times[m]) / (self.times[m + 1] - self.times[m])
            knots.append((t, (m, theta)))
        if ds_max is not None and len(knots) > 1:
            gaps = np.diff([k[0] for k in knots])
            if gaps.max() > ds_max * (1.0 + 1e-12):
                raise new_fatal(
                    "history gap larger than the allowed step",
                    {"gap": float(gaps.max()), "ds_max": ds_max},
                    code=CODE_RESOLUTION,
                )
        return knots

    def q_at(self, source, quads, c: float) -> np.ndarray:
        if isinstance(source, tuple):
            k, theta = source
            q0 = quad_q(self.values[k], quads, c)
            q1 = quad_q(self.values[k + 1], quads, c)
            return q0 + theta * (q1 - q0)
        return quad_q(self.values[source], quads, c)


def _history_integral(history: LatticeHistory, t: float, eps: float, c: float,
                      quads, ds_max: Optional[float] = None) -> np.ndarray:
    """S = ∫₀ᵗ e^{−iΔε(t−s)/ε²} q(s) ds at every quadruple of ``quads``."""
    knots = history.knots(t, ds_max)
    z = 1j * history.lattice.energy_quantum * quads.delta_index / eps ** 2
    S = np.zeros(z.shape, dtype=np.complex128)
    if len(knots) < 2:
        return S
    weights: Dict[float, Tuple[np.ndarray, np.ndarray, np.ndarray]] = {}
    q_prev = history.q_at(knots[0][1], quads, c)
    for (t0, _), (t1, source) in zip(knots[:-1], knots[1:]):
        h = t1 - t0
        if h not in weights:
            weights[h] = _product_weights(z, h)
        _, I0, L = weights[h]
        q_next = history.q_at(source, quads, c)
        S += np.exp(-z * (t - t1)) * (q_prev * L + q_next * (I0 - L))
        q_prev = q_next
    return S


def _history_integral_table(history, t, eps, c, quads: QuadTable, ds_max, threads) -> np.ndarray:
    blocks = ordered_map(
        lambda r: _history_integral(history, t, eps, c, _QuadSlice.of(quads, slice(*r)), ds_max),
        chunk_ranges(len(quads), QUAD_CHUNK),
        threads,
    )
    if not blocks:
        return np.zeros(0, dtype=np.complex128)
    return np.concatenate(blocks)


def phi_closed_form(
    history: LatticeHistory,
    quadruple,
    t: float,
    eps: float,
    c: float = 1.0,
    ds_max: Optional[float] = None,
) -> complex:
    """
    φ(ξ₁, ξ₂; η₁, η₂; t) = −(2i/ε) ∫₀ᵗ e^{−iΔε(t−s)/ε²} q[f](s) ds.

    Zero for quadruples that break momentum conservation or leave the
    lattice. Raises ResolutionError when the history does not cover t or a
    snapshot gap exceeds ``ds_max``.
    """
    KernelMode.MODE_FULL_MEMORY.check_eps(eps)
    lattice = history.lattice
    x1, x2, y1, y2 = (np.asarray(v, dtype=np.int64) for v in quadruple)
    if not np.array_equal(x1 + x2, y1 + y2):
        return 0j
    nodes = [lattice.flat(v) for v in (x1, x2, y1, y2)]
    if any(i is None for i in nodes):
        return 0j
    e = lattice.energy_index
    one = _QuadSlice(
        *(np.array([i]) for i in nodes),
        delta_index=np.array([e[nodes[0]] + e[nodes[1]] - e[nodes[2]] - e[nodes[3]]]),
    )
    S = _history_integral(history, t, eps, c, one, ds_max)
    return complex(-2j / eps * S[0])


def phi_from_history(
    history: LatticeHistory,
    t: float,
    eps: float,
    c: float = 1.0,
    ds_max: Optional[float] = None,
    budget: int = DEFAULT_BUDGET,
    threads: Optional[int] = None,
) -> PairCorrelation:
    """The whole PairCorrelation at time t, from the closed form."""
    KernelMode.MODE_FULL_MEMORY.check_eps(eps)
    lattice = history.lattice
    quads = lattice.quads(budget)
    phi = PairCorrelation.zeros(lattice, eps, budget)
    phi.set_quads(quads, -2j / eps * _history_integral_table(history, t, eps, c, quads, ds_max, threads))
    phi.time = t
    return phi


def rhs_memory(
    history: LatticeHistory,
    t: float,
    eps: float,
    c: float = 1.0,
    ds_max: Optional[float] = None,
    budget: int = DEFAULT_BUDGET,
    threads: Optional[int] = None,
) -> np.ndarray:
    """
    df/dt(p₁) = (4/ε²) Σ_{p₃,p₄} ∫₀ᵗ cos[Δε(t−s)/ε²] q[f](s) ds Δp⁶,
    summed in the relabeling-symmetric form (number is conserved exactly).
    """
    KernelMode.MODE_FULL_MEMORY.check_eps(eps)
    lattice = history.lattice
    quads = lattice.quads(budget)
    R = _history_integral_table(history, t, eps, c, quads, ds_max, threads).real
    return lattice.spacing ** 6 / eps ** 2 * _deposit(quads, R, lattice.size)


@dataclass
class CoupledRate:
    df: np.ndarray
    dphi: PairCorrelation
    imag_residual: np.ndarray

    @property
    def relative_residual(self) -> float:
        scale = float(np.abs(self.df).max(initial=0.0))
        worst = float(np.abs(self.imag_residual).max(initial=0.0))
        if scale == 0.0:
            return worst
        return worst / scale


def _f_rate_from_phi(p: np.ndarray, quads: QuadTable, lattice: Lattice3, eps: float):
    """(real rate, imaginary residual) of −i(Δp⁶/ε) Σ[φ at η-slot − φ at ξ-slot]."""
    n = lattice.size
    s = (np.bincount(quads.c, p.real, n) - np.bincount(quads.a, p.real, n)
         + 1j * (np.bincount(quads.c, p.imag, n) - np.bincount(quads.a, p.imag, n)))
    rate = -1j * lattice.spacing ** 6 / eps * s
    return rate.real, rate.imag


def rhs_coupled(
    f: DistributionLattice,
    phi: PairCorrelation,
    eps: float,
    c: float = 1.0,
    budget: int = DEFAULT_BUDGET,
) -> CoupledRate:
    """
    Right-hand sides of the closed f/φ system.

    dφ/dt = −i(Δε/ε²)φ − (i/ε)·2q[f]; df/dt is the lattice sum of φ over the
    quadruples where p is an outgoing or incoming slot. The capacity check
    runs before anything is allocated.
    """
    KernelMode.MODE_FULL_MEMORY.check_eps(eps)
    lattice = f.lattice
    quads = lattice.quads(budget)
    p = phi.on_quads(quads)
    df, residual = _f_rate_from_phi(p, quads, lattice, eps)
    omega = lattice.energy_quantum * quads.delta_index / eps ** 2
    dphi = PairCorrelation.zeros(lattice, eps, budget)
    dphi.time = phi.time
    dphi.set_quads(quads, -1j * omega * p - 2j / eps * quad_q(f.values, quads, c))
    return CoupledRate(df, dphi, residual)


def rhs_markovian(f: DistributionLattice, c: float = 1.0, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """Lattice delta limit: π Δp⁴ Σ over on-shell quadruples, relabeling-symmetric."""
    lattice = f.lattice
    resonant = _resonant(lattice.quads(budget))
    return _markov_rate(f.values, resonant, lattice, c)


def rhs_broadened(f: DistributionLattice, t: float, eps: float, c: float = 1.0,
                  budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """Δp⁶ Σ K(Δε, t) q[f(t)], relabeling-symmetric."""
    KernelMode.MODE_BROADENED_DELTA.check_eps(eps)
    lattice = f.lattice
    return _broadened_rate(f.values, t, lattice.quads(budget), lattice, eps, c)


def _resonant(quads: QuadTable) -> _QuadSlice:
    return _QuadSlice.of(quads, quads.delta_index == 0)


def _markov_rate(values, resonant: _QuadSlice, lattice: Lattice3, c: float) -> np.ndarray:
    q = quad_q(values, resonant, c)
    return math.pi * lattice.spacing ** 4 * _deposit(resonant, q, lattice.size)


def _broadened_rate(values, t, quads, lattice: Lattice3, eps: float, c: float) -> np.ndarray:
    K = broadened_kernel(lattice.energy_quantum * quads.delta_index, t, eps)
    q = quad_q(values, quads, c)
    return lattice.spacing ** 6 * _deposit(quads, K * q, lattice.size)


def integrate_rk4(y: np.ndarray, t: float, dt: float, rhs: Callable[[float, np.ndarray], np.ndarray]) -> np.ndarray:
    k1 = rhs(t, y)
    k2 = rhs(t + dt / 2, y + dt * k1 / 2)
    k3 = rhs(t + dt / 2, y + dt * k2 / 2)
    k4 = rhs(t + dt, y + dt * k3)
    return y + 1 / 6 * (k1 + 2 * k2 + 2 * k3 + k4) * dt


@dataclass
class LatticeRun:
    lattice: Lattice3
    mode: KernelMode
    eps: Optional[float]
    times: List[float] = field(default_factory=list)
    values: List[np.ndarray] = field(default_factory=list)
    phi: Optional[PairCorrelation] = None
    max_imag_residual: float = 0.0
    conjugation_error: float = 0.0
    warnings: ErrorList = field(default_factory=list)

    def record(self, t: float, values: np.ndarray):
        self.times.append(float(t))
        self.values.append(np.array(values, dtype=np.float64, copy=True))

    @property
    def final_values(self) -> np.ndarray:
        return self.values[-1]

    def snapshot(self, index: int = -1) -> DistributionLattice:
        return DistributionLattice(self.lattice, self.values[index], self.times[index])

    def numbers(self) -> np.ndarray:
        return self.lattice.spacing ** 3 * np.array([v.sum() for v in self.values])

    def energies(self) -> np.ndarray:
        e = self.lattice.energies
        return self.lattice.spacing ** 3 * np.array([np.dot(e, v) for v in self.values])

    def finish(self):
        low = min(float(v.min()) for v in self.values)
        if low < 0.0:
            self.warnings.append(new_warning("lattice solution went negative",
                                             {"mode": self.mode.name, "eps": self.eps, "min_f": low}))
        for w in self.warnings:
            logger.warning(str(w))
        return self


def _time_grid(t_end: float, dt: float) -> Tuple[int, float]:
    if not t_end > 0:
        raise new_fatal("t_end must be positive", {"t_end": t_end})
    if not 0 < dt <= t_end:
        raise new_fatal("dt must lie in (0, t_end]", {"dt": dt, "t_end": t_end})
    steps = max(1, int(math.ceil(t_end / dt - 1e-9)))
    return steps, t_end / steps


def solve_coupled(
    f0: DistributionLattice,
    eps: float,
    t_end: float,
    dt: float,
    c: float = 1.0,
    budget: int = DEFAULT_BUDGET,
    snapshot_every: int = 1,
) -> LatticeRun:
    """
    Advance (f, φ) from (f0, 0): f by explicit Euler from the current φ, φ
    by the exponential product-integration step.
    """
    KernelMode.MODE_FULL_MEMORY.check_eps(eps)
    lattice = f0.lattice
    quads = lattice.quads(budget)
    steps, h = _time_grid(t_end, dt)
    z = 1j * lattice.energy_quantum * quads.delta_index / eps ** 2
    E, I0, L = _product_weights(z, h)

    run = LatticeRun(lattice, KernelMode.MODE_FULL_MEMORY, eps)
    y = f0.values.copy()
    q = quad_q(y, quads, c)
    p = np.zeros(len(quads), dtype=np.complex128)
    run.record(0.0, y)
    for k in range(steps):
        df, residual = _f_rate_from_phi(p, quads, lattice, eps)
        scale = float(np.abs(df).max(initial=0.0))
        if scale > 0.0:
            run.max_imag_residual = max(run.max_imag_residual, float(np.abs(residual).max()) / scale)
        y = y + h * df
        q_new = quad_q(y, quads, c)
        p = E * p - 2j / eps * (q * L + q_new * (I0 - L))
        q = q_new
        if not np.all(np.isfinite(y)):
            raise new_fatal("non-finite lattice state", {"step": k + 1}, code=CODE_NUMERICAL)
        if (k + 1) % snapshot_every == 0 or k + 1 == steps:
            run.record((k + 1) * h, y)

    phi = PairCorrelation.zeros(lattice, eps, budget)
    phi.set_quads(quads, p)
    phi.time = steps * h
    run.phi = phi
    run.conjugation_error = phi.invariant_errors(quads)["conjugation"]
    logger.info("coupled lattice run M=%d eps=%g: %d steps, imag residual %.2e",
                lattice.side, eps, steps, run.max_imag_residual)
    return run.finish()


def solve_memory(
    f0: DistributionLattice,
    eps: float,
    t_end: float,
    dt: float,
    c: float = 1.0,
    budget: int = DEFAULT_BUDGET,
    snapshot_every: int = 1,
    threads: Optional[int] = None,
) -> LatticeRun:
    """Advance f by explicit Euler on the memory operator; every step is kept as history."""
    KernelMode.MODE_FULL_MEMORY.check_eps(eps)
    lattice = f0.lattice
    lattice.check_capacity(budget)
    steps, h = _time_grid(t_end, dt)

    run = LatticeRun(lattice, KernelMode.MODE_FULL_MEMORY, eps)
    history = LatticeHistory(lattice)
    y = f0.values.copy()
    history.append(0.0, y)
    run.record(0.0, y)
    for k in range(steps):
        df = rhs_memory(history, k * h, eps, c, budget=budget, threads=threads)
        y = y + h * df
        if not np.all(np.isfinite(y)):
            raise new_fatal("non-finite lattice state", {"step": k + 1}, code=CODE_NUMERICAL)
        history.append((k + 1) * h, y)
        if (k + 1) % snapshot_every == 0 or k + 1 == steps:
            run.record((k + 1) * h, y)
    logger.info("memory lattice run M=%d eps=%g: %d steps", lattice.side, eps, steps)
    return run.finish()


def solve_markovian(
    f0: DistributionLattice,
    t_end: float,
    dt: float,
    mode: KernelMode = KernelMode.MODE_MARKOVIAN,
    eps: Optional[float] = None,
    c: float = 1.0,
    budget: int = DEFAULT_BUDGET,
    snapshot_every: int = 1,
) -> LatticeRun:
    """RK4 on the Markovian-in-q operators (lattice delta or broadened kernel)."""
    if mode == KernelMode.MODE_FULL_MEMORY:
        raise new_fatal("full memory is not a Markovian mode; use solve_memory", {"mode": mode.name})
    mode.check_eps(eps)
    lattice = f0.lattice
    quads = lattice.quads(budget)
    steps, h = _time_grid(t_end, dt)

    if mode == KernelMode.MODE_MARKOVIAN:
        resonant = _resonant(quads)

        def rhs(t, y):
            return _markov_rate(y, resonant, lattice, c)
    else:
        def rhs(t, y):
            return _broadened_rate(y, t, quads, lattice, eps, c)

    run = LatticeRun(lattice, mode, eps)
    y = f0.values.copy()
    run.record(0.0, y)
    for k in range(steps):
        y = integrate_rk4(y, k * h, h, rhs)
        if not np.all(np.isfinite(y)):
            raise new_fatal("non-finite lattice state", {"step": k + 1}, code=CODE_NUMERICAL)
        if (k + 1) % snapshot_every == 0 or k + 1 == steps:
            run.record((k + 1) * h, y)
    logger.info("%s lattice run M=%d: %d steps", mode.name, lattice.side, steps)
    return run.finish()


def solve_lattice(
    f0: DistributionLattice,
    mode: KernelMode,
    t_end: float,
    dt: float,
    eps: Optional[float] = None,
    c: float = 1.0,
    budget: int = DEFAULT_BUDGET,
    snapshot_every: int = 1,
    coupled: bool = False,
) -> LatticeRun:
    """Dispatch on the kernel mode; ``coupled`` picks the f/φ system for full memory."""
    mode.check_eps(eps)
    if mode == KernelMode.MODE_FULL_MEMORY:
        solver = solve_coupled if coupled else solve_memory
        return solver(f0, eps, t_end, dt, c, budget, snapshot_every)
    return solve_markovian(f0, t_end, dt, mode, eps, c, budget, snapshot_every)
