"""
Adaptive time integration of the isotropic UU equation.

Bogacki-Shampine 3(2) pair (FSAL) with PI step-size control. Negative
excursions are clipped to zero after every accepted step and the clipped
number mass is accumulated. The run stops with a blow-up flag when max f
reaches ``blowup_ratio`` times its initial value or when the step size
collapses below ``dt_min`` while max f is still growing.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from uukin.collision.moments import MomentReport, entropy_density, moments
from uukin.collision.operator import CollisionConfig, collision_rate
from uukin.core.distribution import DistributionIso
from uukin.errors import ErrorList, new_fatal, new_warning, CODE_NUMERICAL

logger = logging.getLogger(__name__)

# Butcher table, 3rd order solution b, embedded 2nd order b_hat
_C = (0.0, 0.5, 0.75, 1.0)
_A = {
    1: (0.5,),
    2: (0.0, 0.75),
    3: (2.0 / 9.0, 1.0 / 3.0, 4.0 / 9.0),
}
_B = (2.0 / 9.0, 1.0 / 3.0, 4.0 / 9.0, 0.0)
_B_HAT = (7.0 / 24.0, 0.25, 1.0 / 3.0, 0.125)
_ORDER = 3

DEFAULT_ALPHA = 2.638  # 2β + 1/2 at β = 1.069


@dataclass(frozen=True)
class StepController:
    """
    Step-control settings.

    ``tc_fraction`` caps dt at that fraction of the current estimate of the
    time left before blow-up, T − t ≈ α / (d ln max f / dt).
    """
    rtol: float = 1e-6
    atol: float = 1e-10
    dt_init: float = 1e-3
    dt_min: float = 1e-12
    dt_max: float = 0.1
    safety: float = 0.9
    max_steps: int = 200000
    snapshot_every: int = 1
    blowup_ratio: float = 1e6
    tc_fraction: float = 0.1
    alpha_guess: float = DEFAULT_ALPHA

    def __post_init__(self):
        if not (self.rtol > 0 and self.atol > 0):
            raise new_fatal("controller tolerances must be positive",
                            {"rtol": self.rtol, "atol": self.atol})
        if not (0 < self.dt_min <= self.dt_init and self.dt_max >= self.dt_init):
            raise new_fatal("controller needs 0 < dt_min <= dt_init <= dt_max",
                            {"dt_min": self.dt_min, "dt_init": self.dt_init, "dt_max": self.dt_max})
        if self.snapshot_every < 1:
            raise new_fatal("snapshot_every must be >= 1", {"snapshot_every": self.snapshot_every})
        if not self.blowup_ratio > 1:
            raise new_fatal("blowup_ratio must exceed 1", {"blowup_ratio": self.blowup_ratio})


@dataclass
class Trajectory:
    times: List[float] = field(default_factory=list)
    snapshots: List[DistributionIso] = field(default_factory=list)
    reports: List[MomentReport] = field(default_factory=list)
    step_sizes: List[float] = field(default_factory=list)
    clipped_mass: float = 0.0
    rejected_steps: int = 0
    accepted_steps: int = 0
    min_entropy_increment: float = math.inf
    blowup: bool = False
    stop_reason: str = ""
    last_dt: Optional[float] = None
    warnings: ErrorList = field(default_factory=list)

    def append(self, t: float, f: DistributionIso, report: MomentReport):
        if self.times and not t > self.times[-1]:
            raise new_fatal("trajectory times must be strictly increasing",
                            {"t": t, "last": self.times[-1]}, code=CODE_NUMERICAL)
        self.times.append(t)
        self.snapshots.append(f)
        self.reports.append(report)

    def __len__(self) -> int:
        return len(self.times)

    @property
    def final(self) -> DistributionIso:
        return self.snapshots[-1]

    @property
    def max_values(self) -> np.ndarray:
        return np.array([s.max for s in self.snapshots])

    def drift(self, attr: str) -> float:
        """Largest relative deviation of a moment from its first value, per unit time."""
        if len(self.times) < 2:
            return 0.0
        values = np.array([getattr(r, attr) for r in self.reports])
        ref = abs(values[0]) or 1.0
        span = self.times[-1] - self.times[0]
        return float(np.abs(values - values[0]).max() / ref / span)


def _error_norm(y, y_new, err, ctl: StepController) -> float:
    scale = ctl.atol + ctl.rtol * np.maximum(np.abs(y), np.abs(y_new))
    return float(np.sqrt(np.mean((err / scale) ** 2)))


def evolve(
    f0: DistributionIso,
    t_end: float,
    controller: Optional[StepController] = None,
    cfg: Optional[CollisionConfig] = None,
    t0: float = 0.0,
    on_snapshot: Optional[Callable[[int, float, DistributionIso], None]] = None,
) -> Trajectory:
    """
    Integrate df/dt = C[f] from ``t0`` to ``t_end``.

    Snapshots are taken at t0, every ``snapshot_every`` accepted steps and at
    the final time; ``on_snapshot(index, t, f)`` is called for each. Raises a
    NumericalError ("stiffness failure") when the step size underflows
    without a blow-up signature.
    """
    ctl = controller or StepController()
    cfg = cfg or CollisionConfig()
    if not t_end > t0:
        raise new_fatal("t_end must be larger than the start time", {"t0": t0, "t_end": t_end})

    grid = f0.grid
    c = cfg.occupancy_c

    def rhs(y):
        return collision_rate(np.maximum(y, 0.0), grid, cfg).values

    traj = Trajectory()

    def snapshot(t, y):
        f = DistributionIso(grid, y)
        traj.append(t, f, moments(f, c))
        if on_snapshot is not None:
            on_snapshot(len(traj) - 1, t, f)

    y = f0.values.copy()
    t = t0
    snapshot(t, y)
    fmax0 = max(float(y.max()), 1e-300)
    entropy = traj.reports[0].entropy

    dt = min(ctl.dt_init, t_end - t)
    k1 = rhs(y)
    err_prev = 1.0
    last_snap_step = 0

    while t < t_end:
        if traj.accepted_steps >= ctl.max_steps:
            traj.stop_reason = "max_steps"
            traj.warnings.append(new_warning("step budget exhausted before t_end",
                                             {"t": t, "max_steps": ctl.max_steps}))
            break

        # cap dt by the blow-up time estimate
        fmax = float(y.max())
        growth = float(k1[int(np.argmax(y))]) / fmax if fmax > 0 else 0.0
        if growth > 0:
            dt = min(dt, ctl.tc_fraction * ctl.alpha_guess / growth)
        dt = min(dt, ctl.dt_max)

        if dt < ctl.dt_min:
            if growth > 0:
                traj.blowup = True
                traj.stop_reason = "dt_floor"
                break
            raise new_fatal(
                "stiffness failure: step size underflow without blow-up signature",
                {"t": t, "dt": dt, "max_f": fmax},
                code=CODE_NUMERICAL,
            )
        last_step = dt >= t_end - t
        if last_step:
            dt = t_end - t

        k2 = rhs(y + dt * _A[1][0] * k1)
        k3 = rhs(y + dt * (_A[2][0] * k1 + _A[2][1] * k2))
        y_new = y + dt * (_A[3][0] * k1 + _A[3][1] * k2 + _A[3][2] * k3)
        if not np.all(np.isfinite(y_new)):
            raise new_fatal("non-finite state in time step", {"t": t, "dt": dt}, code=CODE_NUMERICAL)
        k4 = rhs(y_new)
        err = dt * sum(
            (b - bh) * k for b, bh, k in zip(_B, _B_HAT, (k1, k2, k3, k4))
        )
        norm = _error_norm(y, y_new, err, ctl)

        if norm <= 1.0:
            t = t_end if last_step else t + dt
            clipped = np.minimum(y_new, 0.0)
            if np.any(clipped < 0.0):
                traj.clipped_mass += -grid.number(clipped)
                y_new = np.maximum(y_new, 0.0)
                k4 = rhs(y_new)
            y = y_new
            k1 = k4
            traj.accepted_steps += 1
            traj.step_sizes.append(dt)

            s = grid.number(entropy_density(y, c))
            traj.min_entropy_increment = min(traj.min_entropy_increment, s - entropy)
            entropy = s

            if y.max() >= ctl.blowup_ratio * fmax0:
                traj.blowup = True
                traj.stop_reason = "max_f"
                snapshot(t, y)
                break
            if traj.accepted_steps - last_snap_step >= ctl.snapshot_every or t >= t_end:
                snapshot(t, y)
                last_snap_step = traj.accepted_steps

            factor = ctl.safety * max(norm, 1e-10) ** (-0.7 / _ORDER) * err_prev ** (0.4 / _ORDER)
            err_prev = max(norm, 1e-4)
            dt *= min(5.0, max(0.2, factor))
        else:
            traj.rejected_steps += 1
            dt *= max(0.1, ctl.safety * norm ** (-1.0 / _ORDER))

    if not traj.stop_reason:
        traj.stop_reason = "t_end"
    if traj.times[-1] < t:
        snapshot(t, y)
    traj.last_dt = dt
    if traj.clipped_mass > 0.0:
        traj.warnings.append(new_warning("negative excursions clipped",
                                         {"clipped_mass": traj.clipped_mass}))
    for w in traj.warnings:
        logger.warning(str(w))
    logger.info("evolve stopped (%s) at t=%.6g after %d steps, %d rejected, max f=%.4g",
                traj.stop_reason, t, traj.accepted_steps, traj.rejected_steps, float(y.max()))
    return traj
