"""
Blow-up time estimation and self-similar analysis of trajectories.

Near the blow-up time T the solution is expected to take the form

    f(t, p) = (T − t)^{−α} Φ(p / (T − t)^β),   α = 2β + 1/2.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import integrate, optimize, stats

from uukin.collision.moments import moments
from uukin.core.distribution import DistributionIso
from uukin.core.grid import RadialGrid
from uukin.errors import (
    CODE_FIT_WINDOW,
    CODE_RESOLUTION,
    ErrorList,
    new_fatal,
    new_warning,
)

from .stepper import Trajectory

logger = logging.getLogger(__name__)

MIN_GROWTH = 2.0
MIN_WINDOW_POINTS = 5
MIN_FIT_POINTS = 10
ALPHA_BOUNDS = (0.2, 12.0)


class CharacteristicEnum(int, Enum):
    CHAR_MEDIAN_ENERGY = 0
    CHAR_HALF_MAX = 1

    @classmethod
    def from_name(cls, name: str) -> "CharacteristicEnum":
        try:
            return cls["CHAR_" + name.upper()]
        except KeyError:
            raise new_fatal(f"unknown characteristic momentum '{name}'", {"characteristic": name}) from None


@dataclass(frozen=True)
class BlowupEstimate:
    detected: bool
    T: float = math.nan
    ci_low: float = math.nan
    ci_high: float = math.nan
    alpha: float = math.nan
    window: Tuple[float, float] = (math.nan, math.nan)
    n_points: int = 0
    growth: float = 1.0

    def to_dict(self) -> dict:
        return {
            "detected": self.detected,
            "T": self.T,
            "ci": [self.ci_low, self.ci_high],
            "alpha": self.alpha,
            "window": list(self.window),
            "n_points": self.n_points,
            "growth": self.growth,
        }


@dataclass(frozen=True)
class SelfSimilarFit:
    blowup_time: float
    beta: float
    alpha: float
    consistency_gap: float
    beta_window: Tuple[float, float]
    alpha_window: Tuple[float, float]
    beta_stderr: float
    alpha_stderr: float
    beta_residual: float
    alpha_residual: float
    n_points: int
    characteristic: str

    def to_dict(self) -> dict:
        return {
            "T": self.blowup_time,
            "beta": self.beta,
            "alpha": self.alpha,
            "consistency_gap": self.consistency_gap,
            "beta_window": list(self.beta_window),
            "alpha_window": list(self.alpha_window),
            "beta_stderr": self.beta_stderr,
            "alpha_stderr": self.alpha_stderr,
            "beta_residual": self.beta_residual,
            "alpha_residual": self.alpha_residual,
            "n_points": self.n_points,
            "characteristic": self.characteristic,
        }


@dataclass
class SelfSimilarProfile:
    """
    Rescaled snapshots Φ_t(ξ) = (T−t)^{2β+1/2} f(ε = ξ²(T−t)^{2β}, t) and the
    radial transform Ψ(y) = (2π)³ ∫ d³ξ e^{iξ·y} Φ(|ξ|) of the last one.
    """
    T: float
    beta: float
    xi: np.ndarray
    phi: np.ndarray
    times: np.ndarray
    rescaled: np.ndarray
    collapse: np.ndarray
    y: np.ndarray = field(default_factory=lambda: np.zeros(0))
    psi: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def collapse_metric(self) -> float:
        """Largest successive sup-distance, relative to sup Φ."""
        if self.collapse.size == 0:
            return 0.0
        return float(self.collapse.max() / max(np.abs(self.phi).max(), 1e-300))

    @property
    def y_max(self) -> float:
        """Largest transform argument the ξ grid resolves."""
        return float(1.0 / np.diff(self.xi).max())

    def psi_at(self, y) -> np.ndarray:
        y = np.atleast_1d(np.asarray(y, dtype=np.float64))
        if np.abs(y).max(initial=0.0) > self.y_max:
            raise new_fatal(
                "profile grid cannot resolve the requested transform argument",
                {"y": float(np.abs(y).max()), "y_max": self.y_max},
                code=CODE_RESOLUTION,
            )
        kernel = np.sinc(np.outer(np.abs(y), self.xi) / np.pi)
        integrand = self.phi * self.xi ** 2 * kernel
        return (2.0 * np.pi) ** 3 * 4.0 * np.pi * integrate.trapezoid(integrand, self.xi, axis=1)

    def marginal(self, z) -> np.ndarray:
        """M(z) = ∫dP_y dP_z Φ(|P|) = 2π ∫_{|z|}^∞ Φ(ξ) ξ dξ."""
        z = np.abs(np.atleast_1d(np.asarray(z, dtype=np.float64)))
        g = self.phi * self.xi
        cell = 0.5 * (g[1:] + g[:-1]) * np.diff(self.xi)
        tail = np.concatenate([np.cumsum(cell[::-1])[::-1], [0.0]])
        out = np.interp(z, self.xi, tail, left=np.nan, right=0.0)
        below = z < self.xi[0]
        # Φ taken flat below the first node
        out[below] = tail[0] + self.phi[0] * 0.5 * (self.xi[0] ** 2 - z[below] ** 2)
        return 2.0 * np.pi * out


def _window(times: np.ndarray, fmax: np.ndarray, fraction: float) -> np.ndarray:
    """Indices in the upper ``fraction`` of the log-growth of max f."""
    lo = math.log(fmax[0])
    hi = math.log(fmax[-1])
    cut = hi - fraction * (hi - lo)
    return np.nonzero(np.log(fmax) >= cut)[0]


def _linear_T(t: np.ndarray, fmax: np.ndarray, alpha: float) -> Tuple[float, float]:
    y = fmax ** (-1.0 / alpha)
    fit = stats.linregress(t, y)
    if fit.slope >= 0:
        return math.inf, 1.0
    return -fit.intercept / fit.slope, 1.0 - fit.rvalue ** 2


def detect_blowup(
    traj: Trajectory,
    window_fraction: float = 0.5,
    alpha: Optional[float] = None,
) -> BlowupEstimate:
    """
    Estimate T by fitting (max f)^{−1/α} linearly in t over a trailing window.

    α is fitted (minimum of 1 − r²) unless given. The interval is a
    leave-one-out jackknife over the window. Growth below a factor 2 is
    reported as no blow-up.
    """
    times = np.asarray(traj.times, dtype=np.float64)
    fmax = traj.max_values
    if times.size < 2 or fmax[0] <= 0.0:
        return BlowupEstimate(False)
    growth = float(fmax[-1] / fmax[0])
    if growth < MIN_GROWTH:
        return BlowupEstimate(False, growth=growth)

    idx = _window(times, fmax, window_fraction)
    if idx.size < MIN_WINDOW_POINTS:
        idx = np.arange(max(0, times.size - MIN_WINDOW_POINTS), times.size)
    if idx.size < 3:
        return BlowupEstimate(False, growth=growth)
    tw, fw = times[idx], fmax[idx]

    if alpha is None:
        res = optimize.minimize_scalar(
            lambda a: _linear_T(tw, fw, a)[1],
            bounds=ALPHA_BOUNDS,
            method="bounded",
            options={"xatol": 1e-6},
        )
        alpha = float(res.x)

    T, _ = _linear_T(tw, fw, alpha)
    if not math.isfinite(T):
        return BlowupEstimate(False, growth=growth)

    n = tw.size
    loo = np.array([_linear_T(np.delete(tw, k), np.delete(fw, k), alpha)[0] for k in range(n)])
    loo = loo[np.isfinite(loo)]
    spread = math.sqrt((n - 1) / n * np.sum((loo - loo.mean()) ** 2)) if loo.size > 1 else 0.0
    estimate = BlowupEstimate(
        detected=True,
        T=float(T),
        ci_low=float(T - 1.96 * spread),
        ci_high=float(T + 1.96 * spread),
        alpha=alpha,
        window=(float(tw[0]), float(tw[-1])),
        n_points=int(n),
        growth=growth,
    )
    logger.info("blow-up estimate T=%.6g [%.6g, %.6g] alpha=%.4f", estimate.T,
                estimate.ci_low, estimate.ci_high, alpha)
    return estimate


def _crossing(grid: RadialGrid, values: np.ndarray, level: float) -> Tuple[int, float]:
    """First node j after the peak with f < level, and the interpolated crossing energy."""
    peak = int(np.argmax(values))
    below = np.nonzero(values[peak:] < level)[0]
    if below.size == 0:
        return grid.size, grid.eps_max
    j = peak + int(below[0])
    if j == 0:
        return 0, float(grid.nodes[0])
    v0, v1 = values[j - 1], values[j]
    s = (v0 - level) / (v0 - v1)
    return j, float(grid.nodes[j - 1] + s * (grid.nodes[j] - grid.nodes[j - 1]))


def characteristic_momentum(
    f: DistributionIso,
    kind: CharacteristicEnum = CharacteristicEnum.CHAR_MEDIAN_ENERGY,
    kappa: float = 0.5,
) -> float:
    """
    Width of the growing core {ε <= ε_κ}, f(ε_κ) = κ max f.

    median_energy: momentum below which half of the core's energy
    ∫ f ε^{3/2} dε sits (trapezoid in ε, crossing interpolated).
    half_max: momentum where f drops to max f / 2.
    """
    grid = f.grid
    nodes = grid.nodes
    values = f.values
    top = float(values.max())
    if kind == CharacteristicEnum.CHAR_HALF_MAX:
        return math.sqrt(_crossing(grid, values, 0.5 * top)[1])

    j, eps_k = _crossing(grid, values, kappa * top)
    g = values * nodes ** 1.5
    cum = np.empty(nodes.size)
    # g ∝ ε^{3/2} below the first node
    cum[0] = g[0] * nodes[0] / 2.5
    cum[1:] = cum[0] + np.cumsum(0.5 * (g[1:] + g[:-1]) * np.diff(nodes))
    if j == 0:
        return math.sqrt(eps_k)
    if j < nodes.size:
        g_k = np.interp(eps_k, nodes, g)
        w_k = cum[j - 1] + 0.5 * (g[j - 1] + g_k) * (eps_k - nodes[j - 1])
        xs = np.append(cum[:j], w_k)
        es = np.append(nodes[:j], eps_k)
    else:
        xs, es = cum, nodes
    target = 0.5 * xs[-1]
    if target <= xs[0]:
        return math.sqrt(nodes[0] * (target / xs[0]) ** 0.4) if xs[0] > 0 else math.sqrt(nodes[0])
    return math.sqrt(float(np.interp(target, xs, es)))


def _fit_window(times: np.ndarray, window: Optional[Tuple[float, float]], default: np.ndarray):
    if window is None:
        return default
    lo, hi = window
    return default[(times[default] >= lo) & (times[default] <= hi)]


def fit_selfsimilar(
    traj: Trajectory,
    T: float,
    characteristic: str = "median_energy",
    kappa: float = 0.5,
    window_fraction: float = 0.5,
    beta_window: Optional[Tuple[float, float]] = None,
    alpha_window: Optional[Tuple[float, float]] = None,
) -> SelfSimilarFit:
    """
    Fit β from ln p*(t) against ln(T − t) and α from ln max f against ln(T − t).

    The default window is the upper ``window_fraction`` of the log-growth of
    max f, restricted to t < T. Explicit windows are time intervals.
    """
    kind = CharacteristicEnum.from_name(characteristic)
    times = np.asarray(traj.times, dtype=np.float64)
    fmax = traj.max_values
    before = np.nonzero(times < T)[0]
    if before.size == 0:
        raise new_fatal("no snapshot before the blow-up time", {"T": T}, code=CODE_FIT_WINDOW)
    growth_idx = _window(times[before], fmax[before], window_fraction)
    default = before[growth_idx]

    b_idx = _fit_window(times, beta_window, default)
    a_idx = _fit_window(times, alpha_window, default)
    for name, idx in (("beta", b_idx), ("alpha", a_idx)):
        if idx.size < MIN_FIT_POINTS:
            raise new_fatal(
                f"{name} window holds fewer than {MIN_FIT_POINTS} snapshots",
                {"window": name, "n": int(idx.size)},
                code=CODE_FIT_WINDOW,
            )
    b_span = (times[b_idx].min(), times[b_idx].max())
    a_span = (times[a_idx].min(), times[a_idx].max())
    if b_span[1] < a_span[0] or a_span[1] < b_span[0]:
        raise new_fatal("beta and alpha fit windows do not overlap",
                        {"beta_window": list(b_span), "alpha_window": list(a_span)},
                        code=CODE_FIT_WINDOW)

    pstar = np.array([characteristic_momentum(traj.snapshots[i], kind, kappa) for i in b_idx])
    fb = stats.linregress(np.log(T - times[b_idx]), np.log(pstar))
    fa = stats.linregress(np.log(T - times[a_idx]), np.log(fmax[a_idx]))
    beta = float(fb.slope)
    alpha = float(-fa.slope)
    if not beta > 0:
        raise new_fatal("fitted beta is not positive", {"beta": beta}, code=CODE_FIT_WINDOW)

    fit = SelfSimilarFit(
        blowup_time=float(T),
        beta=beta,
        alpha=alpha,
        consistency_gap=abs(alpha - (2.0 * beta + 0.5)),
        beta_window=(float(b_span[0]), float(b_span[1])),
        alpha_window=(float(a_span[0]), float(a_span[1])),
        beta_stderr=float(fb.stderr),
        alpha_stderr=float(fa.stderr),
        beta_residual=float(1.0 - fb.rvalue ** 2),
        alpha_residual=float(1.0 - fa.rvalue ** 2),
        n_points=int(max(b_idx.size, a_idx.size)),
        characteristic=kind.name[len("CHAR_"):].lower(),
    )
    logger.info("self-similar fit beta=%.4f alpha=%.4f gap=%.3g", beta, alpha, fit.consistency_gap)
    return fit


def extract_profile(
    traj: Trajectory,
    T: float,
    beta: float,
    window_fraction: float = 0.5,
    n_xi: int = 200,
    n_y: int = 64,
) -> SelfSimilarProfile:
    """
    Rescale the asymptotic snapshots onto a common ξ grid and measure collapse.

    ξ covers the range every window snapshot resolves:
    [√ε_0 / (T−t_last)^β, √ε_max / (T−t_first)^β].
    """
    times = np.asarray(traj.times, dtype=np.float64)
    fmax = traj.max_values
    before = np.nonzero(times < T)[0]
    if before.size == 0:
        raise new_fatal("empty asymptotic window", {"T": T}, code=CODE_FIT_WINDOW)
    idx = before[_window(times[before], fmax[before], window_fraction)]
    if idx.size < 2:
        raise new_fatal("empty asymptotic window", {"T": T, "n": int(idx.size)}, code=CODE_FIT_WINDOW)

    grid = traj.snapshots[idx[0]].grid
    tau = T - times[idx]
    lo = max(math.sqrt(grid.nodes[0]), 1e-300) / tau.min() ** beta
    hi = math.sqrt(grid.eps_max) / tau.max() ** beta
    if not hi > lo:
        raise new_fatal("snapshots share no common rescaled range",
                        {"xi_lo": lo, "xi_hi": hi}, code=CODE_RESOLUTION)
    xi = np.geomspace(lo, hi, n_xi) if lo > 0 else np.linspace(0.0, hi, n_xi)

    rescaled = np.array([
        s ** (2.0 * beta + 0.5) * traj.snapshots[i].interpolate(xi ** 2 * s ** (2.0 * beta))
        for i, s in zip(idx, tau)
    ])
    collapse = np.abs(np.diff(rescaled, axis=0)).max(axis=1)
    profile = SelfSimilarProfile(
        T=float(T),
        beta=float(beta),
        xi=xi,
        phi=rescaled[-1].copy(),
        times=times[idx],
        rescaled=rescaled,
        collapse=collapse,
    )
    profile.y = np.linspace(0.0, profile.y_max, n_y)
    profile.psi = profile.psi_at(profile.y)
    return profile


def ansatz_trajectory(
    grid: RadialGrid,
    T: float,
    beta: float,
    times: Sequence[float],
    alpha: Optional[float] = None,
    noise: float = 0.0,
    seed: int = 0,
) -> Trajectory:
    """
    Trajectory sampled from f = (T−t)^{−α} Φ(p/(T−t)^β) with Φ(ξ) = e^{−ξ²}.

    ``noise`` multiplies every snapshot by (1 + noise·η), η standard normal
    per snapshot.
    """
    alpha = 2.0 * beta + 0.5 if alpha is None else alpha
    rng = np.random.default_rng(seed)
    traj = Trajectory()
    for t in times:
        s = T - t
        values = s ** (-alpha) * np.exp(-grid.nodes / s ** (2.0 * beta))
        if noise:
            values = values * max(1.0 + noise * rng.standard_normal(), 0.0)
        f = DistributionIso(grid, values)
        traj.append(float(t), f, moments(f))
    traj.stop_reason = "synthetic"
    return traj


def collapse_warnings(profile: SelfSimilarProfile, tail: int = 5) -> ErrorList:
    """Warn when the last successive collapse distances are not decreasing."""
    last = profile.collapse[-tail:]
    if last.size > 1 and np.any(np.diff(last) > 0):
        return [new_warning("rescaled profiles are not converging monotonically",
                            {"collapse": last.tolist()})]
    return []


def ansatz_profile(beta: float, xi_max: float = 6.0, n_xi: int = 400, n_y: int = 64) -> SelfSimilarProfile:
    """Profile Φ(ξ) = e^{−ξ²} on [0, ξ_max] with its transform tabulated."""
    if not (xi_max > 0 and n_xi >= 2):
        raise new_fatal("ansatz profile needs xi_max > 0 and n_xi >= 2", {"xi_max": xi_max, "n_xi": n_xi})
    xi = np.linspace(0.0, xi_max, n_xi)
    phi = np.exp(-xi * xi)
    profile = SelfSimilarProfile(
        T=0.0,
        beta=float(beta),
        xi=xi,
        phi=phi,
        times=np.zeros(0),
        rescaled=phi[None, :],
        collapse=np.zeros(0),
    )
    profile.y = np.linspace(0.0, profile.y_max, n_y)
    profile.psi = profile.psi_at(profile.y)
    return profile
