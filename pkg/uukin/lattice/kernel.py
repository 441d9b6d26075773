"""
Broadened energy kernel K(Δε, t) = (1/ε²) ∫₀ᵗ cos(Δε u/ε²) du = sin(Δε t/ε²)/Δε
and its weak convergence to π δ(Δε).
"""

import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np
from scipy import integrate, special

from uukin.errors import ErrorList, new_fatal, new_warning

logger = logging.getLogger(__name__)


def broadened_kernel(delta_eps, t: float, eps: float):
    """sin(Δε t/ε²)/Δε, equal to t/ε² at Δε = 0."""
    if t < 0:
        raise new_fatal("kernel time must be nonnegative", {"t": t})
    if not eps > 0:
        raise new_fatal("kernel eps must be positive", {"eps": eps})
    omega = t / eps ** 2
    return omega * np.sinc(np.asarray(delta_eps, dtype=np.float64) * omega / np.pi)


def kernel_mass(t: float, eps: float) -> float:
    """∫_ℝ K(Δε, t) dΔε evaluated as 2[Si(ω) + ∫₁^∞ sin(ωx)/x dx], ω = t/ε²."""
    if not eps > 0:
        raise new_fatal("kernel eps must be positive", {"eps": eps})
    omega = t / eps ** 2
    if omega == 0.0:
        return 0.0
    si, _ = special.sici(omega)
    tail, _ = integrate.quad(lambda x: 1.0 / x, 1.0, np.inf, weight="sin", wvar=omega)
    return float(2.0 * (si + tail))


@dataclass(frozen=True)
class KernelPairing:
    eps: float
    pairing: float
    error: float
    abserr: float
    converged: bool


@dataclass
class WeakConvergenceTable:
    t: float
    target: float
    rows: List[KernelPairing] = field(default_factory=list)
    warnings: ErrorList = field(default_factory=list)

    @property
    def errors(self) -> np.ndarray:
        return np.array([r.error for r in self.rows])

    @property
    def strictly_decreasing(self) -> bool:
        e = self.errors
        return bool(np.all(np.diff(e) < 0))


def _sin_integral(h: Callable[[float], float], omega: float, upper: float):
    """∫₀^upper h(x) sin(ωx) dx with the QUADPACK oscillatory rules."""
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", integrate.IntegrationWarning)
        value, abserr = integrate.quad(h, 0.0, upper, weight="sin", wvar=omega, limit=200)
    converged = not any(issubclass(w.category, integrate.IntegrationWarning) for w in caught)
    return value, abserr, converged


def weak_convergence_check(
    test_fn: Callable[[np.ndarray], np.ndarray],
    t: float,
    eps_list: Sequence[float],
    half_width: Optional[float] = None,
    ref_width: float = 1.0,
) -> WeakConvergenceTable:
    """
    Tabulate |∫ K(Δε, t) φ(Δε) dΔε − π φ(0)| for each ε.

    φ(0) times a reference function with a closed-form pairing is split off
    and the remainder, which vanishes at 0, goes to an oscillatory
    quadrature. The reference is e^{−x²/(2s²)} (pairing π erf(ωs/√2)) on ℝ,
    or the indicator of [−L, L] (pairing 2 Si(ωL)) when ``half_width`` L
    restricts φ to a finite support.
    """
    phi0 = float(test_fn(np.array([0.0]))[0])
    table = WeakConvergenceTable(t=t, target=math.pi * phi0)

    if half_width is None:
        def reference(x):
            return np.exp(-x * x / (2.0 * ref_width ** 2))
    else:
        def reference(x):
            return np.ones_like(x)

    def h(x):
        if x == 0.0:
            return 0.0
        pts = np.array([x, -x])
        r = test_fn(pts) - phi0 * reference(pts)
        return float((r[0] + r[1]) / x)

    upper = np.inf if half_width is None else half_width
    for eps in eps_list:
        if not eps > 0:
            raise new_fatal("eps values must be positive", {"eps": eps})
        omega = t / eps ** 2
        if half_width is None:
            ref = math.pi * special.erf(omega * ref_width / math.sqrt(2.0))
        else:
            ref = 2.0 * special.sici(omega * half_width)[0]
        rest, abserr, converged = _sin_integral(h, omega, upper)
        pairing = phi0 * ref + rest
        row = KernelPairing(eps, pairing, abs(pairing - table.target), abserr, converged)
        table.rows.append(row)
        if not converged:
            table.warnings.append(new_warning("oscillatory quadrature did not converge",
                                              {"eps": eps, "abserr": abserr}))
        logger.debug("kernel pairing eps=%g: %.12g (error %.3e)", eps, pairing, row.error)
    return table
