"""
Scale calculators for the layer where kinetic theory stops holding.

With (T−t) = −ε^{2/(2β+1)} τ, x = ε^{−2β/(2β+1)} X, p = ε^{2β/(2β+1)} P and
F_k = ε^{k(2β−1)/(2β+1)} H_k, every exponent is a function of β alone.
"""

import logging
import math
from dataclasses import dataclass, field

from uukin.core.params import HBAR, PhysicalParams, nondimensionalize
from uukin.errors import ErrorList, new_fatal, new_warning

logger = logging.getLogger(__name__)

BETA_DEFAULT = 1.069


def _check_beta(beta: float):
    if not (beta > 0 and math.isfinite(beta)):
        raise new_fatal("beta must be positive and finite", {"beta": beta})


def time_exponent(beta: float) -> float:
    return 2.0 / (2.0 * beta + 1.0)


def momentum_exponent(beta: float) -> float:
    return 2.0 * beta / (2.0 * beta + 1.0)


def amplitude_exponent(beta: float) -> float:
    return (2.0 * beta - 1.0) / (2.0 * beta + 1.0)


def correlation_onset_time(eps: float, beta: float = BETA_DEFAULT) -> float:
    """Nondimensional T − t at which interference effects appear: ε^{2/(2β+1)}."""
    if not eps > 0:
        raise new_fatal("eps must be positive", {"eps": eps})
    _check_beta(beta)
    return eps ** time_exponent(beta)


@dataclass(frozen=True)
class BoundaryLayerScales:
    """
    Layer exponents and their physical values.

    ``time``, ``momentum`` and ``length`` use the order-of-magnitude base
    aλ²/d³; the ``*_exact`` fields use ε = 8πaλ²/d³ instead.
    """
    beta: float
    diluteness: float
    epsilon: float
    time: float
    momentum: float
    length: float
    time_exact: float
    momentum_exact: float
    length_exact: float
    warnings: ErrorList = field(default_factory=list, compare=False)

    @property
    def time_exponent(self) -> float:
        return time_exponent(self.beta)

    @property
    def space_exponent(self) -> float:
        return -momentum_exponent(self.beta)

    @property
    def momentum_exponent(self) -> float:
        return momentum_exponent(self.beta)

    @property
    def amplitude_exponent(self) -> float:
        return amplitude_exponent(self.beta)

    @property
    def physical_time_exponent(self) -> float:
        """Exponent of the base in T* − t: −4β/(2β+1)."""
        return -2.0 * momentum_exponent(self.beta)

    def rescale_time(self, tau: float) -> float:
        """Nondimensional T − t for a layer time τ < 0."""
        return -self.epsilon ** self.time_exponent * tau

    def to_dict(self) -> dict:
        return {
            "beta": self.beta,
            "diluteness": self.diluteness,
            "epsilon": self.epsilon,
            "exponents": {
                "time": self.time_exponent,
                "space": self.space_exponent,
                "momentum": self.momentum_exponent,
                "amplitude": self.amplitude_exponent,
                "physical_time": self.physical_time_exponent,
            },
            "t_bl": self.time,
            "p_bl": self.momentum,
            "x_bl": self.length,
            "t_bl_exact": self.time_exact,
            "p_bl_exact": self.momentum_exact,
            "x_bl_exact": self.length_exact,
        }


def _physical(base: float, params: PhysicalParams, beta: float):
    lam = params.de_broglie
    k = momentum_exponent(beta)
    if base == 0.0:
        return math.inf, 0.0, math.inf
    t = 2.0 * params.mass * lam ** 2 / HBAR * base ** (-2.0 * k)
    p = HBAR / lam * base ** k
    x = lam * base ** (-k)
    return t, p, x


def physical_scales(params: PhysicalParams, beta: float = BETA_DEFAULT) -> BoundaryLayerScales:
    """T* − t, p and x of the layer in SI units."""
    _check_beta(beta)
    nd = nondimensionalize(params)
    warnings: ErrorList = list(nd.warnings)
    r = params.diluteness
    if r == 0.0:
        warnings.append(new_warning("zero scattering length: no boundary layer", {"beta": beta}))
    t, p, x = _physical(r, params, beta)
    te, pe, xe = _physical(nd.epsilon, params, beta)
    scales = BoundaryLayerScales(beta, r, nd.epsilon, t, p, x, te, pe, xe, warnings)
    logger.info("boundary layer scales beta=%g: t=%.3e s, p=%.3e kg m/s, x=%.3e m", beta, t, p, x)
    return scales


@dataclass(frozen=True)
class CorrelationMagnitude:
    value: float
    exponent: float
    f1_squared_exponent: float

    @property
    def exponents_match(self) -> bool:
        return math.isclose(self.exponent, self.f1_squared_exponent, rel_tol=0.0, abs_tol=1e-14)


def correlation_magnitude(T_minus_t: float, beta: float = BETA_DEFAULT) -> CorrelationMagnitude:
    """|G|/|F₁|² trend (T−t)^{2β−1}, with the F₁² exponent 2(β − 1/2) for comparison."""
    if not T_minus_t > 0:
        raise new_fatal("T - t must be positive", {"T_minus_t": T_minus_t})
    _check_beta(beta)
    exponent = 2.0 * beta - 1.0
    return CorrelationMagnitude(T_minus_t ** exponent, exponent, 2.0 * (beta - 0.5))
