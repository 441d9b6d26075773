"""
Physical inputs and their nondimensional counterparts.

Variables follow the kinetic scaling x = λ x̂, p = (ħ/λ) p̂,
t = 2mλ²/(ħ ε²) t̂ with the coupling ε = 8π a λ²/d³.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

from scipy import constants

from uukin.errors import ErrorList, new_fatal, new_warning

logger = logging.getLogger(__name__)

HBAR = constants.hbar
K_B = constants.k

# ε above this strains the weak-coupling assumption a λ²/d³ << 1
WEAK_COUPLING_LIMIT = 0.3
DENSITY_RTOL = 1e-12


@dataclass(frozen=True)
class PhysicalParams:
    """
    Physical description of the gas (SI units).

    Attributes:
        mass: particle mass m (kg)
        scattering_length: s-wave scattering length a (m), a >= 0
        de_broglie: de Broglie length λ (m)
        interparticle: mean interparticle distance d (m)
        density: number density n (m⁻³); when given it must equal d⁻³
        temp_scale: characteristic temperature T (K), informative only
    """
    mass: float
    scattering_length: float
    de_broglie: float
    interparticle: float
    density: Optional[float] = None
    temp_scale: Optional[float] = None

    def __post_init__(self):
        positives = {
            "mass": self.mass,
            "de_broglie": self.de_broglie,
            "interparticle": self.interparticle,
        }
        for name, value in positives.items():
            if not (value > 0 and math.isfinite(value)):
                raise new_fatal(f"{name} must be strictly positive, got {value}", {"field": name})
        if not (self.scattering_length >= 0 and math.isfinite(self.scattering_length)):
            raise new_fatal(
                f"scattering_length must be nonnegative, got {self.scattering_length}",
                {"field": "scattering_length"},
            )
        if self.density is not None:
            expected = self.interparticle ** -3
            if not math.isclose(self.density, expected, rel_tol=DENSITY_RTOL):
                raise new_fatal(
                    "density must equal interparticle**-3",
                    {"density": self.density, "expected": expected},
                )
        if self.temp_scale is not None and not self.temp_scale > 0:
            raise new_fatal(f"temp_scale must be positive, got {self.temp_scale}", {"field": "temp_scale"})

    @classmethod
    def from_temperature(
        cls,
        mass: float,
        scattering_length: float,
        temperature: float,
        density: float,
    ) -> "PhysicalParams":
        """Build parameters from T and n: λ = ħ/√(2 m k_B T), d = n^(-1/3)."""
        if not (temperature > 0 and density > 0 and mass > 0):
            raise new_fatal("temperature, density and mass must be positive")
        de_broglie = HBAR / math.sqrt(2.0 * mass * K_B * temperature)
        interparticle = density ** (-1.0 / 3.0)
        return cls(
            mass=mass,
            scattering_length=scattering_length,
            de_broglie=de_broglie,
            interparticle=interparticle,
            density=interparticle ** -3,
            temp_scale=temperature,
        )

    @property
    def coupling(self) -> float:
        """g = 4π a ħ²/m"""
        return 4.0 * math.pi * self.scattering_length * HBAR ** 2 / self.mass

    @property
    def diluteness(self) -> float:
        """a λ²/d³, the order-of-magnitude form of the coupling."""
        return self.scattering_length * self.de_broglie ** 2 / self.interparticle ** 3


@dataclass(frozen=True)
class NonDimParams:
    """Dimensionless coupling and the scale factors back to SI."""
    epsilon: float
    time_scale: float
    length_scale: float
    momentum_scale: float
    occupancy_c: float
    warnings: ErrorList = field(default_factory=list, compare=False)

    def to_physical_momentum(self, p_hat):
        return p_hat * self.momentum_scale

    def to_dimensionless_momentum(self, p):
        return p / self.momentum_scale

    def to_physical_time(self, t_hat):
        return t_hat * self.time_scale


def nondimensionalize(params: PhysicalParams) -> NonDimParams:
    """
    Compute ε = 8π a λ²/d³ and the scale factors of the kinetic variables.

    a = 0 is accepted (free gas): ε = 0, the time scale is infinite and a
    warning is attached.
    """
    lam = params.de_broglie
    d = params.interparticle
    epsilon = 8.0 * math.pi * params.scattering_length * lam ** 2 / d ** 3
    warnings: ErrorList = []

    if epsilon == 0.0:
        time_scale = math.inf
        warnings.append(new_warning("zero coupling: free gas, kinetic time scale is infinite",
                                    {"epsilon": epsilon}))
    else:
        time_scale = 2.0 * params.mass * lam ** 2 / (HBAR * epsilon ** 2)
        if epsilon >= WEAK_COUPLING_LIMIT:
            warnings.append(new_warning(
                f"epsilon={epsilon:.4g} >= {WEAK_COUPLING_LIMIT}: weak-coupling assumption strained",
                {"epsilon": epsilon},
            ))

    for w in warnings:
        logger.warning(str(w))

    return NonDimParams(
        epsilon=epsilon,
        time_scale=time_scale,
        length_scale=lam,
        momentum_scale=HBAR / lam,
        occupancy_c=(d / (2.0 * math.pi * lam)) ** 3,
        warnings=warnings,
    )
