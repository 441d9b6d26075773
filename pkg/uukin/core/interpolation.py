"""
Occupations between grid nodes.

The entropy rule is linear in g = ln(1 + c/f). Bose-Einstein data has
g = (ε − μ)/θ, so it reproduces every equilibrium exactly; in the
collision sum it also evaluates f₄ with the same g₄ that the slot-4 credit
carries, which keeps each event's entropy production nonnegative.
"""

from enum import Enum
from typing import Tuple

import numpy as np

from uukin.errors import new_fatal

# extrapolated g below the first node must keep this fraction of g₀
EXTRAPOLATION_FLOOR = 0.5


class InterpolationEnum(int, Enum):
    INTERP_LINEAR = 0   # linear in ε
    INTERP_LOG = 1      # linear in ln f, linear fallback where f = 0
    INTERP_ENTROPY = 2  # linear in ln(1 + c/f), extrapolated below ε₀

    @classmethod
    def from_name(cls, name: str) -> "InterpolationEnum":
        try:
            return cls["INTERP_" + name.upper()]
        except KeyError:
            raise new_fatal(f"unknown interpolation rule '{name}'", {"interpolation": name}) from None


def entropy_variable(values, c: float = 1.0) -> np.ndarray:
    """g = ln(1 + c/f); +inf where f = 0."""
    values = np.asarray(values, dtype=np.float64)
    with np.errstate(divide="ignore"):
        return np.log1p(c / values)


def bracket(nodes: np.ndarray, eps: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Left node index and raw linear weight, negative below the first node and capped at 1."""
    a = np.searchsorted(nodes, eps, side="right") - 1
    a = np.clip(a, 0, nodes.size - 2)
    theta = (eps - nodes[a]) / (nodes[a + 1] - nodes[a])
    return a, np.minimum(theta, 1.0)


def reconstruct(
    values: np.ndarray,
    a: np.ndarray,
    theta: np.ndarray,
    rule: InterpolationEnum,
    c: float = 1.0,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Occupations at bracketed points and the weight each one actually used.

    Only the entropy rule extrapolates (weight < 0) below the first node,
    and only while g stays above EXTRAPOLATION_FLOOR·g₀; everywhere else the
    weight is clipped at 0. Brackets with an empty node fall back to linear f.
    """
    fa = values[a]
    fb = values[a + 1]
    clipped = np.maximum(theta, 0.0)
    linear = (1.0 - clipped) * fa + clipped * fb
    if rule == InterpolationEnum.INTERP_LINEAR:
        return linear, clipped

    positive = (fa > 0.0) & (fb > 0.0)
    if rule == InterpolationEnum.INTERP_LOG:
        with np.errstate(divide="ignore", invalid="ignore"):
            logf = np.exp((1.0 - clipped) * np.log(fa) + clipped * np.log(fb))
        return np.where(positive, logf, linear), clipped

    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        ga = entropy_variable(fa, c)
        gb = entropy_variable(fb, c)
        extrapolated = (1.0 - theta) * ga + theta * gb
        keep = (theta >= 0.0) | (extrapolated >= EXTRAPOLATION_FLOOR * ga)
        weight = np.where(positive & keep, theta, clipped)
        g = (1.0 - weight) * ga + weight * gb
        f = c / np.expm1(g)
    return np.where(positive, f, linear), weight
