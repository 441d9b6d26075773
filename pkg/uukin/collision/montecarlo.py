"""
Monte-Carlo evaluation of the full collision integral at one momentum.

With P = p₁ + p₂ the two deltas leave p₃,₄ = P/2 ± k n, k = |p₁ − p₂|/2,
and the integral over p₃, p₄ becomes (k/4)∫dΩ_n. The estimator samples
p₂ uniformly in the ball |p₂|² ≤ ε_max and n uniformly on the sphere:

    ∂f/∂t(p₁) ≈ 4π · V_ball · 4π · (k/4) · q · 1[ε₃, ε₄ ≤ ε_max]

Samples are drawn in fixed batches; batch b uses the counter-based stream
Philox(key=seed) jumped b + 1 times, so the estimate does not depend on how
batches are scheduled over threads.
"""

import logging
import math
from dataclasses import dataclass
from functools import partial
from typing import Optional, Tuple

import numpy as np

from uukin.core.distribution import DistributionIso
from uukin.core.interpolation import InterpolationEnum
from uukin.core.workers import ordered_map
from uukin.errors import new_fatal

from .operator import q_factor

logger = logging.getLogger(__name__)

BATCH_SIZE = 1 << 16
MIN_SAMPLES = 1000


@dataclass(frozen=True)
class MonteCarloEstimate:
    estimate: float
    standard_error: float
    n_samples: int
    seed: int

    def __iter__(self):
        yield self.estimate
        yield self.standard_error


def _unit_vectors(rng: np.random.Generator, n: int) -> np.ndarray:
    v = rng.standard_normal((n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def _batch(
    index_and_size: Tuple[int, int],
    f: DistributionIso,
    p1: float,
    seed: int,
    c: float,
    rule: InterpolationEnum,
):
    index, size = index_and_size
    rng = np.random.Generator(np.random.Philox(key=seed).jumped(index + 1))
    eps_max = f.grid.eps_max
    radius = math.sqrt(eps_max)

    p2 = _unit_vectors(rng, size) * (radius * np.cbrt(rng.random(size)))[:, None]
    n = _unit_vectors(rng, size)
    p1v = np.array([0.0, 0.0, p1])

    total = p1v + p2
    k = 0.5 * np.linalg.norm(p1v - p2, axis=1)
    p3 = 0.5 * total + k[:, None] * n
    p4 = 0.5 * total - k[:, None] * n

    e2 = np.einsum("ij,ij->i", p2, p2)
    e3 = np.einsum("ij,ij->i", p3, p3)
    e4 = np.einsum("ij,ij->i", p4, p4)
    inside = (e3 <= eps_max) & (e4 <= eps_max)

    f1, f2, f3, f4 = (f.interpolate(e, c, rule) for e in (p1 * p1, e2, e3, e4))
    q = q_factor(f1, f2, f3, f4, c)
    volume = 4.0 / 3.0 * math.pi * radius ** 3
    w = np.where(inside, (4.0 * math.pi) * volume * (4.0 * math.pi) * 0.25 * k * q, 0.0)
    return float(w.sum()), float(np.dot(w, w))


def collision_mc(
    f: DistributionIso,
    p1: float,
    n_samples: int,
    seed: int,
    c: float = 1.0,
    threads: Optional[int] = None,
    interpolation: InterpolationEnum = InterpolationEnum.INTERP_ENTROPY,
) -> MonteCarloEstimate:
    """
    Unbiased estimate of df/dt at momentum magnitude ``p1`` and its standard error.

    f is read between nodes with ``interpolation``, the rule the grid
    operator uses for ε₄.
    """
    if n_samples < MIN_SAMPLES:
        raise new_fatal(f"n_samples must be >= {MIN_SAMPLES}", {"n_samples": n_samples})
    if not (p1 >= 0.0 and p1 * p1 <= f.grid.eps_max):
        raise new_fatal("p1 outside grid support", {"p1": p1, "eps_max": f.grid.eps_max})
    if seed < 0:
        raise new_fatal("seed must be nonnegative", {"seed": seed})

    sizes = [BATCH_SIZE] * (n_samples // BATCH_SIZE)
    if n_samples % BATCH_SIZE:
        sizes.append(n_samples % BATCH_SIZE)
    parts = ordered_map(
        partial(_batch, f=f, p1=p1, seed=seed, c=c, rule=interpolation),
        list(enumerate(sizes)),
        threads,
    )

    s1 = 0.0
    s2 = 0.0
    for a, b in parts:
        s1 += a
        s2 += b
    mean = s1 / n_samples
    var = max(s2 / n_samples - mean * mean, 0.0) * n_samples / (n_samples - 1)
    stderr = math.sqrt(var / n_samples)
    logger.debug("collision_mc p1=%g n=%d: %.6g ± %.3g", p1, n_samples, mean, stderr)
    return MonteCarloEstimate(mean, stderr, n_samples, seed)
