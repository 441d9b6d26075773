"""
Truncated boundary-layer hierarchy on a periodic separation axis.

The state is translation invariant. H₁(X; Y) = h(X − Y) is stored on N
points r_j = m_j Δx (m_j in FFT order). The pair cumulant
G(X₁, X₂; Y₁, Y₂) = H₂ − H₁(X₁,Y₁)H₁(X₂,Y₂) − H₁(X₁,Y₂)H₁(X₂,Y₁) is stored as
g[a, b, c] with a = X₁ − Y₂, b = X₂ − Y₂, c = Y₁ − Y₂ (indices mod N).

The three-particle function is closed by discarding its cumulant: H₃ is the
sum of the six H₁ products plus the nine G·H₁ terms.
"""

import logging
import math
from dataclasses import dataclass, field
from itertools import permutations
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from uukin.core.workers import chunk_ranges, ordered_map
from uukin.dynamics.blowup import SelfSimilarProfile
from uukin.errors import CODE_NUMERICAL, ErrorList, new_fatal, new_warning

logger = logging.getLogger(__name__)

CLOSURE = "cumulant-discard-3"
DEFAULT_POINTS = 32
TAU_THRESHOLD = -1.0
SLAB = 8


@dataclass
class HierarchyState:
    tau: float
    dx: float
    h: np.ndarray
    g: np.ndarray
    closure: str = CLOSURE

    def __post_init__(self):
        self.h = np.asarray(self.h, dtype=np.complex128)
        self.g = np.asarray(self.g, dtype=np.complex128)
        n = self.h.size
        if self.h.ndim != 1 or n < 4 or n % 2:
            raise new_fatal("separation grid needs an even number of points >= 4", {"n": n})
        if self.g.shape != (n, n, n):
            raise new_fatal("cumulant shape does not match the separation grid",
                            {"shape": list(self.g.shape), "n": n})
        if not self.dx > 0:
            raise new_fatal("grid spacing must be positive", {"dx": self.dx})

    @property
    def n(self) -> int:
        return self.h.size

    @property
    def separations(self) -> np.ndarray:
        return self.dx * _offsets(self.n)

    @property
    def density(self) -> complex:
        """H₁ at coincidence."""
        return complex(self.h[0])

    def copy(self) -> "HierarchyState":
        return HierarchyState(self.tau, self.dx, self.h.copy(), self.g.copy(), self.closure)

    def symmetry_error(self) -> float:
        """sup |G(X₁,X₂;Y₁,Y₂) − G(X₂,X₁;Y₂,Y₁)|, i.e. g[a,b,c] against g[b−c, a−c, −c]."""
        n = self.n
        a, b, c = np.ix_(np.arange(n), np.arange(n), np.arange(n))
        swapped = self.g[(b - c) % n, (a - c) % n, (-c) % n]
        return float(np.abs(self.g - swapped).max(initial=0.0))

    def validate(self):
        if not (np.all(np.isfinite(self.h)) and np.all(np.isfinite(self.g))):
            raise new_fatal("closure produced non-finite values",
                            {"tau": self.tau, "closure": self.closure}, code=CODE_NUMERICAL)


def _offsets(n: int) -> np.ndarray:
    return np.rint(np.fft.fftfreq(n) * n).astype(np.int64)


def _wavenumbers(n: int, dx: float) -> np.ndarray:
    return 2.0 * np.pi * np.fft.fftfreq(n, d=dx)


def _symbol(n: int, dx: float) -> np.ndarray:
    """
    k₁² + k₂² − k₃² − k₄², the Laplacian part of the pair equation.

    k₄ is the grid frequency of k₁ + k₂ + k₃ (wrapped into the FFT range),
    which keeps the symbol invariant under the pair exchange.
    """
    m = _offsets(n)
    m1, m2, m3 = np.ix_(m, m, m)
    m4 = (m1 + m2 + m3 + n // 2) % n - n // 2
    unit = 2.0 * np.pi / (n * dx)
    return unit ** 2 * (m1 ** 2 + m2 ** 2 - m3 ** 2 - m4 ** 2).astype(np.float64)


def asymptotic_data(
    profile: SelfSimilarProfile,
    tau0: float,
    n: int = DEFAULT_POINTS,
    dy: Optional[float] = None,
    tau_threshold: float = TAU_THRESHOLD,
) -> HierarchyState:
    """
    Matched data H₁(r, τ₀) = (−τ₀)^{β−1/2} Ψ(r(−τ₀)^β) with G ≡ 0.

    The grid is co-moving: Δx = Δy/(−τ₀)^β, so the rescaled samples
    Ψ(m Δy) are the same for every τ₀. Δy defaults to the widest spacing
    the profile resolves; a ResolutionError is raised past that range.
    """
    if not tau0 <= tau_threshold:
        raise new_fatal("tau0 is not negative enough for matched data",
                        {"tau0": tau0, "threshold": tau_threshold})
    if n < 4 or n % 2:
        raise new_fatal("separation grid needs an even number of points >= 4", {"n": n})
    beta = profile.beta
    if dy is None:
        dy = profile.y_max / (n // 2) * (1.0 - 1e-12)
    stretch = (-tau0) ** beta
    y = dy * _offsets(n)
    h = (-tau0) ** (beta - 0.5) * profile.psi_at(np.abs(y))
    return HierarchyState(tau0, dy / stretch, h.astype(np.complex128), np.zeros((n, n, n), dtype=np.complex128))


class _Closure:
    """Index-space evaluation of the closed three-particle terms."""

    def __init__(self, h: np.ndarray, g: np.ndarray):
        self.h = h
        self.g = g
        self.n = h.size

    def H1(self, x, y):
        return self.h[(x - y) % self.n]

    def G(self, x1, x2, y1, y2):
        n = self.n
        return self.g[(x1 - y2) % n, (x2 - y2) % n, (y1 - y2) % n]

    def H3(self, x: Sequence, y: Sequence, shape) -> np.ndarray:
        total = np.zeros(shape, dtype=np.complex128)
        for s in permutations(range(3)):
            total += self.H1(x[s[0]], y[0]) * self.H1(x[s[1]], y[1]) * self.H1(x[s[2]], y[2])
        for i in range(3):
            xr = [x[m] for m in range(3) if m != i]
            for j in range(3):
                yr = [y[m] for m in range(3) if m != j]
                total += self.H1(x[i], y[j]) * self.G(xr[0], xr[1], yr[0], yr[1])
        return total

    def coincidence_rate(self) -> np.ndarray:
        """i dh/dτ(r) = G(X,X;Y,X) − G(X,Y;Y,Y) at r = X − Y, index form."""
        r = np.arange(self.n)
        return self.g[0, 0, (-r) % self.n] - self.g[r, 0, 0]

    def pair_source(self, lo: int, hi: int, s: np.ndarray) -> np.ndarray:
        """A₂[H₃] − i∂τ(H₁H₁ products) on the slab a ∈ [lo, hi)."""
        n = self.n
        X1 = np.arange(lo, hi)[:, None, None]
        X2 = np.arange(n)[None, :, None]
        Y1 = np.arange(n)[None, None, :]
        Y2 = 0
        shape = (hi - lo, n, n)
        a2 = (self.H3((X1, X2, X1), (Y1, Y2, X1), shape)
              - self.H3((X1, X2, Y1), (Y1, Y2, Y1), shape)
              + self.H3((X1, X2, X2), (Y1, Y2, X2), shape)
              - self.H3((X1, X2, Y2), (Y1, Y2, Y2), shape))

        def S(x, y):
            return s[(x - y) % n]

        products = (S(X1, Y1) * self.H1(X2, Y2) + self.H1(X1, Y1) * S(X2, Y2)
                    + S(X1, Y2) * self.H1(X2, Y1) + self.H1(X1, Y2) * S(X2, Y1))
        return a2 - products


def _nonlinear(state: HierarchyState, threads: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
    """(dh/dτ, nonlinear part of dg/dτ); the Laplacian term is left out."""
    closure = _Closure(state.h, state.g)
    s = closure.coincidence_rate()
    slabs = ordered_map(lambda r: closure.pair_source(r[0], r[1], s), chunk_ranges(state.n, SLAB), threads)
    return -1j * s, -1j * np.concatenate(slabs, axis=0)


def bl_rhs_truncated(state: HierarchyState, threads: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    (dh/dτ, dg/dτ) of the closed k ≤ 2 system.

    i∂τH₁ has no Laplacian part for a homogeneous state; i∂τG carries the
    spectral Laplacian term, the A₂ coupling through the closed H₃, and minus
    the time derivative of the H₁ products.
    """
    state.validate()
    dh, dg = _nonlinear(state, threads)
    dg = dg - 1j * np.fft.ifftn(_symbol(state.n, state.dx) * np.fft.fftn(state.g))
    if not (np.all(np.isfinite(dh)) and np.all(np.isfinite(dg))):
        raise new_fatal("closure produced non-finite values",
                        {"tau": state.tau, "closure": state.closure}, code=CODE_NUMERICAL)
    return dh, dg


@dataclass
class HierarchyRun:
    states: List[HierarchyState] = field(default_factory=list)
    density_drift: float = 0.0
    warnings: ErrorList = field(default_factory=list)

    @property
    def final(self) -> HierarchyState:
        return self.states[-1]

    @property
    def cumulant_norms(self) -> np.ndarray:
        return np.array([np.abs(s.g).max() for s in self.states])


def evolve_hierarchy(
    state: HierarchyState,
    tau_end: float,
    dtau: float,
    snapshot_every: int = 1,
    threads: Optional[int] = None,
    on_snapshot: Optional[Callable[[int, HierarchyState], None]] = None,
) -> HierarchyRun:
    """
    Integrating-factor (Lawson) RK4: the Laplacian phase e^{−iL̂Δτ} of the
    pair cumulant is applied exactly, the closure terms by RK4.
    """
    if not tau_end > state.tau:
        raise new_fatal("tau_end must be later than the state time", {"tau": state.tau, "tau_end": tau_end})
    if not dtau > 0:
        raise new_fatal("dtau must be positive", {"dtau": dtau})
    steps = max(1, int(math.ceil((tau_end - state.tau) / dtau - 1e-9)))
    h = (tau_end - state.tau) / steps
    symbol = _symbol(state.n, state.dx)
    half = np.exp(-0.5j * symbol * h)
    full = half * half

    def phase(g, factor):
        return np.fft.ifftn(factor * np.fft.fftn(g))

    run = HierarchyRun()
    current = state.copy()
    run.states.append(current.copy())
    rho0 = current.density
    tau0 = state.tau
    for k in range(steps):
        u_h, u_g = current.h, current.g
        k1h, k1g = _nonlinear(current, threads)
        a = HierarchyState(current.tau, current.dx, u_h + 0.5 * h * k1h, phase(u_g + 0.5 * h * k1g, half))
        k2h, k2g = _nonlinear(a, threads)
        g_half = phase(u_g, half)
        b = HierarchyState(current.tau, current.dx, u_h + 0.5 * h * k2h, g_half + 0.5 * h * k2g)
        k3h, k3g = _nonlinear(b, threads)
        c = HierarchyState(current.tau, current.dx, u_h + h * k3h, phase(u_g, full) + h * phase(k3g, half))
        k4h, k4g = _nonlinear(c, threads)

        new_h = u_h + h / 6.0 * (k1h + 2.0 * k2h + 2.0 * k3h + k4h)
        new_g = (phase(u_g, full)
                 + h / 6.0 * (phase(k1g, full) + 2.0 * phase(k2g + k3g, half) + k4g))
        current = HierarchyState(tau0 + (k + 1) * h, current.dx, new_h, new_g, current.closure)
        current.validate()
        if (k + 1) % snapshot_every == 0 or k + 1 == steps:
            run.states.append(current.copy())
            if on_snapshot is not None:
                on_snapshot(len(run.states) - 1, current)

    run.density_drift = abs(current.density - rho0) / max(abs(rho0), 1e-300)
    if run.final.symmetry_error() > 1e-8 * max(float(np.abs(run.final.g).max(initial=0.0)), 1e-300):
        run.warnings.append(new_warning("pair cumulant lost its exchange symmetry",
                                        {"tau": current.tau, "error": run.final.symmetry_error()}))
    for w in run.warnings:
        logger.warning(str(w))
    logger.info("hierarchy evolved to tau=%.6g in %d steps (closure %s)", current.tau, steps, current.closure)
    return run


@dataclass
class WignerForm:
    """φ₁(P) of the separation slice and the reduced-coordinate transform of G."""
    momenta: np.ndarray
    phi1: np.ndarray
    phi2: np.ndarray
    dx: float

    @property
    def imag_ratio(self) -> float:
        scale = max(float(np.abs(self.phi1).max(initial=0.0)), 1e-300)
        return float(np.abs(self.phi1.imag).max(initial=0.0)) / scale


def wigner_form(state: HierarchyState) -> WignerForm:
    """
    φ₁(P) = (1/2π) Σ_j Δx e^{−iP r_j} h(r_j) on the FFT momenta, and
    φ₂ = (Δx/2π)³ times the 3-D transform of g.
    """
    scale = state.dx / (2.0 * np.pi)
    return WignerForm(
        momenta=_wavenumbers(state.n, state.dx),
        phi1=scale * np.fft.fft(state.h),
        phi2=scale ** 3 * np.fft.fftn(state.g),
        dx=state.dx,
    )


def inverse_wigner(form: WignerForm, tau: float = 0.0) -> HierarchyState:
    scale = form.dx / (2.0 * np.pi)
    return HierarchyState(
        tau=tau,
        dx=form.dx,
        h=np.fft.ifft(form.phi1) / scale,
        g=np.fft.ifftn(form.phi2) / scale ** 3,
    )


def asymptotic_wigner(profile: SelfSimilarProfile, tau: float, momenta) -> np.ndarray:
    """
    Slice reference (−τ)^{−1/2} (2π)³ M(P/(−τ)^β), M the marginal of Φ
    over the two transverse momenta.
    """
    if not tau < 0:
        raise new_fatal("tau must be negative", {"tau": tau})
    s = (-tau) ** profile.beta
    return (-tau) ** (-0.5) * (2.0 * np.pi) ** 3 * profile.marginal(np.asarray(momenta) / s)


@dataclass(frozen=True)
class SourceScaling:
    """
    Initial cumulant growth at matched data.

    ``rates`` is sup|dG/dτ| as computed. ``comoving_rates`` divides it by the
    factorized pair scale |H₁|² ∝ (−τ₀)^{2β−1} and by the transport rate of
    the co-moving grid, (−τ₀)^{2β}; this is the quantity that vanishes as
    τ₀ → −∞.
    """
    tau0: np.ndarray
    rates: np.ndarray
    slope: float
    predicted: float
    stderr: float
    comoving_rates: np.ndarray
    comoving_slope: float
    comoving_predicted: float

    @property
    def relative_error(self) -> float:
        return abs(self.slope - self.predicted) / abs(self.predicted)

    @property
    def comoving_relative_error(self) -> float:
        return abs(self.comoving_slope - self.comoving_predicted) / abs(self.comoving_predicted)

    def to_dict(self) -> dict:
        return {
            "tau0": self.tau0.tolist(),
            "rates": self.rates.tolist(),
            "slope": self.slope,
            "predicted": self.predicted,
            "stderr": self.stderr,
            "relative_error": self.relative_error,
            "comoving_rates": self.comoving_rates.tolist(),
            "comoving_slope": self.comoving_slope,
            "comoving_predicted": self.comoving_predicted,
            "comoving_relative_error": self.comoving_relative_error,
        }


def source_scaling_study(
    profile: SelfSimilarProfile,
    tau0_list: Sequence[float],
    n: int = DEFAULT_POINTS,
    dy: Optional[float] = None,
    tau_threshold: float = TAU_THRESHOLD,
    threads: Optional[int] = None,
) -> SourceScaling:
    """
    Initial cumulant growth rate sup|dG/dτ| at τ₀ from matched data, with the
    log-log slope against (−τ₀). Three H₁ factors of amplitude (−τ₀)^{β−1/2}
    predict the slope 3β − 3/2; in co-moving units the slope is −β − 1/2.
    """
    if len(tau0_list) < 2:
        raise new_fatal("need at least two tau0 values", {"count": len(tau0_list)})
    beta = profile.beta
    taus = np.asarray(tau0_list, dtype=np.float64)
    rates = []
    for tau0 in taus:
        state = asymptotic_data(profile, float(tau0), n, dy, tau_threshold)
        _, dg = bl_rhs_truncated(state, threads)
        rates.append(float(np.abs(dg).max()))
    rates = np.asarray(rates)
    comoving = rates * (-taus) ** (1.0 - 4.0 * beta)
    fit = stats.linregress(np.log(-taus), np.log(rates))
    cfit = stats.linregress(np.log(-taus), np.log(comoving))
    result = SourceScaling(
        tau0=taus,
        rates=rates,
        slope=float(fit.slope),
        predicted=3.0 * beta - 1.5,
        stderr=float(fit.stderr),
        comoving_rates=comoving,
        comoving_slope=float(cfit.slope),
        comoving_predicted=-beta - 0.5,
    )
    logger.info("source scaling: slope %.4f (predicted %.4f), co-moving %.4f (predicted %.4f)",
                result.slope, result.predicted, result.comoving_slope, result.comoving_predicted)
    return result
