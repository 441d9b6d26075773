"""
Tests para el operador de colisión, el oráculo Monte-Carlo y los momentos
"""

import math

import numpy as np
import pytest

from uukin.collision import (
    CollisionConfig,
    InterpolationEnum,
    collision_mc,
    collision_rhs_iso,
    critical_number,
    entropy_production,
    equilibrium,
    fit_equilibrium,
    is_supercritical,
    moments,
    q_factor,
)
from uukin.core import DistributionIso, RadialGrid, ThetaProfile, initial_bose
from uukin.errors import DomainError

# absolute floor for sums that vanish in exact arithmetic
ROUNDOFF = 1e-8
BUMP = ThetaProfile.from_name("exp_poly", poly_a=2.0, scale=0.5)


@pytest.fixture
def small_grid():
    return RadialGrid.geometric(48, 1e-3, 20.0)


def test_q_factor():
    print("\n🧪 Testing q_factor...")

    assert q_factor(1.0, 2.0, 3.0, 4.0, 1.0) == 32.0
    assert q_factor(0.7, 0.7, 0.7, 0.7, 1.0) == 0.0
    assert q_factor(0.0, 0.0, 0.0, 0.0, 1.0) == 0.0
    print("  ✅ PASS: hand values")

    f = (0.3, 1.7, 0.2, 2.5)
    q = q_factor(*f, 1.3)
    assert q_factor(f[2], f[3], f[0], f[1], 1.3) == pytest.approx(-q, rel=1e-14)
    assert q_factor(f[1], f[0], f[3], f[2], 1.3) == pytest.approx(q, rel=1e-14)
    print("  ✅ PASS: pair antisymmetry and in-pair symmetry")

    def be(eps):
        return 1.0 / math.expm1(eps + 0.5)

    assert abs(q_factor(be(2.0), be(0.0), be(1.0), be(1.0), 1.0)) < 1e-12
    print("  ✅ PASS: detailed balance on the energy shell")


def test_collision_config():
    print("\n🧪 Testing CollisionConfig validation...")

    with pytest.raises(DomainError):
        CollisionConfig(occupancy_c=0.0)
    with pytest.raises(DomainError):
        CollisionConfig(quadrature_order=1)
    print("  ✅ PASS: invalid settings raise DomainError")


def test_rate_conservation(small_grid):
    print("\n🧪 Testing collision_rhs_iso conservation...")

    zero = collision_rhs_iso(DistributionIso.zeros(small_grid))
    assert np.all(zero.values == 0.0)
    print("  ✅ PASS: f ≡ 0 gives a zero rate")

    f = initial_bose(0.3, BUMP, small_grid)
    rate = collision_rhs_iso(f)
    scale = small_grid.number(np.abs(rate.values))
    assert scale > 0
    assert abs(rate.number_rate) <= 1e-10 * scale
    assert abs(rate.energy_rate) <= 1e-10 * small_grid.energy(np.abs(rate.values))
    print("  ✅ PASS: discrete number and energy are conserved")

    single = collision_rhs_iso(f, CollisionConfig(threads=1))
    multi = collision_rhs_iso(f, CollisionConfig(threads=3))
    assert np.array_equal(single.values, multi.values)
    print("  ✅ PASS: rate independent of thread count")


def test_detailed_balance():
    print("\n🧪 Testing detailed balance on equilibrium data...")

    for n in (64, 256):
        grid = RadialGrid.geometric(n, 1e-4, 1e2)
        rate = collision_rhs_iso(equilibrium(1.0, -0.5, 1.0, grid))
        assert rate.max_abs <= 1e-6
        print(f"  ✅ PASS: n={n}, sup|C[f_eq]| = {rate.max_abs:.1e}")

    grid = RadialGrid.uniform(64, 0.0, 20.0)
    eq = equilibrium(0.7, -0.2, 2.0, grid)
    assert collision_rhs_iso(eq, CollisionConfig(occupancy_c=2.0)).max_abs <= 1e-6 * eq.max
    print("  ✅ PASS: uniform grid with c = 2")

    # z e^{-ε/s} profiles are equilibria with θ = s and μ = s ln z
    grid = RadialGrid.geometric(96, 1e-4, 50.0)
    f = initial_bose(0.9, ThetaProfile.from_name("exp", scale=0.5), grid)
    assert collision_rhs_iso(f).max_abs <= 1e-6 * f.max
    print("  ✅ PASS: exp initial data is stationary")


def test_linear_rule_convergence():
    print("\n🧪 Testing equilibrium residual of the linear rule...")

    linear = CollisionConfig(interpolation=InterpolationEnum.INTERP_LINEAR)
    sup = {}
    for n in (128, 256):
        grid = RadialGrid.geometric(n, 1e-4, 1e2)
        sup[n] = collision_rhs_iso(equilibrium(1.0, -0.5, 1.0, grid), linear).max_abs
    assert sup[256] > 1e-4
    assert sup[128] / sup[256] >= 4.0
    print(f"  ✅ PASS: residual {sup[128]:.3e} -> {sup[256]:.3e}, second order")


def test_h_theorem(small_grid):
    print("\n🧪 Testing entropy production on random data...")

    rng = np.random.default_rng(2024)
    nodes = small_grid.nodes
    for _ in range(12):
        values = rng.uniform(0.05, 3.0, nodes.size) * np.exp(-nodes / rng.uniform(0.5, 3.0))
        f = DistributionIso(small_grid, values)
        rate = collision_rhs_iso(f)
        scale = small_grid.number(np.abs(np.log1p(1.0 / values) * rate.values))
        assert scale > 0
        assert entropy_production(f, rate) >= -1e-10 * scale
    print("  ✅ PASS: ds/dt >= 0 for 12 random states")


def test_equilibrium():
    print("\n🧪 Testing equilibrium...")

    grid = RadialGrid.uniform(11, 0.0, 10.0)
    eq = equilibrium(1.0, -0.5, 1.0, grid)
    assert eq.values[0] == pytest.approx(1.541494, abs=1e-6)
    assert np.allclose(equilibrium(1.0, -0.5, 2.5, grid).values, 2.5 * eq.values, rtol=1e-15)
    assert equilibrium(1.0, -50.0, 1.0, grid).max < 1e-20
    print("  ✅ PASS: closed form, linearity in c, μ → −∞")

    with pytest.raises(DomainError):
        equilibrium(1.0, 0.0, 1.0, grid)
    print("  ✅ PASS: μ >= 0 rejected")


def test_moments():
    print("\n🧪 Testing moments...")

    grid = RadialGrid.uniform(101, 0.0, 1.0)
    zero = moments(DistributionIso.zeros(grid))
    assert (zero.number, zero.energy, zero.entropy) == (0.0, 0.0, 0.0)
    print("  ✅ PASS: f ≡ 0")

    step = moments(DistributionIso(grid, np.ones(grid.size)))
    assert step.number == pytest.approx(2.0 * np.pi * 2.0 / 3.0, rel=1e-12)
    assert step.entropy == pytest.approx(2.0 * np.pi * 2.0 / 3.0 * 2.0 * math.log(2.0), rel=1e-12)
    print("  ✅ PASS: step function number and entropy")


def _polylog(s, z, terms=400):
    k = np.arange(1, terms + 1)
    return float(np.sum(z ** k / k ** s))


@pytest.mark.parametrize("theta,mu", [(1.0, -0.5), (0.6, -0.1)])
def test_moments_on_equilibrium(theta, mu):
    print(f"\n🧪 Testing equilibrium moments at theta={theta}, mu={mu}...")

    grid = RadialGrid.geometric(256, 1e-4, 1e2)
    m = moments(equilibrium(theta, mu, 1.0, grid))
    z = math.exp(mu / theta)
    number = 2.0 * math.pi * theta ** 1.5 * math.gamma(1.5) * _polylog(1.5, z)
    energy = 2.0 * math.pi * theta ** 2.5 * math.gamma(2.5) * _polylog(2.5, z)
    assert m.number == pytest.approx(number, rel=5e-3)
    assert m.energy == pytest.approx(energy, rel=5e-3)
    # S = (5E/3 − μN)/θ
    assert m.entropy == pytest.approx((5.0 * energy / 3.0 - mu * number) / theta, rel=5e-3)
    assert m.number < critical_number(theta)
    print(f"  ✅ PASS: N = {m.number:.5f}, E = {m.energy:.5f}")


def test_fit_equilibrium():
    print("\n🧪 Testing fit_equilibrium...")

    grid = RadialGrid.geometric(96, 1e-3, 30.0)
    fit = fit_equilibrium(equilibrium(0.8, -0.3, 1.0, grid))
    assert fit.theta == pytest.approx(0.8, rel=1e-5)
    assert fit.mu == pytest.approx(-0.3, rel=1e-5)
    assert fit.residual < 1e-6
    print("  ✅ PASS: (θ, μ) recovered from exact data")


def test_entropy_production():
    print("\n🧪 Testing entropy_production...")

    grid = RadialGrid.geometric(64, 1e-3, 20.0)
    eq = equilibrium(1.0, -0.5, 1.0, grid)
    assert entropy_production(eq, np.zeros(grid.size)) == 0.0
    # ln((1+f)/f) = ε − μ on Bose-Einstein data
    ones = np.ones(grid.size)
    assert entropy_production(eq, ones) == pytest.approx(grid.number(grid.nodes + 0.5), rel=1e-10)
    print("  ✅ PASS: pairing with ln((c+f)/f)")

    values = eq.values.copy()
    values[-1] = 0.0
    assert np.isfinite(entropy_production(DistributionIso(grid, values), ones))
    print("  ✅ PASS: empty nodes are skipped")


def test_supercritical():
    print("\n🧪 Testing supercritical detection...")

    grid = RadialGrid.geometric(128, 1e-4, 50.0)
    eq = equilibrium(1.0, -0.5, 1.0, grid)
    assert not is_supercritical(eq)
    assert is_supercritical(eq.scaled(20.0))
    assert critical_number(1.0) == pytest.approx(2.0 * math.pi * 0.5 * math.sqrt(math.pi) * 2.612375, rel=1e-6)
    print("  ✅ PASS: equilibrium is subcritical, 20x equilibrium is not")


def test_collision_mc():
    print("\n🧪 Testing collision_mc...")

    grid = RadialGrid.geometric(64, 1e-3, 16.0)
    zero = collision_mc(DistributionIso.zeros(grid), 1.0, 2000, seed=1)
    assert zero.estimate == 0.0 and zero.standard_error == 0.0
    print("  ✅ PASS: f ≡ 0 gives (0, 0)")

    f = initial_bose(0.5, ThetaProfile.from_name("exp"), grid)
    a = collision_mc(f, 0.8, 140000, seed=42, threads=1)
    b = collision_mc(f, 0.8, 140000, seed=42, threads=3)
    assert (a.estimate, a.standard_error) == (b.estimate, b.standard_error)
    print("  ✅ PASS: reproducible for a fixed seed across thread counts")

    with pytest.raises(DomainError):
        collision_mc(f, 0.8, 10, seed=1)
    with pytest.raises(DomainError):
        collision_mc(f, 5.0, 2000, seed=1)
    print("  ✅ PASS: sample floor and grid support enforced")


def test_collision_mc_on_equilibrium():
    print("\n🧪 Testing collision_mc on equilibrium data...")

    grid = RadialGrid.geometric(64, 1e-3, 16.0)
    eq = equilibrium(1.0, -0.5, 1.0, grid)
    for i, p1 in enumerate((0.4, 1.0, 2.5)):
        est = collision_mc(eq, p1, 20000, seed=11 + i)
        assert abs(est.estimate) <= 3.0 * est.standard_error + ROUNDOFF
    print("  ✅ PASS: zero within 3 standard errors")


@pytest.mark.slow
def test_collision_mc_agrees_with_quadrature():
    print("\n🧪 Testing collision_rhs_iso against collision_mc...")

    grid = RadialGrid.geometric(256, 1e-4, 1e2)
    profiles = [
        initial_bose(0.5, ThetaProfile.from_name("exp"), grid),
        initial_bose(0.9, ThetaProfile.from_name("exp"), grid),
        initial_bose(0.3, BUMP, grid),
    ]
    for f in profiles:
        rate = collision_rhs_iso(f)
        for i, p1 in enumerate((0.3, 0.6, 1.0, 1.5, 2.0)):
            node = int(np.argmin(np.abs(grid.nodes - p1 * p1)))
            est = collision_mc(f, math.sqrt(grid.nodes[node]), 1_000_000, seed=7 + i)
            det = float(rate.values[node])
            assert abs(det - est.estimate) <= 3.0 * est.standard_error + ROUNDOFF
    print("  ✅ PASS: agreement within 3 standard errors")


if __name__ == "__main__":
    print("=" * 60)
    print("Testing Collision")
    print("=" * 60)

    test_q_factor()
    test_collision_config()
    test_rate_conservation(RadialGrid.geometric(48, 1e-3, 20.0))
    test_detailed_balance()
    test_equilibrium()
    test_moments()
    test_fit_equilibrium()
    test_entropy_production()
    test_supercritical()

    print("\n" + "=" * 60)
    print("✅ All collision tests passed!")
    print("=" * 60)
