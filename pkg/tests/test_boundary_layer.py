"""
Tests para las escalas de la capa límite y la jerarquía truncada
"""

import numpy as np
import pytest

from uukin.boundary_layer import (
    HierarchyState,
    asymptotic_data,
    asymptotic_wigner,
    bl_rhs_truncated,
    correlation_magnitude,
    correlation_onset_time,
    evolve_hierarchy,
    inverse_wigner,
    physical_scales,
    source_scaling_study,
    time_exponent,
    wigner_form,
)
from uukin.core import HBAR, PhysicalParams
from uukin.dynamics import ansatz_profile
from uukin.errors import DomainError


@pytest.fixture(scope="module")
def profile():
    return ansatz_profile(1.069)


def test_scale_exponents():
    print("\n🧪 Testing boundary-layer exponents...")

    assert time_exponent(1.069) == pytest.approx(0.63734, abs=1e-5)
    assert correlation_onset_time(0.01) == pytest.approx(0.01 ** (2.0 / 3.138), rel=1e-14)
    assert correlation_onset_time(0.01) == pytest.approx(0.05316, rel=1e-3)
    print("  ✅ PASS: onset exponent and T − t at ε = 0.01")

    with pytest.raises(DomainError):
        correlation_onset_time(0.0)
    with pytest.raises(DomainError):
        correlation_onset_time(0.01, beta=-1.0)
    print("  ✅ PASS: ε = 0 and negative β rejected")

    magnitude = correlation_magnitude(0.1)
    assert magnitude.exponent == pytest.approx(1.138)
    assert magnitude.exponents_match
    print("  ✅ PASS: |G| and |F₁|² share the exponent 2β − 1")


def test_physical_scales():
    print("\n🧪 Testing physical_scales...")

    unit = PhysicalParams(mass=1e-25, scattering_length=1e-7, de_broglie=1e-7, interparticle=1e-7)
    scales = physical_scales(unit)
    assert scales.diluteness == pytest.approx(1.0)
    assert scales.time == pytest.approx(2.0 * 1e-25 * 1e-14 / HBAR, rel=1e-12)
    assert scales.momentum == pytest.approx(HBAR / 1e-7, rel=1e-12)
    assert scales.length == pytest.approx(1e-7, rel=1e-12)
    print("  ✅ PASS: unit base reduces to the prefactors")

    assert -scales.physical_time_exponent == pytest.approx(1.36265, abs=1e-5)
    assert scales.momentum_exponent == pytest.approx(0.68133, abs=1e-5)
    print("  ✅ PASS: layer exponents at β = 1.069")

    rb = physical_scales(PhysicalParams(mass=1.44e-25, scattering_length=5.3e-9,
                                        de_broglie=4e-7, interparticle=4e-7))
    assert rb.momentum * rb.length == pytest.approx(HBAR, rel=1e-12)
    assert rb.momentum_exact * rb.length_exact == pytest.approx(HBAR, rel=1e-12)
    assert rb.time > 0 and rb.time_exact < rb.time
    print("  ✅ PASS: p·x = ħ for both variants")


def test_asymptotic_data(profile):
    print("\n🧪 Testing asymptotic_data...")

    state = asymptotic_data(profile, -2.0, n=8)
    psi0 = profile.psi_at(np.array([0.0]))[0]
    assert state.density == pytest.approx(2.0 ** (1.069 - 0.5) * psi0, rel=1e-12)
    assert np.all(state.g == 0.0)
    assert np.allclose(state.h, state.h[(-np.arange(8)) % 8])
    print("  ✅ PASS: matched H₁ with G ≡ 0")

    with pytest.raises(DomainError):
        asymptotic_data(profile, -0.5, n=8)
    with pytest.raises(DomainError):
        asymptotic_data(profile, -2.0, n=7)
    print("  ✅ PASS: τ₀ above threshold and odd grids rejected")


def test_bl_rhs_truncated(profile):
    print("\n🧪 Testing bl_rhs_truncated...")

    empty = HierarchyState(-2.0, 0.5, np.zeros(8), np.zeros((8, 8, 8)))
    dh, dg = bl_rhs_truncated(empty)
    assert np.all(dh == 0.0) and np.all(dg == 0.0)
    print("  ✅ PASS: H₁ = G = 0 is stationary")

    state = asymptotic_data(profile, -2.0, n=8)
    dh, dg = bl_rhs_truncated(state)
    assert dh[0] == 0.0
    assert np.abs(dg).max() > 0.0
    print("  ✅ PASS: density rate vanishes, matched data sources G")

    with pytest.raises(DomainError):
        HierarchyState(-2.0, 0.5, np.zeros(8), np.zeros((4, 4, 4)))
    print("  ✅ PASS: mismatched cumulant shape rejected")


def test_evolve_hierarchy(profile):
    print("\n🧪 Testing evolve_hierarchy...")

    state = asymptotic_data(profile, -2.0, n=8)
    seen = []
    run = evolve_hierarchy(state, -1.9, 0.025, snapshot_every=2, on_snapshot=lambda i, s: seen.append(i))
    assert len(run.states) == 3 and seen == [1, 2]
    assert run.final.tau == pytest.approx(-1.9)
    assert run.density_drift < 1e-15
    assert run.cumulant_norms[0] == 0.0 and run.cumulant_norms[-1] > 0.0
    assert run.final.symmetry_error() <= 1e-8 * float(np.abs(run.final.g).max())
    assert not run.warnings
    print(f"  ✅ PASS: density kept, |G| grew to {run.cumulant_norms[-1]:.3e}")

    with pytest.raises(DomainError):
        evolve_hierarchy(state, -2.5, 0.025)
    print("  ✅ PASS: τ_end before τ₀ rejected")


def test_wigner_form(profile):
    print("\n🧪 Testing the Wigner transform...")

    state = asymptotic_data(profile, -2.0, n=8)
    state.g = np.random.default_rng(11).normal(size=(8, 8, 8)) * 1e-3
    form = wigner_form(state)
    back = inverse_wigner(form, state.tau)
    assert np.allclose(back.h, state.h, rtol=1e-12, atol=1e-14)
    assert np.allclose(back.g, state.g, rtol=1e-12, atol=1e-14)
    print("  ✅ PASS: inverse transform recovers H₁ and G")

    dk = 2.0 * np.pi / (state.n * state.dx)
    lhs = float(np.sum(np.abs(state.h) ** 2) * state.dx)
    rhs = float(2.0 * np.pi * np.sum(np.abs(form.phi1) ** 2) * dk)
    assert lhs == pytest.approx(rhs, rel=1e-12)
    assert form.imag_ratio < 1e-12
    print("  ✅ PASS: Parseval and a real transform of even data")

    ref = asymptotic_wigner(profile, -2.0, form.momenta)
    assert ref.shape == form.momenta.shape and np.all(np.isfinite(ref))
    with pytest.raises(DomainError):
        asymptotic_wigner(profile, 0.5, form.momenta)
    print("  ✅ PASS: slice reference on the FFT momenta")


def test_source_scaling(profile):
    print("\n🧪 Testing source_scaling_study...")

    study = source_scaling_study(profile, [-2.0, -20.0, -200.0, -2000.0], n=8)
    assert study.predicted == pytest.approx(3.0 * 1.069 - 1.5)
    assert study.relative_error < 0.1
    assert study.slope == pytest.approx(study.predicted, rel=1e-6)
    print(f"  ✅ PASS: slope {study.slope:.4f} against {study.predicted:.4f}")

    # dG/dτ → 0 in co-moving units over three decades of τ₀
    assert np.all(np.diff(study.comoving_rates) < 0.0)
    assert study.comoving_rates[-1] < 1e-3 * study.comoving_rates[0]
    assert study.comoving_predicted == pytest.approx(-1.069 - 0.5)
    assert study.comoving_slope == pytest.approx(study.comoving_predicted, rel=1e-6)
    print(f"  ✅ PASS: co-moving slope {study.comoving_slope:.4f}")

    with pytest.raises(DomainError):
        source_scaling_study(profile, [-2.0], n=8)
    print("  ✅ PASS: a single τ₀ is not a study")


if __name__ == "__main__":
    print("=" * 60)
    print("Testing Boundary Layer")
    print("=" * 60)

    test_scale_exponents()
    test_physical_scales()

    print("\n" + "=" * 60)
    print("✅ All boundary layer tests passed!")
    print("=" * 60)
