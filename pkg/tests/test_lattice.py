"""
Tests para la red de momentos, la correlación de pares y los solvers con memoria
"""

import numpy as np
import pytest
import yaml

from uukin.collision import q_factor
from uukin.core import ThetaProfile
from uukin.errors import CapacityError, ConfigError, DomainError, ResolutionError
from uukin.lattice import (
    DistributionLattice,
    KernelMode,
    Lattice3,
    LatticeHistory,
    PairCorrelation,
    initial_bose_lattice,
    kernel_parameter,
    markovian_limit_study,
    phi_closed_form,
    phi_from_history,
    quad_q,
    read_checkpoint,
    rhs_coupled,
    rhs_markovian,
    rhs_memory,
    solve_coupled,
    solve_lattice,
    solve_markovian,
    solve_memory,
    w_factor,
    write_checkpoint,
)

# Δε = 1 + 0 − 1 − 2 = −2
OFF_SHELL = ((1, 0, 0), (0, 0, 0), (0, 1, 0), (1, -1, 0))
# Δε = 1 + 1 − 0 − 2 = 0
ON_SHELL = ((1, 0, 0), (0, 1, 0), (0, 0, 0), (1, 1, 0))


@pytest.fixture
def lattice():
    return Lattice3(3)


@pytest.fixture
def f0(lattice):
    # exp_poly keeps the data off Bose-Einstein equilibrium
    return initial_bose_lattice(0.5, ThetaProfile.from_name("exp_poly", poly_a=2.0), lattice)


def _values_at(f, quadruple):
    return [f.values[f.lattice.flat(v)] for v in quadruple]


def test_lattice_geometry(lattice):
    print("\n🧪 Testing Lattice3...")

    assert lattice.size == 27
    assert lattice.flat((0, 0, 0)) == 13
    assert lattice.flat((2, 0, 0)) is None
    assert lattice.energy_index.max() == 3
    print("  ✅ PASS: indices and energies")

    with pytest.raises(DomainError):
        Lattice3(4)
    with pytest.raises(DomainError):
        Lattice3(3, 0.0)
    print("  ✅ PASS: even side and zero spacing rejected")

    with pytest.raises(CapacityError):
        Lattice3(99).check_capacity()
    with pytest.raises(CapacityError):
        PairCorrelation.zeros(Lattice3(99), 0.5)
    print("  ✅ PASS: M = 99 exceeds the default budget")


def test_w_factor(f0):
    print("\n🧪 Testing w_factor...")

    expected = 2.0 * q_factor(*_values_at(f0, OFF_SHELL), 1.0)
    assert w_factor(f0, OFF_SHELL) == expected
    assert expected != 0.0
    print("  ✅ PASS: 2q on a momentum-conserving quadruple")

    broken = ((1, 0, 0), (0, 0, 0), (0, 1, 0), (0, 0, 0))
    assert w_factor(f0, broken) == 0.0
    outside = ((1, 1, 0), (1, 0, 0), (0, 0, 0), (2, 1, 0))
    assert w_factor(f0, outside) == 0.0
    print("  ✅ PASS: zero off momentum conservation and off the lattice")

    flat = DistributionLattice(f0.lattice, np.ones(27))
    assert w_factor(flat, OFF_SHELL) == 0.0
    print("  ✅ PASS: constant f gives zero")


def test_initial_bose_lattice(lattice):
    print("\n🧪 Testing initial_bose_lattice...")

    f = initial_bose_lattice(0.5, ThetaProfile.from_name("exp"), lattice)
    assert f.values[lattice.flat((0, 0, 0))] == 1.0
    assert f.number() == pytest.approx(float(f.values.sum()))
    with pytest.raises(DomainError, match="condensed"):
        initial_bose_lattice(1.0, ThetaProfile.from_name("exp"), lattice)
    print("  ✅ PASS: z = 0.5 at the origin and condensed data rejected")


def test_rhs_coupled(f0):
    print("\n🧪 Testing rhs_coupled...")

    eps = 0.5
    quads = f0.lattice.quads()
    rate = rhs_coupled(f0, PairCorrelation.zeros(f0.lattice, eps), eps)
    assert np.all(rate.df == 0.0)
    assert np.allclose(rate.dphi.on_quads(quads), -2j / eps * quad_q(f0.values, quads, 1.0),
                       rtol=1e-14, atol=0.0)
    print("  ✅ PASS: φ = 0 gives df = 0 and dφ = −(2i/ε)q")

    with pytest.raises(DomainError):
        rhs_coupled(f0, PairCorrelation.zeros(f0.lattice, eps), 0.0)
    print("  ✅ PASS: ε = 0 rejected")


def test_phi_frozen_history(f0):
    print("\n🧪 Testing phi_closed_form on a frozen history...")

    eps, t = 0.5, 1.0
    history = LatticeHistory(f0.lattice)
    for s in np.linspace(0.0, t, 11):
        history.append(s, f0.values)

    q = q_factor(*_values_at(f0, OFF_SHELL), 1.0)
    z = 1j * -2.0 / eps ** 2
    expected = -2j / eps * q * (1.0 - np.exp(-z * t)) / z
    assert phi_closed_form(history, OFF_SHELL, t, eps) == pytest.approx(expected, rel=1e-10)
    print("  ✅ PASS: off-shell value matches q(1 − e^{−zt})/z")

    q = q_factor(*_values_at(f0, ON_SHELL), 1.0)
    assert phi_closed_form(history, ON_SHELL, t, eps) == pytest.approx(-2j / eps * q * t, rel=1e-10)
    print("  ✅ PASS: on-shell value grows linearly")

    phi = phi_from_history(history, t, eps)
    assert phi.at(OFF_SHELL) == pytest.approx(phi_closed_form(history, OFF_SHELL, t, eps), rel=1e-12)
    assert phi.invariant_errors(f0.lattice.quads())["conjugation"] < 1e-10
    print("  ✅ PASS: dense table agrees and φ(C,D,A,B) = conj φ(A,B,C,D)")

    with pytest.raises(ResolutionError):
        phi_closed_form(history, OFF_SHELL, 1.5, eps)
    with pytest.raises(ResolutionError):
        phi_closed_form(history, OFF_SHELL, t, eps, ds_max=0.05)
    print("  ✅ PASS: uncovered times and coarse histories raise ResolutionError")


def test_rhs_conservation(f0):
    print("\n🧪 Testing lattice rate conservation...")

    energies = f0.lattice.energies
    markov = rhs_markovian(f0)
    scale = float(np.abs(markov).sum())
    assert scale > 0
    assert abs(markov.sum()) <= 1e-12 * scale
    assert abs(np.dot(energies, markov)) <= 1e-12 * scale * energies.max()
    print("  ✅ PASS: Markovian rate conserves number and energy")

    history = LatticeHistory(f0.lattice)
    history.append(0.0, f0.values)
    assert np.all(rhs_memory(history, 0.0, 0.5) == 0.0)
    history.append(0.1, f0.values)
    memory = rhs_memory(history, 0.1, 0.5)
    assert abs(memory.sum()) <= 1e-12 * float(np.abs(memory).sum())
    print("  ✅ PASS: memory rate vanishes at t = 0 and conserves number")


def test_markovian_fixed_point(lattice):
    print("\n🧪 Testing the lattice equilibrium...")

    eq = DistributionLattice.from_function(lattice, lambda e: 1.0 / np.expm1(e + 0.5))
    assert np.abs(rhs_markovian(eq)).max() < 1e-11
    run = solve_markovian(eq, 0.5, 0.1)
    assert np.allclose(run.final_values, eq.values, rtol=0.0, atol=1e-10)
    print("  ✅ PASS: Bose-Einstein data is a fixed point")

    with pytest.raises(DomainError):
        solve_markovian(eq, 0.5, 0.1, mode=KernelMode.MODE_FULL_MEMORY, eps=0.5)
    print("  ✅ PASS: full memory is not a Markovian mode")


def test_solve_lattice_modes(f0):
    print("\n🧪 Testing solve_lattice dispatch...")

    memory = solve_lattice(f0, KernelMode.MODE_FULL_MEMORY, 0.1, 0.02, eps=0.5)
    direct = solve_memory(f0, 0.5, 0.1, 0.02)
    assert np.array_equal(memory.final_values, direct.final_values)
    assert memory.phi is None
    print("  ✅ PASS: full memory without coupling is the memory solver")

    broadened = solve_lattice(f0, KernelMode.MODE_BROADENED_DELTA, 0.1, 0.02, eps=0.5)
    assert broadened.mode == KernelMode.MODE_BROADENED_DELTA
    numbers = broadened.numbers()
    assert np.allclose(numbers, numbers[0], rtol=1e-10, atol=0.0)
    print("  ✅ PASS: broadened kernel conserves number")

    markov = solve_lattice(f0, KernelMode.from_name("markovian"), 0.1, 0.02)
    assert len(markov.times) == 6 and markov.times[-1] == pytest.approx(0.1)
    with pytest.raises(DomainError):
        solve_lattice(f0, KernelMode.MODE_BROADENED_DELTA, 0.1, 0.02)
    print("  ✅ PASS: Markovian mode needs no ε, the others do")


def _coupled_memory_distance(f0, eps, t_end, dt):
    coupled = solve_coupled(f0, eps, t_end, dt)
    memory = solve_memory(f0, eps, t_end, dt)
    assert coupled.times == pytest.approx(memory.times)
    return coupled, float(np.abs(coupled.final_values - memory.final_values).max())


def test_coupled_matches_memory(f0):
    print("\n🧪 Testing coupled against memory at M = 3...")

    coupled, distance = _coupled_memory_distance(f0, 0.5, 0.2, 0.01)
    assert distance <= 1e-8
    assert coupled.conjugation_error < 1e-10
    numbers = coupled.numbers()
    assert np.allclose(numbers, numbers[0], rtol=1e-12, atol=0.0)
    print(f"  ✅ PASS: sup distance {distance:.2e}, number conserved")


@pytest.mark.slow
def test_coupled_matches_memory_m5():
    print("\n🧪 Testing coupled against memory at M = 5...")

    f0 = initial_bose_lattice(0.5, ThetaProfile.from_name("exp_poly", poly_a=2.0), Lattice3(5, 0.5))
    _, distance = _coupled_memory_distance(f0, 0.5, 0.1, 0.01)
    assert distance <= 1e-8
    print(f"  ✅ PASS: sup distance {distance:.2e}")


def test_markovian_limit_study(f0):
    print("\n🧪 Testing markovian_limit_study...")

    assert kernel_parameter(Lattice3(3, 2.0), 0.1, 0.5) == pytest.approx(1.6)
    table = markovian_limit_study(f0, [1.0, 0.5], 0.2)
    assert [r.eps for r in table.rows] == [1.0, 0.5]
    assert all(np.isfinite(r.distance) for r in table.rows)
    assert [r.kernel_parameter for r in table.rows] == pytest.approx([0.2, 0.8])
    print("  ✅ PASS: one finite row per ε")

    with pytest.raises(DomainError):
        markovian_limit_study(f0, [], 0.2)
    print("  ✅ PASS: empty ε list rejected")


def test_checkpoint(f0, tmp_path):
    print("\n🧪 Testing φ checkpoints...")

    phi = solve_coupled(f0, 0.5, 0.1, 0.01).phi
    data_path, meta_path = write_checkpoint(phi, tmp_path / "phi")
    assert data_path.stat().st_size == 16 * 27 ** 3
    back = read_checkpoint(tmp_path / "phi")
    assert back.lattice == phi.lattice
    assert back.time == phi.time and back.eps == phi.eps
    assert np.array_equal(back.data, phi.data)
    print("  ✅ PASS: bitwise round trip")

    meta = yaml.safe_load(meta_path.read_text())
    meta["version"] = 99
    meta_path.write_text(yaml.safe_dump(meta))
    with pytest.raises(ConfigError):
        read_checkpoint(tmp_path / "phi")
    with pytest.raises(ConfigError):
        read_checkpoint(tmp_path / "missing")
    print("  ✅ PASS: wrong version and missing files raise ConfigError")


if __name__ == "__main__":
    print("=" * 60)
    print("Testing Lattice")
    print("=" * 60)

    test_lattice_geometry(Lattice3(3))
    test_initial_bose_lattice(Lattice3(3))
    test_markovian_fixed_point(Lattice3(3))

    print("\n" + "=" * 60)
    print("✅ All lattice tests passed!")
    print("=" * 60)
