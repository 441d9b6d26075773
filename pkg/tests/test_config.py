"""
Tests para la carga y validación de la configuración
"""

from pathlib import Path

import pytest

from uukin.cli import ScenarioEnum, load_config, parse_config, parse_yaml
from uukin.cli.config import DEFAULTS
from uukin.collision import InterpolationEnum, is_supercritical
from uukin.core import initial_bose
from uukin.errors import ConfigError

ETC = Path(__file__).parent / "etc"


def test_defaults():
    print("\n🧪 Testing an empty configuration...")

    config = parse_config("")
    assert config.scenario == ScenarioEnum.SCENARIO_UU
    assert config.flat() == DEFAULTS
    assert config.grid.n == 256
    assert config.lattice.budget == 256 * 1024 ** 2
    assert config.grid.build().size == 256
    print("  ✅ PASS: every key takes its default")

    nested = config.to_dict()
    assert nested["grid"]["eps_max"] == 1e2
    assert nested["boundary"]["beta"] == 1.069
    print("  ✅ PASS: nested echo")


def test_key_value_syntax():
    print("\n🧪 Testing key = value parsing...")

    config = parse_config(
        "# comment line\n"
        "grid.eps_min = 1e-4   # trailing comment\n"
        "lattice.eps_list = [0.5, 1e-1]\n"
        "collision.symmetrize = false\n"
        "scenario = boundary-layer\n"
    )
    assert config.grid.eps_min == 1e-4
    assert config.lattice.eps_list == [0.5, 0.1]
    assert config.collision.symmetrize is False
    assert config.scenario == ScenarioEnum.SCENARIO_BOUNDARY_LAYER
    print("  ✅ PASS: comments, exponents, lists and booleans")


def test_invalid_values():
    print("\n🧪 Testing configuration issues...")

    with pytest.raises(ConfigError) as info:
        parse_config("grid.n = -4\n")
    assert info.value.issues == [{"line": 1, "key": "grid.n", "reason": "must be ≥ 2"}]
    assert info.value.exit_code == 2
    print("  ✅ PASS: grid.n = -4 reported on line 1")

    with pytest.raises(ConfigError) as info:
        parse_config("grid.n = -4\nbogus.key = 1\ndynamics.t_end = soon\ngrid.n = 8\nno equals sign\n")
    issues = {(i["line"], i["key"]): i["reason"] for i in info.value.issues}
    assert issues[(1, "grid.n")] == "must be ≥ 2"
    assert issues[(2, "bogus.key")] == "unknown key"
    assert issues[(3, "dynamics.t_end")] == "must be a number"
    assert issues[(4, "grid.n")].startswith("duplicate key")
    assert issues[(5, "no equals sign")] == "expected 'key = value'"
    print("  ✅ PASS: every issue listed with its line")


def test_cross_checks():
    print("\n🧪 Testing cross-field checks...")

    with pytest.raises(ConfigError) as info:
        parse_config("grid.eps_min = 10\ngrid.eps_max = 1\n")
    assert info.value.issues[0]["key"] == "grid.eps_max"
    assert info.value.issues[0]["line"] == 2
    print("  ✅ PASS: eps_max must exceed eps_min")

    with pytest.raises(ConfigError) as info:
        parse_config("scenario = validate\n")
    assert info.value.issues[0]["key"] == "seed"
    assert parse_config("scenario = validate\nseed = 3\n").seed == 3
    print("  ✅ PASS: stochastic scenarios need a seed")


def test_choices_are_case_insensitive():
    print("\n🧪 Testing case of choice values...")

    config = parse_config("collision.interpolation = LOG\ngrid.spacing = Uniform\ngrid.eps_min = 0\n")
    assert config.flat()["collision.interpolation"] == "log"
    assert config.grid.spacing == "uniform"
    assert config.grid.build().nodes[0] == 0.0
    print("  ✅ PASS: stored lowercased")

    with pytest.raises(ConfigError) as info:
        parse_config("grid.spacing = Geometric\ngrid.eps_min = 0\n")
    assert info.value.issues == [
        {"line": 2, "key": "grid.eps_min", "reason": "must be > 0 for a geometric grid"}
    ]
    print("  ✅ PASS: cross checks see the lowercased spacing")

    assert parse_config("").collision.build().interpolation == InterpolationEnum.INTERP_ENTROPY
    print("  ✅ PASS: entropy interpolation by default")


def test_yaml():
    print("\n🧪 Testing YAML configurations...")

    config = parse_yaml("grid:\n  n: 64\n  eps_min: 1e-3\nlattice:\n  M: 3\n")
    assert config.grid.n == 64
    assert config.grid.eps_min == 1e-3
    assert config.lattice.M == 3
    print("  ✅ PASS: nested keys flattened")

    with pytest.raises(ConfigError) as info:
        parse_yaml("lattice:\n  M: 4\n")
    assert info.value.issues == [{"line": 0, "key": "lattice.M", "reason": "must be odd and ≥ 1"}]
    with pytest.raises(ConfigError):
        parse_yaml("- just\n- a list\n")
    print("  ✅ PASS: YAML issues carry line 0")


def test_overrides():
    print("\n🧪 Testing --set overrides...")

    base = parse_config("grid.n = 64\n")
    config = base.with_overrides(["grid.n=32", "scenario=scales", "lattice.eps_list=[0.5, 0.25]"])
    assert config.grid.n == 32
    assert config.scenario == ScenarioEnum.SCENARIO_SCALES
    assert config.lattice.eps_list == [0.5, 0.25]
    assert base.grid.n == 64
    print("  ✅ PASS: overrides return a new configuration")

    with pytest.raises(ConfigError):
        base.with_overrides(["grid.n=1"])
    with pytest.raises(ConfigError):
        base.with_overrides(["grid.n"])
    print("  ✅ PASS: overrides go through the same validator")


def test_load_config(tmp_path):
    print("\n🧪 Testing load_config...")

    uu = load_config(ETC / "uu_blowup.conf")
    assert uu.scenario == ScenarioEnum.SCENARIO_UU
    assert uu.initial.theta_profile.poly_a == 2.0
    assert is_supercritical(initial_bose(uu.initial.z, uu.initial.theta_profile, uu.grid.build()))
    memory = load_config(ETC / "memory.yml")
    assert memory.scenario == ScenarioEnum.SCENARIO_MEMORY
    assert memory.lattice.lattice.side == 3
    print("  ✅ PASS: sample files load")

    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.conf")
    print("  ✅ PASS: unreadable files raise ConfigError")


if __name__ == "__main__":
    print("=" * 60)
    print("Testing Config")
    print("=" * 60)

    test_defaults()
    test_key_value_syntax()
    test_invalid_values()
    test_cross_checks()
    test_choices_are_case_insensitive()
    test_yaml()
    test_overrides()

    print("\n" + "=" * 60)
    print("✅ All config tests passed!")
    print("=" * 60)
