"""
Run configuration.

Two surface syntaxes share one schema of dotted keys:

* line based ``key = value`` text with ``#`` comments, values decoded by
  ``yaml.safe_load`` (``1e-4``, ``true``, ``[0.5, 0.25]``);
* nested YAML files (``.yml`` / ``.yaml``), flattened to dotted keys.

Every issue is reported as (line, key, reason); line is 0 for keys that
came from YAML files, ``--set`` overrides or cross-field checks.
"""

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import yaml

from uukin.collision.operator import CollisionConfig, InterpolationEnum
from uukin.core.grid import RadialGrid
from uukin.core.initial import ThetaProfile
from uukin.core.params import PhysicalParams
from uukin.dynamics.stepper import StepController
from uukin.errors import CODE_CONFIG, KineticError, new_fatal
from uukin.lattice.lattice import KernelMode, Lattice3

from .config_scenario_enum import ScenarioEnum

logger = logging.getLogger(__name__)

Check = Callable[[Any], Optional[str]]


def _positive(v):
    return None if v > 0 else "must be > 0"


def _nonnegative(v):
    return None if v >= 0 else "must be ≥ 0"


def _negative(v):
    return None if v < 0 else "must be < 0"


def _at_least(bound):
    def check(v):
        return None if v >= bound else f"must be ≥ {bound}"
    return check


def _above(bound):
    def check(v):
        return None if v > bound else f"must be > {bound}"
    return check


def _unit_open(v):
    return None if 0 < v < 1 else "must lie in (0, 1)"


def _unit_half_open(v):
    return None if 0 < v <= 1 else "must lie in (0, 1]"


def _one_of(*names):
    def check(v):
        return None if str(v).lower() in names else "must be one of " + ", ".join(names)
    check.choices = names
    return check


def _odd(v):
    return None if v >= 1 and v % 2 == 1 else "must be odd and ≥ 1"


def _even_grid(v):
    return None if v >= 4 and v % 2 == 0 else "must be even and ≥ 4"


def _all(check):
    def each(values):
        for v in values:
            reason = check(v)
            if reason:
                return "every entry " + reason
        return None if values else "must not be empty"
    return each


@dataclass(frozen=True)
class Field:
    kind: str  # int | float | bool | str | floats
    default: Any
    check: Optional[Check] = None
    optional: bool = False


SCHEMA: Dict[str, Field] = {
    "scenario": Field("str", "uu", _one_of("uu", "memory", "hierarchy", "boundary-layer",
                                           "boundary_layer", "scales", "validate")),
    "seed": Field("int", None, _nonnegative, optional=True),

    "output.dir": Field("str", "uukin-out"),
    "output.snapshot_every": Field("int", 10, _at_least(1)),
    "output.checkpoint_every": Field("int", 100, _nonnegative),

    "physical.mass": Field("float", 3.8175e-26, _positive),
    "physical.scattering_length": Field("float", 2.75e-9, _nonnegative),
    "physical.de_broglie": Field("float", 1.0e-6, _positive),
    "physical.interparticle": Field("float", 1.0e-6, _positive),
    "physical.temperature": Field("float", None, _positive, optional=True),
    "physical.density": Field("float", None, _positive, optional=True),

    "grid.n": Field("int", 256, _at_least(2)),
    "grid.spacing": Field("str", "geometric", _one_of("geometric", "uniform")),
    "grid.eps_min": Field("float", 1e-4, _nonnegative),
    "grid.eps_max": Field("float", 1e2, _positive),

    "initial.kind": Field("str", "bose", _one_of("bose", "equilibrium")),
    "initial.z": Field("float", 0.9, _nonnegative),
    "initial.theta": Field("str", "exp", _one_of("exp", "exp_poly")),
    "initial.poly_a": Field("float", 0.0, _nonnegative),
    "initial.scale": Field("float", 1.0, _positive),
    "initial.eq_theta": Field("float", 1.0, _positive),
    "initial.eq_mu": Field("float", -0.5, _negative),

    "collision.c": Field("float", 1.0, _positive),
    "collision.interpolation": Field("str", "entropy", _one_of("entropy", "linear", "log")),
    "collision.symmetrize": Field("bool", True),
    "collision.classical": Field("bool", False),
    "collision.threads": Field("int", None, _at_least(1), optional=True),

    "dynamics.t_end": Field("float", 10.0, _positive),
    "dynamics.rtol": Field("float", 1e-6, _positive),
    "dynamics.atol": Field("float", 1e-10, _positive),
    "dynamics.dt_init": Field("float", 1e-3, _positive),
    "dynamics.dt_min": Field("float", 1e-12, _positive),
    "dynamics.dt_max": Field("float", 0.1, _positive),
    "dynamics.max_steps": Field("int", 200000, _at_least(1)),
    "dynamics.blowup_ratio": Field("float", 1e6, _above(1)),
    "dynamics.tc_fraction": Field("float", 0.1, _positive),

    "fit.enabled": Field("bool", True),
    "fit.characteristic": Field("str", "median_energy", _one_of("median_energy", "half_max")),
    "fit.window_fraction": Field("float", 0.5, _unit_half_open),
    "fit.kappa": Field("float", 0.5, _unit_open),

    "lattice.M": Field("int", 5, _odd),
    "lattice.dp": Field("float", 0.2, _positive),
    "lattice.eps": Field("float", 0.25, _positive),
    "lattice.eps_list": Field("floats", [0.5, 0.25, 0.125], _all(_positive)),
    "lattice.t_end": Field("float", 1.0, _positive),
    "lattice.dt": Field("float", 0.02, _positive),
    "lattice.mode": Field("str", "full_memory", _one_of("full_memory", "broadened_delta", "markovian")),
    "lattice.coupled": Field("bool", False),
    "lattice.budget_mib": Field("float", 256.0, _positive),
    "lattice.z": Field("float", 0.5, _nonnegative),
    "lattice.theta": Field("str", "exp_poly", _one_of("exp", "exp_poly")),
    "lattice.poly_a": Field("float", 2.0, _nonnegative),
    "lattice.scale": Field("float", 0.5, _positive),
    "lattice.c": Field("float", 1.0, _positive),

    "boundary.beta": Field("float", 1.069, _positive),
    "boundary.tau0": Field("float", -10.0, _negative),
    "boundary.tau_end": Field("float", -9.9),
    "boundary.dtau": Field("float", 0.01, _positive),
    "boundary.n": Field("int", 16, _even_grid),
    "boundary.dy": Field("float", 0.5, _positive),
    "boundary.tau0_list": Field("floats", [-1.0, -3.1622776601683795, -10.0], _all(_negative)),
    "boundary.xi_max": Field("float", 6.0, _positive),
    "boundary.n_xi": Field("int", 400, _at_least(2)),

    "scales.eps": Field("float", None, _positive, optional=True),

    "mc.n_samples": Field("int", 1000000, _at_least(1000)),
    "mc.momenta": Field("floats", [0.3, 0.6, 1.0, 1.5, 2.0], _all(_positive)),
}

DEFAULTS: Dict[str, Any] = {key: f.default for key, f in SCHEMA.items()}

Issue = Tuple[int, str, str]


def _number(value: Any) -> Optional[float]:
    """Numbers, plus strings such as ``1e-4`` that YAML 1.1 leaves unparsed."""
    if isinstance(value, bool):
        return None
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return float(value)
        except ValueError:
            return None
    return None


def _coerce(kind: str, value: Any) -> Tuple[Any, Optional[str]]:
    if kind == "int":
        if isinstance(value, bool) or not isinstance(value, int):
            return None, "must be an integer"
        return value, None
    if kind == "float":
        number = _number(value)
        if number is None:
            return None, "must be a number"
        if not math.isfinite(number):
            return None, "must be finite"
        return number, None
    if kind == "bool":
        if not isinstance(value, bool):
            return None, "must be true or false"
        return value, None
    if kind == "floats":
        items = value if isinstance(value, list) else [value]
        out = []
        for item in items:
            number = _number(item)
            if number is None or not math.isfinite(number):
                return None, "must be a list of finite numbers"
            out.append(number)
        return out, None
    if isinstance(value, (dict, list)):
        return None, "must be a scalar"
    return str(value), None


def _validate_entry(key: str, value: Any, line: int, issues: List[Issue]) -> Any:
    spec = SCHEMA.get(key)
    if spec is None:
        issues.append((line, key, "unknown key"))
        return None
    if value is None:
        if spec.optional:
            return None
        issues.append((line, key, "missing value"))
        return None
    coerced, reason = _coerce(spec.kind, value)
    if reason is None and spec.check is not None:
        reason = spec.check(coerced)
    if reason is not None:
        issues.append((line, key, reason))
        return None
    if getattr(spec.check, "choices", None):
        return coerced.lower()
    return coerced


def _cross_checks(values: Dict[str, Any], lines: Dict[str, int], issues: List[Issue]):
    def line(key):
        return lines.get(key, 0)

    if values["grid.eps_max"] <= values["grid.eps_min"]:
        issues.append((line("grid.eps_max"), "grid.eps_max", "must be > grid.eps_min"))
    if values["grid.spacing"] == "geometric" and values["grid.eps_min"] <= 0:
        issues.append((line("grid.eps_min"), "grid.eps_min", "must be > 0 for a geometric grid"))
    if values["dynamics.dt_min"] > values["dynamics.dt_init"] or values["dynamics.dt_init"] > values["dynamics.dt_max"]:
        issues.append((line("dynamics.dt_init"), "dynamics.dt_init", "must satisfy dt_min ≤ dt_init ≤ dt_max"))
    if values["lattice.dt"] > values["lattice.t_end"]:
        issues.append((line("lattice.dt"), "lattice.dt", "must be ≤ lattice.t_end"))
    if values["boundary.tau_end"] <= values["boundary.tau0"]:
        issues.append((line("boundary.tau_end"), "boundary.tau_end", "must be > boundary.tau0"))
    if values["boundary.tau_end"] >= 0:
        issues.append((line("boundary.tau_end"), "boundary.tau_end", "must be < 0"))
    scenario = ScenarioEnum.from_name(values["scenario"])
    if scenario.stochastic and values["seed"] is None:
        issues.append((line("seed"), "seed", f"required for the {scenario.label} scenario"))


def _raise_issues(issues: List[Issue]):
    issues = sorted(issues, key=lambda i: (i[0], i[1]))
    detail = "; ".join(f"line {ln}: {key}: {reason}" if ln else f"{key}: {reason}" for ln, key, reason in issues)
    raise new_fatal(
        f"invalid configuration ({len(issues)} issue{'s' if len(issues) != 1 else ''}): {detail}",
        {"errors": [{"line": ln, "key": key, "reason": reason} for ln, key, reason in issues]},
        code=CODE_CONFIG,
    )


def _decode(raw: str) -> Any:
    raw = raw.strip()
    if raw == "":
        return None
    return yaml.safe_load(raw)


def parse_lines(text: str) -> Tuple[List[Tuple[int, str, Any]], List[Issue]]:
    """Split ``key = value`` text into (line, key, decoded value) entries."""
    entries: List[Tuple[int, str, Any]] = []
    issues: List[Issue] = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or not key:
            issues.append((number, key or line, "expected 'key = value'"))
            continue
        try:
            entries.append((number, key, _decode(value)))
        except yaml.YAMLError:
            issues.append((number, key, "value is not a valid scalar or list"))
    return entries, issues


def flatten(data: Dict[str, Any], prefix: str = "") -> Dict[str, Any]:
    """Nested YAML mapping to dotted keys."""
    flat: Dict[str, Any] = {}
    for key, value in (data or {}).items():
        dotted = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(flatten(value, dotted + "."))
        else:
            flat[dotted] = value
    return flat


class GridConfig:
    def __init__(self, data: dict):
        self.n: int = data.get("n", DEFAULTS["grid.n"])
        self.spacing: str = data.get("spacing", DEFAULTS["grid.spacing"])
        self.eps_min: float = data.get("eps_min", DEFAULTS["grid.eps_min"])
        self.eps_max: float = data.get("eps_max", DEFAULTS["grid.eps_max"])

    def build(self) -> RadialGrid:
        return RadialGrid.build(self.spacing, self.n, self.eps_min, self.eps_max)


class InitialConfig:
    def __init__(self, data: dict):
        self.kind: str = data.get("kind", DEFAULTS["initial.kind"])
        self.z: float = data.get("z", DEFAULTS["initial.z"])
        self.theta: str = data.get("theta", DEFAULTS["initial.theta"])
        self.poly_a: float = data.get("poly_a", DEFAULTS["initial.poly_a"])
        self.scale: float = data.get("scale", DEFAULTS["initial.scale"])
        self.eq_theta: float = data.get("eq_theta", DEFAULTS["initial.eq_theta"])
        self.eq_mu: float = data.get("eq_mu", DEFAULTS["initial.eq_mu"])

    @property
    def theta_profile(self) -> ThetaProfile:
        return ThetaProfile.from_name(self.theta, self.poly_a, self.scale)


class CollisionSection:
    def __init__(self, data: dict):
        self.c: float = data.get("c", DEFAULTS["collision.c"])
        self.interpolation: str = data.get("interpolation", DEFAULTS["collision.interpolation"])
        self.symmetrize: bool = data.get("symmetrize", DEFAULTS["collision.symmetrize"])
        self.classical: bool = data.get("classical", DEFAULTS["collision.classical"])
        self.threads: Optional[int] = data.get("threads", DEFAULTS["collision.threads"])

    def build(self) -> CollisionConfig:
        return CollisionConfig(
            occupancy_c=self.c,
            interpolation=InterpolationEnum.from_name(self.interpolation),
            symmetrize=self.symmetrize,
            classical=self.classical,
            threads=self.threads,
        )


class DynamicsConfig:
    def __init__(self, data: dict):
        self.t_end: float = data.get("t_end", DEFAULTS["dynamics.t_end"])
        self.rtol: float = data.get("rtol", DEFAULTS["dynamics.rtol"])
        self.atol: float = data.get("atol", DEFAULTS["dynamics.atol"])
        self.dt_init: float = data.get("dt_init", DEFAULTS["dynamics.dt_init"])
        self.dt_min: float = data.get("dt_min", DEFAULTS["dynamics.dt_min"])
        self.dt_max: float = data.get("dt_max", DEFAULTS["dynamics.dt_max"])
        self.max_steps: int = data.get("max_steps", DEFAULTS["dynamics.max_steps"])
        self.blowup_ratio: float = data.get("blowup_ratio", DEFAULTS["dynamics.blowup_ratio"])
        self.tc_fraction: float = data.get("tc_fraction", DEFAULTS["dynamics.tc_fraction"])

    def controller(self, snapshot_every: int = 1, dt_init: Optional[float] = None) -> StepController:
        return StepController(
            rtol=self.rtol,
            atol=self.atol,
            dt_init=self.dt_init if dt_init is None else min(max(dt_init, self.dt_min), self.dt_max),
            dt_min=self.dt_min,
            dt_max=self.dt_max,
            max_steps=self.max_steps,
            snapshot_every=snapshot_every,
            blowup_ratio=self.blowup_ratio,
            tc_fraction=self.tc_fraction,
        )


class FitConfig:
    def __init__(self, data: dict):
        self.enabled: bool = data.get("enabled", DEFAULTS["fit.enabled"])
        self.characteristic: str = data.get("characteristic", DEFAULTS["fit.characteristic"])
        self.window_fraction: float = data.get("window_fraction", DEFAULTS["fit.window_fraction"])
        self.kappa: float = data.get("kappa", DEFAULTS["fit.kappa"])


class LatticeConfig:
    def __init__(self, data: dict):
        self.M: int = data.get("M", DEFAULTS["lattice.M"])
        self.dp: float = data.get("dp", DEFAULTS["lattice.dp"])
        self.eps: float = data.get("eps", DEFAULTS["lattice.eps"])
        self.eps_list: List[float] = data.get("eps_list", DEFAULTS["lattice.eps_list"])
        self.t_end: float = data.get("t_end", DEFAULTS["lattice.t_end"])
        self.dt: float = data.get("dt", DEFAULTS["lattice.dt"])
        self.mode: str = data.get("mode", DEFAULTS["lattice.mode"])
        self.coupled: bool = data.get("coupled", DEFAULTS["lattice.coupled"])
        self.budget_mib: float = data.get("budget_mib", DEFAULTS["lattice.budget_mib"])
        self.z: float = data.get("z", DEFAULTS["lattice.z"])
        self.theta: str = data.get("theta", DEFAULTS["lattice.theta"])
        self.poly_a: float = data.get("poly_a", DEFAULTS["lattice.poly_a"])
        self.scale: float = data.get("scale", DEFAULTS["lattice.scale"])
        self.c: float = data.get("c", DEFAULTS["lattice.c"])

    @property
    def lattice(self) -> Lattice3:
        return Lattice3(self.M, self.dp)

    @property
    def kernel_mode(self) -> KernelMode:
        return KernelMode.from_name(self.mode)

    @property
    def budget(self) -> int:
        return int(self.budget_mib * 1024 ** 2)

    @property
    def theta_profile(self) -> ThetaProfile:
        return ThetaProfile.from_name(self.theta, self.poly_a, self.scale)


class BoundaryConfig:
    def __init__(self, data: dict):
        self.beta: float = data.get("beta", DEFAULTS["boundary.beta"])
        self.tau0: float = data.get("tau0", DEFAULTS["boundary.tau0"])
        self.tau_end: float = data.get("tau_end", DEFAULTS["boundary.tau_end"])
        self.dtau: float = data.get("dtau", DEFAULTS["boundary.dtau"])
        self.n: int = data.get("n", DEFAULTS["boundary.n"])
        self.dy: float = data.get("dy", DEFAULTS["boundary.dy"])
        self.tau0_list: List[float] = data.get("tau0_list", DEFAULTS["boundary.tau0_list"])
        self.xi_max: float = data.get("xi_max", DEFAULTS["boundary.xi_max"])
        self.n_xi: int = data.get("n_xi", DEFAULTS["boundary.n_xi"])


class PhysicalConfig:
    def __init__(self, data: dict):
        self.mass: float = data.get("mass", DEFAULTS["physical.mass"])
        self.scattering_length: float = data.get("scattering_length", DEFAULTS["physical.scattering_length"])
        self.de_broglie: float = data.get("de_broglie", DEFAULTS["physical.de_broglie"])
        self.interparticle: float = data.get("interparticle", DEFAULTS["physical.interparticle"])
        self.temperature: Optional[float] = data.get("temperature", DEFAULTS["physical.temperature"])
        self.density: Optional[float] = data.get("density", DEFAULTS["physical.density"])

    def params(self) -> PhysicalParams:
        """Con temperatura y densidad se deriva λ y d; si no, se usan tal cual."""
        if self.temperature is not None and self.density is not None:
            return PhysicalParams.from_temperature(self.mass, self.scattering_length,
                                                   self.temperature, self.density)
        return PhysicalParams(
            mass=self.mass,
            scattering_length=self.scattering_length,
            de_broglie=self.de_broglie,
            interparticle=self.interparticle,
            density=self.density,
            temp_scale=self.temperature,
        )


class MonteCarloConfig:
    def __init__(self, data: dict):
        self.n_samples: int = data.get("n_samples", DEFAULTS["mc.n_samples"])
        self.momenta: List[float] = data.get("momenta", DEFAULTS["mc.momenta"])


class OutputConfig:
    def __init__(self, data: dict):
        self.dir: str = data.get("dir", DEFAULTS["output.dir"])
        self.snapshot_every: int = data.get("snapshot_every", DEFAULTS["output.snapshot_every"])
        self.checkpoint_every: int = data.get("checkpoint_every", DEFAULTS["output.checkpoint_every"])


class RunConfig:
    """
    Validated run configuration.

    Las secciones se devuelven como objetos (``config.grid``, ``config.lattice``...)
    construidos a partir de las claves con punto.
    """

    def __init__(self, values: Optional[Dict[str, Any]] = None, lines: Optional[Dict[str, int]] = None):
        self.__values: Dict[str, Any] = dict(DEFAULTS)
        self.__values.update(values or {})
        self.__lines: Dict[str, int] = dict(lines or {})

    def __section(self, name: str) -> dict:
        prefix = name + "."
        return {k[len(prefix):]: v for k, v in self.__values.items() if k.startswith(prefix)}

    def get(self, key: str) -> Any:
        return self.__values[key]

    @property
    def scenario(self) -> ScenarioEnum:
        return ScenarioEnum.from_name(self.__values["scenario"])

    @property
    def seed(self) -> Optional[int]:
        return self.__values["seed"]

    @property
    def output(self) -> OutputConfig:
        return OutputConfig(self.__section("output"))

    @property
    def physical(self) -> PhysicalConfig:
        return PhysicalConfig(self.__section("physical"))

    @property
    def grid(self) -> GridConfig:
        """Devuelve un objeto GridConfig"""
        return GridConfig(self.__section("grid"))

    @property
    def initial(self) -> InitialConfig:
        return InitialConfig(self.__section("initial"))

    @property
    def collision(self) -> CollisionSection:
        return CollisionSection(self.__section("collision"))

    @property
    def dynamics(self) -> DynamicsConfig:
        return DynamicsConfig(self.__section("dynamics"))

    @property
    def fit(self) -> FitConfig:
        return FitConfig(self.__section("fit"))

    @property
    def lattice(self) -> LatticeConfig:
        """Devuelve un objeto LatticeConfig"""
        return LatticeConfig(self.__section("lattice"))

    @property
    def boundary(self) -> BoundaryConfig:
        return BoundaryConfig(self.__section("boundary"))

    @property
    def scales_eps(self) -> Optional[float]:
        return self.__values["scales.eps"]

    @property
    def mc(self) -> MonteCarloConfig:
        return MonteCarloConfig(self.__section("mc"))

    def to_dict(self) -> Dict[str, Any]:
        """Nested echo of every value, defaults included."""
        nested: Dict[str, Any] = {}
        for key in sorted(self.__values):
            node = nested
            parts = key.split(".")
            for part in parts[:-1]:
                node = node.setdefault(part, {})
            value = self.__values[key]
            node[parts[-1]] = list(value) if isinstance(value, list) else value
        return nested

    def flat(self) -> Dict[str, Any]:
        return dict(self.__values)

    def with_overrides(self, pairs: Sequence[str]) -> "RunConfig":
        """Apply ``key=value`` overrides through the same validator."""
        issues: List[Issue] = []
        values = dict(self.__values)
        for pair in pairs:
            key, sep, raw = pair.partition("=")
            key = key.strip()
            if not sep:
                issues.append((0, key, "override must be 'key=value'"))
                continue
            try:
                decoded = _decode(raw)
            except yaml.YAMLError:
                issues.append((0, key, "value is not a valid scalar or list"))
                continue
            before = len(issues)
            value = _validate_entry(key, decoded, 0, issues)
            if len(issues) == before:
                values[key] = value
        if not issues:
            _cross_checks(values, self.__lines, issues)
        if issues:
            _raise_issues(issues)
        return RunConfig(values, self.__lines)


def _build(entries: Sequence[Tuple[int, str, Any]], issues: List[Issue]) -> RunConfig:
    values: Dict[str, Any] = {}
    lines: Dict[str, int] = {}
    for number, key, raw in entries:
        if key in lines and number:
            issues.append((number, key, f"duplicate key (first set on line {lines[key]})"))
            continue
        value = _validate_entry(key, raw, number, issues)
        if key in SCHEMA:
            lines[key] = number
            if value is not None or SCHEMA[key].optional:
                values[key] = value
    if not issues:
        merged = dict(DEFAULTS)
        merged.update(values)
        try:
            _cross_checks(merged, lines, issues)
        except KineticError as e:
            issues.append((lines.get("scenario", 0), "scenario", str(e)))
    if issues:
        _raise_issues(issues)
    return RunConfig(values, lines)


def parse_config(text: str) -> RunConfig:
    """
    Parse ``key = value`` text into a validated RunConfig.

    Raises ConfigError listing every (line, key, reason) found.
    """
    entries, issues = parse_lines(text)
    config = _build(entries, issues)
    logger.debug("parsed configuration: scenario=%s", config.scenario.label)
    return config


def parse_yaml(text: str) -> RunConfig:
    try:
        data = yaml.safe_load(text) or {}
    except yaml.YAMLError as e:
        raise new_fatal(f"invalid YAML: {e}", {"errors": [{"line": 0, "key": "", "reason": "invalid YAML"}]},
                        code=CODE_CONFIG) from None
    if not isinstance(data, dict):
        raise new_fatal("YAML configuration must be a mapping",
                        {"errors": [{"line": 0, "key": "", "reason": "must be a mapping"}]}, code=CODE_CONFIG)
    return _build([(0, k, v) for k, v in flatten(data).items()], [])


def load_config(path: str) -> RunConfig:
    """Load a configuration file; ``.yml``/``.yaml`` are nested YAML, anything else is ``key = value``."""
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as e:
        raise new_fatal(f"cannot read configuration {path}: {e.strerror}",
                        {"errors": [{"line": 0, "key": "", "reason": "unreadable file"}], "path": str(path)},
                        code=CODE_CONFIG) from None
    if p.suffix.lower() in (".yml", ".yaml"):
        return parse_yaml(text)
    return parse_config(text)
