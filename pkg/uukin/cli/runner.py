"""
Scenario execution.

``run`` dispatches on the configured scenario, writes every result file
under ``output.dir`` and leaves a ``record.json`` there, also when the
scenario fails.
"""

import logging
import math
import time
from pathlib import Path
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from uukin import __version__
from uukin.boundary_layer import (
    asymptotic_data,
    asymptotic_wigner,
    correlation_magnitude,
    correlation_onset_time,
    evolve_hierarchy,
    physical_scales,
    source_scaling_study,
    wigner_form,
)
from uukin.collision import (
    collision_mc,
    collision_rhs_iso,
    equilibrium,
    fit_equilibrium,
    is_supercritical,
    moments,
)
from uukin.core import DistributionIso, RadialGrid, initial_bose, nondimensionalize
from uukin.dynamics import (
    Trajectory,
    ansatz_profile,
    collapse_warnings,
    detect_blowup,
    evolve,
    extract_profile,
    fit_selfsimilar,
)
from uukin.errors import FitWindowError, KineticError, new_warning
from uukin.lattice import (
    KernelMode,
    Lattice3,
    LatticeRun,
    initial_bose_lattice,
    kernel_mass,
    markovian_limit_study,
    solve_coupled,
    solve_lattice,
    solve_memory,
    weak_convergence_check,
    write_checkpoint,
)

from .config import FitConfig, RunConfig
from .config_scenario_enum import ScenarioEnum
from .output import (
    RunRecord,
    TrajectorySink,
    emit_snapshot,
    emit_table,
    read_checkpoint_iso,
    read_index,
    read_snapshot,
    write_checkpoint_iso,
)

logger = logging.getLogger(__name__)

RECORD_NAME = "record.json"
EQUIVALENCE_TOL = 1e-8
MC_SIGMA = 3.0
DETAILED_BALANCE_TOL = 1e-6
KERNEL_TEST_WIDTH = 0.1
KERNEL_TEST_T = 0.1
KERNEL_TEST_EPS = (0.8, 0.4, 0.2, 0.1, 0.05)
VALIDATE_LATTICE_STEPS = 5

Scenario = Callable[[RunConfig, Path, RunRecord, bool], None]


def run(config: RunConfig, resume: bool = False) -> RunRecord:
    """
    Execute the configured scenario.

    KineticErrors propagate after the record is written with the failure.
    """
    out = Path(config.output.dir)
    out.mkdir(parents=True, exist_ok=True)
    scenario = config.scenario
    record = RunRecord(scenario.label, config.to_dict(), __version__)
    logger.info("scenario %s -> %s", scenario.label, out)
    if scenario.stochastic:
        record.diagnostics["seed"] = config.seed
    try:
        _SCENARIOS[scenario](config, out, record, resume)
        record.status = "ok"
    except KineticError as e:
        record.status = "failed"
        record.exit_code = e.exit_code
        record.error = e.error().to_dict()
        raise
    finally:
        record.finished = time.time()
        record.write(out / RECORD_NAME)
        for w in record.warnings:
            logger.warning(str(w))
    return record


def _initial_iso(config: RunConfig, grid: RadialGrid) -> DistributionIso:
    ini = config.initial
    if ini.kind == "equilibrium":
        return equilibrium(ini.eq_theta, ini.eq_mu, config.collision.c, grid)
    return initial_bose(ini.z, ini.theta_profile, grid)


def analyze_blowup(traj: Trajectory, fit: FitConfig, out: Path, record: RunRecord):
    """T estimate, (β, α) fit and rescaled profile; FIT_WINDOW failures become warnings."""
    estimate = detect_blowup(traj, fit.window_fraction)
    record.diagnostics["blowup_estimate"] = estimate.to_dict()
    if not estimate.detected:
        return
    try:
        result = fit_selfsimilar(traj, estimate.T, fit.characteristic, fit.kappa, fit.window_fraction)
        record.diagnostics["selfsimilar"] = result.to_dict()
        profile = extract_profile(traj, estimate.T, result.beta, fit.window_fraction)
    except FitWindowError as e:
        record.warnings.append(new_warning(str(e), dict(e.error().extensions or {})))
        return
    record.diagnostics["collapse_metric"] = profile.collapse_metric
    record.warnings.extend(collapse_warnings(profile))
    record.add_file(emit_table(out / "profile.csv", {"xi": profile.xi, "phi": profile.phi}), out)
    record.add_file(emit_table(out / "transform.csv", {"y": profile.y, "psi": profile.psi}), out)


def _moment_table(traj: Trajectory) -> Dict[str, np.ndarray]:
    return {
        "t": np.asarray(traj.times),
        "number": np.array([r.number for r in traj.reports]),
        "energy": np.array([r.energy for r in traj.reports]),
        "entropy": np.array([r.entropy for r in traj.reports]),
        "max_f": traj.max_values,
    }


def _run_uu(config: RunConfig, out: Path, record: RunRecord, resume: bool):
    grid = config.grid.build()
    cfg = config.collision.build()
    c = cfg.occupancy_c
    t_end = config.dynamics.t_end
    f0, t0 = _initial_iso(config, grid), 0.0

    restored = read_checkpoint_iso(out, grid) if resume else None
    if resume and restored is None:
        record.warnings.append(new_warning("no checkpoint found; starting from t=0", {"dir": str(out)}))
    if restored is not None:
        f0, t0 = restored
        logger.info("resuming from checkpoint at t=%.6g", t0)
    record.diagnostics["t_start"] = t0
    record.diagnostics["supercritical"] = is_supercritical(f0, c)

    if not t_end > t0:
        record.warnings.append(new_warning("checkpoint is already at t_end", {"t": t0, "t_end": t_end}))
        return

    sink = TrajectorySink(out, append=restored is not None)
    every = config.output.checkpoint_every

    def on_snapshot(index: int, t: float, f: DistributionIso):
        sink.write(t, f)
        if every and index and index % every == 0:
            write_checkpoint_iso(f, t, out)

    controller = config.dynamics.controller(config.output.snapshot_every)
    traj = evolve(f0, t_end, controller, cfg, t0, on_snapshot)
    for path in write_checkpoint_iso(traj.final, traj.times[-1], out):
        record.add_file(path, out)
    for path in sink.files():
        record.add_file(path, out)
    record.add_file(emit_table(out / "moments.csv", _moment_table(traj)), out)

    record.warnings.extend(traj.warnings)
    record.diagnostics.update({
        "t_final": traj.times[-1],
        "blowup": traj.blowup,
        "stop_reason": traj.stop_reason,
        "accepted_steps": traj.accepted_steps,
        "rejected_steps": traj.rejected_steps,
        "number_drift": traj.drift("number"),
        "energy_drift": traj.drift("energy"),
        "min_entropy_increment": traj.min_entropy_increment,
        "clipped_mass": traj.clipped_mass,
        "final_moments": traj.reports[-1].to_dict(),
    })
    if traj.blowup:
        if config.fit.enabled:
            analyze_blowup(traj, config.fit, out, record)
    else:
        fit = fit_equilibrium(traj.final, c)
        record.diagnostics["equilibrium_fit"] = {"theta": fit.theta, "mu": fit.mu, "residual": fit.residual}


def _lattice_table(run: LatticeRun) -> Dict[str, np.ndarray]:
    return {"t": np.asarray(run.times), "number": run.numbers(), "energy": run.energies(),
            "max_f": np.array([v.max() for v in run.values])}


def _lattice_final(run: LatticeRun) -> Dict[str, np.ndarray]:
    k = run.lattice.indices
    return {"kx": k[:, 0], "ky": k[:, 1], "kz": k[:, 2], "f": run.final_values}


def _run_memory(config: RunConfig, out: Path, record: RunRecord, resume: bool):
    lc = config.lattice
    lattice = lc.lattice
    lattice.check_capacity(lc.budget)
    f0 = initial_bose_lattice(lc.z, lc.theta_profile, lattice)
    mode = lc.kernel_mode
    eps = None if mode == KernelMode.MODE_MARKOVIAN else lc.eps

    result = solve_lattice(f0, mode, lc.t_end, lc.dt, eps, lc.c, lc.budget,
                           config.output.snapshot_every, lc.coupled)
    record.warnings.extend(result.warnings)
    numbers = result.numbers()
    record.diagnostics.update({
        "mode": mode.name,
        "M": lattice.side,
        "number_drift": float(abs(numbers[-1] - numbers[0]) / max(abs(numbers[0]), 1e-300)),
        "max_f": float(result.final_values.max()),
    })
    record.add_file(emit_table(out / "lattice_moments.csv", _lattice_table(result)), out)
    record.add_file(emit_table(out / "lattice_final.csv", _lattice_final(result)), out)
    if result.phi is not None:
        record.diagnostics["max_imag_residual"] = result.max_imag_residual
        record.diagnostics["conjugation_error"] = result.conjugation_error
        for path in write_checkpoint(result.phi, out / "phi"):
            record.add_file(path, out)

    if lc.eps_list:
        table = markovian_limit_study(f0, lc.eps_list, lc.t_end, lc.c, budget=lc.budget)
        record.warnings.extend(table.warnings)
        record.diagnostics["markov_limit"] = {
            "t_end": table.t_end,
            "monotone": table.monotone,
            "rows": [row.to_dict() for row in table.rows],
        }
        columns = {name: [getattr(r, name) for r in table.rows]
                   for name in ("eps", "distance", "relative_distance", "kernel_parameter")}
        columns["blowup"] = [float(r.blowup) for r in table.rows]
        record.add_file(emit_table(out / "markov_limit.csv", columns), out)


def compare_coupled_memory(lattice: Lattice3, z: float, theta_profile, eps: float, t_end: float,
                           dt: float, c: float, budget: int) -> Tuple[Dict[str, float], LatticeRun]:
    """Run both full-memory formulations from the same data and measure their distance."""
    f0 = initial_bose_lattice(z, theta_profile, lattice)
    coupled = solve_coupled(f0, eps, t_end, dt, c, budget)
    memory = solve_memory(f0, eps, t_end, dt, c, budget)
    diff = float(np.abs(coupled.final_values - memory.final_values).max())
    change = float(np.abs(memory.final_values - f0.values).max())
    return {
        "M": lattice.side,
        "eps": eps,
        "t_end": t_end,
        "distance": diff,
        "relative_distance": diff / max(float(np.abs(memory.final_values).max()), 1e-300),
        "relative_to_change": diff / change if change > 0 else 0.0,
        "max_imag_residual": coupled.max_imag_residual,
        "conjugation_error": coupled.conjugation_error,
    }, coupled


def _run_hierarchy(config: RunConfig, out: Path, record: RunRecord, resume: bool):
    lc = config.lattice
    lattice = lc.lattice
    lattice.check_capacity(lc.budget)
    report, coupled = compare_coupled_memory(lattice, lc.z, lc.theta_profile, lc.eps, lc.t_end,
                                             lc.dt, lc.c, lc.budget)
    record.diagnostics["equivalence"] = report
    record.warnings.extend(coupled.warnings)
    if report["relative_distance"] > EQUIVALENCE_TOL:
        record.warnings.append(new_warning("coupled and memory solutions disagree", report))
    record.add_file(emit_table(out / "lattice_moments.csv", _lattice_table(coupled)), out)
    for path in write_checkpoint(coupled.phi, out / "phi"):
        record.add_file(path, out)


def _run_boundary_layer(config: RunConfig, out: Path, record: RunRecord, resume: bool):
    bc = config.boundary
    threads = config.collision.threads
    profile = ansatz_profile(bc.beta, bc.xi_max, bc.n_xi)
    state = asymptotic_data(profile, bc.tau0, bc.n, bc.dy)

    form = wigner_form(state)
    order = np.argsort(form.momenta)
    reference = asymptotic_wigner(profile, bc.tau0, form.momenta)
    record.add_file(emit_table(out / "wigner.csv", {
        "P": form.momenta[order],
        "phi1_re": form.phi1.real[order],
        "phi1_im": form.phi1.imag[order],
        "reference": reference[order],
    }), out)

    evolution = evolve_hierarchy(state, bc.tau_end, bc.dtau, config.output.snapshot_every, threads)
    record.warnings.extend(evolution.warnings)
    record.add_file(emit_table(out / "hierarchy_norms.csv", {
        "tau": [s.tau for s in evolution.states],
        "g_sup": evolution.cumulant_norms,
        "density_re": [s.density.real for s in evolution.states],
        "density_im": [s.density.imag for s in evolution.states],
    }), out)
    record.add_file(emit_snapshot(evolution.final, out / "h_final.csv"), out)

    scaling = source_scaling_study(profile, bc.tau0_list, bc.n, bc.dy, threads=threads)
    record.diagnostics.update({
        "closure": evolution.final.closure,
        "dx": state.dx,
        "density_drift": evolution.density_drift,
        "symmetry_error": evolution.final.symmetry_error(),
        "wigner_imag_ratio": form.imag_ratio,
        "source_scaling": scaling.to_dict(),
    })


def _run_scales(config: RunConfig, out: Path, record: RunRecord, resume: bool):
    beta = config.boundary.beta
    params = config.physical.params()
    scales = physical_scales(params, beta)
    record.warnings.extend(scales.warnings)
    record.diagnostics["scales"] = scales.to_dict()

    eps = config.scales_eps
    if eps is None:
        eps = nondimensionalize(params).epsilon
    if eps > 0:
        onset = correlation_onset_time(eps, beta)
        magnitude = correlation_magnitude(onset, beta)
        record.diagnostics["correlations"] = {
            "eps": eps,
            "onset_time": onset,
            "magnitude": magnitude.value,
            "exponent": magnitude.exponent,
            "f1_squared_exponent": magnitude.f1_squared_exponent,
            "exponents_match": magnitude.exponents_match,
        }
    else:
        record.warnings.append(new_warning("zero coupling: no correlation onset time", {"eps": eps}))


def _validate_collision(config: RunConfig, record: RunRecord):
    grid = config.grid.build()
    cfg = config.collision.build()
    c = cfg.occupancy_c
    ini = config.initial

    eq = equilibrium(ini.eq_theta, ini.eq_mu, c, grid)
    eq_rate = collision_rhs_iso(eq, cfg)
    relative = eq_rate.max_abs / max(eq.max, 1e-300)
    record.diagnostics["detailed_balance"] = {"theta": ini.eq_theta, "mu": ini.eq_mu, "relative_rate": relative}
    if relative > DETAILED_BALANCE_TOL:
        record.warnings.append(new_warning("equilibrium is not stationary on this grid",
                                           {"relative_rate": relative, "interpolation": cfg.interpolation.name}))

    f0 = _initial_iso(config, grid)
    rate = collision_rhs_iso(f0, cfg)
    record.diagnostics["conservation"] = {
        "number_rate": rate.number_rate / max(grid.number(f0.values), 1e-300),
        "energy_drift": rate.energy_drift,
    }

    checks = []
    for i, p1 in enumerate(config.mc.momenta):
        if p1 * p1 > grid.eps_max:
            record.warnings.append(new_warning("momentum outside grid support; skipped", {"p1": p1}))
            continue
        # compared at the nearest node
        node = int(np.argmin(np.abs(grid.nodes - p1 * p1)))
        est = collision_mc(f0, math.sqrt(grid.nodes[node]), config.mc.n_samples, config.seed + i, c,
                           cfg.threads, cfg.interpolation)
        det = float(rate.values[node])
        sigma = abs(det - est.estimate) / est.standard_error if est.standard_error > 0 else math.inf
        checks.append({"p1": p1, "node_eps": float(grid.nodes[node]), "deterministic": det, "mc": est.estimate,
                       "standard_error": est.standard_error, "sigma": sigma, "agree": sigma <= MC_SIGMA})
        if sigma > MC_SIGMA:
            record.warnings.append(new_warning("Monte-Carlo estimate disagrees with the quadrature",
                                               {"p1": p1, "sigma": sigma}))
    record.diagnostics["monte_carlo"] = checks


def _validate_kernel(record: RunRecord):
    def gaussian(x):
        return np.exp(-x * x / (2.0 * KERNEL_TEST_WIDTH ** 2))

    table = weak_convergence_check(gaussian, KERNEL_TEST_T, KERNEL_TEST_EPS, ref_width=KERNEL_TEST_WIDTH)
    record.warnings.extend(table.warnings)
    record.diagnostics["kernel"] = {
        "t": table.t,
        "eps": list(KERNEL_TEST_EPS),
        "errors": table.errors,
        "strictly_decreasing": table.strictly_decreasing,
        "mass": kernel_mass(KERNEL_TEST_T, KERNEL_TEST_EPS[-1]),
    }


def _run_validate(config: RunConfig, out: Path, record: RunRecord, resume: bool):
    _validate_collision(config, record)
    _validate_kernel(record)
    lc = config.lattice
    report, _ = compare_coupled_memory(Lattice3(3, lc.dp), lc.z, lc.theta_profile, lc.eps,
                                       VALIDATE_LATTICE_STEPS * lc.dt, lc.dt, lc.c, lc.budget)
    record.diagnostics["lattice_equivalence"] = report
    if report["relative_distance"] > EQUIVALENCE_TOL:
        record.warnings.append(new_warning("coupled and memory solutions disagree", report))


def fit_index(index_path, fit: Optional[FitConfig] = None, c: float = 1.0) -> RunRecord:
    """Blow-up analysis of a stored trajectory; writes ``fit.json`` next to the index."""
    index_path = Path(index_path)
    root = index_path.parent
    fit = fit or FitConfig({})
    record = RunRecord("fit", {"index": str(index_path), "characteristic": fit.characteristic,
                               "window_fraction": fit.window_fraction, "kappa": fit.kappa}, __version__)
    try:
        traj = Trajectory()
        grid = None
        for _, t, rel in read_index(index_path):
            f = read_snapshot(root / rel, grid)
            grid = f.grid
            traj.append(t, f, moments(f, c))
        record.diagnostics["snapshots"] = len(traj)
        analyze_blowup(traj, fit, root, record)
        record.status = "ok"
    except KineticError as e:
        record.status = "failed"
        record.exit_code = e.exit_code
        record.error = e.error().to_dict()
        raise
    finally:
        record.finished = time.time()
        record.write(root / "fit.json")
    return record


_SCENARIOS: Dict[ScenarioEnum, Scenario] = {
    ScenarioEnum.SCENARIO_UU: _run_uu,
    ScenarioEnum.SCENARIO_MEMORY: _run_memory,
    ScenarioEnum.SCENARIO_HIERARCHY: _run_hierarchy,
    ScenarioEnum.SCENARIO_BOUNDARY_LAYER: _run_boundary_layer,
    ScenarioEnum.SCENARIO_SCALES: _run_scales,
    ScenarioEnum.SCENARIO_VALIDATE: _run_validate,
}
