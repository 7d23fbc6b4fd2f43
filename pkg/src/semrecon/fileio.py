"""File formats shared by the CLI and the evaluation harness.

Everything human-facing is JSON (scenarios, plans, measurements, recovery
results, experiment specs); the gain dictionary has its own binary container
in the dictionary module. Units at every interface: meters, watts, hertz,
and dBm only in exports.
"""
from __future__ import annotations

import cmath
import csv
import json

import numpy as np

from . import evaluation as ev
from . import sampling as sp
from .clustering import ClusterReport
from .metrics import watts_to_dbm
from .raytrace import RtParams
from .recovery import RecoveredMap
from .scenario import AxisAlignedBox, ScenarioConfig, Transmitter, grid_coords


class SchemaError(ValueError):
    """A document does not match its declared schema."""


def _require(doc: dict, key: str, kind, where: str):
    if key not in doc:
        raise SchemaError(f"{where}: missing required key {key!r}")
    value = doc[key]
    if kind is float and isinstance(value, int):
        value = float(value)
    if not isinstance(value, kind):
        raise SchemaError(f"{where}: key {key!r} must be {kind}, got {type(value).__name__}")
    return value


def _triple(value, where: str) -> tuple:
    if not isinstance(value, (list, tuple)) or len(value) != 3:
        raise SchemaError(f"{where}: expected a 3-element array")
    return tuple(value)


def _load_json(path, where: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{where}: invalid JSON ({exc})") from exc


def scenario_to_dict(cfg: ScenarioConfig, rt: RtParams | None = None) -> dict:
    doc = {
        "roi_extent_m": list(cfg.roi_extent),
        "grid_dims": list(cfg.grid_dims),
        "frequency_hz": cfg.frequency_hz,
        "noise_variance_w2": cfg.noise_variance,
        "antenna_gain_tx": cfg.antenna_gain_tx,
        "antenna_gain_rx": cfg.antenna_gain_rx,
        "path_loss_exponent": cfg.path_loss_exponent,
        "buildings": [{"min_corner_m": list(b.min_corner),
                       "max_corner_m": list(b.max_corner)} for b in cfg.buildings],
        "transmitters": [{"position_m": list(t.position),
                          "power_watts": t.power_watts} for t in cfg.transmitters],
    }
    if rt is not None:
        doc["ray_tracing"] = {
            "reflection_coeff": {"magnitude": abs(rt.reflection_coeff),
                                 "phase_rad": cmath.phase(rt.reflection_coeff)},
            "diffraction_coeff": {"magnitude": abs(rt.diffraction_coeff),
                                  "phase_rad": cmath.phase(rt.diffraction_coeff)},
            "reference_distance_m": rt.reference_distance,
            "ground_reflection": rt.ground_reflection,
        }
    return doc


def scenario_from_dict(doc: dict) -> tuple[ScenarioConfig, RtParams]:
    where = "scenario"
    extent = _triple(_require(doc, "roi_extent_m", (list, tuple), where), where)
    dims = _triple(_require(doc, "grid_dims", (list, tuple), where), where)
    if not all(isinstance(d, int) for d in dims):
        raise SchemaError(f"{where}: grid_dims must be integers")
    buildings = tuple(
        AxisAlignedBox(_triple(b.get("min_corner_m"), where),
                       _triple(b.get("max_corner_m"), where))
        for b in doc.get("buildings", []))
    transmitters = tuple(
        Transmitter(_triple(t.get("position_m"), where),
                    _require(t, "power_watts", float, where))
        for t in doc.get("transmitters", []))
    cfg = ScenarioConfig(
        roi_extent=tuple(float(e) for e in extent),
        grid_dims=tuple(dims),
        buildings=buildings,
        transmitters=transmitters,
        frequency_hz=_require(doc, "frequency_hz", float, where),
        noise_variance=float(doc.get("noise_variance_w2", 0.0)),
        antenna_gain_tx=float(doc.get("antenna_gain_tx", 1.0)),
        antenna_gain_rx=float(doc.get("antenna_gain_rx", 1.0)),
        path_loss_exponent=float(doc.get("path_loss_exponent", 2.0)),
    )
    rt_doc = doc.get("ray_tracing", {})

    def coeff(key, default):
        entry = rt_doc.get(key)
        if entry is None:
            return default
        return entry["magnitude"] * cmath.exp(1j * entry["phase_rad"])

    rt = RtParams(
        reflection_coeff=coeff("reflection_coeff", RtParams().reflection_coeff),
        diffraction_coeff=coeff("diffraction_coeff", RtParams().diffraction_coeff),
        reference_distance=float(rt_doc.get("reference_distance_m", 1.0)),
        ground_reflection=bool(rt_doc.get("ground_reflection", False)),
    )
    return cfg, rt


def save_scenario(cfg: ScenarioConfig, path, rt: RtParams | None = None) -> None:
    with open(path, "w") as fh:
        json.dump(scenario_to_dict(cfg, rt), fh, indent=2)


def load_scenario(path) -> tuple[ScenarioConfig, RtParams]:
    return scenario_from_dict(_load_json(path, "scenario"))


def save_plan(plan: sp.SamplingPlan, path) -> None:
    doc = {"method": plan.method, "seed": plan.seed, "m": plan.m,
           "n": plan.n_total, "indices": [int(i) for i in plan.indices]}
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)


def load_plan(path) -> sp.SamplingPlan:
    doc = _load_json(path, "plan")
    where = "plan"
    indices = _require(doc, "indices", list, where)
    n = _require(doc, "n", int, where)
    method = _require(doc, "method", str, where)
    try:
        return sp.SamplingPlan(np.array(indices, dtype=int), n, method,
                               seed=doc.get("seed"))
    except sp.SamplingError as exc:
        raise SchemaError(f"{where}: {exc}") from exc


def save_measurements(values: np.ndarray, noise_variance: float, path) -> None:
    doc = {"values_watts": [float(v) for v in values],
           "noise_variance_w2": noise_variance}
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)


def load_measurements(path) -> sp.MeasurementVector:
    doc = _load_json(path, "measurements")
    values = _require(doc, "values_watts", list, "measurements")
    return sp.MeasurementVector(np.array(values, dtype=float),
                                float(doc.get("noise_variance_w2", 0.0)))


def _cluster_report_to_dict(report: ClusterReport | None):
    if report is None:
        return None
    return {
        "clusters": report.clusters,
        "centers_m": [list(c) for c in report.centers],
        "powers_watts": report.powers,
        "mmd_theta": report.mmd_theta,
        "delta_db": report.delta_db,
    }


def save_result(result: RecoveredMap, cfg: ScenarioConfig, path,
                hyper_doc: dict | None = None) -> None:
    omega = result.omega_star
    rows = []
    for n in np.flatnonzero(omega):
        ix, iy, iz = grid_coords(cfg, int(n))
        dx, dy, dz = cfg.cell_size
        rows.append({"index": int(n), "ix": ix, "iy": iy, "iz": iz,
                     "x_m": (ix + 0.5) * dx, "y_m": (iy + 0.5) * dy,
                     "z_m": (iz + 0.5) * dz, "watts": float(omega[n])})
    doc = {
        "method": result.method,
        "hyperparams": hyper_doc or {},
        "grid": {"roi_extent_m": list(cfg.roi_extent),
                 "grid_dims": list(cfg.grid_dims)},
        "omega_star": rows,
        "clusters": _cluster_report_to_dict(result.cluster_report),
        "objective_trace": (list(result.posterior.objective_trace)
                            if result.posterior else []),
        "x_hat_watts": [float(v) for v in result.x_hat],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)


def load_result(path) -> dict:
    doc = _load_json(path, "result")
    _require(doc, "x_hat_watts", list, "result")
    _require(doc, "grid", dict, "result")
    return doc


def experiment_spec_from_dict(doc: dict, scenario_dir=None) -> ev.ExperimentSpec:
    where = "experiment"
    if "scenario" in doc and isinstance(doc["scenario"], dict):
        cfg, rt = scenario_from_dict(doc["scenario"])
    elif "scenario_path" in doc:
        import os
        path = doc["scenario_path"]
        if scenario_dir is not None and not os.path.isabs(path):
            path = os.path.join(scenario_dir, path)
        cfg, rt = load_scenario(path)
    else:
        raise SchemaError(f"{where}: needs 'scenario' (inline) or 'scenario_path'")
    try:
        return ev.ExperimentSpec(
            scenario=cfg,
            rates=tuple(doc.get("rates", (0.1,))),
            sparsities=tuple(doc.get("sparsities", (4,))),
            algorithms=tuple(doc.get("algorithms", ev.ALGORITHMS)),
            seeds=tuple(doc.get("seeds", (0,))),
            rt_params=rt,
            transmit_power=float(doc.get("transmit_power_watts", 2.0)),
        )
    except ev.EvaluationError as exc:
        raise SchemaError(f"{where}: {exc}") from exc


def load_experiment_spec(path) -> ev.ExperimentSpec:
    import os
    return experiment_spec_from_dict(_load_json(path, "experiment"),
                                     scenario_dir=os.path.dirname(os.path.abspath(path)))


def export_map_long_csv(doc: dict, path) -> None:
    """One row per cube: grid coords, center position, RSS in dBm."""
    extent = doc["grid"]["roi_extent_m"]
    dims = doc["grid"]["grid_dims"]
    cfg = ScenarioConfig(roi_extent=tuple(extent), grid_dims=tuple(dims))
    x = np.array(doc["x_hat_watts"])
    if len(x) != cfg.n_cubes:
        raise SchemaError("result: x_hat length does not match grid")
    dbm = watts_to_dbm(x)
    dx, dy, dz = cfg.cell_size
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["ix", "iy", "iz", "x_m", "y_m", "z_m", "rss_dbm"])
        for n in range(cfg.n_cubes):
            ix, iy, iz = grid_coords(cfg, n)
            writer.writerow([ix, iy, iz, (ix + 0.5) * dx, (iy + 0.5) * dy,
                             (iz + 0.5) * dz, f"{dbm[n]:.4f}"])


def export_map_slices_csv(doc: dict, prefix) -> list[str]:
    """One matrix-shaped CSV per z level (rows iy, columns ix), for heatmaps."""
    extent = doc["grid"]["roi_extent_m"]
    dims = doc["grid"]["grid_dims"]
    cfg = ScenarioConfig(roi_extent=tuple(extent), grid_dims=tuple(dims))
    x = np.array(doc["x_hat_watts"])
    if len(x) != cfg.n_cubes:
        raise SchemaError("result: x_hat length does not match grid")
    dbm = watts_to_dbm(x)
    nx, ny, nz = cfg.grid_dims
    grid = dbm.reshape(nz, ny, nx)  # linear order is x fastest, then y, then z
    written = []
    for iz in range(nz):
        path = f"{prefix}_z{iz}.csv"
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            for iy in range(ny):
                writer.writerow([f"{v:.4f}" for v in grid[iz, iy]])
        written.append(path)
    return written
