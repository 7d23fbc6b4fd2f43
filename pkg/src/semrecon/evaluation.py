"""Seeded multi-algorithm sweeps over sampling rate and source count.

Algorithm names follow the comparison convention: the prefix picks the
sampler (Random / MMI), an M in the suffix picks the ray-traced dictionary
(otherwise the free-space one), a C turns on cluster refinement with
adaptive pruning, and SWOMP swaps the solver. Ground truth always comes
from the ray tracer; only the recovery dictionary varies, which is exactly
the model-mismatch the comparison probes.

Every cell (algorithm, rate, k, seed) is deterministic: transmitter layouts
derive from (seed, k), measurement noise from (seed, plan); rate sweeps
share seeds so curves use common random numbers.
"""
from __future__ import annotations

import csv
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import dictionary as dm
from . import metrics as mt
from . import recovery as rc
from . import sampling as sp
from . import scenario as sc
from .raytrace import RtParams
from .sbl import SblHyperparams

ALGORITHMS = ("Random-SBL", "Random-CSBL", "Random-MSBL",
              "MMI-SBL", "MMI-CMSBL", "Random-SWOMP")


class EvaluationError(ValueError):
    """Invalid experiment specification."""


@dataclass(frozen=True)
class AlgorithmSpec:
    name: str
    sampler: str          # "random" | "mmi"
    dictionary: str       # "full_rt" | "freespace"
    clustering: bool
    solver: str           # "sbl" | "swomp"


def parse_algorithm(name: str) -> AlgorithmSpec:
    try:
        prefix, tail = name.split("-", 1)
    except ValueError:
        raise EvaluationError(f"algorithm name {name!r} lacks a sampler prefix")
    sampler = {"Random": "random", "MMI": "mmi"}.get(prefix)
    if sampler is None:
        raise EvaluationError(f"unknown sampler prefix in {name!r}")
    if tail == "SWOMP":
        return AlgorithmSpec(name, sampler, "freespace", False, "swomp")
    if not tail.endswith("SBL"):
        raise EvaluationError(f"unknown algorithm family in {name!r}")
    flags = tail[:-3]
    if not set(flags) <= {"C", "M"}:
        raise EvaluationError(f"unknown flags {flags!r} in {name!r}")
    return AlgorithmSpec(name, sampler,
                         "full_rt" if "M" in flags else "freespace",
                         "C" in flags, "sbl")


@dataclass(frozen=True)
class ExperimentSpec:
    scenario: sc.ScenarioConfig
    rates: tuple[float, ...] = (0.1,)
    sparsities: tuple[int, ...] = (4,)
    algorithms: tuple[str, ...] = ALGORITHMS
    seeds: tuple[int, ...] = (0,)
    rt_params: RtParams = field(default_factory=lambda: RtParams(ground_reflection=True))
    transmit_power: float = 2.0
    delta_db: float = rc.DELTA_DB_DEFAULT
    theta: float = rc.MMD_THETA_DEFAULT

    def __post_init__(self):
        if not all(0 < r <= 1 for r in self.rates):
            raise EvaluationError("rates must lie in (0, 1]")
        if not all(k >= 1 for k in self.sparsities):
            raise EvaluationError("sparsities must be >= 1")
        if not self.seeds:
            raise EvaluationError("need at least one seed")
        for name in self.algorithms:
            parse_algorithm(name)


@dataclass
class MetricRecord:
    algorithm: str
    rate: float
    k: int
    seed: int
    mse_db: float = float("nan")
    rmse_dbm: float = float("nan")
    support_distortion_m: float = float("nan")
    runtime_seconds: float = float("nan")
    error: str | None = None

    def as_row(self) -> dict:
        return {
            "algorithm": self.algorithm, "rate": self.rate, "k": self.k,
            "seed": self.seed, "mse_db": self.mse_db, "rmse_dbm": self.rmse_dbm,
            "support_distortion_m": self.support_distortion_m,
            "runtime_seconds": self.runtime_seconds,
            "error": self.error or "",
        }


def _seeded_scenario(spec: ExperimentSpec, k: int, seed: int) -> sc.ScenarioConfig:
    base = spec.scenario
    txs = sc.random_transmitters(base, k, seed, power_watts=spec.transmit_power)
    return replace(base, transmitters=txs)


def _solver_hyper(clustering: bool) -> SblHyperparams:
    prune = "adaptive" if clustering else "fixed"
    return SblHyperparams(prune=prune, prune_threshold=0.0)


def _run_cell(spec: ExperimentSpec, name: str, rate: float, k: int, seed: int,
              dictionaries: dict, truth_cache: dict, plan_cache: dict) -> MetricRecord:
    record = MetricRecord(name, rate, k, seed)
    algo = parse_algorithm(name)
    try:
        cfg = _seeded_scenario(spec, k, seed)
        n = cfg.n_cubes
        m = max(1, int(round(rate * n)))
        key = (k, seed)
        if key not in truth_cache:
            truth_cache[key] = (dm.ground_truth_map(cfg, spec.rt_params),
                                sc.sparse_truth(cfg))
        x_true, omega_true = truth_cache[key]

        gains = dictionaries[algo.dictionary]
        if algo.sampler == "random":
            plan = sp.random_plan(n, m, seed)
        else:
            plan_key = (algo.dictionary, m)
            if plan_key not in plan_cache:
                plan_cache[plan_key] = sp.greedy_mmi_plan(gains.gains, m)
            plan = plan_cache[plan_key]
        t = sp.measure(x_true, plan, cfg.noise_variance, seed)

        start = time.perf_counter()
        result = rc.recover(cfg, gains, plan, t.values, solver=algo.solver,
                            clustering=algo.clustering,
                            hyper=_solver_hyper(algo.clustering) if algo.solver == "sbl" else None,
                            delta_db=spec.delta_db, theta=spec.theta,
                            method_tag=name)
        record.runtime_seconds = time.perf_counter() - start
        record.mse_db = mt.mse_db(result.omega_star, omega_true)
        record.rmse_dbm = mt.rmse(result.x_hat, x_true)
        record.support_distortion_m = mt.support_distortion(
            cfg, result.omega_star, omega_true, spec.delta_db)
    except Exception as exc:  # noqa: BLE001 - per-cell isolation by contract
        record.error = f"{type(exc).__name__}: {exc}"
    return record


def build_dictionaries(spec: ExperimentSpec) -> dict:
    """One gain dictionary per mode the spec's algorithms need."""
    modes = {parse_algorithm(name).dictionary for name in spec.algorithms}
    built = {}
    for mode in sorted(modes):
        built[mode] = dm.build_dictionary(spec.scenario, spec.rt_params, mode=mode)
    return built


def _cells(spec: ExperimentSpec):
    for name in sorted(spec.algorithms):
        for rate in sorted(spec.rates):
            for k in sorted(spec.sparsities):
                for seed in sorted(spec.seeds):
                    yield name, rate, k, seed


def run_experiment(spec: ExperimentSpec, jobs: int = 1,
                   dictionaries: dict | None = None) -> list[MetricRecord]:
    """All cells of the sweep, in canonical (algorithm, rate, k, seed) order.

    Prebuilt dictionaries (mode -> GainDictionary) may be passed in when a
    caller runs several sweeps over one scenario.
    """
    if dictionaries is None:
        dictionaries = build_dictionaries(spec)
    truth_cache: dict = {}
    plan_cache: dict = {}
    cells = list(_cells(spec))
    if jobs <= 1:
        return [_run_cell(spec, *cell, dictionaries, truth_cache, plan_cache)
                for cell in cells]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(_run_cell, spec, *cell, dictionaries, {}, {})
                   for cell in cells]
        return [f.result() for f in futures]


def summarize(records: list[MetricRecord]) -> dict:
    """Per-(algorithm, rate, k) mean and standard deviation of each metric."""
    groups: dict = {}
    for r in records:
        if r.error:
            continue
        groups.setdefault((r.algorithm, r.rate, r.k), []).append(r)
    out = []
    for (algorithm, rate, k), rs in sorted(groups.items()):
        entry = {"algorithm": algorithm, "rate": rate, "k": k, "n_seeds": len(rs)}
        for metric in ("mse_db", "rmse_dbm", "support_distortion_m", "runtime_seconds"):
            vals = np.array([getattr(r, metric) for r in rs])
            entry[f"{metric}_mean"] = float(vals.mean())
            entry[f"{metric}_std"] = float(vals.std(ddof=1)) if len(vals) > 1 else 0.0
        out.append(entry)
    n_errors = sum(1 for r in records if r.error)
    return {"cells": out, "n_records": len(records), "n_errors": n_errors}


def write_records_csv(records: list[MetricRecord], path) -> None:
    fields = ["algorithm", "rate", "k", "seed", "mse_db", "rmse_dbm",
              "support_distortion_m", "runtime_seconds", "error"]
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        for r in records:
            writer.writerow(r.as_row())


def write_summary_json(records: list[MetricRecord], path) -> None:
    with open(path, "w") as fh:
        json.dump(summarize(records), fh, indent=2)


def write_curve_csvs(records: list[MetricRecord], out_dir) -> list[str]:
    """Plot-ready curves: metric vs rate and metric vs k, one row per
    (algorithm, x) with mean and std columns."""
    import os
    summary = summarize(records)["cells"]
    written = []
    curves = [
        ("rmse_vs_rate.csv", "rate", "rmse_dbm"),
        ("mse_vs_rate.csv", "rate", "mse_db"),
        ("rmse_vs_k.csv", "k", "rmse_dbm"),
        ("mse_vs_k.csv", "k", "mse_db"),
    ]
    for fname, x_key, metric in curves:
        path = os.path.join(out_dir, fname)
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["algorithm", x_key, f"{metric}_mean", f"{metric}_std",
                             "n_seeds"])
            for cell in summary:
                writer.writerow([cell["algorithm"], cell[x_key],
                                 cell[f"{metric}_mean"], cell[f"{metric}_std"],
                                 cell["n_seeds"]])
        written.append(path)
    return written
