"""Command-line front end for the reconstruction pipeline.

Subcommands mirror the pipeline stages: validate, dict-build, plan, recover,
evaluate, export-map. All randomness is controlled by explicit --seed flags;
identical inputs give identical outputs. Exit codes: 0 success, 2 schema or
validation problem, 3 numerical failure, 4 I/O failure.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

EXIT_SCHEMA = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semrecon",
        description="Reconstruct a 3D RSS map from sparse, well-placed samples. "
                    "Units at all interfaces: meters, watts, hertz; exports in dBm.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a scenario file against its schema")
    p.add_argument("scenario", help="scenario JSON")

    p = sub.add_parser("dict-build", help="build a gain dictionary from a scenario")
    p.add_argument("scenario", help="scenario JSON")
    p.add_argument("--mode", choices=["full-rt", "sparse-rt-idw", "freespace"],
                   default="full-rt")
    p.add_argument("--rho", type=float, default=0.1,
                   help="traced fraction for sparse-rt-idw")
    p.add_argument("--idw-exponent", type=float, default=2.0)
    p.add_argument("--seed", type=int, default=0, help="anchor-selection seed")
    p.add_argument("--csv", help="also write a dB-scale i,j,gain_db CSV here")
    p.add_argument("-o", "--out", required=True, help="output dictionary container")

    p = sub.add_parser("plan", help="choose sampling cubes for a dictionary")
    p.add_argument("dictionary", help="dictionary container")
    p.add_argument("--method", choices=["mmi", "random"], required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--m", type=int, help="number of samples")
    group.add_argument("--rate", type=float, help="sampling rate m/n")
    p.add_argument("--seed", type=int, default=0, help="seed for random plans")
    p.add_argument("-o", "--out", required=True, help="output plan JSON")

    p = sub.add_parser("recover", help="recover sources and synthesize the map")
    p.add_argument("--dict", dest="dictionary", required=True)
    p.add_argument("--plan", required=True)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--measurements", help="measurement JSON")
    src.add_argument("--scenario", help="scenario JSON to synthesize measurements from")
    p.add_argument("--noise-seed", type=int, default=0,
                   help="noise seed when synthesizing measurements")
    p.add_argument("--solver", choices=["sbl", "swomp"], default="sbl")
    p.add_argument("--clustering", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--delta-db", type=float, default=-30.0,
                   help="peak-relative sparsity threshold (negative dB)")
    p.add_argument("--theta", type=float, default=0.5,
                   help="max-min-distance seeding fraction")
    p.add_argument("--prune", default="adaptive",
                   help="'adaptive' or 'fixed:<variance threshold>'")
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--max-iters", type=int, default=1000)
    p.add_argument("--dump-measurements", help="write the measurement vector used")
    p.add_argument("-o", "--out", required=True, help="output result JSON")

    p = sub.add_parser("evaluate", help="run a seeded multi-algorithm sweep")
    p.add_argument("spec", help="experiment spec JSON")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("-o", "--out", required=True, help="output directory")

    p = sub.add_parser("export-map", help="export a recovery result for plotting")
    p.add_argument("result", help="result JSON")
    p.add_argument("--format", choices=["long", "slices"], default="long")
    p.add_argument("-o", "--out", required=True,
                   help="CSV path (long) or filename prefix (slices)")
    return parser


def _parse_prune(text: str) -> tuple[str, float]:
    if text == "adaptive":
        return "adaptive", 0.0
    if text.startswith("fixed:"):
        return "fixed", float(text.split(":", 1)[1])
    if text == "fixed":
        return "fixed", 0.0
    raise ValueError(f"invalid prune spec {text!r}")


def _cmd_validate(args) -> int:
    from . import fileio
    cfg, _ = fileio.load_scenario(args.scenario)
    print(f"ok: {cfg.n_cubes} cubes, {len(cfg.buildings)} buildings, "
          f"{len(cfg.transmitters)} transmitters")
    return 0


def _cmd_dict_build(args) -> int:
    from . import dictionary as dm
    from . import fileio
    cfg, rt = fileio.load_scenario(args.scenario)
    mode = args.mode.replace("-", "_")
    d = dm.build_dictionary(cfg, rt, mode=mode, rho=args.rho,
                            idw_exponent=args.idw_exponent, seed=args.seed)
    dm.save_dictionary(d, args.out)
    if args.csv:
        dm.export_gains_db_csv(d, args.csv)
    print(f"wrote {args.out}: {d.n}x{d.n} gains, mode {d.mode}")
    return 0


def _cmd_plan(args) -> int:
    from . import dictionary as dm
    from . import fileio
    from . import sampling as sp
    d = dm.load_dictionary(args.dictionary)
    m = args.m if args.m is not None else max(1, int(round(args.rate * d.n)))
    if args.method == "random":
        plan = sp.random_plan(d.n, m, args.seed)
    else:
        plan = sp.greedy_mmi_plan(d.gains, m)
    fileio.save_plan(plan, args.out)
    print(f"wrote {args.out}: {plan.m} of {plan.n_total} cubes ({plan.method})")
    return 0


def _cmd_recover(args) -> int:
    from . import dictionary as dm
    from . import fileio
    from . import recovery as rc
    from . import sampling as sp
    from .sbl import SblHyperparams

    d = dm.load_dictionary(args.dictionary)
    plan = fileio.load_plan(args.plan)
    if plan.n_total != d.n:
        raise fileio.SchemaError("plan and dictionary sizes disagree")

    if args.measurements:
        meas = fileio.load_measurements(args.measurements)
        if len(meas.values) != plan.m:
            raise fileio.SchemaError("measurement count does not match plan")
        cfg = None
        grid_cfg = _grid_config(d)
    else:
        from .dictionary import ground_truth_map
        cfg, rt = fileio.load_scenario(args.scenario)
        if cfg.grid_dims != d.grid_dims:
            raise fileio.SchemaError("scenario grid does not match dictionary")
        x_true = ground_truth_map(cfg, rt)
        meas = sp.measure(x_true, plan, cfg.noise_variance, args.noise_seed)
        grid_cfg = cfg
    if args.dump_measurements:
        fileio.save_measurements(meas.values, meas.noise_variance,
                                 args.dump_measurements)

    prune_mode, prune_threshold = _parse_prune(args.prune)
    hyper = SblHyperparams(prune=prune_mode, prune_threshold=prune_threshold,
                           convergence_tol=args.tol, max_iters=args.max_iters)
    result = rc.recover(grid_cfg, d, plan, meas.values, solver=args.solver,
                        clustering=args.clustering, hyper=hyper,
                        delta_db=args.delta_db, theta=args.theta)
    hyper_doc = {"solver": args.solver, "clustering": args.clustering,
                 "delta_db": args.delta_db, "theta": args.theta,
                 "prune": args.prune, "tol": args.tol,
                 "max_iters": args.max_iters}
    fileio.save_result(result, grid_cfg, args.out, hyper_doc)
    nnz = int(np.count_nonzero(result.omega_star))
    print(f"wrote {args.out}: {nnz} sources, method {result.method}")
    return 0


def _grid_config(d):
    from .scenario import ScenarioConfig
    return ScenarioConfig(roi_extent=d.roi_extent, grid_dims=d.grid_dims)


def _cmd_evaluate(args) -> int:
    import os

    from . import evaluation as ev
    from . import fileio
    spec = fileio.load_experiment_spec(args.spec)
    records = ev.run_experiment(spec, jobs=args.jobs)
    os.makedirs(args.out, exist_ok=True)
    ev.write_records_csv(records, os.path.join(args.out, "records.csv"))
    ev.write_summary_json(records, os.path.join(args.out, "summary.json"))
    ev.write_curve_csvs(records, args.out)
    n_err = sum(1 for r in records if r.error)
    print(f"wrote {args.out}: {len(records)} records, {n_err} errors")
    return 0


def _cmd_export_map(args) -> int:
    from . import fileio
    doc = fileio.load_result(args.result)
    if args.format == "long":
        fileio.export_map_long_csv(doc, args.out)
        print(f"wrote {args.out}")
    else:
        written = fileio.export_map_slices_csv(doc, args.out)
        print(f"wrote {len(written)} slice files: {written[0]} ...")
    return 0


_COMMANDS = {
    "validate": _cmd_validate,
    "dict-build": _cmd_dict_build,
    "plan": _cmd_plan,
    "recover": _cmd_recover,
    "evaluate": _cmd_evaluate,
    "export-map": _cmd_export_map,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    from . import dictionary as dm
    from . import sampling as sp
    from .clustering import ClusteringError
    from .fileio import SchemaError
    from .metrics import MetricError
    from .sbl import RecoveryError
    from .scenario import ScenarioError
    from .swomp import SwompError
    try:
        return _COMMANDS[args.command](args)
    except (SchemaError, ScenarioError, dm.DictionaryError, sp.SamplingError,
            ClusteringError, MetricError, SwompError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except (RecoveryError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
