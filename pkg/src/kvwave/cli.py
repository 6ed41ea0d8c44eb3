"""Command-line surface: run, verify, sweep, basis-info.

Exit codes: 0 success (verify: all checks passed), 1 check/cell failures,
2 configuration errors, 3 solver failures (blow-up or Newton divergence,
with the failing time recorded in the manifest).
"""

import argparse
import itertools
import os
import sys
from multiprocessing import Pool
from pathlib import Path

import numpy as np

from . import reporting, verify
from .basis import build_basis
from .config import (
    SCHEMA,
    ConfigError,
    RunConfig,
    build_basis_from,
    build_initial,
    build_profile,
    build_scheme,
    build_truncation,
    config_hash,
    load_config,
    parse_config_text,
    validate_checks,
)
from .damping import assemble_kv_matrix, structural_constant_estimate
from .dynamics import BlowUpError, NewtonDivergenceError, SchemeConfig, run
from .nonlinearity import Truncation


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="kvwave",
        description="Spectral simulator and inequality harness for the damped quintic wave model",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("run", "verify", "sweep", "basis-info"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="path to the configuration file")
        p.add_argument("--out", default=None, help="output directory (overrides run.out_dir)")
        p.add_argument("--workers", type=int, default=None, help="parallel workers for sweeps")
        p.add_argument("--seed", type=int, default=None, help="seed override for checks")
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(args)
        if args.command == "verify":
            return cmd_verify(args)
        if args.command == "sweep":
            return cmd_sweep(args)
        return cmd_basis_info(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


def _load(args, require=None):
    if require is None:
        cfg = load_config(args.config)
    else:
        cfg = load_config(args.config, require=require)
    if args.seed is not None:
        cfg.values["run.seed"] = args.seed
    return cfg


def _out_dir(args, cfg):
    out = Path(args.out) if args.out else Path(cfg["run.out_dir"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _build_all(cfg):
    basis = build_basis_from(cfg)
    profile = build_profile(cfg, basis)
    K = assemble_kv_matrix(profile, basis)
    trunc = build_truncation(cfg)
    scheme = build_scheme(cfg)
    initial = build_initial(cfg, basis)
    return basis, profile, K, trunc, scheme, initial


def _run_main_trajectory(cfg, basis, profile, K, trunc, scheme, initial):
    return run(
        initial.copy(),
        K,
        basis,
        trunc,
        scheme,
        cfg["run.T"],
        sample_every=cfg["run.sample_every"],
        n_list=cfg["run.N_list"],
        profile=profile,
    )


def cmd_run(args):
    cfg = _load(args)
    out = _out_dir(args, cfg)
    basis, profile, K, trunc, scheme, initial = _build_all(cfg)
    watch = reporting.Stopwatch()
    try:
        traj = _run_main_trajectory(cfg, basis, profile, K, trunc, scheme, initial)
    except (BlowUpError, NewtonDivergenceError) as exc:
        manifest = reporting.build_manifest(
            cfg.hash, type(exc).__name__, watch.elapsed, [], failure_time=exc.time
        )
        reporting.write_json(manifest, out / "manifest.json")
        print(f"solver failure: {exc}", file=sys.stderr)
        return 3
    csv_path = reporting.write_trajectory_csv(traj, out / "trajectory.csv")
    manifest = reporting.build_manifest(cfg.hash, "ok", watch.elapsed, [csv_path])
    from .dynamics import Stepper

    manifest["implicit_condition_estimate"] = Stepper(K, basis, trunc, scheme).condition_estimate()
    reporting.write_json(manifest, out / "manifest.json")
    return 0


def _execute_checks(cfg, names, basis, profile, K, trunc, scheme, initial, out=None):
    """Run the named checks, reusing the main trajectory where possible."""
    seed = cfg["run.seed"]
    T = cfg["run.T"]
    reports = {}
    traj = None

    def main_traj():
        nonlocal traj
        if traj is None:
            traj = _run_main_trajectory(cfg, basis, profile, K, trunc, scheme, initial)
        return traj

    for name in names:
        if name == "structural":
            rep = verify.check_structural(profile, basis)
        elif name == "energy_identity":
            half = SchemeConfig(
                dt=0.5 * scheme.dt,
                scheme=scheme.scheme,
                newton_tol=scheme.newton_tol,
                newton_max_iters=scheme.newton_max_iters,
            )
            traj_half = run(
                initial.copy(), K, basis, trunc, half, T,
                sample_every=2 * cfg["run.sample_every"],
            )
            rep = verify.check_energy_identity(
                main_traj(),
                scheme.dt,
                traj_half=traj_half,
                rel_tol=cfg["checks.energy.rel_tol"],
                ratio_range=(cfg["checks.energy.ratio_lo"], cfg["checks.energy.ratio_hi"]),
            )
        elif name == "bernstein":
            rep = verify.check_bernstein_suite(
                basis, cfg["checks.bernstein.N_list"], cfg["checks.bernstein.n_fields"], seed
            )
        elif name == "partition":
            rep = verify.check_partition_suite(
                basis, cfg["checks.bernstein.N_list"], cfg["checks.partition.n_fields"], seed
            )
        elif name == "tail":
            n_list = cfg["checks.tail.N_list"] or cfg["run.N_list"] or [2.0, 4.0, 8.0, 16.0, 32.0]
            rep = verify.tail_scan(initial.u, initial.v, basis, n_list)
        elif name == "commutator":
            rep = verify.commutator_scan(
                profile,
                basis,
                cfg["checks.commutator.N_list"],
                probes=cfg["checks.commutator.probes"],
                seed=seed,
                slope_tol=cfg["checks.commutator.slope_tol"],
            )
        elif name == "decay_fit":
            window = (cfg["checks.decay.window_start"] * T, cfg["checks.decay.window_end"] * T)
            fit = verify.fit_decay(main_traj(), window=window, min_r2=cfg["checks.decay.min_r2"])
            geometry_note = (
                f"damping preset {profile.preset!r}: representative control geometry, "
                "ray interception asserted by construction"
            )
            rep = verify.CheckReport(
                "decay_fit",
                fit.exponential,
                {"gamma": fit.gamma, "C": fit.C, "r_squared": fit.r_squared, "window": list(fit.window)},
                {"min_r2": cfg["checks.decay.min_r2"]},
                {"gamma": "calibrated", "C": "calibrated"},
                None if fit.exponential else {"gamma": fit.gamma, "r_squared": fit.r_squared},
                notes=fit.notes + [geometry_note],
            )
        elif name == "bernoulli":
            coarse_modes = cfg["checks.bernoulli.coarse_modes"] or basis.modes_per_axis // 2
            coarse_basis = build_basis(
                basis.domain, coarse_modes, 4 * coarse_modes
            )
            coarse_cfg = RunConfig(dict(cfg.values), cfg.text)
            coarse_cfg.values["basis.modes_per_axis"] = coarse_modes
            coarse_cfg.values["basis.grid_per_axis"] = 0
            coarse_profile = build_profile(coarse_cfg, coarse_basis)
            coarse_K = assemble_kv_matrix(coarse_profile, coarse_basis)
            coarse_initial = build_initial(coarse_cfg, coarse_basis)
            coarse_traj = run(
                coarse_initial, coarse_K, coarse_basis, trunc, scheme, T,
                sample_every=cfg["run.sample_every"],
            )
            if profile.structural_constant is not None:
                c_a = profile.structural_constant
            else:
                c_a = structural_constant_estimate(profile, basis)
            rep = verify.check_bernoulli_bound(
                [coarse_traj, main_traj()], c_a,
                stability_tol=cfg["checks.bernoulli.stability_tol"],
            )
        elif name == "truncation_convergence":
            rep = verify.truncation_convergence(
                initial, K, basis, scheme, cfg["checks.truncation.k_list"], T,
                sample_every=cfg["run.sample_every"],
            )
        elif name == "stability":
            rep = verify.stability_probe(
                initial, K, basis, trunc, scheme, cfg["checks.stability.delta"], T,
                sample_every=cfg["run.sample_every"],
            )
        elif name == "frequency_split":
            bound = cfg["checks.split.ratio_bound"] or None
            rep = verify.frequency_split_report(main_traj(), ratio_bound=bound)
        elif name == "aliasing":
            rep = verify.check_aliasing(initial.u, basis, trunc, tol=cfg["checks.aliasing.tol"])
        else:
            raise ConfigError(f"unknown check {name!r}")
        reports[name] = rep
        if out is not None:
            for series_name, series in rep.series.items():
                reporting.write_series_csv(series, out / f"check_{name}__{series_name}.csv")
    return reports


def cmd_verify(args):
    cfg = _load(args)
    names = validate_checks(cfg)
    out = _out_dir(args, cfg)
    basis, profile, K, trunc, scheme, initial = _build_all(cfg)
    watch = reporting.Stopwatch()
    try:
        reports = _execute_checks(cfg, names, basis, profile, K, trunc, scheme, initial, out=out)
    except (BlowUpError, NewtonDivergenceError) as exc:
        manifest = reporting.build_manifest(
            cfg.hash, type(exc).__name__, watch.elapsed, [], failure_time=exc.time
        )
        reporting.write_json(manifest, out / "manifest.json")
        print(f"solver failure: {exc}", file=sys.stderr)
        return 3
    summary = {
        "schema_version": reporting.SCHEMA_VERSION,
        "config_hash": cfg.hash,
        "checks": {name: reporting.check_report_to_dict(rep) for name, rep in reports.items()},
        "all_passed": all(rep.passed for rep in reports.values()),
    }
    reporting.write_json(summary, out / "summary.json")
    manifest = reporting.build_manifest(
        cfg.hash, "ok", watch.elapsed, [out / "summary.json"], checks=summary["checks"]
    )
    reporting.write_json(manifest, out / "manifest.json")
    for name, rep in reports.items():
        print(f"{name}: {'PASS' if rep.passed else 'FAIL'}")
    return 0 if summary["all_passed"] else 1


def serialize_config(values):
    """Canonical config text for a value set (schema order, non-defaults)."""
    lines = []
    for key, (kind, default) in SCHEMA.items():
        if key not in values:
            continue
        val = values[key]
        if val == default:
            continue
        if val is None:
            continue
        if isinstance(val, list):
            if not val:
                continue
            text = ", ".join(repr(v) if isinstance(v, float) else str(v) for v in val)
        elif isinstance(val, float):
            text = repr(val)
        else:
            text = str(val)
        lines.append(f"{key} = {text}")
    return "\n".join(lines) + "\n"


def _sweep_cells(cfg):
    axes = cfg["sweep.axes"]
    if not axes:
        raise ConfigError("sweep.axes is empty")
    for key in axes:
        if key not in SCHEMA:
            raise ConfigError(f"sweep axis {key!r} is not a config key")
    values = []
    for i in range(1, len(axes) + 1):
        if i not in cfg.sweep_values:
            raise ConfigError(f"missing sweep.values.{i} for axis {axes[i-1]!r}")
        kind, _ = SCHEMA[axes[i - 1]]
        converted = [
            parse_config_text(f"{axes[i-1]} = {raw}", require=()).values[axes[i - 1]]
            for raw in cfg.sweep_values[i]
        ]
        values.append(converted)
    if cfg["sweep.mode"] == "paired":
        if len({len(v) for v in values}) != 1:
            raise ConfigError("paired sweep needs equally long value lists")
        combos = list(zip(*values))
    elif cfg["sweep.mode"] == "cartesian":
        combos = list(itertools.product(*values))
    else:
        raise ConfigError(f"unknown sweep.mode {cfg['sweep.mode']!r}")
    cells = []
    for combo in combos:
        cell_values = dict(cfg.values)
        for key, val in zip(axes, combo):
            cell_values[key] = val
        for drop in ("sweep.mode", "sweep.axes", "sweep.workers"):
            cell_values.pop(drop, None)
        cells.append((dict(zip(axes, combo)), serialize_config(cell_values)))
    return cells


def _sweep_worker(task):
    cell_dir, cell_text = task
    cfg = parse_config_text(cell_text)
    out = Path(cell_dir)
    out.mkdir(parents=True, exist_ok=True)
    result = {"exit": 0, "measured": {}}
    try:
        basis, profile, K, trunc, scheme, initial = _build_all(cfg)
        traj = _run_main_trajectory(cfg, basis, profile, K, trunc, scheme, initial)
        reporting.write_trajectory_csv(traj, out / "trajectory.csv")
        names = validate_checks(cfg)
        reports = _execute_checks(cfg, names, basis, profile, K, trunc, scheme, initial, out=out)
        summary = {
            "schema_version": reporting.SCHEMA_VERSION,
            "config_hash": config_hash(cell_text),
            "checks": {n: reporting.check_report_to_dict(r) for n, r in reports.items()},
            "all_passed": all(r.passed for r in reports.values()),
        }
        reporting.write_json(summary, out / "summary.json")
        if not summary["all_passed"]:
            result["exit"] = 1
        for n, r in reports.items():
            for field in ("gamma", "r_squared", "c1", "slope", "residual"):
                if field in r.measured:
                    result["measured"][f"{n}.{field}"] = r.measured[field]
    except ConfigError as exc:
        result["exit"] = 2
        result["error"] = str(exc)
    except (BlowUpError, NewtonDivergenceError) as exc:
        result["exit"] = 3
        result["error"] = str(exc)
        result["failure_time"] = exc.time
    return result


def cmd_sweep(args):
    cfg = _load(args)
    out = _out_dir(args, cfg)
    cells = _sweep_cells(cfg)
    workers = args.workers or cfg["sweep.workers"] or int(os.environ.get("KVWAVE_WORKERS", "1"))

    seen = {}
    tasks = []
    table = []
    for idx, (axis_values, text) in enumerate(cells):
        h = config_hash(text)
        row = {"cell": idx, "config_hash": h, **axis_values}
        if h in seen:
            row["deduplicated_from"] = seen[h]
            table.append(row)
            continue
        seen[h] = idx
        cell_dir = out / "cells" / f"{idx:04d}_{h[:8]}"
        tasks.append((str(cell_dir), text))
        table.append(row)

    if workers > 1 and len(tasks) > 1:
        with Pool(processes=workers) as pool:
            results = pool.map(_sweep_worker, tasks)
    else:
        results = [_sweep_worker(t) for t in tasks]

    by_hash = {}
    for (cell_dir, text), res in zip(tasks, results):
        by_hash[config_hash(text)] = res

    measured_keys = sorted({k for res in results for k in res["measured"]})
    agg_path = out / "sweep_summary.csv"
    axis_keys = cfg["sweep.axes"]
    with open(agg_path, "w", encoding="utf-8", newline="\n") as fh:
        cols = ["cell", "config_hash"] + axis_keys + ["exit"] + measured_keys
        fh.write(",".join(cols) + "\n")
        for row in table:
            res = by_hash[row["config_hash"]]
            out_row = [str(row["cell"]), row["config_hash"]]
            out_row += [reporting.fmt(row[k]) if isinstance(row[k], float) else str(row[k]) for k in axis_keys]
            out_row.append(str(res["exit"]))
            for key in measured_keys:
                val = res["measured"].get(key, "")
                out_row.append(reporting.fmt(val) if val != "" else "")
            fh.write(",".join(out_row) + "\n")
    print(f"sweep: {len(tasks)} cells executed, {len(cells) - len(tasks)} deduplicated")
    worst = max((res["exit"] for res in results), default=0)
    return 1 if worst != 0 else 0


def cmd_basis_info(args):
    cfg = _load(
        args,
        require=("domain.dimension", "domain.edge_lengths", "basis.modes_per_axis"),
    )
    try:
        basis = build_basis_from(cfg)
    except ConfigError as exc:
        print(f"aliasing guard failure: {exc}", file=sys.stderr)
        return 2
    print(f"domain: {basis.domain.edge_lengths}  modes: {basis.n_modes}  grid: {basis.grid_shape}")
    print(
        f"aliasing guard: G = {basis.grid_per_axis} >= 4M = {4 * basis.modes_per_axis}: ok"
    )
    print("index  multi-index  eigenvalue")
    for i in range(basis.n_modes):
        mi = tuple(int(j) for j in basis.mode_indices[i])
        print(f"{i + 1:5d}  {mi}  {reporting.fmt(basis.eigenvalues[i])}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
