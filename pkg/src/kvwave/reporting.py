"""Persistence: trajectory CSV, run manifests, check summaries.

CSV floats are written with shortest round-trip precision so re-analysis
reproduces the in-memory doubles exactly; manifests carry a versioned
schema field, the config hash, and a SHA-256 inventory of produced files.
"""

import hashlib
import json
import os
import time

import numpy as np

SCHEMA_VERSION = 1


def fmt(x):
    """Shortest decimal that round-trips the double."""
    return repr(float(x))


def trajectory_header(n_list):
    cols = ["t", "E", "Y", "d", "D"]
    for N in n_list:
        cols.append(f"E_low_N{N:g}")
        cols.append(f"E_high_N{N:g}")
    cols += ["u_L10", "u_L12"]
    return cols


def write_trajectory_csv(traj, path):
    cols = trajectory_header(traj.n_list)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(cols) + "\n")
        for i in range(len(traj.times)):
            row = [traj.times[i], traj.E[i], traj.Y[i], traj.d[i], traj.D[i]]
            for N in traj.n_list:
                row.append(traj.split[N]["low"][i])
                row.append(traj.split[N]["high"][i])
            row += [traj.lp10[i], traj.lp12[i]]
            fh.write(",".join(fmt(v) for v in row) + "\n")
    return path


def write_series_csv(series, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(series["columns"]) + "\n")
        for row in series["rows"]:
            fh.write(",".join(fmt(v) for v in row) + "\n")
    return path


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    return obj


def write_json(obj, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(_jsonable(obj), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def sha256_file(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def file_inventory(paths):
    inventory = []
    for p in sorted(str(p) for p in paths):
        inventory.append(
            {"name": os.path.basename(p), "bytes": os.path.getsize(p), "sha256": sha256_file(p)}
        )
    return inventory


def check_report_to_dict(report):
    return _jsonable(
        {
            "passed": report.passed,
            "measured": report.measured,
            "tolerances": report.tolerances,
            "provenance": report.provenance,
            "witness": report.witness,
            "notes": report.notes,
        }
    )


def build_manifest(config_hash, outcome, wall_seconds, files, checks=None, failure_time=None):
    from . import __version__
    from .kernels import BACKEND

    manifest = {
        "schema_version": SCHEMA_VERSION,
        "config_hash": config_hash,
        "code_version": __version__,
        "kernel_backend": BACKEND,
        "outcome": outcome,
        "wall_clock_seconds": wall_seconds,
        "files": file_inventory(files),
    }
    if failure_time is not None:
        manifest["failure_time"] = failure_time
    if checks is not None:
        manifest["checks"] = {name: rep["passed"] for name, rep in checks.items()}
    return manifest


class Stopwatch:
    def __init__(self):
        self.start = time.monotonic()

    @property
    def elapsed(self):
        return time.monotonic() - self.start
