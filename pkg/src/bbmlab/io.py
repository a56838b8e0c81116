"""CSV serialization and run manifests.

All floats are written with 17 significant digits so that decimal
round-trips are exact and repeated runs produce byte-identical files.
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict

import numpy as np

from . import __version__
from .estimates import EstimateReport
from .spectral import TrigState
from .squeeze import SqueezeReport


def fmt(x: float) -> str:
    return f"{float(x):.17g}"


def write_state_csv(path, state: TrigState) -> None:
    """Rows k,a_k,b_k for k = 1..N plus the 0,mean,0 row."""
    lines = ["k,a_k,b_k", f"0,{fmt(state.mean)},0"]
    for k in range(1, state.n_modes + 1):
        lines.append(f"{k},{fmt(state.a[k - 1])},{fmt(state.b[k - 1])}")
    _write(path, lines)


def read_state_csv(path) -> TrigState:
    mean = 0.0
    pairs = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("k,"):
                continue
            k_str, a_str, b_str = line.split(",")
            k = int(k_str)
            if k == 0:
                mean = float(a_str)
            else:
                pairs[k] = (float(a_str), float(b_str))
    if not pairs:
        raise ValueError(f"state file {path} holds no modes")
    n = max(pairs)
    a = np.zeros(n)
    b = np.zeros(n)
    for k, (ak, bk) in pairs.items():
        a[k - 1] = ak
        b[k - 1] = bk
    return TrigState(mean, a, b)


def write_trace_csv(path, trace) -> None:
    lines = ["t,I1,I2,H"]
    for t, i1, i2, ham in trace:
        lines.append(f"{fmt(t)},{fmt(i1)},{fmt(i2)},{fmt(ham)}")
    _write(path, lines)


def write_estimate_csv(path, report: EstimateReport) -> None:
    lines = ["s,r,rprime,N,n_samples,max_ratio,argmax_seed"]
    for n_modes in sorted(report.sweep):
        sample = report.sweep[n_modes]
        lines.append(
            f"{fmt(report.s)},{fmt(report.r)},{fmt(report.rprime)},{n_modes},"
            f"{report.n_samples},{fmt(sample.ratio)},{sample.seed}"
        )
    _write(path, lines)


def write_squeeze_csv(path, report: SqueezeReport) -> None:
    lines = ["start_id,iter,radius"]
    for start_id, traj in enumerate(report.trajectories):
        for it, radius in traj:
            lines.append(f"{start_id},{it},{fmt(radius)}")
    lines.append(f"best,,{fmt(report.achieved_radius)}")
    _write(path, lines)


def write_galerkin_csv(path, rows) -> None:
    lines = ["N_small,defect"]
    for n_small, defect in rows:
        lines.append(f"{n_small},{fmt(defect)}")
    _write(path, lines)


def write_orbit_csv(path, rows) -> None:
    lines = ["fprime,period,period_times_fprime"]
    for fprime, period in rows:
        lines.append(f"{fmt(fprime)},{fmt(period)},{fmt(period * fprime)}")
    _write(path, lines)


def write_manifest(path, command: str, config: dict, seed: int, outputs: list[str]) -> None:
    manifest = {
        "command": command,
        "artifact_version": __version__,
        "seed": seed,
        "config": config,
        "outputs": sorted(outputs),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True, default=_jsonable)
        fh.write("\n")


def _jsonable(obj):
    if isinstance(obj, TrigState):
        return {"mean": obj.mean, "a": list(obj.a), "b": list(obj.b)}
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if hasattr(obj, "__dataclass_fields__"):
        return asdict(obj)
    raise TypeError(f"cannot serialize {type(obj)!r}")


def _write(path, lines) -> None:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines))
        fh.write("\n")
