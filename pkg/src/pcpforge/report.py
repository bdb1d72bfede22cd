"""Deterministic artifact writers: JSON with provenance, CSV tables and PNG figures."""

from __future__ import annotations

import csv
import io
import json
import platform
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import __version__
from .hypergraph import CHUNK, thread_count


def provenance(command: str, params: dict, seed: int | None) -> dict:
    """Parameters, seed and versions; no timestamps or host details, so reruns match byte for byte."""
    import matplotlib

    return {
        "tool": "pcpforge",
        "version": __version__,
        "command": command,
        "params": params,
        "seed": seed,
        "rng": "numpy PCG64 via SeedSequence",
        "chunk_size": CHUNK,
        "threads": thread_count(),
        "versions": {"python": platform.python_version(), "numpy": np.__version__,
                     "matplotlib": matplotlib.__version__},
    }


def _default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serialisable: {type(o).__name__}")


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=_default) + "\n"


def write_json(path: Path, obj) -> Path:
    path = Path(path)
    path.write_text(dumps(obj))
    return path


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(x) for x in row])
    Path(path).write_text(buf.getvalue())
    return Path(path)


def _cell(x):
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, (np.integer,)):
        return int(x)
    return x


def _figure():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams.update(matplotlib.rcParamsDefault)
    plt.rcParams["font.size"] = 9
    return plt


def save_png(fig, path: Path) -> Path:
    # no Software/date chunks: identical inputs give identical bytes
    fig.savefig(path, format="png", dpi=100, metadata={"Software": None})
    import matplotlib.pyplot as plt

    plt.close(fig)
    return Path(path)


def ledger_figure(rows: Sequence[dict], path: Path) -> Path:
    plt = _figure()
    fig, ax = plt.subplots(figsize=(7, 3.5))
    x = np.arange(len(rows))
    t0 = np.array([r["theta0"] for r in rows])
    t1 = np.array([r["theta1"] for r in rows])
    t2 = np.array([r["theta2"] for r in rows])
    ax.bar(x, t0, color="#4c72b0", label="theta0")
    ax.bar(x, t1, color="#dd8452", label="theta1")
    ax.bar(x, t2, bottom=np.where(t2 >= 0, t0, t1), color="#55a868", label="theta2")
    mc = [r.get("theta_mc") for r in rows]
    if all(m is not None for m in mc):
        sig = [4 * (r.get("sigma") or 0.0) for r in rows]
        ax.errorbar(x, mc, yerr=sig, fmt="k.", capsize=2, label="Monte Carlo, 4 sigma")
    ax.plot(x, [r["theta_total"] for r in rows], "r_", markersize=12, label="theta")
    ax.axhline(0, color="0.5", lw=0.6)
    ax.set_xlabel("indicator set")
    ax.set_ylabel("term sum")
    ax.set_xticks(x)
    ax.legend(fontsize=7, ncol=2)
    fig.tight_layout()
    return save_png(fig, path)


def hypergraph_figure(dims: Sequence[int], hits: Sequence[int], path: Path) -> Path:
    plt = _figure()
    fig, (a, b) = plt.subplots(1, 2, figsize=(8, 3))
    v = np.arange(len(dims))
    a.bar(v, dims, color="#4c72b0")
    a.set_xlabel("right vertex")
    a.set_ylabel("coset space dimension")
    b.bar(v, hits, color="#55a868")
    b.set_xlabel("right vertex")
    b.set_ylabel("query incidences")
    fig.tight_layout()
    return save_png(fig, path)
