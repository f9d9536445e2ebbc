"""CSV logs and SVG figures for single runs and UAV-count sweeps.

Figures are drawn from the CSV files after they are written, so every
plotted series is exactly what the logs contain.
"""
from __future__ import annotations

import csv
import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .engine import RunLog  # noqa: E402

plt.rcParams["svg.hashsalt"] = "uavtrack"

METRIC_FIELDS = ("e_x", "e_y", "e_z", "e_a", "speed")
TRAJECTORY_HEADER = ("round", "uav", "x", "y", "z", "yaw", "u", "v")
SWEEP_HEADER = ("num_uavs", "mean_e_x", "mean_e_y", "mean_e_z", "time_mean_e_x", "time_mean_e_y",
                "time_mean_e_z", "total_view", "effective_view", "optimal_view")


def fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.9g}"


def metrics_header(num_uavs: int) -> list[str]:
    cols = ["round", "time"]
    for i in range(num_uavs):
        cols += [f"uav{i}_{f}" for f in METRIC_FIELDS]
    return cols + ["target_speed", "total_view", "effective_view"]


def _write(path: Path, header, rows) -> Path:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


def emit_csv(log: RunLog, output_dir) -> dict[str, Path]:
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    m = log.records[0].num_uavs

    def metric_rows():
        for rec in log.records:
            row = [rec.round, rec.time]
            for i in range(m):
                row += [rec.e_x[i], rec.e_y[i], rec.e_z[i], rec.e_a[i], rec.speed[i]]
            yield row + [rec.target_speed, rec.total_view, rec.effective_view]

    def traj_rows():
        for rec, snaps in zip(log.records, log.snapshots):
            for s in snaps:
                yield [rec.round, s.id, *s.position, s.heading, s.u, s.v]

    return {
        "metrics": _write(out / "metrics.csv", metrics_header(m), metric_rows()),
        "trajectories": _write(out / "trajectories.csv", TRAJECTORY_HEADER, traj_rows()),
    }


def read_table(path) -> dict[str, np.ndarray]:
    """Column name -> float array."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    data = np.array([[float(v) for v in r] for r in body], dtype=float).reshape(len(body), len(header))
    return {name: data[:, i] for i, name in enumerate(header)}


def _uav_count(table) -> int:
    return sum(1 for k in table if k.endswith("_e_x"))


# -- single-run figures --------------------------------------------------------

def trajectory_figure(traj: dict[str, np.ndarray], target_xy=None):
    fig, ax = plt.subplots(figsize=(6, 6))
    ids = np.unique(traj["uav"]).astype(int)
    for i in ids:
        sel = traj["uav"] == i
        x, y, yaw = traj["x"][sel], traj["y"][sel], traj["yaw"][sel]
        ax.plot(x, y, label=f"UAV {i}")
        ax.quiver(x[-1], y[-1], math.cos(yaw[-1]), math.sin(yaw[-1]), color="k", scale=15)
    if target_xy is not None:
        ax.plot(target_xy[:, 0], target_xy[:, 1], "k--", label="target")
    ax.set_xlabel("x [m]")
    ax.set_ylabel("y [m]")
    ax.set_aspect("equal", adjustable="datalim")
    ax.legend()
    ax.set_title("Top view")
    return fig


def error_area_figure(metrics: dict[str, np.ndarray]):
    fig, ax = plt.subplots(figsize=(6, 4))
    for i in range(_uav_count(metrics)):
        ax.plot(metrics["round"], metrics[f"uav{i}_e_a"], label=f"UAV {i}")
    ax.set_yscale("symlog", linthresh=1e-6)
    ax.set_xlabel("iteration")
    ax.set_ylabel("error area $e_a$")
    ax.legend()
    return fig


def speed_figure(metrics: dict[str, np.ndarray]):
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(metrics["round"], metrics["target_speed"], "k--", label="target")
    for i in range(_uav_count(metrics)):
        ax.plot(metrics["round"], metrics[f"uav{i}_speed"], label=f"UAV {i}")
    ax.set_yscale("symlog", linthresh=1.0)
    ax.set_xlabel("iteration")
    ax.set_ylabel("speed [m/s]")
    ax.legend()
    return fig


def _save(fig, path: Path) -> Path:
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def emit_plots(log: RunLog | None, output_dir) -> dict[str, Path]:
    """Write the three single-run figures from the CSVs in ``output_dir``.

    If ``log`` is given the CSVs are (re)written first.
    """
    out = Path(output_dir)
    if log is not None:
        emit_csv(log, out)
    metrics = read_table(out / "metrics.csv")
    traj = read_table(out / "trajectories.csv")
    target_xy = None
    if log is not None:
        target_xy = np.array(log.target_path)[:, :2]
    return {
        "trajectories_plot": _save(trajectory_figure(traj, target_xy), out / "trajectories.svg"),
        "error_area_plot": _save(error_area_figure(metrics), out / "error_area.svg"),
        "speed_plot": _save(speed_figure(metrics), out / "speed.svg"),
    }


# -- sweep summaries -----------------------------------------------------------------

def sweep_row(num_uavs: int, log: RunLog, fov_az: float) -> list:
    fin = log.records[-1]

    def time_mean(name):
        return float(np.mean([np.mean(getattr(r, name)) for r in log.records]))

    return [num_uavs, float(np.mean(fin.e_x)), float(np.mean(fin.e_y)), float(np.mean(fin.e_z)),
            time_mean("e_x"), time_mean("e_y"), time_mean("e_z"),
            fin.total_view, fin.effective_view, min(num_uavs * fov_az, 360.0)]


def emit_sweep(rows, output_dir) -> dict[str, Path]:
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = _write(out / "sweep.csv", SWEEP_HEADER, rows)
    table = read_table(csv_path)
    return {
        "sweep": csv_path,
        "sweep_errors": _save(sweep_error_figure(table), out / "sweep_errors.svg"),
        "sweep_coverage": _save(sweep_coverage_figure(table), out / "sweep_coverage.svg"),
    }


def sweep_error_figure(table: dict[str, np.ndarray]):
    fig, ax = plt.subplots(figsize=(6, 4))
    m = table["num_uavs"]
    for name, label in (("mean_e_x", "$e_x$"), ("mean_e_y", "$e_y$"), ("mean_e_z", "$e_z$")):
        ax.plot(m, table[name], marker="o", label=label)
    ax.set_yscale("symlog", linthresh=1e-4)
    ax.set_xlabel("number of UAVs")
    ax.set_ylabel("normalized error (final round)")
    ax.legend()
    return fig


def sweep_coverage_figure(table: dict[str, np.ndarray]):
    fig, ax = plt.subplots(figsize=(6, 4))
    m = table["num_uavs"]
    ax.plot(m, table["total_view"] / 360.0, marker="o", label="total view")
    ax.plot(m, table["effective_view"] / 360.0, marker="s", label="non-overlapping view")
    ax.plot(m, table["optimal_view"] / 360.0, "k--", label="optimal")
    ax.set_xlabel("number of UAVs")
    ax.set_ylabel("view angle / 360°")
    ax.legend()
    return fig
