"""Static SVG figures of a simulated run."""
import csv
from dataclasses import dataclass

import matplotlib

matplotlib.use("svg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .planar_robot import forward_kinematics  # noqa: E402

E_FLOOR = 1e-18  # exact zeros cannot be drawn on a log axis


class MalformedCsv(ValueError):
    pass


@dataclass
class Trajectory:
    t: np.ndarray
    q: np.ndarray
    hprime: np.ndarray
    e: np.ndarray


def read_trajectory(path):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise MalformedCsv("empty file") from None
        rows = list(reader)
    for col in ("k", "t", "hprime", "e"):
        if col not in header:
            raise MalformedCsv(f"missing column '{col}'")
    q_cols = [i for i, name in enumerate(header) if name.startswith("q_")]
    if not q_cols:
        raise MalformedCsv("missing column 'q_0'")
    if not rows:
        raise MalformedCsv("no data rows")
    try:
        data = np.array([[float(v) for v in r] for r in rows])
    except ValueError as exc:
        raise MalformedCsv(f"non-numeric field: {exc}") from None
    if data.ndim != 2 or data.shape[1] != len(header):
        raise MalformedCsv("rows do not match the header width")
    col = header.index
    return Trajectory(data[:, col("t")], data[:, q_cols], data[:, col("hprime")], data[:, col("e")])


def _save(fig, path):
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def plot_scene(traj, config, path):
    """Arm at the first, middle and last logged configurations with the end-effector path."""
    model = config.model
    fig, ax = plt.subplots(figsize=(5, 5))
    for obs in config.obstacles:
        ax.add_patch(plt.Circle(obs.center, obs.radius, color="0.6", alpha=0.6))
        ax.add_patch(plt.Circle(obs.center, obs.radius + float(np.max(config.delta)),
                                fill=False, ls=":", color="0.4"))
    ee = np.array([forward_kinematics(model, q)[-1] for q in traj.q])
    ax.plot(ee[:, 0], ee[:, 1], "-", color="tab:blue", lw=1, label="end-effector path")
    picks = sorted({0, len(traj.q) // 2, len(traj.q) - 1})
    shades = ["0.75", "0.45", "0.0"]
    for shade, idx in zip(shades[-len(picks):], picks):
        pts = forward_kinematics(model, traj.q[idx])
        ax.plot(pts[:, 0], pts[:, 1], "o-", color=shade, lw=2, ms=3, label=f"t = {traj.t[idx]:.3f} s")
    ax.plot(*config.goal, marker="*", ms=12, color="tab:red", ls="none", label="goal")
    ax.set_aspect("equal")
    ax.set_xlabel("x [m]")
    ax.set_ylabel("y [m]")
    ax.legend(loc="lower left", fontsize=7)
    _save(fig, path)


def plot_curves(traj, path):
    fig, (top, bottom) = plt.subplots(2, 1, sharex=True, figsize=(6, 5))
    top.plot(traj.t, traj.hprime, color="tab:green")
    top.axhline(0.0, color="k", lw=0.8)
    top.set_ylabel("h' [m]")
    bottom.semilogy(traj.t, np.maximum(traj.e, E_FLOOR), color="tab:purple")
    bottom.set_ylabel("e [rad/s]")
    bottom.set_xlabel("t [s]")
    fig.tight_layout()
    _save(fig, path)
