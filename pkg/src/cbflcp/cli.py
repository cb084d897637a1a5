"""``cbflcp`` command line: simulate a scene, fuzz the solvers, plot a run."""
import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .errors import SceneError
from .simulate import Termination, fuzz_equivalence, run

log = logging.getLogger("cbflcp")

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_UNSAFE = 4


def fmt(x):
    return format(float(x), ".17g")


def trajectory_header(n, m):
    return (["k", "t"] + [f"q_{j}" for j in range(n)] + [f"u_cbf_{j}" for j in range(n)]
            + [f"u_lc_{j}" for j in range(n)] + [f"h_{i}" for i in range(m)] + ["hprime", "e"])


def write_trajectory(path, traj, n, m):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(trajectory_header(n, m))
        for r in traj.records:
            w.writerow([str(r.k), fmt(r.k * traj.tau)]
                       + [fmt(v) for v in np.concatenate([r.q, r.u_cbf, r.u_lc, r.h])]
                       + [fmt(r.hprime), fmt(r.e)])


def cmd_simulate(scene_path, out_dir):
    from .scene import load_scene, scene_dict

    try:
        config = load_scene(scene_path)
    except SceneError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    traj, metrics = run(config)
    write_trajectory(out / "trajectory.csv", traj, config.model.n_links, config.n_constraints)
    with open(out / "metrics.json", "w", encoding="utf-8") as fh:
        json.dump(metrics.__dict__, fh, indent=2)
        fh.write("\n")
    with open(out / "scene.json", "w", encoding="utf-8") as fh:
        json.dump(scene_dict(config), fh, indent=2)
        fh.write("\n")
    print(f"{metrics.termination}: {metrics.steps} steps, min h' = {metrics.hprime_min:.3e}, "
          f"max e = {metrics.e_max:.3e}, goal error = {metrics.goal_error:.3e}")
    if len(traj) and metrics.hprime_min <= 0:
        print("safety violation: h' <= 0 during the run", file=sys.stderr)
        return EXIT_UNSAFE
    if traj.termination is Termination.SOLVER_FAILURE:
        print(f"solver failure: {traj.message}", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK if traj.termination is Termination.GOAL_REACHED else EXIT_FAIL


def cmd_fuzz(seed, count, m_max, n_max, tol, out_dir=".", zero_row_prob=0.0):
    if count < 0 or m_max < 1 or n_max < 1 or m_max > 12:
        print("invalid bounds: need count >= 0, 1 <= m-max <= 12, n-max >= 1", file=sys.stderr)
        return EXIT_CONFIG
    report = fuzz_equivalence(seed, count, m_max, n_max, tol, zero_row_prob=zero_row_prob)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "fuzz_report.json", "w", encoding="utf-8") as fh:
        json.dump(report.as_dict(), fh, indent=2)
        fh.write("\n")
    print(f"instances={report.instances} optimal={report.optimal} infeasible={report.infeasible} "
          f"max_error={report.max_error:.3e} oracle_error={report.max_oracle_error:.3e} "
          f"disagreements={report.status_disagreements + report.oracle_disagreements}")
    if report.generator_violations:
        print(f"generator contract violated on {report.generator_violations} instances", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK if report.success else EXIT_FAIL


def cmd_plot(trajectory_csv, out_dir, scene_path=None):
    from .plotting import MalformedCsv, plot_curves, plot_scene, read_trajectory
    from .scene import load_scene, default_scene_path, parse_scene

    try:
        traj = read_trajectory(trajectory_csv)
    except (MalformedCsv, OSError) as exc:
        print(f"malformed trajectory: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    sibling = Path(trajectory_csv).with_name("scene.json")
    try:
        if scene_path is not None:
            config = load_scene(scene_path)
        elif sibling.exists():
            config = parse_scene(json.loads(sibling.read_text(encoding="utf-8")))
        else:
            log.warning("no scene next to %s, drawing with the default scene", trajectory_csv)
            config = load_scene(default_scene_path())
    except (SceneError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if traj.q.shape[1] != config.model.n_links:
        print(f"malformed trajectory: {traj.q.shape[1]} joints but scene has {config.model.n_links}",
              file=sys.stderr)
        return EXIT_CONFIG
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    plot_scene(traj, config, out / "scene.svg")
    plot_curves(traj, out / "curves.svg")
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="cbflcp", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="run a scene with both safety controllers")
    s.add_argument("scene")
    s.add_argument("--out", default="out")

    f = sub.add_parser("fuzz", help="randomized QP vs LCP equivalence check")
    f.add_argument("--seed", type=int, default=42)
    f.add_argument("--count", type=int, default=1000)
    f.add_argument("--m-max", type=int, default=8)
    f.add_argument("--n-max", type=int, default=10)
    f.add_argument("--tol", type=float, default=1e-8)
    f.add_argument("--out", default=".")
    f.add_argument("--zero-row-prob", type=float, default=0.0, help=argparse.SUPPRESS)

    pl = sub.add_parser("plot", help="render scene.svg and curves.svg from trajectory.csv")
    pl.add_argument("csv")
    pl.add_argument("--out", default="out")
    pl.add_argument("--scene", default=None)
    return p


def main(argv=None):
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    if args.command == "simulate":
        return cmd_simulate(args.scene, args.out)
    if args.command == "fuzz":
        return cmd_fuzz(args.seed, args.count, args.m_max, args.n_max, args.tol, args.out, args.zero_row_prob)
    return cmd_plot(args.csv, args.out, args.scene)


if __name__ == "__main__":
    sys.exit(main())
