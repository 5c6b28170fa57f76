"""Scenario-driven command line front end.

Subcommands: flow, converge, collision, vortexwave.  All outputs are CSV
files with a header row and a scenario-hash comment line; identical inputs
produce byte-identical outputs regardless of --threads.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import List, Optional

import numpy as np

from . import diagnostics, scenario as sc, vortexwave
from .fields import CompositeField, mollify
from .flow import integrate_flow

_EXIT_OK = 0
_EXIT_VIOLATION = 1
_EXIT_USAGE = 2


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _write_csv(path: str, hash_line: str, header: List[str], rows) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(hash_line + "\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def _hash_line(s: sc.Scenario) -> str:
    return f"# scenario={s.name} hash={sc.scenario_hash(s)}"


def _set_threads(threads: Optional[int]) -> None:
    if threads is None:
        return
    if threads < 1:
        raise SystemExit("--threads must be >= 1")
    import numba
    numba.set_num_threads(min(threads, numba.config.NUMBA_NUM_THREADS))


def _smooth_for_level(s: sc.Scenario, level: int):
    smooth = sc.build_smooth_field(s)
    if not s.field.already_smooth:
        smooth = mollify(smooth, level)
    return smooth


def _resolve_path(s: sc.Scenario, out_dir: str):
    if s.path.kind != "from_vortexwave":
        return sc.build_path(s)
    path, _ = _run_vortexwave(s)
    return path


def _run_vortexwave(s: sc.Scenario):
    state = sc.build_vortexwave_state(s)
    count = max(2, s.vortexwave.snapshots)
    snapshot_times = np.linspace(0.0, s.horizon, count)
    return vortexwave.run(state, s.horizon, s.dt, snapshot_times)


def cmd_flow(s: sc.Scenario, level: int, out_dir: str) -> int:
    path = _resolve_path(s, out_dir)
    field = CompositeField(smooth=_smooth_for_level(s, level), path=path, level=level)
    ensemble = sc.build_ensemble(s)
    out_times = sc.build_output_times(s)
    traj = integrate_flow(field, ensemble, s.horizon, s.dt, out_times,
                          field_hash=sc.scenario_hash(s))

    rows = []
    for i, x0 in enumerate(ensemble.points):
        for k, t in enumerate(out_times):
            rows.append((str(i), _fmt(x0[0]), _fmt(x0[1]), _fmt(t),
                         _fmt(traj.positions[i, k, 0]),
                         _fmt(traj.positions[i, k, 1]),
                         _fmt(traj.min_distance[i])))
    _write_csv(os.path.join(out_dir, "trajectories.csv"), _hash_line(s),
               ["point_id", "x0_1", "x0_2", "t", "X_1", "X_2", "min_dist"], rows)
    return _EXIT_OK


def cmd_converge(s: sc.Scenario, out_dir: str) -> int:
    path = _resolve_path(s, out_dir)
    ensemble = sc.build_ensemble(s)
    out_times = sc.build_output_times(s)
    if s.field.already_smooth:
        smooth = sc.build_smooth_field(s)
    else:
        base = sc.build_smooth_field(s)
        smooth = lambda n: mollify(base, n)  # noqa: E731
    report = diagnostics.rate_harness(
        smooth, path, ensemble, s.horizon, s.dt, out_times,
        levels=s.levels, reference=s.reference_level,
        field_hash=sc.scenario_hash(s))

    rows = []
    for i, (n, m) in enumerate(report.pairs):
        d = report.delta[i]
        ln_d = abs(np.log(d)) if d > 0 else float("nan")
        g_bound = report.fitted_C_g * ln_d ** (2.0 / 3.0) if d > 0 else 0.0
        rate_bound = report.fitted_C_rate / ln_d ** (1.0 / 3.0) if d > 0 else 0.0
        rows.append((str(n), str(m), _fmt(d), _fmt(ln_d),
                     _fmt(report.g_value[i]), _fmt(g_bound),
                     _fmt(report.flow_error[i]), _fmt(rate_bound),
                     "1" if report.bound_satisfied[i] else "0"))
    _write_csv(os.path.join(out_dir, "convergence.csv"), _hash_line(s),
               ["n", "m", "delta", "ln_delta", "g", "g_bound", "error",
                "rate_bound", "ok"], rows)

    for i, ok in enumerate(report.bound_satisfied):
        if not ok:
            n, m = report.pairs[i]
            print(f"convergence bound violated for pair (n={n}, m={m})",
                  file=sys.stderr)
            return _EXIT_VIOLATION
    return _EXIT_OK


def cmd_collision(s: sc.Scenario, level: int, out_dir: str) -> int:
    path = _resolve_path(s, out_dir)
    field = CompositeField(smooth=_smooth_for_level(s, level), path=path, level=level)
    ensemble = sc.build_ensemble(s)
    out_times = sc.build_output_times(s)
    traj = integrate_flow(field, ensemble, s.horizon, s.dt, out_times,
                          field_hash=sc.scenario_hash(s))
    epsilons = diagnostics.collision_epsilon_grid(s.ensemble.radius)
    report = diagnostics.near_collision_measure(traj, ensemble, epsilons)

    rows = [(_fmt(eps), _fmt(measure), _fmt(np.pi * eps**2),
             _fmt(report.reported_uncertainty))
            for eps, measure in zip(report.epsilons, report.measures)]
    _write_csv(os.path.join(out_dir, "collision.csv"), _hash_line(s),
               ["epsilon", "measure", "oracle", "uncertainty"], rows)
    return _EXIT_OK


def cmd_vortexwave(s: sc.Scenario, out_dir: str) -> int:
    if s.vortexwave is None:
        print("scenario has no [vortexwave] section", file=sys.stderr)
        return _EXIT_USAGE
    state = sc.build_vortexwave_state(s)
    count = max(2, s.vortexwave.snapshots)
    snapshot_times = np.linspace(0.0, s.horizon, count)
    path, snapshots = vortexwave.run(state, s.horizon, s.dt, snapshot_times)

    rows = [(_fmt(t), _fmt(z[0]), _fmt(z[1]))
            for t, z in zip(path.times, path.positions)]
    _write_csv(os.path.join(out_dir, "path.csv"), _hash_line(s),
               ["t", "z1", "z2"], rows)
    for k, snap in enumerate(snapshots):
        rows = [(_fmt(p[0]), _fmt(p[1]), _fmt(w))
                for p, w in zip(snap.positions, snap.weights)]
        _write_csv(os.path.join(out_dir, f"snapshot_{k}.csv"), _hash_line(s),
                   ["x1", "x2", "w"], rows)

    drift = float(np.linalg.norm(path.positions[-1] - path.positions[0]))
    print(f"vortex displacement |z(T) - z(0)| = {drift:.6e}")
    return _EXIT_OK


def _load_scenario(path: str) -> sc.Scenario:
    with open(path, "rb") as fh:
        return sc.parse_scenario(fh.read())


def main(argv: Optional[List[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="vortexflow",
        description="Regular Lagrangian flows with a moving point singularity")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--scenario", required=True, help="scenario file")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--threads", type=int, default=None,
                       help="worker threads (speed only, never output bytes)")
        p.add_argument("--seed", type=int, default=None,
                       help="reserved; all quadratures are deterministic")

    p_flow = sub.add_parser("flow", help="integrate one trajectory ensemble")
    common(p_flow)
    p_flow.add_argument("--level", type=int, default=None,
                        help="regularization level n (default: reference level)")

    p_conv = sub.add_parser("converge", help="run the convergence-rate harness")
    common(p_conv)

    p_coll = sub.add_parser("collision", help="near-collision measure report")
    common(p_coll)
    p_coll.add_argument("--level", type=int, default=None)

    p_vw = sub.add_parser("vortexwave", help="run the coupled vortex-wave system")
    common(p_vw)

    args = parser.parse_args(argv)
    _set_threads(args.threads)

    try:
        scen = _load_scenario(args.scenario)
    except (sc.ScenarioSyntaxError, sc.ScenarioSemanticError,
            sc.ExpressionSyntaxError) as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return _EXIT_USAGE

    os.makedirs(args.out, exist_ok=True)
    level = getattr(args, "level", None)
    if level is None:
        level = scen.reference_level

    try:
        if args.command == "flow":
            return cmd_flow(scen, level, args.out)
        if args.command == "converge":
            return cmd_converge(scen, args.out)
        if args.command == "collision":
            return cmd_collision(scen, level, args.out)
        if args.command == "vortexwave":
            return cmd_vortexwave(scen, args.out)
    except (ValueError, AssertionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_VIOLATION
    return _EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
