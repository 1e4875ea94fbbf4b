"""Command-line front end: scenario execution and artifact emission.

Subcommands:
    run <config> [--out DIR] [--strict] [--plots]   simulate one scenario
    check-design <config>                           print the derived design numbers
    sweep <glob> [--out DIR] [--strict] [--plots]   run every matching scenario

Exit codes: 0 success, 1 safety violation under --strict, 2 invalid config.
"""

from __future__ import annotations

import argparse
import csv
import glob as globlib
import sys
from pathlib import Path

from .geometry import build_layout, patch_bounds
from .scenario import ConfigError, load_config
from .sim import TRAJECTORY_COLUMNS, ScenarioResult, run_scenario

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_BAD_CONFIG = 2


def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, ".17g")
    if value is None:
        return "none"
    return str(value)


def write_trajectories(result: ScenarioResult, path: Path) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRAJECTORY_COLUMNS)
        for t, uav_id, x, y, theta, v, a, lane in result.rows:
            writer.writerow([_fmt(t), uav_id, _fmt(x), _fmt(y), _fmt(theta),
                             _fmt(v), _fmt(a), lane])


def write_events(result: ScenarioResult, path: Path) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "kind", "info"])
        for event in result.events:
            info = ";".join(f"{k}={_fmt(v)}" for k, v in sorted(event.data.items()))
            writer.writerow([_fmt(event.time), event.kind, info])


def write_metrics(result: ScenarioResult, path: Path) -> None:
    lines = ["schema_version = 1"]
    for key, value in result.metrics.items():
        if key == "min_separation_pair" and value is not None:
            value = "/".join(value)
        lines.append(f"{key} = {_fmt(value)}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_plots(result: ScenarioResult, out_dir: Path) -> list:
    """Emit self-contained SVG figures; no display server is needed."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    layout = result.layout
    written = []

    by_uav: dict[str, list] = {}
    for row in result.rows:
        by_uav.setdefault(row[1], []).append(row)

    # Corridor and flown trajectories.
    fig, ax = plt.subplots(figsize=(7.0, 7.0))
    for path_obj, style in ((layout.loiter_circle, "k--"),
                            (layout.outgoing_path, "k-"),
                            (layout.entry_path, "k:")):
        xs, ys = _sample_path(path_obj)
        ax.plot(xs, ys, style, linewidth=0.8)
    span = max(abs(layout.main_y), layout.r_loiter) + 50.0
    ax.plot([-span, span], [layout.main_y, layout.main_y], "k-", linewidth=0.8)
    for name, point in (("D", layout.point_d), ("F", layout.point_f),
                        ("Q", layout.point_q), ("A", layout.center_a)):
        ax.plot(*point, "k.", markersize=3)
        ax.annotate(name, point, textcoords="offset points", xytext=(4, 4))
    for uav_id, rows in by_uav.items():
        ax.plot([r[2] for r in rows], [r[3] for r in rows],
                linewidth=1.2, label=uav_id)
    ax.set_aspect("equal")
    ax.set_xlabel("x [m]")
    ax.set_ylabel("y [m]")
    ax.legend(fontsize=7, loc="upper left")
    written.append(_save(fig, out_dir / "corridor.svg"))

    # Outgoing-vehicle profiles.
    out_rows = by_uav.get("out", [])
    if out_rows:
        fig, axes = plt.subplots(3, 1, figsize=(7.0, 6.0), sharex=True)
        ts = [r[0] for r in out_rows]
        for ax_i, idx, label in ((axes[0], 5, "speed [m/s]"),
                                 (axes[1], 6, "lateral accel [m/s$^2$]"),
                                 (axes[2], 4, "flight path angle [rad]")):
            ax_i.plot(ts, [r[idx] for r in out_rows], linewidth=1.0)
            ax_i.set_ylabel(label, fontsize=8)
            ax_i.grid(alpha=0.3)
        axes[2].set_xlabel("t [s]")
        written.append(_save(fig, out_dir / "profiles.svg"))

    # Pairwise separations.
    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    ids = sorted(by_uav)
    for i, id_a in enumerate(ids):
        for id_b in ids[i + 1:]:
            rows_a, rows_b = by_uav[id_a], by_uav[id_b]
            ts = [r[0] for r in rows_a]
            ds = [((ra[2] - rb[2]) ** 2 + (ra[3] - rb[3]) ** 2) ** 0.5
                  for ra, rb in zip(rows_a, rows_b)]
            ax.plot(ts, ds, linewidth=0.8, label=f"{id_a}/{id_b}")
    ax.axhline(result.safety.d_safe, color="r", linestyle="--", linewidth=0.8)
    ax.set_xlabel("t [s]")
    ax.set_ylabel("separation [m]")
    ax.set_ylim(bottom=0.0)
    if len(ids) <= 8:
        ax.legend(fontsize=6, ncol=3)
    written.append(_save(fig, out_dir / "separations.svg"))
    return written


def _sample_path(path_obj, n: int = 200):
    xs, ys = [], []
    total = path_obj.length
    for i in range(n + 1):
        (x, y), _, _ = path_obj.point_at(total * i / n)
        xs.append(x)
        ys.append(y)
    return xs, ys


def _save(fig, path: Path):
    fig.savefig(path, format="svg")
    import matplotlib.pyplot as plt
    plt.close(fig)
    return path


def cmd_check_design(args) -> int:
    config = load_config(args.config)
    params = config.corridor_params()
    layout = build_layout(params)
    d_p_min, d_p_max = patch_bounds(layout, params)
    for key, value in (("r_loiter", params.r_loiter),
                       ("d_loiter", params.d_loiter),
                       ("patch_length", params.patch_length),
                       ("l_out", layout.l_out),
                       ("d_p_min", d_p_min),
                       ("d_p_max", d_p_max)):
        print(f"{key} = {_fmt(value)}")
    return EXIT_OK


def _run_one(config_path: str, out_dir: Path, strict: bool, plots: bool) -> int:
    config = load_config(config_path)
    result = run_scenario(config)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_trajectories(result, out_dir / "trajectories.csv")
    write_events(result, out_dir / "events.csv")
    write_metrics(result, out_dir / "metrics.txt")
    if plots:
        write_plots(result, out_dir)
    metrics = result.metrics
    print(f"{config_path}: outcome={metrics['outcome']} "
          f"t_out={_fmt(metrics['t_out'])} h={_fmt(metrics['h'])} "
          f"v_out={_fmt(metrics['v_out'])} "
          f"min_separation={_fmt(metrics['min_separation'])} -> {out_dir}")
    if strict and result.safety.violated:
        pair = result.safety.violating_pair
        print(f"safety violation: {pair[0]}/{pair[1]} at t={_fmt(pair[2])}",
              file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_run(args) -> int:
    config = load_config(args.config)
    out_dir = Path(args.out or config.out_dir or f"out/{Path(args.config).stem}")
    return _run_one(args.config, out_dir, args.strict, args.plots)


def cmd_sweep(args) -> int:
    paths = sorted(p for pattern in args.globs for p in globlib.glob(pattern))
    if not paths:
        print(f"no configs match {args.globs}", file=sys.stderr)
        return EXIT_BAD_CONFIG
    base = Path(args.out or "out")
    status = EXIT_OK
    for path in paths:
        status = max(status, _run_one(path, base / Path(path).stem,
                                      args.strict, args.plots))
    return status


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="loiterlane",
        description="Corridor reinsertion guidance and simulation")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate one scenario file")
    p_run.add_argument("config")
    p_run.add_argument("--out", help="output directory")
    p_run.add_argument("--strict", action="store_true",
                       help="exit 1 when the safety distance is violated")
    p_run.add_argument("--plots", action="store_true", help="emit SVG figures")
    p_run.set_defaults(func=cmd_run)

    p_check = sub.add_parser("check-design",
                             help="print derived corridor design values")
    p_check.add_argument("config")
    p_check.set_defaults(func=cmd_check_design)

    p_sweep = sub.add_parser("sweep", help="run every scenario matching a glob")
    p_sweep.add_argument("globs", nargs="+")
    p_sweep.add_argument("--out", help="base output directory")
    p_sweep.add_argument("--strict", action="store_true")
    p_sweep.add_argument("--plots", action="store_true")
    p_sweep.set_defaults(func=cmd_sweep)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
