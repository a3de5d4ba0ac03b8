"""Command line interface.

Exit codes: 0 success, 1 failed check (check-grad over tolerance), 2 bad
usage or invalid input, 3 I/O failure, 4 a run that ended on a degeneracy.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .cloud import new_cloud, pairwise_distances
from .datasets import distortion, make_dataset
from .errors import DegenerateEdgeError, DegeneratePairError, TopogroupError
from .filtration import filtration_from_distances
from .fileio import (
    labels_path_for,
    read_labels,
    read_points_csv,
    read_trajectory,
    write_diagram,
    write_labels,
    write_points_csv,
    write_summary,
    write_trajectory,
)
from .gradients import finite_difference_check, resolve_radius_cap
from .losses import LossSpec, PRESET_LOSSES, preset_loss
from .optim import OptimConfig, run_optimization
from .persistence import compute_persistence
from .regularizer import KernelSpec
from .render import render_points_svg, render_trajectory_frames

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_DEGENERATE = 4

_CONFIG_KEYS = {
    "input", "shape", "n", "seed",
    "loss", "persistence_floor", "lam", "kernel", "scale", "lr", "steps",
    "snapshot_interval", "max_dim", "radius_cap", "method",
}


def _radius_cap_arg(text: str):
    if text in ("enclosing", "none"):
        return text
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"{text!r} is not 'enclosing', 'none', or a number"
        ) from None
    if not value >= 0.0:
        raise argparse.ArgumentTypeError(f"radius cap must be >= 0, got {value}")
    return value


def _add_loss_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--loss", choices=sorted(PRESET_LOSSES), default="rho0",
                   help="loss preset (default rho0)")
    p.add_argument("--persistence-floor", type=float, default=None,
                   help="override the preset's persistence floor")
    p.add_argument("--lambda", dest="lam", type=float, default=1.0,
                   help="regularizer weight (default 1.0)")
    p.add_argument("--kernel", choices=["uniform", "gaussian", "none"], default="uniform")
    p.add_argument("--scale", type=float, default=1.0, help="kernel scale (default 1.0)")
    p.add_argument("--max-dim", type=int, default=None,
                   help="highest homology dimension to compute (default: loss target)")
    p.add_argument("--radius-cap", type=_radius_cap_arg, default="enclosing",
                   help="'enclosing', 'none', or a radius (default enclosing)")
    p.add_argument("--method", choices=["auto", "dual", "boundary"], default="auto")


def _loss_from_args(args) -> LossSpec:
    spec = preset_loss(args.loss)
    if args.persistence_floor is not None:
        spec = LossSpec(spec.target_dimension, args.persistence_floor, spec.exclude_essential)
    return spec


def _kernel_from_args(args) -> KernelSpec | None:
    if args.kernel == "none":
        return None
    return KernelSpec(kind=args.kernel, scale=args.scale)


def _load_labels(points_path, labels_arg, n_points: int) -> list[str] | None:
    if labels_arg is not None:
        labels = read_labels(labels_arg)
    else:
        sibling = labels_path_for(points_path)
        if not sibling.exists():
            return None
        labels = read_labels(sibling)
    if len(labels) != n_points:
        raise ValueError(f"{len(labels)} labels for {n_points} points")
    return labels


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="topogroup",
                                     description="optimize point clouds against persistence losses")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="sample a labeled synthetic dataset")
    p.add_argument("--shape", choices=["two-clusters", "horseshoe"], required=True)
    p.add_argument("--n", type=int, default=None, help="number of points (shape default if omitted)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--radius", type=float, default=None, help="two-clusters: disk radius")
    p.add_argument("--separation", type=float, default=None, help="two-clusters: center distance")
    p.add_argument("--ring-radius", type=float, default=None, help="horseshoe: mid-line radius")
    p.add_argument("--thickness", type=float, default=None, help="horseshoe: radial thickness")
    p.add_argument("--opening-deg", type=float, default=None, help="horseshoe: opening angle in degrees")
    p.add_argument("-o", "--output", required=True, help="points CSV; labels go to <stem>.labels.csv")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("optimize", help="run the optimizer on a point CSV or a generated dataset")
    p.add_argument("-i", "--input", default=None, help="points CSV (or use --shape to generate)")
    p.add_argument("--shape", choices=["two-clusters", "horseshoe"], default=None,
                   help="generate this dataset instead of reading a file")
    p.add_argument("--n", type=int, default=None, help="point count for --shape")
    p.add_argument("--seed", type=int, default=0, help="seed for --shape")
    p.add_argument("--labels", default=None, help="label file (default: sibling of input if present)")
    p.add_argument("--config", default=None, help="JSON file with defaults for the flags below")
    _add_loss_args(p)
    p.add_argument("--lr", type=float, default=0.01)
    p.add_argument("--steps", type=int, default=500)
    p.add_argument("--snapshot-interval", type=int, default=50, help="0 disables snapshots")
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("diagram", help="print or write the persistence diagram of a point CSV")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("--max-dim", type=int, default=1)
    p.add_argument("--radius-cap", type=_radius_cap_arg, default="enclosing")
    p.add_argument("--method", choices=["auto", "dual", "boundary"], default="auto")
    p.add_argument("-o", "--output", default=None, help="write JSONL records instead of printing")
    p.set_defaults(func=cmd_diagram)

    p = sub.add_parser("check-grad", help="finite-difference check of the composite gradient")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("-i", "--input")
    src.add_argument("--random", type=int, metavar="M", help="check M random points instead of a file")
    p.add_argument("--seed", type=int, default=0)
    _add_loss_args(p)
    p.add_argument("--fd-step", type=float, default=1e-5, help="central difference step (default 1e-5)")
    p.add_argument("--tolerance", type=float, default=1e-4)
    p.set_defaults(func=cmd_check_grad)

    p = sub.add_parser("render", help="render a point CSV or trajectory JSONL to SVG")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("--labels", default=None)
    p.add_argument("--width", type=int, default=480)
    p.add_argument("-o", "--output", required=True,
                   help="SVG file for points input, directory of frames for a trajectory")
    p.set_defaults(func=cmd_render)

    return parser


def cmd_generate(args) -> int:
    geometry = {}
    if args.shape == "two-clusters":
        if args.radius is not None:
            geometry["radius"] = args.radius
        if args.separation is not None:
            geometry["separation"] = args.separation
        for flag in ("ring_radius", "thickness", "opening_deg"):
            if getattr(args, flag) is not None:
                raise ValueError(f"--{flag.replace('_', '-')} does not apply to two-clusters")
    else:
        if args.ring_radius is not None:
            geometry["ring_radius"] = args.ring_radius
        if args.thickness is not None:
            geometry["thickness"] = args.thickness
        if args.opening_deg is not None:
            geometry["opening"] = float(np.deg2rad(args.opening_deg))
        for flag in ("radius", "separation"):
            if getattr(args, flag) is not None:
                raise ValueError(f"--{flag} does not apply to horseshoe")
    cloud, labels = make_dataset(args.shape, n=args.n, seed=args.seed, **geometry)
    write_points_csv(args.output, cloud.current)
    labels_path = labels_path_for(args.output)
    write_labels(labels_path, labels)
    print(f"wrote {cloud.m} points to {args.output}, labels to {labels_path}")
    return EXIT_OK


def _apply_config_file(parser: argparse.ArgumentParser, argv) -> None:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", default=None)
    found, _ = pre.parse_known_args(argv)
    if found.config is None:
        return
    with open(found.config) as fh:
        try:
            config = json.load(fh)
        except json.JSONDecodeError as e:
            raise ValueError(f"{found.config}: not valid JSON ({e})") from None
    if not isinstance(config, dict):
        raise ValueError(f"{found.config}: expected a JSON object")
    mapped = {}
    for key, value in config.items():
        norm = key.replace("-", "_")
        if norm == "lambda":
            norm = "lam"
        if norm not in _CONFIG_KEYS:
            raise ValueError(f"{found.config}: unknown option {key!r}")
        mapped[norm] = value
    for action in parser._subparsers._group_actions[0].choices.values():  # type: ignore[union-attr]
        if any(a.dest == "config" for a in action._actions):
            action.set_defaults(**mapped)


def cmd_optimize(args) -> int:
    if (args.input is None) == (args.shape is None):
        raise ValueError("need exactly one input source: -i/--input or --shape")
    if args.input is not None:
        points = read_points_csv(args.input)
        cloud = new_cloud(points)
        labels = _load_labels(args.input, args.labels, cloud.m)
    else:
        cloud, labels = make_dataset(args.shape, n=args.n, seed=args.seed)
    spec = _loss_from_args(args)
    config = OptimConfig(
        loss=spec,
        lam=args.lam,
        kernel=_kernel_from_args(args),
        learning_rate=args.lr,
        steps=args.steps,
        snapshot_interval=args.snapshot_interval or None,
        max_dim=args.max_dim,
        radius_cap=args.radius_cap,
        method=args.method,
    )
    cloud, trajectory = run_optimization(cloud, config)

    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    write_trajectory(out / "trajectory.jsonl", trajectory)
    write_points_csv(out / "final.csv", cloud.current)
    if labels is not None:
        write_labels(out / "final.labels.csv", labels)

    summary = {
        "status": trajectory.status,
        "input": args.input,
        "shape": args.shape,
        "seed": args.seed if args.shape is not None else None,
        "n_points": cloud.m,
        "ambient_dim": cloud.n,
        "loss": args.loss,
        "target_dimension": spec.target_dimension,
        "persistence_floor": spec.persistence_floor,
        "lam": config.lam,
        "kernel": None if config.kernel is None else {"kind": config.kernel.kind, "scale": config.kernel.scale},
        "learning_rate": config.learning_rate,
        "steps_requested": config.steps,
        "steps_run": trajectory.records[-1].step if trajectory.records else None,
        "radius_cap": args.radius_cap if isinstance(args.radius_cap, str) else float(args.radius_cap),
        "initial": None,
        "final": None,
        "distortion": None if labels is None else distortion(cloud, labels),
    }
    if trajectory.records:
        first, last = trajectory.records[0], trajectory.records[-1]
        summary["initial"] = {"loss": first.loss, "rho": first.rho, "tau": first.tau}
        summary["final"] = {"loss": last.loss, "rho": last.rho, "tau": last.tau}
    write_summary(out / "summary.json", summary)

    if trajectory.records:
        first, last = trajectory.records[0], trajectory.records[-1]
        print(f"status {trajectory.status}: loss {first.loss:.6g} -> {last.loss:.6g} "
              f"(rho {first.rho:.6g} -> {last.rho:.6g}, tau {first.tau:.6g} -> {last.tau:.6g})")
    else:
        print(f"status {trajectory.status}: no steps completed")
    if summary["distortion"] is not None:
        print(f"grouping distortion {summary['distortion']:.6g}")
    print(f"outputs in {out}")
    return EXIT_OK if trajectory.completed else EXIT_DEGENERATE


def _fmt_value(v: float) -> str:
    return "inf" if np.isinf(v) else f"{v:.12g}"


def cmd_diagram(args) -> int:
    points = read_points_csv(args.input)
    cloud = new_cloud(points)
    distances = pairwise_distances(cloud)
    cap = resolve_radius_cap(args.radius_cap, distances)
    filtration = filtration_from_distances(distances, max_dim=args.max_dim, max_radius=cap)
    diagrams = compute_persistence(filtration, method=args.method)
    if args.output is not None:
        write_diagram(args.output, diagrams)
        print(f"wrote {sum(len(d) for d in diagrams)} pairs to {args.output}")
        return EXIT_OK
    for diagram in diagrams:
        pairs = sorted(diagram.pairs, key=lambda p: (p.birth, p.death))
        if pairs:
            summary = ", ".join(f"({_fmt_value(p.birth)}, {_fmt_value(p.death)})" for p in pairs)
        else:
            summary = "(empty)"
        print(f"dim {diagram.dimension}: {summary}")
        for p in pairs:
            line = f"  ({_fmt_value(p.birth)}, {_fmt_value(p.death)})  birth {p.birth_simplex.vertices}"
            if p.death_simplex is not None:
                line += f"  death {p.death_simplex.vertices}"
            print(line)
    return EXIT_OK


def cmd_check_grad(args) -> int:
    if args.input is not None:
        points = read_points_csv(args.input)
    else:
        if args.random < 2:
            raise ValueError("--random needs at least 2 points")
        rng = np.random.default_rng(args.seed)
        points = rng.uniform(0.0, 1.0, size=(args.random, 2))
    cloud = new_cloud(points)
    spec = _loss_from_args(args)
    kernel = _kernel_from_args(args)
    weights = None
    if kernel is not None:
        from .regularizer import build_weights
        weights = build_weights(cloud, kernel)
    lam = args.lam if weights is not None else 0.0
    report = finite_difference_check(
        cloud, spec, weights=weights, lam=lam, h=args.fd_step,
        max_dim=args.max_dim, radius_cap=args.radius_cap, method=args.method,
    )
    n_coords = report.rel_errors.size
    print(f"checked {n_coords} coordinates: max relative error {report.max_rel_error:.3e} "
          f"over {n_coords - report.n_unstable} stable ({report.n_unstable} unstable skipped)")
    if report.n_unstable:
        coords = np.argwhere(report.unstable_mask)
        shown = ", ".join(f"(point {i}, axis {a})" for i, a in coords[:10])
        extra = "" if len(coords) <= 10 else f", and {len(coords) - 10} more"
        print(f"unstable coordinates: {shown}{extra}")
    if report.max_rel_error < args.tolerance:
        print(f"PASS (tolerance {args.tolerance:g})")
        return EXIT_OK
    i, a = report.worst_coordinate
    print(f"FAIL (tolerance {args.tolerance:g}): worst at point {i} axis {a}: "
          f"analytic {report.analytic[i, a]:.9g} vs numeric {report.numeric[i, a]:.9g}")
    return EXIT_CHECK_FAILED


def cmd_render(args) -> int:
    path = Path(args.input)
    if path.suffix in (".jsonl", ".json"):
        records = read_trajectory(path)
        labels = read_labels(args.labels) if args.labels is not None else None
        frames = render_trajectory_frames(records, labels, width=args.width)
        out = Path(args.output)
        out.mkdir(parents=True, exist_ok=True)
        for step, svg in frames:
            (out / f"frame_{step:05d}.svg").write_text(svg)
        print(f"wrote {len(frames)} frames to {out}")
    else:
        points = read_points_csv(path)
        labels = _load_labels(path, args.labels, len(points))
        svg = render_points_svg(points, labels, width=args.width)
        Path(args.output).write_text(svg)
        print(f"wrote {args.output}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    try:
        _apply_config_file(parser, argv)
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except (DegeneratePairError, DegenerateEdgeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (FileNotFoundError, IsADirectoryError, NotADirectoryError, PermissionError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    except (TopogroupError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO


def entry() -> None:
    sys.exit(main())
