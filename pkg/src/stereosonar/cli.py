"""Command line entry points.

    stereosonar project fl-to-ss --range 5 --azimuth-deg 0 --rpy-deg 0 90 0 --solve 5 15
    stereosonar project ss-to-fl --config run.yaml --output samples.csv
    stereosonar sweep --scenario 7 --direction ss2fl --output out/
    stereosonar sweep --all --output out/
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import logging
import math
import os
import sys
import time

import numpy as np

from . import crossmodal, sweep
from .config import ConfigError, Resolution, RunConfig, load_config
from .csv_io import OutputError, emit_csv
from .geometry import FlObservation, RelativePose, SsObservation

log = logging.getLogger("stereosonar")

_SUBCOMMAND_DIRECTION = {"fl-to-ss": "fl2ss", "ss-to-fl": "ss2fl"}


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML run configuration")
    common.add_argument(
        "--resolution", type=int, metavar="N",
        help="back-projection samples: arc samples (fl-to-ss) or azimuth samples "
             "and image cells per axis (ss-to-fl)",
    )
    common.add_argument("--output", help="output file (project) or directory (sweep)")

    parser = argparse.ArgumentParser(
        prog="stereosonar",
        description="Cross-modal projection geometry for forward-looking and sidescan sonar.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command")

    project = sub.add_parser("project", help="project a single observation")
    psub = project.add_subparsers(dest="mode")
    for name in _SUBCOMMAND_DIRECTION:
        p = psub.add_parser(name, parents=[common])
        p.add_argument("--range", type=float, dest="range_m", metavar="M", help="observed range (m)")
        if name == "fl-to-ss":
            p.add_argument("--azimuth-deg", type=float, metavar="DEG", help="observed azimuth (deg)")
        p.add_argument("--rpy-deg", type=float, nargs=3, metavar=("ROLL", "PITCH", "YAW"))
        group = p.add_mutually_exclusive_group()
        group.add_argument("--translation", type=float, nargs=3, metavar=("X", "Y", "Z"))
        group.add_argument(
            "--solve", type=float, nargs=2, metavar=("D_SOURCE", "D_TARGET"),
            help="solve translation for a boresight feature at these distances",
        )
        p.add_argument("--dump", action="store_true", help="print every surviving sample")

    sw = sub.add_parser("sweep", parents=[common], help="run rotation/distance sweeps")
    which = sw.add_mutually_exclusive_group(required=True)
    which.add_argument("--all", action="store_true", help="run all 18 scenarios")
    which.add_argument("--scenario", type=int, choices=range(1, 10), metavar="{1..9}")
    sw.add_argument("--direction", choices=sweep.DIRECTIONS)
    sw.add_argument("--angle-samples", type=int, metavar="N", help="samples per single swept angle")
    sw.add_argument("--pair-samples", type=int, metavar="N", help="samples per angle in pair sweeps")
    return parser


def _load(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    if args.resolution is not None:
        if args.resolution < 2:
            raise ConfigError("--resolution must be >= 2")
        cfg = dataclasses.replace(
            cfg,
            resolution=dataclasses.replace(
                cfg.resolution,
                arc_samples=args.resolution,
                surface_theta_samples=args.resolution,
                area_cells=args.resolution,
            ),
        )
    return cfg


def _pose_from_args(args, cfg: RunConfig) -> RelativePose:
    if args.rpy_deg is None and args.translation is None and args.solve is None:
        return cfg.pose
    rpy = [math.radians(a) for a in (args.rpy_deg or (0.0, 0.0, 0.0))]
    R = sweep.rotation_from_rpy(*rpy)
    if args.solve is not None:
        d_src, d_tgt = args.solve
        t = sweep.solve_translation((d_src, 0.0, 0.0), (d_tgt, 0.0, 0.0), R)
    elif args.translation is not None:
        t = np.array(args.translation)
    else:
        t = cfg.pose.translation
    return RelativePose(R, t)


def _project(args) -> int:
    direction = _SUBCOMMAND_DIRECTION[args.mode]
    cfg = _load(args)
    if cfg.direction is not None and cfg.direction != direction:
        raise ConfigError(f"config direction {cfg.direction!r} does not match 'project {args.mode}'")
    obs = cfg.observation
    if args.range_m is not None:
        if direction == "fl2ss":
            az = args.azimuth_deg if args.azimuth_deg is not None else math.degrees(getattr(obs, "theta", 0.0))
            obs = FlObservation(args.range_m, math.radians(az))
        else:
            obs = SsObservation(args.range_m)
    elif direction == "fl2ss" and args.azimuth_deg is not None and obs is not None:
        obs = FlObservation(obs.r, math.radians(args.azimuth_deg))
    if obs is None:
        raise ConfigError("no observation: pass --range or an observation section in --config")
    pose = _pose_from_args(args, cfg)
    res: Resolution = cfg.resolution

    if direction == "fl2ss":
        region = crossmodal.fl_to_ss(obs, pose, cfg.intr_fl, cfg.intr_ss, res.arc_samples)
        n_cands = res.arc_samples
    else:
        dr, dtheta = crossmodal.default_cell_size(cfg.intr_fl, res.area_cells)
        region = crossmodal.ss_to_fl(
            obs, pose, cfg.intr_ss, cfg.intr_fl,
            res.surface_theta_samples, res.surface_phi_samples, dr, dtheta,
        )
        n_cands = res.surface_theta_samples * res.surface_phi_samples

    print(f"direction: {direction}")
    print(f"visible: {str(region.visible).lower()}")
    print(f"valid_samples: {len(region.valid)} / {n_cands}")
    if direction == "fl2ss":
        if region.visible:
            lo, hi = region.ss_span
            print(f"range_interval_m: {lo:.9f} {hi:.9f}")
        print(f"span_length_m: {region.span_length:.9f}")
        rows = [(r,) for r in region.ss_ranges]
        header = ("range_m",)
    else:
        if region.visible:
            r, th = region.fl_samples[:, 0], region.fl_samples[:, 1]
            print(f"range_bounds_m: {r.min():.9f} {r.max():.9f}")
            print(f"azimuth_bounds_deg: {math.degrees(th.min()):.9f} {math.degrees(th.max()):.9f}")
        print(f"area_m2: {region.area:.9f}")
        rows = [(r, math.degrees(th)) for r, th in region.fl_samples]
        header = ("range_m", "azimuth_deg")

    if args.dump:
        print(",".join(header))
        for row in rows:
            print(",".join(repr(float(v)) for v in row))
    output = args.output or cfg.output
    if output:
        try:
            with open(output, "w", encoding="utf-8", newline="") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(header)
                writer.writerows([[repr(float(v)) for v in row] for row in rows])
        except OSError as exc:
            raise OutputError(f"cannot write {output}: {exc.strerror or exc}") from exc
    return 0


def _sweep(args) -> int:
    cfg = _load(args)
    res = cfg.resolution
    grid = {}
    if args.angle_samples is not None:
        grid["single_samples"] = args.angle_samples
    if args.pair_samples is not None:
        grid["pair_samples"] = args.pair_samples
    suite = sweep.standard_suite(
        **grid,
        intr_fl=cfg.intr_fl,
        intr_ss=cfg.intr_ss,
        n_arc=res.arc_samples,
        n_theta=res.surface_theta_samples,
        n_phi=res.surface_phi_samples,
        area_cells=res.area_cells,
    )
    if args.all:
        if args.direction is not None:
            raise ConfigError("--direction cannot be combined with --all")
        chosen = suite
    else:
        if args.direction is None:
            raise ConfigError("--scenario needs --direction")
        chosen = [sweep.find_scenario(suite, args.direction, args.scenario)]

    out_dir = args.output or cfg.output or "."
    try:
        os.makedirs(out_dir, exist_ok=True)
    except OSError as exc:
        raise OutputError(f"cannot create {out_dir}: {exc.strerror or exc}") from exc
    for scenario in chosen:
        start = time.perf_counter()
        records = sweep.run_scenario(scenario)
        path = os.path.join(out_dir, f"sweep_{scenario.direction}_{scenario.index}.csv")
        emit_csv(records, path)
        log.info("%s -> %s (%d records, %.1f s)", scenario.describe(), path,
                 len(records), time.perf_counter() - start)
        print(path)
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(message)s",
    )
    if args.command is None or (args.command == "project" and args.mode is None):
        parser.print_usage(sys.stderr)
        return 2
    try:
        if args.command == "project":
            return _project(args)
        return _sweep(args)
    except (ConfigError, crossmodal.ObservationError, OutputError, ValueError) as exc:
        print(f"stereosonar: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
