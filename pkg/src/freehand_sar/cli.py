"""Command-line front end.

Subcommands: scene, trajectory, simulate, reconstruct, dataset, metrics,
bench. Global flags: --seed, --threads, --profile {desk|paper}, --config.
A JSON config file can supply values for any long flag; explicit flags win
(flag > file > default). Logs go to stderr as line-delimited JSON records;
all artifacts are files.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys


from freehand_sar import metrics as metrics_mod
from freehand_sar.dataset import generate_dataset
from freehand_sar.forward import RawData, add_noise, synthesize
from freehand_sar.geometry import (
    FreehandTrajectory,
    PerturbationSpec,
    make_freehand_trajectory,
    make_raster_trajectory,
    perturb_trajectory,
)
from freehand_sar.profiles import PROFILES, get_profile
from freehand_sar.reconstruct import bpa, empm_rma, rma
from freehand_sar.sarimage import SarImage
from freehand_sar.scene import Scene, discretize_scene, random_scene, rasterize_ideal
from freehand_sar.empm import empm_compensate

log = logging.getLogger("freehand_sar")


class _JsonFormatter(logging.Formatter):
    def format(self, record):
        return json.dumps(
            {"ts": round(record.created, 3), "level": record.levelname.lower(),
             "msg": record.getMessage()},
            separators=(",", ":"),
        )


def _setup_logging() -> None:
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(_JsonFormatter())
    log.addHandler(handler)
    log.setLevel(logging.INFO)


class Config:
    """flag > config file > built-in default."""

    def __init__(self, path: str | None):
        self.values = {}
        if path:
            with open(path) as f:
                self.values = json.load(f)

    def resolve(self, cli_value, key: str, default):
        if cli_value is not None:
            return cli_value
        if key in self.values:
            return self.values[key]
        return default


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="freehand-sar",
        description="Near-field freehand MIMO-SAR simulation and reconstruction toolkit",
    )
    parser.add_argument("--seed", type=int, default=None, help="base seed (default: 0)")
    parser.add_argument("--threads", type=int, default=None,
                        help="worker budget for batch stages (default: 1)")
    parser.add_argument("--profile", choices=sorted(PROFILES), default=None,
                        help="geometry/dataset profile (default: desk)")
    parser.add_argument("--config", default=None, help="JSON config file supplying flag defaults")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("scene", help="scene generation and inspection")
    ssub = p.add_subparsers(dest="action", required=True)
    g = ssub.add_parser("gen", help="generate a random scene")
    g.add_argument("--out", required=True, help="output scene JSON path")

    p = sub.add_parser("trajectory", help="trajectory generation")
    tsub = p.add_subparsers(dest="action", required=True)
    g = tsub.add_parser("gen", help="generate a trajectory")
    g.add_argument("--kind", choices=["raster", "freehand"], default="raster")
    g.add_argument("--sigma-xy", type=float, default=None, help="in-plane jitter std [m]")
    g.add_argument("--z-span", type=float, default=None, help="z excursion span [m]")
    g.add_argument("--smoothness", type=int, default=None, help="jitter smoothing window")
    g.add_argument("--perturb-sigma", type=float, default=None,
                   help="also write an estimated trajectory with this position-error std [m]")
    g.add_argument("--out", required=True, help="output trajectory JSON path")

    p = sub.add_parser("simulate", help="synthesize raw data for a scene over a trajectory")
    p.add_argument("--scene", required=True)
    p.add_argument("--traj", required=True)
    p.add_argument("--snr", type=float, default=None, help="SNR in dB (omit for noise-free)")
    p.add_argument("--out", required=True, help="output raw-data binary path")

    p = sub.add_parser("reconstruct", help="reconstruct an image from raw data")
    p.add_argument("--algo", choices=["bpa", "rma", "empm-rma"], required=True)
    p.add_argument("--raw", required=True)
    p.add_argument("--traj", required=True)
    p.add_argument("--out", required=True, help="output image binary path")
    p.add_argument("--png", default=None, help="optional grayscale PNG export path")

    p = sub.add_parser("dataset", help="paired dataset generation")
    dsub = p.add_subparsers(dest="action", required=True)
    g = dsub.add_parser("gen", help="generate train/test splits")
    g.add_argument("--out", required=True, help="output dataset directory")
    g.add_argument("--n-train", type=int, default=None)
    g.add_argument("--n-test", type=int, default=None)

    p = sub.add_parser("metrics", help="compare two images")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--out", default=None, help="optional metric-record output file")

    p = sub.add_parser("bench", help="benchmark reconstruction algorithms on one scene")
    p.add_argument("--out", required=True, help="output CSV comparison table")
    p.add_argument("--repetitions", type=int, default=None)
    return parser


def _cmd_scene(args, cfg: Config, profile, seed: int) -> int:
    scene = random_scene(profile.scene, seed)
    scene.save(args.out)
    log.info(f"wrote scene with {len(scene.points)} points, {len(scene.shapes)} shapes to {args.out}")
    return 0


def _cmd_trajectory(args, cfg: Config, profile, seed: int) -> int:
    if args.kind == "raster":
        traj = make_raster_trajectory(profile.aperture, profile.radar, Z0=profile.Z0)
    else:
        traj = make_freehand_trajectory(
            profile.aperture,
            profile.radar,
            Z0=profile.Z0,
            sigma_xy=cfg.resolve(args.sigma_xy, "sigma_xy", profile.jitter_sigma_xy),
            z_span=cfg.resolve(args.z_span, "z_span", 0.02),
            smoothness=cfg.resolve(args.smoothness, "smoothness", profile.jitter_smoothness),
            seed=seed,
        )
    traj.save(args.out)
    log.info(f"wrote {traj.kind} trajectory with {traj.n_poses} poses to {args.out}")
    sigma = cfg.resolve(args.perturb_sigma, "perturb_sigma", None)
    if sigma is not None:
        est = perturb_trajectory(traj, PerturbationSpec((sigma, sigma, sigma), seed))
        est_path = str(args.out) + ".est"
        est.save(est_path)
        log.info(f"wrote estimated trajectory to {est_path}")
    return 0


def _cmd_simulate(args, cfg: Config, profile, seed: int) -> int:
    scene = Scene.load(args.scene)
    traj = FreehandTrajectory.load(args.traj)
    positions, amplitudes = discretize_scene(scene, profile.grid)
    raw = synthesize(positions, amplitudes, traj, profile.radar)
    if args.snr is not None:
        raw = add_noise(raw, args.snr, seed=seed)
    raw.save(args.out)
    log.info(f"wrote {raw.n_measurements}x{raw.n_freq} raw samples to {args.out}")
    return 0


def _cmd_reconstruct(args, cfg: Config, profile, seed: int) -> int:
    raw = RawData.load(args.raw)
    traj = FreehandTrajectory.load(args.traj)
    Z0 = traj.Z0 if traj.Z0 is not None else profile.Z0
    if args.algo == "bpa":
        img = bpa(raw, traj, profile.grid)
    elif args.algo == "rma":
        img = rma(empm_compensate(raw, traj, Z0), Z0, profile.grid)
    else:
        img = empm_rma(raw, traj, Z0, profile.grid)
    img.save(args.out)
    if args.png:
        img.save_png(args.png)
    log.info(f"wrote {args.algo} image to {args.out}")
    return 0


def _cmd_dataset(args, cfg: Config, profile, seed: int, workers: int) -> int:
    manifest = generate_dataset(
        profile,
        seed,
        args.out,
        n_train=cfg.resolve(args.n_train, "n_train", None),
        n_test=cfg.resolve(args.n_test, "n_test", None),
        workers=workers,
    )
    for split, info in manifest["splits"].items():
        log.info(f"{split} split: {info['n']} samples")
    return 0


def _cmd_metrics(args, cfg: Config) -> int:
    a = SarImage.load(args.a)
    b = SarImage.load(args.b)
    records = [
        metrics_mod.metric_record("psnr_db", metrics_mod.psnr(a, b), args.a, args.b),
        metrics_mod.metric_record("rmse", metrics_mod.rmse(a, b), args.a, args.b),
    ]
    for r in records:
        print(r)
    if args.out:
        with open(args.out, "w") as f:
            f.write("\n".join(records) + "\n")
    return 0


def _cmd_bench(args, cfg: Config, profile, seed: int) -> int:
    reps = cfg.resolve(args.repetitions, "repetitions", 1)
    scene = random_scene(profile.scene, seed)
    ideal = rasterize_ideal(scene, profile.grid)
    positions, amplitudes = discretize_scene(scene, profile.grid)
    traj = make_freehand_trajectory(
        profile.aperture, profile.radar, Z0=profile.Z0,
        sigma_xy=profile.jitter_sigma_xy, z_span=0.02,
        smoothness=profile.jitter_smoothness, seed=seed,
    )
    raw = synthesize(positions, amplitudes, traj, profile.radar)
    lam = profile.radar.wavelength_center
    est = perturb_trajectory(traj, PerturbationSpec((lam / 8,) * 3, seed))

    methods = {
        "BPA": lambda: bpa(raw, est, profile.grid),
        "EMPM": lambda: empm_rma(raw, est, profile.Z0, profile.grid),
        "RMA": lambda: rma(empm_compensate(raw, est, profile.Z0), profile.Z0, profile.grid),
    }
    rows = {"PSNR (dB)": {}, "RMSE": {}, "Time (s)": {}}
    for name, fn in methods.items():
        result = metrics_mod.bench(fn, repetitions=reps, warmup=1 if name != "BPA" else 0)
        img = fn()
        rows["PSNR (dB)"][name] = round(metrics_mod.psnr(img, ideal), 3)
        rows["RMSE"][name] = round(metrics_mod.rmse(img, ideal), 4)
        rows["Time (s)"][name] = round(result.mean_s, 4)
        log.info(f"{name}: psnr={rows['PSNR (dB)'][name]} time={rows['Time (s)'][name]}s")
    metrics_mod.write_comparison_table(args.out, list(methods), rows)
    log.info(f"wrote comparison table to {args.out}")
    return 0


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = Config(args.config)
    seed = cfg.resolve(args.seed, "seed", 0)
    workers = cfg.resolve(args.threads, "threads", 1)
    profile = get_profile(cfg.resolve(args.profile, "profile", "desk"))
    try:
        if args.command == "scene":
            return _cmd_scene(args, cfg, profile, seed)
        if args.command == "trajectory":
            return _cmd_trajectory(args, cfg, profile, seed)
        if args.command == "simulate":
            return _cmd_simulate(args, cfg, profile, seed)
        if args.command == "reconstruct":
            return _cmd_reconstruct(args, cfg, profile, seed)
        if args.command == "dataset":
            return _cmd_dataset(args, cfg, profile, seed, workers)
        if args.command == "metrics":
            return _cmd_metrics(args, cfg)
        if args.command == "bench":
            return _cmd_bench(args, cfg, profile, seed)
        parser.error(f"unknown command {args.command}")
    except Exception as exc:  # noqa: BLE001 - single CLI failure funnel
        log.error(f"{type(exc).__name__}: {exc}")
        return 1
    return 0


def main() -> None:
    _setup_logging()
    sys.exit(run())


if __name__ == "__main__":
    main()
