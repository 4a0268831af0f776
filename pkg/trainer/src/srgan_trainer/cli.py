"""Command-line front end: ``train`` on a dataset directory, ``infer`` on one image."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from srgan_trainer.formats import load_image, load_split, save_image
from srgan_trainer.train import TrainerConfig, infer, load_checkpoint, train

log = logging.getLogger("srgan_trainer")

PROFILES = {
    "desk": {"max_epochs": 5, "batch_size": 4},
    "paper": {"max_epochs": 50, "batch_size": 16},
}


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


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="srgan-trainer",
        description="Adversarial super-resolution trainer for paired SAR image datasets",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train on a dataset directory")
    p.add_argument("--data", required=True, help="dataset directory (train/, test/, manifest.json)")
    p.add_argument("--profile", choices=sorted(PROFILES), default="desk")
    p.add_argument("--out", required=True, help="output directory (checkpoint + history CSV)")
    p.add_argument("--epochs", type=int, default=None, help="override the profile's epoch count")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("infer", help="run a trained generator on one image")
    p.add_argument("--model", required=True, help="generator checkpoint")
    p.add_argument("--in", dest="input", required=True, help="input image file")
    p.add_argument("--out", required=True, help="output image file")
    return parser


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "train":
            prof = PROFILES[args.profile]
            cfg = TrainerConfig(
                max_epochs=args.epochs if args.epochs is not None else prof["max_epochs"],
                batch_size=prof["batch_size"],
                seed=args.seed,
            )
            train_samples = load_split(args.data, "train")
            test_samples = load_split(args.data, "test")
            log.info(f"loaded {len(train_samples)} train / {len(test_samples)} test samples")
            result = train(train_samples, test_samples, cfg, args.out)
            last = result.history[-1]
            log.info(f"final test psnr {last['test_psnr']:.3f} dB, "
                     f"rmse {last['test_rmse']:.4f}; checkpoint {result.checkpoint_path}")
        else:
            gen = load_checkpoint(args.model)
            img = load_image(args.input)
            save_image(infer(gen, img), args.out)
            log.info(f"wrote {args.out}")
    except Exception as exc:  # noqa: BLE001 - single CLI failure funnel
        log.error(f"{type(exc).__name__}: {exc}")
        return 1
    return 0


def main() -> None:
    _setup_logging()
    sys.exit(run())


if __name__ == "__main__":
    main()
