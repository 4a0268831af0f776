"""Adversarial training loop: alternating discriminator/generator updates.

Per batch, the discriminator is updated on its adversarial loss, then the
generator on adversarial + pixel + feature-matching terms (discriminator
weights and features held fixed). The ``literal_algorithm`` switch instead
folds the feature-matching term into the discriminator update and drops it
from the generator objective, kept for ablation.

Per epoch: held-out PSNR/RMSE are appended to a history CSV and a checkpoint
is written. A non-finite loss aborts training, leaving the last good
checkpoint on disk.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch

from srgan_trainer.formats import ImageBlock, Sample
from srgan_trainer.losses import loss_adv_d, loss_adv_g, loss_p2p, loss_perc
from srgan_trainer.model import Discriminator, Generator, GeneratorSpec

PSNR_CAP_DB = 100.0
_RMSE_FLOOR = 1e-5

HISTORY_FIELDS = ["epoch", "l_adv_d", "l_adv_g", "l_perc", "l_p2p",
                  "test_psnr", "test_rmse"]


class TrainingDiverged(RuntimeError):
    pass


def rmse(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.sqrt(np.mean((a - b) ** 2)))


def psnr(a: np.ndarray, b: np.ndarray) -> float:
    err = rmse(a, b)
    if err <= _RMSE_FLOOR:
        return PSNR_CAP_DB
    return 20.0 * math.log10(1.0 / err)


@dataclass(frozen=True)
class TrainerConfig:
    max_epochs: int = 50
    batch_size: int = 4
    learning_rate: float = 2e-4
    betas: tuple[float, float] = (0.5, 0.999)
    p2p_weight: float = 100.0
    seed: int = 0
    literal_algorithm: bool = False
    base_channels: int = 32
    n_bottlenecks: int = 2

    def __post_init__(self):
        if self.max_epochs < 1:
            raise ValueError("max_epochs must be >= 1")
        if self.p2p_weight <= 0:
            raise ValueError("p2p_weight must be > 0")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")


def _to_tensor(samples: list[Sample], which: str) -> torch.Tensor:
    arrs = [getattr(s, which).pixels for s in samples]
    return torch.from_numpy(np.stack(arrs)[:, None, :, :]).float()


def evaluate(generator: Generator, inputs: torch.Tensor,
             targets: torch.Tensor, batch_size: int = 16) -> tuple[float, float]:
    """Mean held-out PSNR and RMSE of the generator output vs. targets."""
    generator.eval()
    psnrs, rmses = [], []
    with torch.no_grad():
        for lo in range(0, len(inputs), batch_size):
            out = generator(inputs[lo : lo + batch_size]).squeeze(1).numpy()
            tgt = targets[lo : lo + batch_size].squeeze(1).numpy()
            for g, y in zip(out, tgt):
                psnrs.append(psnr(g, y))
                rmses.append(rmse(g, y))
    generator.train()
    return float(np.mean(psnrs)), float(np.mean(rmses))


@dataclass
class TrainResult:
    generator: Generator
    history: list[dict]
    d_updates: int
    g_updates: int
    checkpoint_path: Path


def save_checkpoint(generator: Generator, cfg: TrainerConfig, path) -> None:
    torch.save({
        "state_dict": generator.state_dict(),
        "base_channels": cfg.base_channels,
        "n_bottlenecks": cfg.n_bottlenecks,
    }, path)


def load_checkpoint(path) -> Generator:
    doc = torch.load(path, map_location="cpu", weights_only=True)
    gen = Generator(GeneratorSpec(doc["base_channels"], doc["n_bottlenecks"]))
    gen.load_state_dict(doc["state_dict"])
    gen.eval()
    return gen


def train(train_samples: list[Sample], test_samples: list[Sample],
          cfg: TrainerConfig, out_dir) -> TrainResult:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    torch.manual_seed(cfg.seed)

    gen = Generator(GeneratorSpec(cfg.base_channels, cfg.n_bottlenecks))
    disc = Discriminator(cfg.base_channels)
    opt_g = torch.optim.Adam(gen.parameters(), lr=cfg.learning_rate, betas=cfg.betas)
    opt_d = torch.optim.Adam(disc.parameters(), lr=cfg.learning_rate, betas=cfg.betas)

    x_train = _to_tensor(train_samples, "input")
    y_train = _to_tensor(train_samples, "target")
    x_test = _to_tensor(test_samples, "input")
    y_test = _to_tensor(test_samples, "target")

    order_rng = torch.Generator().manual_seed(cfg.seed)
    history: list[dict] = []
    ckpt = out_dir / "generator.pt"
    d_updates = g_updates = 0

    for epoch in range(1, cfg.max_epochs + 1):
        perm = torch.randperm(len(x_train), generator=order_rng)
        sums = {"l_adv_d": 0.0, "l_adv_g": 0.0, "l_perc": 0.0, "l_p2p": 0.0}
        n_batches = 0
        for lo in range(0, len(perm), cfg.batch_size):
            idx = perm[lo : lo + cfg.batch_size]
            x, y = x_train[idx], y_train[idx]

            # discriminator update
            with torch.no_grad():
                g_img = gen(x)
            score_real, _, taps_real = disc(y)
            score_fake, _, taps_fake = disc(g_img)
            l_d = loss_adv_d(score_real, score_fake)
            if cfg.literal_algorithm:
                l_perc_val = loss_perc(taps_real, taps_fake)
                l_d = l_d + l_perc_val
            opt_d.zero_grad()
            l_d.backward()
            opt_d.step()
            d_updates += 1

            # generator update, discriminator weights fixed
            g_img = gen(x)
            score_fake, _, taps_fake = disc(g_img)
            l_g_adv = loss_adv_g(score_fake)
            l_pix = loss_p2p(y, g_img, cfg.p2p_weight)
            if cfg.literal_algorithm:
                l_feat = g_img.new_zeros(())
            else:
                with torch.no_grad():
                    _, _, taps_real = disc(y)
                l_feat = loss_perc([t.detach() for t in taps_real], taps_fake)
            l_g = l_g_adv + l_pix + l_feat
            opt_g.zero_grad()
            l_g.backward()
            opt_g.step()
            g_updates += 1

            values = {"l_adv_d": l_d, "l_adv_g": l_g_adv,
                      "l_perc": l_feat if not cfg.literal_algorithm else l_perc_val,
                      "l_p2p": l_pix}
            for key, val in values.items():
                v = float(val.detach())
                if not math.isfinite(v):
                    raise TrainingDiverged(f"{key} became non-finite at epoch {epoch}")
                sums[key] += v
            n_batches += 1

        test_psnr, test_rmse = evaluate(gen, x_test, y_test)
        row = {"epoch": epoch}
        row.update({k: sums[k] / n_batches for k in sums})
        row["test_psnr"] = test_psnr
        row["test_rmse"] = test_rmse
        history.append(row)
        save_checkpoint(gen, cfg, ckpt)
        _write_history(history, out_dir / "history.csv")

    return TrainResult(gen, history, d_updates, g_updates, ckpt)


def _write_history(history: list[dict], path) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=HISTORY_FIELDS)
        writer.writeheader()
        for row in history:
            writer.writerow({k: row[k] for k in HISTORY_FIELDS})


def infer(generator: Generator, img: ImageBlock) -> ImageBlock:
    """Run the generator on one image, clamped to [0, 1]."""
    x = torch.from_numpy(img.pixels[None, None, :, :]).float()
    with torch.no_grad():
        out = generator(x).clamp(0.0, 1.0).squeeze().numpy().astype(np.float64)
    return ImageBlock(out, img.extent, img.plane_z)
