"""The four training loss terms.

All losses are non-negative scalars. The binary cross-entropy clamps
probabilities to [eps, 1-eps] so a saturated discriminator cannot produce
log(0).
"""

from __future__ import annotations

import torch

BCE_EPS = 1e-7


def bce(scores: torch.Tensor, target: float) -> torch.Tensor:
    """Binary cross-entropy of probability scores against a constant label."""
    p = scores.clamp(BCE_EPS, 1.0 - BCE_EPS)
    t = torch.full_like(p, float(target))
    return -(t * p.log() + (1.0 - t) * (1.0 - p).log()).mean()


def loss_adv_d(scores_real: torch.Tensor, scores_fake: torch.Tensor) -> torch.Tensor:
    """Discriminator objective: real scored 1, generated scored 0."""
    return bce(scores_real, 1.0) + bce(scores_fake, 0.0)


def loss_adv_g(scores_fake: torch.Tensor) -> torch.Tensor:
    """Generator adversarial objective: generated scored 1."""
    return bce(scores_fake, 1.0)


def loss_perc(feats_real: list[torch.Tensor], feats_fake: list[torch.Tensor]) -> torch.Tensor:
    """Feature-matching loss: summed mean absolute difference of every tap.

    Tap 0 is the raw discriminator input, the rest are the per-layer
    activations, so identical images give exactly zero.
    """
    if len(feats_real) != len(feats_fake):
        raise ValueError("feature tap count mismatch")
    total = feats_real[0].new_zeros(())
    for fr, ff in zip(feats_real, feats_fake):
        total = total + (fr - ff).abs().mean()
    return total


def loss_p2p(target: torch.Tensor, generated: torch.Tensor, weight: float) -> torch.Tensor:
    """Weighted pixel-wise L1 loss."""
    if weight <= 0:
        raise ValueError("pixel-loss weight must be > 0")
    return weight * (target - generated).abs().mean()
