"""Lightweight super-resolution generator and patch discriminator.

The generator is a small U-Net built from depthwise-separable convolutions
(a 3x3 depthwise pass followed by a 1x1 pointwise mix), which cuts the
per-stage parameter count by well over 75% versus a dense 3x3 convolution
at the same width. Spatial reduction uses strided depthwise convolutions;
skip connections forward encoder features to the decoder.

The discriminator scores disjoint 16x16 patches: its stride/kernel stack has
a receptive field of exactly 16 with stride 16, so each patch score depends
on exactly one input patch and the mean score is invariant under any
permutation of patch positions.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch
import torch.nn as nn

PATCH = 16


def separable_param_count(channels: int, kernel: int = 3, bias: bool = False) -> int:
    """Multiply-parameter count of one factorized kernel x kernel stage."""
    dw = kernel * kernel * channels
    pw = channels * channels
    return dw + pw + (2 * channels if bias else 0)


def dense_param_count(channels: int, kernel: int = 3, bias: bool = False) -> int:
    """Multiply-parameter count of a standard kernel x kernel convolution."""
    return kernel * kernel * channels * channels + (channels if bias else 0)


class SeparableConv(nn.Module):
    """3x3 depthwise followed by 1x1 pointwise, with ReLU."""

    def __init__(self, in_ch: int, out_ch: int, stride: int = 1):
        super().__init__()
        self.depthwise = nn.Conv2d(in_ch, in_ch, 3, stride=stride, padding=1,
                                   groups=in_ch)
        self.pointwise = nn.Conv2d(in_ch, out_ch, 1)
        self.act = nn.ReLU(inplace=True)

    def forward(self, x):
        return self.act(self.pointwise(self.depthwise(x)))


@dataclass(frozen=True)
class GeneratorSpec:
    base_channels: int = 32
    n_bottlenecks: int = 2

    def __post_init__(self):
        if self.base_channels < 1 or self.n_bottlenecks < 1:
            raise ValueError("base_channels and n_bottlenecks must be >= 1")


class Generator(nn.Module):
    """Encoder-decoder with two downsampling levels and skip connections.

    Input and output are single-channel images in [0, 1]; the output shape
    equals the input shape for any H, W divisible by 4.
    """

    def __init__(self, spec: GeneratorSpec = GeneratorSpec()):
        super().__init__()
        self.spec = spec
        c = spec.base_channels
        self.stem = SeparableConv(1, c)
        self.enc1 = SeparableConv(c, c)
        self.down1 = SeparableConv(c, 2 * c, stride=2)
        self.enc2 = SeparableConv(2 * c, 2 * c)
        self.down2 = SeparableConv(2 * c, 4 * c, stride=2)
        self.bottom = nn.Sequential(
            *[SeparableConv(4 * c, 4 * c) for _ in range(spec.n_bottlenecks)]
        )
        self.up = nn.Upsample(scale_factor=2, mode="nearest")
        self.dec2_in = SeparableConv(4 * c, 2 * c)
        self.dec2 = SeparableConv(4 * c, 2 * c)  # after skip concat
        self.dec1_in = SeparableConv(2 * c, c)
        self.dec1 = SeparableConv(2 * c, c)  # after skip concat
        self.head = nn.Conv2d(c, 1, 1)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        if x.ndim != 4 or x.shape[1] != 1:
            raise ValueError("expected input of shape (N, 1, H, W)")
        if x.shape[2] % 4 or x.shape[3] % 4:
            raise ValueError("spatial dimensions must be divisible by 4")
        e1 = self.enc1(self.stem(x))
        e2 = self.enc2(self.down1(e1))
        b = self.bottom(self.down2(e2))
        d2 = self.dec2(torch.cat([self.dec2_in(self.up(b)), e2], dim=1))
        d1 = self.dec1(torch.cat([self.dec1_in(self.up(d2)), e1], dim=1))
        return torch.sigmoid(self.head(d1))

    def parameter_count(self) -> int:
        return sum(p.numel() for p in self.parameters() if p.requires_grad)


class Discriminator(nn.Module):
    """Disjoint 16x16 patch classifier.

    Returns the mean score, the per-patch score map, and the feature taps
    (raw input first, then each convolution layer's activations).
    """

    def __init__(self, base_channels: int = 32):
        super().__init__()
        c = base_channels
        self.conv1 = nn.Conv2d(1, c, 4, stride=4)
        self.conv2 = nn.Conv2d(c, 2 * c, 2, stride=2)
        self.conv3 = nn.Conv2d(2 * c, 4 * c, 2, stride=2)
        self.score = nn.Conv2d(4 * c, 1, 1)
        self.act = nn.LeakyReLU(0.2, inplace=True)

    @property
    def n_feature_layers(self) -> int:
        return 3

    def forward(self, x: torch.Tensor):
        if x.ndim != 4 or x.shape[1] != 1:
            raise ValueError("expected input of shape (N, 1, H, W)")
        if x.shape[2] % PATCH or x.shape[3] % PATCH:
            raise ValueError(f"spatial dimensions must be divisible by {PATCH}")
        taps = [x]
        h = self.act(self.conv1(x))
        taps.append(h)
        h = self.act(self.conv2(h))
        taps.append(h)
        h = self.act(self.conv3(h))
        taps.append(h)
        patch_map = torch.sigmoid(self.score(h)).squeeze(1)  # (N, H/16, W/16)
        mean_score = patch_map.mean(dim=(1, 2))
        return mean_score, patch_map, taps
