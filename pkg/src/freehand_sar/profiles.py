"""Named end-to-end configuration profiles.

``desk`` keeps every stage tractable on a laptop CPU (small pose grid, small
image, few samples); ``paper`` is the full-scale configuration (4096/1024
samples, 64x64 poses, 128x128 images) intended for offline generation and
training runs, not CI.
"""

from __future__ import annotations

from dataclasses import dataclass

from freehand_sar.geometry import ApertureSpec, RadarConfig
from freehand_sar.scene import GridSpec, RandomSceneSpec


@dataclass(frozen=True)
class Profile:
    name: str
    radar: RadarConfig
    aperture: ApertureSpec
    grid: GridSpec
    scene: RandomSceneSpec
    Z0: float
    n_train: int
    n_test: int
    # per-sample degradation ranges
    sigma_range: tuple[float, float]  # position-error std, fraction of lambda_center
    snr_range_db: tuple[float, float]
    z_span_range: tuple[float, float]
    jitter_sigma_xy: float
    jitter_smoothness: int


def _make_profiles() -> dict[str, Profile]:
    desk_radar = RadarConfig.mimo(n_tx=1, n_rx=2)
    paper_radar = RadarConfig.mimo(n_tx=2, n_rx=4)
    common = dict(
        Z0=0.3,
        sigma_range=(0.0, 0.25),  # 0 .. lambda/4
        snr_range_db=(15.0, 30.0),
        z_span_range=(0.0, 0.03),
        jitter_sigma_xy=0.002,
        jitter_smoothness=9,
    )
    desk = Profile(
        name="desk",
        radar=desk_radar,
        aperture=ApertureSpec(0.128, 0.128, 32, 32, 0.0),
        grid=GridSpec(64, 64, 0.2, 0.2, 0.3),
        scene=RandomSceneSpec(),
        n_train=256,
        n_test=64,
        **common,
    )
    paper = Profile(
        name="paper",
        radar=paper_radar,
        aperture=ApertureSpec(0.128, 0.128, 64, 64, 0.0),
        grid=GridSpec(128, 128, 0.2, 0.2, 0.3),
        scene=RandomSceneSpec(),
        n_train=4096,
        n_test=1024,
        **common,
    )
    return {"desk": desk, "paper": paper}


PROFILES = _make_profiles()


def get_profile(name: str) -> Profile:
    try:
        return PROFILES[name]
    except KeyError:
        raise ValueError(f"unknown profile {name!r}; choose from {sorted(PROFILES)}") from None
