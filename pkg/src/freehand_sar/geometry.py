"""Radar and aperture geometry: trajectories, MIMO device layout, position error.

Conventions:
  - All lengths in meters, frequencies in Hz.
  - The device translates rigidly (no rotation): antenna positions are
    device_origin + fixed offsets.
  - The reference plane is the plane of the planar-raster baseline (z = z_ref);
    the target plane sits at z = z_ref + Z0.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np

from freehand_sar.errors import InvalidStateError
from freehand_sar.seeding import split_rng

C0 = 299_792_458.0  # speed of light [m/s]


@dataclass(frozen=True)
class RadarConfig:
    """Stepped-frequency radar sweep plus the rigid MIMO antenna layout."""

    f_start: float
    f_stop: float
    n_freq: int
    tx_offsets: tuple[tuple[float, float, float], ...]
    rx_offsets: tuple[tuple[float, float, float], ...]

    def __post_init__(self):
        if not (0.0 < self.f_start < self.f_stop):
            raise ValueError("need f_stop > f_start > 0")
        if self.n_freq < 1:
            raise ValueError("n_freq must be >= 1")
        if not self.tx_offsets or not self.rx_offsets:
            raise ValueError("need at least one Tx and one Rx offset")

    @property
    def freq_grid(self) -> np.ndarray:
        if self.n_freq == 1:
            return np.array([self.f_start])
        df = (self.f_stop - self.f_start) / (self.n_freq - 1)
        return self.f_start + np.arange(self.n_freq) * df

    @property
    def k_grid(self) -> np.ndarray:
        """Wavenumbers k = 2*pi*f/c over the frequency grid."""
        return 2.0 * np.pi * self.freq_grid / C0

    @property
    def f_center(self) -> float:
        return 0.5 * (self.f_start + self.f_stop)

    @property
    def wavelength_center(self) -> float:
        return C0 / self.f_center

    @property
    def n_tx(self) -> int:
        return len(self.tx_offsets)

    @property
    def n_rx(self) -> int:
        return len(self.rx_offsets)

    @classmethod
    def monostatic(cls, f_start=77e9, f_stop=81e9, n_freq=64) -> "RadarConfig":
        """Single co-located Tx/Rx at the device origin (oracle geometry)."""
        return cls(f_start, f_stop, n_freq, ((0.0, 0.0, 0.0),), ((0.0, 0.0, 0.0),))

    @classmethod
    def mimo(cls, f_start=77e9, f_stop=81e9, n_freq=64, n_tx=2, n_rx=4) -> "RadarConfig":
        """Tx/Rx on a vertical line at half-wavelength Rx spacing."""
        lam = C0 / (0.5 * (f_start + f_stop))
        rx_y = (np.arange(n_rx) - (n_rx - 1) / 2.0) * (lam / 2.0)
        tx_y = (np.arange(n_tx) - (n_tx - 1) / 2.0) * (2.0 * lam)
        tx = tuple((0.0, float(y), 0.0) for y in tx_y)
        rx = tuple((0.0, float(y), 0.0) for y in rx_y)
        return cls(f_start, f_stop, n_freq, tx, rx)


@dataclass(frozen=True)
class ApertureSpec:
    """Planar baseline aperture: nx-by-ny pose grid over width-by-height at z."""

    width: float
    height: float
    nx: int
    ny: int
    z: float = 0.0

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("aperture dimensions must be positive")
        if self.nx < 2 or self.ny < 2:
            raise ValueError("need nx, ny >= 2")

    @property
    def dx(self) -> float:
        return self.width / (self.nx - 1)

    @property
    def dy(self) -> float:
        return self.height / (self.ny - 1)


@dataclass(frozen=True)
class PerturbationSpec:
    """Per-axis Gaussian std of the position-estimate error."""

    sigma_xyz: tuple[float, float, float]
    seed: int = 0

    def __post_init__(self):
        if any(s < 0 for s in self.sigma_xyz):
            raise ValueError("sigma components must be >= 0")


@dataclass(frozen=True)
class FreehandTrajectory:
    """Ordered multistatic sample poses plus the rigid device layout.

    ``origins`` is an (N, 3) array of device origins; Tx/Rx positions per pose
    are origins + offsets. ``z_ref`` is the reference (baseline raster) plane.
    """

    origins: np.ndarray
    tx_offsets: np.ndarray
    rx_offsets: np.ndarray
    z_ref: float
    Z0: float | None
    kind: str = "planar-raster"

    def __post_init__(self):
        object.__setattr__(self, "origins", np.asarray(self.origins, dtype=float))
        object.__setattr__(self, "tx_offsets", np.asarray(self.tx_offsets, dtype=float))
        object.__setattr__(self, "rx_offsets", np.asarray(self.rx_offsets, dtype=float))
        if self.origins.ndim != 2 or self.origins.shape[1] != 3 or len(self.origins) == 0:
            raise ValueError("origins must be a non-empty (N, 3) array")
        if self.kind not in ("planar-raster", "freehand"):
            raise ValueError(f"unknown trajectory kind {self.kind!r}")
        if self.kind == "planar-raster" and not np.all(self.origins[:, 2] == self.origins[0, 2]):
            raise ValueError("planar-raster trajectory must be co-planar")

    @property
    def n_poses(self) -> int:
        return len(self.origins)

    @property
    def n_tx(self) -> int:
        return len(self.tx_offsets)

    @property
    def n_rx(self) -> int:
        return len(self.rx_offsets)

    @property
    def n_measurements(self) -> int:
        return self.n_poses * self.n_tx * self.n_rx

    def tx_positions(self) -> np.ndarray:
        """(N, n_tx, 3) transmitter positions."""
        return self.origins[:, None, :] + self.tx_offsets[None, :, :]

    def rx_positions(self) -> np.ndarray:
        """(N, n_rx, 3) receiver positions."""
        return self.origins[:, None, :] + self.rx_offsets[None, :, :]

    def to_json(self) -> str:
        doc = {
            "kind": self.kind,
            "z_ref": self.z_ref,
            "Z0": self.Z0,
            "poses": [[float(v) for v in p] for p in self.origins],
            "tx_offsets": [[float(v) for v in p] for p in self.tx_offsets],
            "rx_offsets": [[float(v) for v in p] for p in self.rx_offsets],
        }
        return json.dumps(doc, indent=None, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "FreehandTrajectory":
        doc = json.loads(text)
        return cls(
            origins=np.asarray(doc["poses"], dtype=float),
            tx_offsets=np.asarray(doc["tx_offsets"], dtype=float),
            rx_offsets=np.asarray(doc["rx_offsets"], dtype=float),
            z_ref=float(doc["z_ref"]),
            Z0=None if doc["Z0"] is None else float(doc["Z0"]),
            kind=doc["kind"],
        )

    def save(self, path) -> None:
        with open(path, "w") as f:
            f.write(self.to_json())

    @classmethod
    def load(cls, path) -> "FreehandTrajectory":
        with open(path) as f:
            return cls.from_json(f.read())


def _raster_origins(aperture: ApertureSpec) -> np.ndarray:
    xs = np.linspace(-aperture.width / 2.0, aperture.width / 2.0, aperture.nx)
    ys = np.linspace(-aperture.height / 2.0, aperture.height / 2.0, aperture.ny)
    gy, gx = np.meshgrid(ys, xs, indexing="ij")  # row-major: y outer, x inner
    origins = np.column_stack([gx.ravel(), gy.ravel(), np.full(gx.size, aperture.z)])
    return origins


def make_raster_trajectory(
    aperture: ApertureSpec, radar: RadarConfig, Z0: float | None = None
) -> FreehandTrajectory:
    """Uniform co-planar pose grid centered at the origin, row-major order."""
    return FreehandTrajectory(
        origins=_raster_origins(aperture),
        tx_offsets=np.asarray(radar.tx_offsets, dtype=float),
        rx_offsets=np.asarray(radar.rx_offsets, dtype=float),
        z_ref=aperture.z,
        Z0=Z0,
        kind="planar-raster",
    )


def _smooth(noise: np.ndarray, window: int) -> np.ndarray:
    """Moving-average smoothing along the pose sequence (window >= 1)."""
    if window <= 1:
        return noise
    kernel = np.ones(window) / window
    return np.convolve(noise, kernel, mode="same")


def make_freehand_trajectory(
    aperture: ApertureSpec,
    radar: RadarConfig,
    Z0: float | None = None,
    sigma_xy: float = 0.0,
    z_span: float = 0.0,
    smoothness: int = 9,
    seed: int = 0,
) -> FreehandTrajectory:
    """Raster trajectory with smoothed in-plane jitter and a bounded z excursion.

    The jitter is white Gaussian noise low-pass filtered by a moving average of
    length ``smoothness`` and rescaled so the in-plane std equals ``sigma_xy``;
    the z excursion is a smoothed random profile normalized to +/- z_span/2.
    With sigma_xy == 0 and z_span == 0 the output equals the raster exactly.
    """
    if z_span < 0:
        raise ValueError("z_span must be >= 0")
    if sigma_xy < 0:
        raise ValueError("sigma_xy must be >= 0")
    origins = _raster_origins(aperture)
    if sigma_xy == 0.0 and z_span == 0.0:
        return FreehandTrajectory(
            origins=origins,
            tx_offsets=np.asarray(radar.tx_offsets, dtype=float),
            rx_offsets=np.asarray(radar.rx_offsets, dtype=float),
            z_ref=aperture.z,
            Z0=Z0,
            kind="planar-raster",
        )
    rng = split_rng(seed, 0)
    n = len(origins)
    for axis, scale in ((0, sigma_xy), (1, sigma_xy)):
        if scale == 0.0:
            continue
        noise = _smooth(rng.standard_normal(n), smoothness)
        std = noise.std()
        if std > 0:
            origins[:, axis] += noise * (scale / std)
    if z_span > 0.0:
        profile = _smooth(rng.standard_normal(n), smoothness)
        peak = np.abs(profile).max()
        if peak > 0:
            origins[:, 2] += profile * (z_span / 2.0 / peak)
    return FreehandTrajectory(
        origins=origins,
        tx_offsets=np.asarray(radar.tx_offsets, dtype=float),
        rx_offsets=np.asarray(radar.rx_offsets, dtype=float),
        z_ref=aperture.z,
        Z0=Z0,
        kind="freehand",
    )


def perturb_trajectory(traj: FreehandTrajectory, spec: PerturbationSpec) -> FreehandTrajectory:
    """Estimated trajectory: origins displaced by iid per-axis Gaussian noise.

    With sigma = (0, 0, 0) the output equals the input bit-exactly.
    """
    sigma = np.asarray(spec.sigma_xyz, dtype=float)
    if np.all(sigma == 0.0):
        return traj
    rng = split_rng(spec.seed, 1)
    noise = rng.standard_normal(traj.origins.shape) * sigma[None, :]
    kind = "freehand" if np.any(sigma > 0) else traj.kind
    if traj.kind == "planar-raster" and sigma[2] == 0.0:
        kind = "planar-raster"
    return replace(traj, origins=traj.origins + noise, kind=kind)


def virtual_elements(traj: FreehandTrajectory) -> tuple[np.ndarray, np.ndarray]:
    """Virtual monostatic elements for every (pose, tx, rx) triple.

    Returns ``(positions, d)`` where ``positions`` is (M, 3): the Tx/Rx
    midpoint in x/y at the z of the Tx, and ``d`` is (M, 3) holding the
    Tx-Rx separations along x and y plus the signed distance from the device
    plane to the reference plane (d_z = z_ref - z_tx: positive when the device
    sits farther from the target than the baseline). Ordering is pose-major,
    then tx, then rx.
    """
    if traj.Z0 is None:
        raise InvalidStateError("trajectory has no Z0 set")
    tx = traj.tx_positions()  # (N, Nt, 3)
    rx = traj.rx_positions()  # (N, Nr, 3)
    t = np.repeat(tx, traj.n_rx, axis=1).reshape(-1, 3)
    r = np.tile(rx, (1, traj.n_tx, 1)).reshape(-1, 3)
    pos = np.empty_like(t)
    pos[:, 0] = 0.5 * (t[:, 0] + r[:, 0])
    pos[:, 1] = 0.5 * (t[:, 1] + r[:, 1])
    pos[:, 2] = t[:, 2]
    d = np.empty_like(t)
    d[:, 0] = t[:, 0] - r[:, 0]
    d[:, 1] = t[:, 1] - r[:, 1]
    d[:, 2] = traj.z_ref - t[:, 2]
    return pos, d
