"""Multistatic frequency-domain signal synthesis.

Each measurement (pose, tx, rx) and wavenumber k yields
    s = sum_targets amplitude / (R_T * R_R) * exp(-j k (R_T + R_R)),
the exact discretized received-signal model, with no noise. Accumulation order
(target index ascending) is fixed for reproducibility.
"""

from __future__ import annotations

import io
import json
import math
import struct
from dataclasses import dataclass, replace

import numpy as np

from freehand_sar.errors import CorruptDataError, SingularGeometryError
from freehand_sar.geometry import FreehandTrajectory, RadarConfig
from freehand_sar.kernels import phase_sum
from freehand_sar.seeding import split_rng

_MAGIC = b"NFRW"
_VERSION = 1
_HEADER = struct.Struct("<4sIII")

_MIN_RANGE = 1e-9  # antennas this close to a scatterer are singular


@dataclass(frozen=True)
class RawData:
    """Complex frequency-domain samples indexed (measurement, frequency).

    Measurement index m = (pose * n_tx + tx) * n_rx + rx.
    """

    samples: np.ndarray  # (M, K) complex
    freq_grid: np.ndarray  # (K,) Hz, strictly increasing
    n_poses: int
    n_tx: int
    n_rx: int
    trajectory_ref: str = ""

    def __post_init__(self):
        object.__setattr__(self, "samples", np.asarray(self.samples, dtype=np.complex128))
        object.__setattr__(self, "freq_grid", np.asarray(self.freq_grid, dtype=np.float64))
        if self.samples.ndim != 2:
            raise ValueError("samples must be (n_measurements, n_freq)")
        if self.samples.shape != (self.n_poses * self.n_tx * self.n_rx, len(self.freq_grid)):
            raise ValueError("samples shape inconsistent with layout")
        if not np.all(np.isfinite(self.samples.view(np.float64))):
            raise ValueError("samples must be finite")
        if len(self.freq_grid) > 1 and not np.all(np.diff(self.freq_grid) > 0):
            raise ValueError("freq_grid must be strictly increasing")

    @property
    def n_measurements(self) -> int:
        return self.samples.shape[0]

    @property
    def n_freq(self) -> int:
        return self.samples.shape[1]

    @property
    def k_grid(self) -> np.ndarray:
        return 2.0 * np.pi * self.freq_grid / 299_792_458.0

    def to_bytes(self) -> bytes:
        buf = io.BytesIO()
        buf.write(_HEADER.pack(_MAGIC, _VERSION, self.n_measurements, self.n_freq))
        inter = np.empty((self.n_measurements, self.n_freq, 2), dtype="<f4")
        inter[..., 0] = self.samples.real
        inter[..., 1] = self.samples.imag
        buf.write(inter.tobytes(order="C"))
        return buf.getvalue()

    def manifest(self) -> str:
        doc = {
            "format": "nfrw",
            "version": _VERSION,
            "n_poses": self.n_poses,
            "n_tx": self.n_tx,
            "n_rx": self.n_rx,
            "freq_grid": [float(f) for f in self.freq_grid],
            "trajectory_ref": self.trajectory_ref,
        }
        return json.dumps(doc, separators=(",", ":"))

    def save(self, path) -> None:
        """Write the binary samples plus the companion JSON manifest (path + '.json')."""
        with open(path, "wb") as f:
            f.write(self.to_bytes())
        with open(str(path) + ".json", "w") as f:
            f.write(self.manifest())

    @classmethod
    def load(cls, path) -> "RawData":
        with open(str(path) + ".json") as f:
            doc = json.loads(f.read())
        with open(path, "rb") as f:
            data = f.read()
        if len(data) < _HEADER.size:
            raise CorruptDataError("truncated RawData file")
        magic, version, n_meas, n_freq = _HEADER.unpack_from(data, 0)
        if magic != _MAGIC or version != _VERSION:
            raise CorruptDataError("bad RawData magic/version")
        need = _HEADER.size + 8 * n_meas * n_freq
        if len(data) < need:
            raise CorruptDataError("truncated RawData samples")
        inter = np.frombuffer(data, dtype="<f4", count=2 * n_meas * n_freq, offset=_HEADER.size)
        inter = inter.reshape(n_meas, n_freq, 2).astype(np.float64)
        samples = inter[..., 0] + 1j * inter[..., 1]
        return cls(
            samples=samples,
            freq_grid=np.asarray(doc["freq_grid"], dtype=float),
            n_poses=int(doc["n_poses"]),
            n_tx=int(doc["n_tx"]),
            n_rx=int(doc["n_rx"]),
            trajectory_ref=doc.get("trajectory_ref", ""),
        )


def synthesize(
    positions: np.ndarray,
    amplitudes: np.ndarray,
    traj: FreehandTrajectory,
    radar: RadarConfig,
    chunk: int = 256,
) -> RawData:
    """Synthesize the received signal of a discretized scene over a trajectory.

    ``positions`` is (T, 3) scatterer locations, ``amplitudes`` (T,). The true
    trajectory should be passed here; reconstruction sees the estimated one.
    """
    positions = np.asarray(positions, dtype=float).reshape(-1, 3)
    amplitudes = np.asarray(amplitudes, dtype=float).reshape(-1)
    if len(positions) != len(amplitudes):
        raise ValueError("positions and amplitudes length mismatch")
    k_grid = radar.k_grid
    tx = traj.tx_positions()  # (N, Nt, 3)
    rx = traj.rx_positions()  # (N, Nr, 3)
    n_tx, n_rx = traj.n_tx, traj.n_rx
    t_all = np.repeat(tx, n_rx, axis=1).reshape(-1, 3)
    r_all = np.tile(rx, (1, n_tx, 1)).reshape(-1, 3)
    m = len(t_all)
    out = np.zeros((m, len(k_grid)), dtype=np.complex128)
    if len(positions):
        for lo in range(0, m, chunk):
            hi = min(lo + chunk, m)
            rt = np.linalg.norm(t_all[lo:hi, None, :] - positions[None, :, :], axis=2)
            rr = np.linalg.norm(r_all[lo:hi, None, :] - positions[None, :, :], axis=2)
            if rt.min() < _MIN_RANGE or rr.min() < _MIN_RANGE:
                raise SingularGeometryError("scatterer coincides with an antenna")
            weights = amplitudes[None, :] / (rt * rr)
            out[lo:hi] = phase_sum(weights, rt + rr, k_grid, sign=-1.0)
    return RawData(
        samples=out,
        freq_grid=radar.freq_grid,
        n_poses=traj.n_poses,
        n_tx=n_tx,
        n_rx=n_rx,
    )


def add_noise(raw: RawData, snr_db: float, seed: int = 0) -> RawData:
    """Add complex circular Gaussian noise at the requested SNR vs. signal power.

    ``snr_db = math.inf`` is the identity.
    """
    if math.isinf(snr_db) and snr_db > 0:
        return raw
    power = float(np.mean(np.abs(raw.samples) ** 2))
    if power == 0.0:
        raise ValueError("cannot set an SNR on an all-zero signal")
    noise_power = power / (10.0 ** (snr_db / 10.0))
    rng = split_rng(seed, 3)
    scale = math.sqrt(noise_power / 2.0)
    noise = scale * (
        rng.standard_normal(raw.samples.shape) + 1j * rng.standard_normal(raw.samples.shape)
    )
    return replace(raw, samples=raw.samples + noise)
