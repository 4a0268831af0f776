"""Multi-planar multistatic to virtual planar monostatic projection.

Each measurement is multiplied by exp(+j k beta) with
    beta = 2 d_z + (d_x^2 + d_y^2) / (4 Z0),
removing the residual phase of the multistatic multi-planar geometry, then the
compensated samples are binned (complex-averaged) onto a uniform virtual grid
on the reference plane. Empty cells stay zero; that undersampling is a
deliberate part of the degradation the downstream network corrects.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass

import numpy as np

from freehand_sar.errors import CorruptDataError
from freehand_sar.forward import RawData
from freehand_sar.geometry import C0, FreehandTrajectory, virtual_elements

_MANIFEST_VERSION = 1


def beta(d_x, d_y, d_z, Z0):
    """Residual projection phase distance: 2*d_z + (d_x^2 + d_y^2) / (4*Z0)."""
    if np.any(np.asarray(Z0) <= 0):
        raise ValueError("Z0 must be > 0")
    return 2.0 * np.asarray(d_z) + (np.asarray(d_x) ** 2 + np.asarray(d_y) ** 2) / (4.0 * Z0)


@dataclass(frozen=True)
class VirtualGrid:
    """Uniform virtual-element grid on the reference plane.

    Cell (iy, ix) center sits at (x0 + ix*dx, y0 + iy*dy, z).
    """

    nx: int
    ny: int
    dx: float
    dy: float
    x0: float
    y0: float
    z: float

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1 or self.dx <= 0 or self.dy <= 0:
            raise ValueError("invalid virtual grid")

    @property
    def width(self) -> float:
        return self.nx * self.dx

    @property
    def height(self) -> float:
        return self.ny * self.dy

    def x_coords(self) -> np.ndarray:
        return self.x0 + np.arange(self.nx) * self.dx

    def y_coords(self) -> np.ndarray:
        return self.y0 + np.arange(self.ny) * self.dy

    @classmethod
    def from_trajectory(cls, traj: FreehandTrajectory, spacing: float | None = None,
                        f_center: float | None = None) -> "VirtualGrid":
        """Grid covering the trajectory's virtual elements.

        For a planar-raster trajectory with a monostatic device the raster
        spacing is reused, making binning an exact one-to-one mapping;
        otherwise the spacing defaults to lambda_center/2 (from ``f_center``)
        or must be given explicitly.
        """
        pos, _ = virtual_elements(traj)
        if spacing is None:
            if traj.kind == "planar-raster" and traj.n_tx == 1 and traj.n_rx == 1:
                xs = np.unique(np.round(pos[:, 0], 12))
                ys = np.unique(np.round(pos[:, 1], 12))
                dx = float(np.min(np.diff(xs))) if len(xs) > 1 else 1.0
                dy = float(np.min(np.diff(ys))) if len(ys) > 1 else 1.0
                nx, ny = len(xs), len(ys)
                return cls(nx, ny, dx, dy, float(xs[0]), float(ys[0]), traj.z_ref)
            if f_center is None:
                raise ValueError("need f_center (or explicit spacing) for a non-raster grid")
            spacing = C0 / f_center / 2.0
        x_min, x_max = pos[:, 0].min(), pos[:, 0].max()
        y_min, y_max = pos[:, 1].min(), pos[:, 1].max()
        nx = max(int(np.floor((x_max - x_min) / spacing + 0.5)) + 1, 1)
        ny = max(int(np.floor((y_max - y_min) / spacing + 0.5)) + 1, 1)
        return cls(nx, ny, spacing, spacing, float(x_min), float(y_min), traj.z_ref)


@dataclass(frozen=True)
class VirtualMonostaticData:
    """Compensated samples on the uniform virtual grid: (ny, nx, n_freq)."""

    samples: np.ndarray
    grid: VirtualGrid
    freq_grid: np.ndarray
    occupancy: np.ndarray  # (ny, nx) sample count per cell
    n_dropped: int = 0

    def __post_init__(self):
        object.__setattr__(self, "samples", np.asarray(self.samples, dtype=np.complex128))
        object.__setattr__(self, "freq_grid", np.asarray(self.freq_grid, dtype=np.float64))
        object.__setattr__(self, "occupancy", np.asarray(self.occupancy, dtype=np.int64))
        if self.samples.shape != (self.grid.ny, self.grid.nx, len(self.freq_grid)):
            raise ValueError("samples shape inconsistent with grid")
        if np.any(self.occupancy < 0):
            raise ValueError("occupancy must be >= 0")

    @property
    def k_grid(self) -> np.ndarray:
        return 2.0 * np.pi * self.freq_grid / C0

    def save(self, path) -> None:
        """RawData-style binary block plus a grid-geometry manifest (path + '.json')."""
        header = struct.pack("<4sIII", b"NFVM", _MANIFEST_VERSION,
                             self.grid.ny * self.grid.nx, len(self.freq_grid))
        flat = self.samples.reshape(-1, len(self.freq_grid))
        inter = np.empty((flat.shape[0], flat.shape[1], 2), dtype="<f4")
        inter[..., 0] = flat.real
        inter[..., 1] = flat.imag
        with open(path, "wb") as f:
            f.write(header)
            f.write(inter.tobytes(order="C"))
        doc = {
            "nx": self.grid.nx, "ny": self.grid.ny,
            "dx": self.grid.dx, "dy": self.grid.dy,
            "x0": self.grid.x0, "y0": self.grid.y0, "z": self.grid.z,
            "freq_grid": [float(f) for f in self.freq_grid],
            "occupancy": self.occupancy.ravel().tolist(),
            "n_dropped": self.n_dropped,
        }
        with open(str(path) + ".json", "w") as f:
            f.write(json.dumps(doc, separators=(",", ":")))

    @classmethod
    def load(cls, path) -> "VirtualMonostaticData":
        with open(str(path) + ".json") as f:
            doc = json.loads(f.read())
        grid = VirtualGrid(doc["nx"], doc["ny"], doc["dx"], doc["dy"],
                           doc["x0"], doc["y0"], doc["z"])
        with open(path, "rb") as f:
            data = f.read()
        magic, version, n_cells, n_freq = struct.unpack_from("<4sIII", data, 0)
        if magic != b"NFVM" or version != _MANIFEST_VERSION:
            raise CorruptDataError("bad VirtualMonostaticData magic/version")
        if n_cells != grid.nx * grid.ny:
            raise CorruptDataError("cell count mismatch vs. manifest")
        inter = np.frombuffer(data, dtype="<f4", count=2 * n_cells * n_freq, offset=16)
        inter = inter.reshape(n_cells, n_freq, 2).astype(np.float64)
        samples = (inter[..., 0] + 1j * inter[..., 1]).reshape(grid.ny, grid.nx, n_freq)
        occupancy = np.asarray(doc["occupancy"], dtype=np.int64).reshape(grid.ny, grid.nx)
        return cls(samples, grid, np.asarray(doc["freq_grid"]), occupancy, doc["n_dropped"])


def empm_compensate(
    raw: RawData,
    traj_est: FreehandTrajectory,
    Z0: float,
    grid: VirtualGrid | None = None,
) -> VirtualMonostaticData:
    """Project multistatic multi-planar samples to a virtual planar monostatic grid.

    Applies the phase-only compensation exp(+j k beta) per measurement, then
    nearest-node bins onto ``grid`` (complex average per cell). Samples whose
    virtual position falls outside the grid are dropped and counted. Pass the
    *estimated* trajectory: residual error vs. truth is the distortion source.
    """
    if Z0 <= 0:
        raise ValueError("Z0 must be > 0")
    if raw.n_measurements != traj_est.n_measurements:
        raise ValueError("trajectory layout does not match raw data")
    f_center = float(0.5 * (raw.freq_grid[0] + raw.freq_grid[-1]))
    if grid is None:
        grid = VirtualGrid.from_trajectory(traj_est, f_center=f_center)
    pos, d = virtual_elements(traj_est)
    b = beta(d[:, 0], d[:, 1], d[:, 2], Z0)  # (M,)
    compensated = raw.samples * np.exp(1j * np.outer(b, raw.k_grid))

    ix = np.rint((pos[:, 0] - grid.x0) / grid.dx).astype(np.int64)
    iy = np.rint((pos[:, 1] - grid.y0) / grid.dy).astype(np.int64)
    inside = (ix >= 0) & (ix < grid.nx) & (iy >= 0) & (iy < grid.ny)
    n_dropped = int(np.sum(~inside))

    acc = np.zeros((grid.ny, grid.nx, raw.n_freq), dtype=np.complex128)
    counts = np.zeros((grid.ny, grid.nx), dtype=np.int64)
    flat = iy[inside] * grid.nx + ix[inside]
    np.add.at(acc.reshape(-1, raw.n_freq), flat, compensated[inside])
    np.add.at(counts.reshape(-1), flat, 1)
    occupied = counts > 0
    acc[occupied] /= counts[occupied, None]
    return VirtualMonostaticData(acc, grid, raw.freq_grid, counts, n_dropped)
