"""Image reconstruction: gold-standard BPA and FFT-based RMA.

BPA is the matched-filter inversion of the received-signal model and works for
arbitrary multistatic geometries at O(n_meas * n_freq * n_pixels) cost. RMA
requires uniformly sampled co-planar monostatic data (the EMPM output) and
runs in FFT time: 2-D spatial FFT, dispersion-relation matched filter
kz = sqrt(4k^2 - kx^2 - ky^2) propagated to the target plane, Stolt
interpolation to a uniform kz axis, and an inverse FFT.
"""

from __future__ import annotations

import numpy as np

from freehand_sar.empm import VirtualGrid, VirtualMonostaticData, empm_compensate
from freehand_sar.errors import SingularGeometryError
from freehand_sar.forward import RawData
from freehand_sar.geometry import FreehandTrajectory
from freehand_sar.kernels import backproject_image
from freehand_sar.sarimage import SarImage, normalize_magnitude
from freehand_sar.scene import GridSpec

_MIN_RANGE = 1e-9


def bpa(raw: RawData, traj_est: FreehandTrajectory, grid: GridSpec) -> SarImage:
    """Back-projection: o(x) = sum_meas sum_k s * exp(+j k (R_T + R_R)).

    Magnitude image normalized to [0, 1]. Each pixel's sum runs in fixed
    measurement order, so the result is independent of worker count.
    """
    if raw.n_measurements != traj_est.n_measurements:
        raise ValueError("trajectory layout does not match raw data")
    X, Y = grid.cell_centers()
    pixels = np.column_stack([X.ravel(), Y.ravel(), np.full(X.size, grid.z)])
    tx = traj_est.tx_positions()
    rx = traj_est.rx_positions()
    t_all = np.repeat(tx, traj_est.n_rx, axis=1).reshape(-1, 3)
    r_all = np.tile(rx, (1, traj_est.n_tx, 1)).reshape(-1, 3)
    img, min_range = backproject_image(raw.samples, t_all, r_all, pixels, raw.k_grid)
    if min_range < _MIN_RANGE:
        raise SingularGeometryError("image pixel coincides with an antenna")
    mag = np.abs(img).reshape(grid.ny, grid.nx)
    return SarImage(normalize_magnitude(mag), (grid.width, grid.height), grid.z)


def rma(virt: VirtualMonostaticData, Z0: float, grid: GridSpec, pad_factor: int = 2) -> SarImage:
    """Range migration on virtual planar monostatic data.

    Reconstructs the reflectivity on the plane at distance Z0 from the virtual
    array, then resamples the (periodic) FFT image onto the requested grid by
    bilinear interpolation. Evanescent spectral components are zeroed.
    """
    if Z0 <= 0:
        raise ValueError("Z0 must be > 0")
    vg = virt.grid
    s = virt.samples  # (ny, nx, K)
    ny2, nx2 = pad_factor * vg.ny, pad_factor * vg.nx
    k_grid = virt.k_grid
    nk = len(k_grid)

    spec = np.fft.fft2(s, s=(ny2, nx2), axes=(0, 1))
    kx = 2.0 * np.pi * np.fft.fftfreq(nx2, d=vg.dx)
    ky = 2.0 * np.pi * np.fft.fftfreq(ny2, d=vg.dy)
    kr2 = ky[:, None] ** 2 + kx[None, :] ** 2  # (ny2, nx2)

    kz = 4.0 * k_grid[None, None, :] ** 2 - kr2[:, :, None]
    prop = kz > 0.0
    kz = np.sqrt(np.maximum(kz, 0.0))
    spec = np.where(prop, spec * np.exp(1j * kz * Z0), 0.0)

    # Stolt resampling: uniform kz axis; source sample k = sqrt(kz^2 + kr^2)/2
    # lies on the uniform k axis, so linear interpolation is a direct gather.
    kz_lo = float(np.sqrt(max(4.0 * k_grid[0] ** 2 - kr2.max(), 0.0)))
    kz_hi = 2.0 * float(k_grid[-1])
    if kz_lo >= kz_hi:
        kz_lo = 0.0
    n_kz = 2 * nk
    kz_u = np.linspace(kz_lo, kz_hi, n_kz)
    if nk == 1:
        image_spec = spec[:, :, 0]
    else:
        dk = (k_grid[-1] - k_grid[0]) / (nk - 1)
        k_src = 0.5 * np.sqrt(kz_u[None, None, :] ** 2 + kr2[:, :, None])
        idx = (k_src - k_grid[0]) / dk
        valid = (idx >= 0.0) & (idx <= nk - 1)
        i0 = np.clip(np.floor(idx).astype(np.int64), 0, nk - 2)
        frac = np.clip(idx - i0, 0.0, 1.0)
        g0 = np.take_along_axis(spec, i0, axis=2)
        g1 = np.take_along_axis(spec, i0 + 1, axis=2)
        stolt = np.where(valid, g0 * (1.0 - frac) + g1 * frac, 0.0)
        image_spec = stolt.sum(axis=2)

    field = np.fft.ifft2(image_spec, axes=(0, 1))  # (ny2, nx2), periodic

    # bilinear resample (with wraparound) onto the requested image grid
    X, Y = grid.cell_centers()
    u = np.mod((X - vg.x0) / vg.dx, nx2)
    v = np.mod((Y - vg.y0) / vg.dy, ny2)
    iu0 = np.floor(u).astype(np.int64) % nx2
    iv0 = np.floor(v).astype(np.int64) % ny2
    iu1 = (iu0 + 1) % nx2
    iv1 = (iv0 + 1) % ny2
    fu = u - np.floor(u)
    fv = v - np.floor(v)
    out = (
        field[iv0, iu0] * (1 - fu) * (1 - fv)
        + field[iv0, iu1] * fu * (1 - fv)
        + field[iv1, iu0] * (1 - fu) * fv
        + field[iv1, iu1] * fu * fv
    )
    return SarImage(normalize_magnitude(np.abs(out)), (grid.width, grid.height), grid.z)


def empm_rma(
    raw: RawData,
    traj_est: FreehandTrajectory,
    Z0: float,
    grid: GridSpec,
    virtual_grid: VirtualGrid | None = None,
) -> SarImage:
    """EMPM projection followed by RMA; the dataset-generation entry point."""
    virt = empm_compensate(raw, traj_est, Z0, grid=virtual_grid)
    return rma(virt, Z0, grid)
