"""Shared phase-accumulation kernels for synthesis and back-projection.

Both operations reduce to sums of w * exp(+/- j k r) over targets or
measurements. For a uniform wavenumber grid the exponential over k is built by
a multiplicative recurrence (two complex exponentials per element instead of
one per (element, k)), which is the dominant cost at imaging scale.
Accumulation order is fixed, so results are reproducible bit-for-bit.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit, prange

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is an optional accelerator
    _HAVE_NUMBA = False


def _uniform_step(k_grid: np.ndarray) -> float | None:
    """Step of a uniform grid, or None if the grid is non-uniform."""
    if len(k_grid) < 2:
        return None
    d = np.diff(k_grid)
    step = d[0]
    if np.max(np.abs(d - step)) <= 1e-9 * abs(step):
        return float(step)
    return None


def phase_sum(weights: np.ndarray, ranges: np.ndarray, k_grid: np.ndarray, sign: float) -> np.ndarray:
    """out[m, i] = sum_t weights[m, t] * exp(sign * 1j * k_grid[i] * ranges[m, t]).

    ``weights`` and ``ranges`` are (M, T); the T axis is reduced.
    """
    weights = np.asarray(weights, dtype=np.complex128)
    ranges = np.asarray(ranges, dtype=np.float64)
    k_grid = np.asarray(k_grid, dtype=np.float64)
    m, t = ranges.shape
    nk = len(k_grid)
    out = np.zeros((m, nk), dtype=np.complex128)
    if t == 0:
        return out
    step = _uniform_step(k_grid)
    if step is None:
        for i, k in enumerate(k_grid):
            out[:, i] = (weights * np.exp(sign * 1j * k * ranges)).sum(axis=1)
        return out
    cur = weights * np.exp(sign * 1j * k_grid[0] * ranges)
    ratio = np.exp(sign * 1j * step * ranges)
    for i in range(nk):
        if i:
            cur *= ratio
        out[:, i] = cur.sum(axis=1)
    return out


if _HAVE_NUMBA:

    @njit(parallel=True, cache=True, fastmath=False)
    def _backproject_direct(samples, ant_t, ant_r, pixels, k0, dk, nk):  # pragma: no cover
        # Four interleaved recurrence chains break the serial complex-multiply
        # dependency; accumulation order per pixel is still fixed.
        n_pix = pixels.shape[0]
        n_meas = ant_t.shape[0]
        out = np.zeros(n_pix, dtype=np.complex128)
        pix_min = np.empty(n_pix, dtype=np.float64)
        for p in prange(n_pix):
            px, py, pz = pixels[p, 0], pixels[p, 1], pixels[p, 2]
            acc0 = 0.0 + 0.0j
            acc1 = 0.0 + 0.0j
            acc2 = 0.0 + 0.0j
            acc3 = 0.0 + 0.0j
            local_min = 1e30
            for m in range(n_meas):
                rt = np.sqrt((ant_t[m, 0] - px) ** 2 + (ant_t[m, 1] - py) ** 2
                             + (ant_t[m, 2] - pz) ** 2)
                rr = np.sqrt((ant_r[m, 0] - px) ** 2 + (ant_r[m, 1] - py) ** 2
                             + (ant_r[m, 2] - pz) ** 2)
                if rt < local_min:
                    local_min = rt
                if rr < local_min:
                    local_min = rr
                r = rt + rr
                c0 = np.exp(1j * k0 * r)
                d1 = np.exp(1j * dk * r)
                d2 = d1 * d1
                d4 = d2 * d2
                c1 = c0 * d1
                c2 = c0 * d2
                c3 = c2 * d1
                s = samples[m]
                i = 0
                while i + 3 < nk:
                    acc0 += s[i] * c0
                    acc1 += s[i + 1] * c1
                    acc2 += s[i + 2] * c2
                    acc3 += s[i + 3] * c3
                    c0 *= d4
                    c1 *= d4
                    c2 *= d4
                    c3 *= d4
                    i += 4
                while i < nk:
                    acc0 += s[i] * c0
                    c0 *= d1
                    i += 1
            out[p] = acc0 + acc1 + acc2 + acc3
            pix_min[p] = local_min
        return out, pix_min


def backproject_image(
    samples: np.ndarray,
    ant_t: np.ndarray,
    ant_r: np.ndarray,
    pixels: np.ndarray,
    k_grid: np.ndarray,
) -> tuple[np.ndarray, float]:
    """Full back-projection sum over measurements and wavenumbers.

    Returns ``(img, min_range)`` where ``img[p] = sum_m sum_i samples[m, i] *
    exp(+1j * k_grid[i] * (|t_m - x_p| + |r_m - x_p|))`` and ``min_range`` is
    the smallest antenna-pixel distance seen (for singularity checks).
    Dispatches to a compiled kernel when the wavenumber grid is uniform and
    numba is available; each pixel accumulates in fixed order either way.
    """
    samples = np.ascontiguousarray(samples, dtype=np.complex128)
    k_grid = np.asarray(k_grid, dtype=np.float64)
    step = _uniform_step(k_grid)
    if _HAVE_NUMBA and step is not None:
        img, pix_min = _backproject_direct(
            samples,
            np.ascontiguousarray(ant_t, dtype=np.float64),
            np.ascontiguousarray(ant_r, dtype=np.float64),
            np.ascontiguousarray(pixels, dtype=np.float64),
            float(k_grid[0]),
            step,
            len(k_grid),
        )
        return img, float(pix_min.min())
    img = np.zeros(pixels.shape[0], dtype=np.complex128)
    min_range = np.inf
    chunk = 128
    for lo in range(0, ant_t.shape[0], chunk):
        hi = min(lo + chunk, ant_t.shape[0])
        rt = np.linalg.norm(ant_t[lo:hi, None, :] - pixels[None, :, :], axis=2)
        rr = np.linalg.norm(ant_r[lo:hi, None, :] - pixels[None, :, :], axis=2)
        min_range = min(min_range, float(rt.min()), float(rr.min()))
        img += backproject_sum(samples[lo:hi], rt + rr, k_grid)
    return img, min_range


def backproject_sum(
    samples: np.ndarray,
    ranges: np.ndarray,
    k_grid: np.ndarray,
    chunk: int = 128,
) -> np.ndarray:
    """img[p] = sum_m sum_i samples[m, i] * exp(+1j * k_grid[i] * ranges[m, p]).

    ``samples`` is (M, K) measurement data, ``ranges`` (M, P) per-pixel
    round-trip ranges. Measurements are processed in fixed-order chunks.
    """
    samples = np.asarray(samples, dtype=np.complex128)
    ranges = np.asarray(ranges, dtype=np.float64)
    k_grid = np.asarray(k_grid, dtype=np.float64)
    m, nk = samples.shape
    p = ranges.shape[1]
    img = np.zeros(p, dtype=np.complex128)
    step = _uniform_step(k_grid)
    for lo in range(0, m, chunk):
        hi = min(lo + chunk, m)
        r = ranges[lo:hi]
        s = samples[lo:hi]
        if step is None:
            for i, k in enumerate(k_grid):
                img += s[:, i] @ np.exp(1j * k * r)
            continue
        cur = np.exp(1j * k_grid[0] * r)
        ratio = np.exp(1j * step * r)
        for i in range(nk):
            if i:
                cur *= ratio
            img += s[:, i] @ cur
    return img
