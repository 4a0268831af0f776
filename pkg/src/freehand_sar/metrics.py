"""Image-quality metrics (PSNR, RMSE) and wall-clock benchmarking."""

from __future__ import annotations

import csv
import json
import math
import os
import platform
import time
from dataclasses import dataclass

import numpy as np

from freehand_sar.sarimage import SarImage

PSNR_CAP_DB = 100.0
_RMSE_FLOOR = 1e-5  # below this, the PSNR cap applies


def _pixels(img) -> np.ndarray:
    return img.pixels if isinstance(img, SarImage) else np.asarray(img, dtype=float)


def rmse(a, b) -> float:
    """Root mean square pixel error; arguments must share grid dimensions."""
    pa, pb = _pixels(a), _pixels(b)
    if pa.shape != pb.shape:
        raise ValueError(f"shape mismatch: {pa.shape} vs {pb.shape}")
    return float(np.sqrt(np.mean((pa - pb) ** 2)))


def psnr(a, b) -> float:
    """Peak signal-to-noise ratio in dB with peak value 1, capped at 100 dB."""
    err = rmse(a, b)
    if err <= _RMSE_FLOOR:
        return PSNR_CAP_DB
    return 20.0 * math.log10(1.0 / err)


@dataclass(frozen=True)
class BenchResult:
    mean_s: float
    std_s: float
    min_s: float
    repetitions: int
    machine: str

    def as_dict(self) -> dict:
        return {
            "mean_s": self.mean_s,
            "std_s": self.std_s,
            "min_s": self.min_s,
            "repetitions": self.repetitions,
            "machine": self.machine,
        }


def machine_descriptor() -> str:
    return f"{platform.platform()} / {os.cpu_count()} cpus / python {platform.python_version()}"


def bench(op, repetitions: int = 3, warmup: int = 1) -> BenchResult:
    """Wall-clock stats for a no-argument callable, warm-up runs excluded."""
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    for _ in range(warmup):
        op()
    times = []
    for _ in range(repetitions):
        t0 = time.perf_counter()
        op()
        times.append(time.perf_counter() - t0)
    arr = np.asarray(times)
    return BenchResult(float(arr.mean()), float(arr.std()), float(arr.min()),
                       repetitions, machine_descriptor())


def metric_record(metric: str, value: float, image_a: str, image_b: str) -> str:
    """One structured text record per measured metric."""
    return json.dumps({"metric": metric, "value": value, "image_a": image_a, "image_b": image_b},
                      separators=(",", ":"))


def write_comparison_table(path, columns: list[str], rows: dict[str, dict[str, float]]) -> None:
    """CSV table with one column per method and one row per metric.

    ``rows`` maps metric name -> {method: value}; mirrors the usual
    PSNR / RMSE / time comparison layout.
    """
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["Metrics"] + columns)
        for metric, values in rows.items():
            writer.writerow([metric] + [values.get(c, "") for c in columns])
