"""SarImage: normalized 2-D reconstructed or ideal image, plus its file format.

Binary layout (little-endian):
  magic "SARI" | nx u32 | ny u32 | extent_w f64 | extent_h f64 | plane_z f64
  followed by ny*nx row-major float32 pixels.
"""

from __future__ import annotations

import io
import struct
from dataclasses import dataclass

import numpy as np

from freehand_sar.errors import CorruptDataError

_MAGIC = b"SARI"
_HEADER = struct.Struct("<4sIIddd")


@dataclass(frozen=True)
class SarImage:
    """Real-valued image in [0, 1] on a uniform grid centered at the origin."""

    pixels: np.ndarray  # (ny, nx)
    extent: tuple[float, float]  # (width, height) in meters
    plane_z: float

    def __post_init__(self):
        object.__setattr__(self, "pixels", np.asarray(self.pixels, dtype=np.float64))
        if self.pixels.ndim != 2:
            raise ValueError("pixels must be 2-D")
        if not np.all(np.isfinite(self.pixels)):
            raise ValueError("pixels must be finite")

    @property
    def nx(self) -> int:
        return self.pixels.shape[1]

    @property
    def ny(self) -> int:
        return self.pixels.shape[0]

    def to_bytes(self) -> bytes:
        buf = io.BytesIO()
        buf.write(_HEADER.pack(_MAGIC, self.nx, self.ny, self.extent[0], self.extent[1], self.plane_z))
        buf.write(self.pixels.astype("<f4").tobytes(order="C"))
        return buf.getvalue()

    @classmethod
    def from_bytes(cls, data: bytes) -> "SarImage":
        if len(data) < _HEADER.size:
            raise CorruptDataError("truncated SarImage block")
        magic, nx, ny, w, h, z = _HEADER.unpack_from(data, 0)
        if magic != _MAGIC:
            raise CorruptDataError("bad SarImage magic")
        need = _HEADER.size + 4 * nx * ny
        if len(data) < need:
            raise CorruptDataError("truncated SarImage pixel data")
        pixels = np.frombuffer(data, dtype="<f4", count=nx * ny, offset=_HEADER.size)
        return cls(pixels.reshape(ny, nx).astype(np.float64), (w, h), z)

    @property
    def nbytes(self) -> int:
        return _HEADER.size + 4 * self.nx * self.ny

    def save(self, path) -> None:
        with open(path, "wb") as f:
            f.write(self.to_bytes())

    @classmethod
    def load(cls, path) -> "SarImage":
        with open(path, "rb") as f:
            return cls.from_bytes(f.read())

    def save_png(self, path) -> None:
        """8-bit grayscale export for visual inspection."""
        from PIL import Image

        arr = np.clip(self.pixels, 0.0, 1.0)
        Image.fromarray((arr * 255).astype(np.uint8), mode="L").save(path)


def normalize_magnitude(mag: np.ndarray) -> np.ndarray:
    """Divide by the image max (max of an empty image defined as 1), clip to [0, 1]."""
    peak = float(np.max(mag)) if mag.size else 0.0
    if peak <= 0.0:
        peak = 1.0
    return np.clip(mag / peak, 0.0, 1.0)
