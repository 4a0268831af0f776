"""Readers/writers for the SAR toolkit's binary file formats.

These formats are a cross-language boundary contract, so they are parsed here
from their byte layout rather than through the producing package.

SarImage block (little-endian):
  magic "SARI" | nx u32 | ny u32 | extent_w f64 | extent_h f64 | plane_z f64 |
  ny*nx row-major float32 pixels

Dataset sample file:
  magic "NFDS" | version u32 | input SarImage block | target SarImage block |
  meta_len u32 | meta JSON utf-8 | crc32 u32 of everything after the version

A dataset directory holds train/ and test/ sample files plus manifest.json
with per-file sha256 digests.
"""

from __future__ import annotations

import hashlib
import json
import struct
import zlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

_SARI_MAGIC = b"SARI"
_SARI_HEADER = struct.Struct("<4sIIddd")
_NFDS_MAGIC = b"NFDS"
_NFDS_VERSION = 1


class FormatError(RuntimeError):
    pass


@dataclass(frozen=True)
class ImageBlock:
    pixels: np.ndarray  # (ny, nx) float64 in [0, 1]
    extent: tuple[float, float]
    plane_z: float

    @property
    def nbytes(self) -> int:
        return _SARI_HEADER.size + 4 * self.pixels.size


def read_image_block(data: bytes, offset: int = 0) -> ImageBlock:
    if len(data) - offset < _SARI_HEADER.size:
        raise FormatError("truncated image header")
    magic, nx, ny, w, h, z = _SARI_HEADER.unpack_from(data, offset)
    if magic != _SARI_MAGIC:
        raise FormatError("bad image magic")
    need = _SARI_HEADER.size + 4 * nx * ny
    if len(data) - offset < need:
        raise FormatError("truncated image pixels")
    pixels = np.frombuffer(data, dtype="<f4", count=nx * ny,
                           offset=offset + _SARI_HEADER.size)
    return ImageBlock(pixels.reshape(ny, nx).astype(np.float64), (w, h), z)


def write_image_block(img: ImageBlock) -> bytes:
    ny, nx = img.pixels.shape
    head = _SARI_HEADER.pack(_SARI_MAGIC, nx, ny, img.extent[0], img.extent[1],
                             img.plane_z)
    return head + img.pixels.astype("<f4").tobytes(order="C")


def load_image(path) -> ImageBlock:
    return read_image_block(Path(path).read_bytes())


def save_image(img: ImageBlock, path) -> None:
    Path(path).write_bytes(write_image_block(img))


@dataclass(frozen=True)
class Sample:
    input: ImageBlock
    target: ImageBlock
    meta: dict


def read_sample(data: bytes) -> Sample:
    if len(data) < 12 or data[:4] != _NFDS_MAGIC:
        raise FormatError("bad sample magic")
    (version,) = struct.unpack_from("<I", data, 4)
    if version != _NFDS_VERSION:
        raise FormatError(f"unsupported sample version {version}")
    body = data[8:-4]
    (crc,) = struct.unpack_from("<I", data, len(data) - 4)
    if zlib.crc32(body) != crc:
        raise FormatError("sample checksum mismatch")
    inp = read_image_block(body)
    tgt = read_image_block(body, inp.nbytes)
    off = inp.nbytes + tgt.nbytes
    (meta_len,) = struct.unpack_from("<I", body, off)
    meta = json.loads(body[off + 4 : off + 4 + meta_len].decode())
    return Sample(inp, tgt, meta)


def load_sample(path) -> Sample:
    return read_sample(Path(path).read_bytes())


def load_split(dataset_dir, split: str, verify: bool = True) -> list[Sample]:
    """Samples of one split in manifest order, optionally sha256-verified."""
    dataset_dir = Path(dataset_dir)
    with open(dataset_dir / "manifest.json") as f:
        manifest = json.load(f)
    if split not in manifest["splits"]:
        raise FormatError(f"dataset has no split {split!r}")
    samples = []
    for entry in manifest["splits"][split]["files"]:
        data = (dataset_dir / entry["file"]).read_bytes()
        if verify and hashlib.sha256(data).hexdigest() != entry["sha256"]:
            raise FormatError(f"checksum mismatch for {entry['file']}")
        samples.append(read_sample(data))
    return samples
