"""Paired (degraded EMPM image, ideal image) dataset generation and I/O.

Per sample i of a split: a child seed derived from (base_seed, split, i)
drives scene generation, the true freehand trajectory, noise injection, and
the position-error perturbation; the degraded input is the EMPM+RMA
reconstruction using the *estimated* trajectory while synthesis uses the true
one. Generation is a pure function of (config, base_seed) up to byte identity
and is resumable: existing valid sample files are skipped.

Sample file layout (little-endian):
  magic "NFDS" | version u32 | input SarImage block | target SarImage block |
  meta_len u32 | meta JSON utf-8 | crc32 u32 of everything after the version.
"""

from __future__ import annotations

import hashlib
import json

import struct
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from freehand_sar.errors import CorruptDataError
from freehand_sar.forward import add_noise, synthesize
from freehand_sar.geometry import PerturbationSpec, make_freehand_trajectory, perturb_trajectory
from freehand_sar.profiles import Profile
from freehand_sar.reconstruct import empm_rma
from freehand_sar.sarimage import SarImage
from freehand_sar.scene import discretize_scene, random_scene, rasterize_ideal
from freehand_sar.seeding import split_rng

FORMAT_VERSION = 1
_MAGIC = b"NFDS"
_SPLIT_IDS = {"train": 0, "test": 1}


@dataclass(frozen=True)
class DatasetSample:
    input: SarImage  # EMPM-reconstructed, degraded
    target: SarImage  # ideal
    meta: dict

    def __post_init__(self):
        if self.input.pixels.shape != self.target.pixels.shape:
            raise ValueError("input and target must share grid dimensions")

    def to_bytes(self) -> bytes:
        body = bytearray()
        body += self.input.to_bytes()
        body += self.target.to_bytes()
        meta_bytes = json.dumps(self.meta, separators=(",", ":"), sort_keys=True).encode()
        body += struct.pack("<I", len(meta_bytes))
        body += meta_bytes
        crc = zlib.crc32(bytes(body))
        return _MAGIC + struct.pack("<I", FORMAT_VERSION) + bytes(body) + struct.pack("<I", crc)

    @classmethod
    def from_bytes(cls, data: bytes) -> "DatasetSample":
        if len(data) < 12 or data[:4] != _MAGIC:
            raise CorruptDataError("bad dataset sample magic")
        (version,) = struct.unpack_from("<I", data, 4)
        if version != FORMAT_VERSION:
            raise CorruptDataError(f"unsupported sample format version {version}")
        body = data[8:-4]
        (crc,) = struct.unpack_from("<I", data, len(data) - 4)
        if zlib.crc32(body) != crc:
            raise CorruptDataError("sample checksum mismatch")
        inp = SarImage.from_bytes(body)
        off = inp.nbytes
        tgt = SarImage.from_bytes(body[off:])
        off += tgt.nbytes
        (meta_len,) = struct.unpack_from("<I", body, off)
        meta = json.loads(body[off + 4 : off + 4 + meta_len].decode())
        return cls(inp, tgt, meta)

    def save(self, path) -> None:
        with open(path, "wb") as f:
            f.write(self.to_bytes())


def load_sample(path) -> DatasetSample:
    with open(path, "rb") as f:
        return DatasetSample.from_bytes(f.read())


def generate_sample(profile: Profile, base_seed: int, split: str, index: int) -> DatasetSample:
    """Generate one paired sample; pure function of its arguments."""
    split_id = _SPLIT_IDS[split]
    rng = split_rng(base_seed, split_id, index)
    lam = profile.radar.wavelength_center
    sigma = float(rng.uniform(*profile.sigma_range)) * lam
    snr_db = float(rng.uniform(*profile.snr_range_db))
    z_span = float(rng.uniform(*profile.z_span_range))
    scene_seed, traj_seed, noise_seed, pert_seed = (
        int(s) for s in rng.integers(0, 2**62, size=4)
    )

    scene = random_scene(profile.scene, scene_seed)
    target = rasterize_ideal(scene, profile.grid)
    positions, amplitudes = discretize_scene(scene, profile.grid)
    traj_true = make_freehand_trajectory(
        profile.aperture,
        profile.radar,
        Z0=profile.Z0,
        sigma_xy=profile.jitter_sigma_xy,
        z_span=z_span,
        smoothness=profile.jitter_smoothness,
        seed=traj_seed,
    )
    raw = synthesize(positions, amplitudes, traj_true, profile.radar)
    if np.any(raw.samples):
        raw = add_noise(raw, snr_db, seed=noise_seed)
    traj_est = perturb_trajectory(traj_true, PerturbationSpec((sigma, sigma, sigma), pert_seed))
    degraded = empm_rma(raw, traj_est, profile.Z0, profile.grid)
    meta = {
        "base_seed": base_seed,
        "split": split,
        "index": index,
        "profile": profile.name,
        "sigma_m": sigma,
        "snr_db": snr_db,
        "z_span_m": z_span,
        "trajectory_kind": traj_true.kind,
        "scene": {"n_points": len(scene.points), "n_shapes": len(scene.shapes)},
    }
    return DatasetSample(degraded, target, meta)


def _sample_filename(index: int) -> str:
    return f"sample_{index:05d}.bin"


def _worker(args):
    profile, base_seed, split, index, path = args
    sample = generate_sample(profile, base_seed, split, index)
    sample.save(path)
    return path


def _valid_existing(path: Path, base_seed: int, split: str, index: int) -> bool:
    if not path.is_file():
        return False
    try:
        sample = load_sample(path)
    except (CorruptDataError, OSError):
        return False
    m = sample.meta
    return m.get("base_seed") == base_seed and m.get("split") == split and m.get("index") == index


def generate_dataset(
    profile: Profile,
    base_seed: int,
    out_dir,
    n_train: int | None = None,
    n_test: int | None = None,
    workers: int = 1,
) -> dict:
    """Generate the train/test splits under out_dir and write manifest.json.

    Returns the manifest document. Existing valid samples are skipped, so an
    interrupted run can resume. The manifest is written last.
    """
    out_dir = Path(out_dir)
    counts = {"train": profile.n_train if n_train is None else n_train,
              "test": profile.n_test if n_test is None else n_test}
    jobs = []
    for split, n in counts.items():
        split_dir = out_dir / split
        split_dir.mkdir(parents=True, exist_ok=True)
        for i in range(n):
            path = split_dir / _sample_filename(i)
            if not _valid_existing(path, base_seed, split, i):
                jobs.append((profile, base_seed, split, i, str(path)))
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            list(pool.map(_worker, jobs, chunksize=4))
    else:
        for job in jobs:
            _worker(job)

    manifest = {
        "format_version": FORMAT_VERSION,
        "profile": profile.name,
        "base_seed": base_seed,
        "grid": {"nx": profile.grid.nx, "ny": profile.grid.ny,
                 "width": profile.grid.width, "height": profile.grid.height,
                 "z": profile.grid.z},
        "splits": {},
    }
    for split, n in counts.items():
        files = []
        for i in range(n):
            path = out_dir / split / _sample_filename(i)
            digest = hashlib.sha256(path.read_bytes()).hexdigest()
            files.append({"file": f"{split}/{_sample_filename(i)}", "sha256": digest, "index": i})
        manifest["splits"][split] = {"n": n, "files": files}
    with open(out_dir / "manifest.json", "w") as f:
        json.dump(manifest, f, separators=(",", ":"), sort_keys=True)
    return manifest


def load_manifest(dataset_dir) -> dict:
    with open(Path(dataset_dir) / "manifest.json") as f:
        return json.load(f)


def iterate_split(dataset_dir, split: str, verify: bool = True):
    """Yield DatasetSamples of a split in index order, verifying checksums."""
    dataset_dir = Path(dataset_dir)
    manifest = load_manifest(dataset_dir)
    if split not in manifest["splits"]:
        raise ValueError(f"unknown split {split!r}")
    for entry in manifest["splits"][split]["files"]:
        path = dataset_dir / entry["file"]
        data = path.read_bytes()
        if verify and hashlib.sha256(data).hexdigest() != entry["sha256"]:
            raise CorruptDataError(f"checksum mismatch for {entry['file']}")
        yield DatasetSample.from_bytes(data)
