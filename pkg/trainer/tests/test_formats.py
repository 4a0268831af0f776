import hashlib
import json
import struct
import zlib

import numpy as np
import pytest

from srgan_trainer.formats import (
    FormatError,
    ImageBlock,
    load_image,
    load_split,
    read_image_block,
    read_sample,
    save_image,
    write_image_block,
)


def image_bytes(pixels, extent=(0.2, 0.2), z=0.3):
    pixels = np.asarray(pixels, dtype="<f4")
    ny, nx = pixels.shape
    head = struct.pack("<4sIIddd", b"SARI", nx, ny, extent[0], extent[1], z)
    return head + pixels.tobytes(order="C")


def sample_bytes(inp, tgt, meta):
    body = image_bytes(inp) + image_bytes(tgt)
    meta_b = json.dumps(meta, separators=(",", ":"), sort_keys=True).encode()
    body += struct.pack("<I", len(meta_b)) + meta_b
    return b"NFDS" + struct.pack("<I", 1) + body + struct.pack("<I", zlib.crc32(body))


class TestImageBlock:
    def test_read_reference_bytes(self):
        px = np.arange(12, dtype=float).reshape(3, 4) / 11.0
        img = read_image_block(image_bytes(px, (0.25, 0.15), 0.4))
        assert img.pixels.shape == (3, 4)
        assert np.allclose(img.pixels, px, atol=1e-7)
        assert img.extent == (0.25, 0.15)
        assert img.plane_z == 0.4

    def test_write_read_round_trip(self, tmp_path):
        img = ImageBlock(np.random.default_rng(0).random((8, 6)), (0.2, 0.2), 0.3)
        path = tmp_path / "img.sari"
        save_image(img, path)
        back = load_image(path)
        assert np.allclose(back.pixels, img.pixels, atol=1e-7)
        assert back.extent == img.extent

    def test_write_matches_reference_layout(self):
        px = np.zeros((4, 4))
        assert write_image_block(ImageBlock(px, (0.2, 0.2), 0.3)) == image_bytes(px)

    def test_bad_magic(self):
        data = bytearray(image_bytes(np.zeros((4, 4))))
        data[0] = ord("X")
        with pytest.raises(FormatError):
            read_image_block(bytes(data))

    def test_truncated(self):
        data = image_bytes(np.zeros((4, 4)))
        with pytest.raises(FormatError):
            read_image_block(data[:-4])


class TestSample:
    def test_read_reference_bytes(self):
        inp = np.full((4, 4), 0.25)
        tgt = np.full((4, 4), 0.75)
        s = read_sample(sample_bytes(inp, tgt, {"index": 3, "split": "train"}))
        assert np.allclose(s.input.pixels, 0.25)
        assert np.allclose(s.target.pixels, 0.75)
        assert s.meta == {"index": 3, "split": "train"}

    def test_crc_mismatch(self):
        data = bytearray(sample_bytes(np.zeros((4, 4)), np.ones((4, 4)), {}))
        data[20] ^= 0xFF
        with pytest.raises(FormatError):
            read_sample(bytes(data))

    def test_bad_version(self):
        data = bytearray(sample_bytes(np.zeros((4, 4)), np.ones((4, 4)), {}))
        data[4] = 9
        with pytest.raises(FormatError):
            read_sample(bytes(data))


class TestSplit:
    def make_dataset(self, root, n=2):
        (root / "train").mkdir(parents=True)
        files = []
        for i in range(n):
            data = sample_bytes(np.full((4, 4), i / 10), np.ones((4, 4)), {"index": i})
            name = f"train/sample_{i:05d}.bin"
            (root / name).write_bytes(data)
            files.append({"file": name, "sha256": hashlib.sha256(data).hexdigest(),
                          "index": i})
        manifest = {"splits": {"train": {"n": n, "files": files}}}
        (root / "manifest.json").write_text(json.dumps(manifest))

    def test_load_split(self, tmp_path):
        self.make_dataset(tmp_path)
        samples = load_split(tmp_path, "train")
        assert len(samples) == 2
        assert samples[1].meta["index"] == 1

    def test_checksum_enforced(self, tmp_path):
        self.make_dataset(tmp_path)
        path = tmp_path / "train" / "sample_00000.bin"
        data = bytearray(path.read_bytes())
        data[-1] ^= 0xFF
        path.write_bytes(bytes(data))
        with pytest.raises(FormatError):
            load_split(tmp_path, "train")
        # the corrupted crc also fails on its own even without the manifest check
        with pytest.raises(FormatError):
            load_split(tmp_path, "train", verify=False)

    def test_unknown_split(self, tmp_path):
        self.make_dataset(tmp_path)
        with pytest.raises(FormatError):
            load_split(tmp_path, "validation")
