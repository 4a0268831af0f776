import hashlib
import json

import numpy as np
import pytest

from srgan_trainer.cli import build_parser, run
from srgan_trainer.formats import load_image

from test_formats import image_bytes, sample_bytes


def make_dataset(root, n_train=8, n_test=4, size=16):
    rng = np.random.default_rng(0)
    manifest = {"splits": {}}
    for split, n in (("train", n_train), ("test", n_test)):
        (root / split).mkdir(parents=True)
        files = []
        for i in range(n):
            tgt = rng.random((size, size))
            inp = np.clip(tgt + 0.1 * rng.standard_normal((size, size)), 0, 1)
            data = sample_bytes(inp, tgt, {"index": i, "split": split})
            name = f"{split}/sample_{i:05d}.bin"
            (root / name).write_bytes(data)
            files.append({"file": name, "sha256": hashlib.sha256(data).hexdigest(),
                          "index": i})
        manifest["splits"][split] = {"n": n, "files": files}
    (root / "manifest.json").write_text(json.dumps(manifest))


def test_parser_requires_command():
    with pytest.raises(SystemExit) as exc:
        build_parser().parse_args([])
    assert exc.value.code == 2


def test_train_then_infer(tmp_path):
    data = tmp_path / "ds"
    make_dataset(data)
    out = tmp_path / "run"
    assert run(["train", "--data", str(data), "--profile", "desk",
                "--epochs", "1", "--out", str(out)]) == 0
    assert (out / "generator.pt").is_file()
    assert (out / "history.csv").is_file()

    img_path = tmp_path / "in.sari"
    img_path.write_bytes(image_bytes(np.random.default_rng(1).random((16, 16))))
    out_img = tmp_path / "out.sari"
    assert run(["infer", "--model", str(out / "generator.pt"),
                "--in", str(img_path), "--out", str(out_img)]) == 0
    result = load_image(out_img)
    assert result.pixels.shape == (16, 16)
    assert result.pixels.min() >= 0.0 and result.pixels.max() <= 1.0


def test_missing_dataset_is_error(tmp_path):
    assert run(["train", "--data", str(tmp_path / "nope"),
                "--out", str(tmp_path / "run")]) == 1


def test_bad_checkpoint_is_error(tmp_path):
    bad = tmp_path / "model.pt"
    bad.write_bytes(b"not a checkpoint")
    img = tmp_path / "in.sari"
    img.write_bytes(image_bytes(np.zeros((16, 16))))
    assert run(["infer", "--model", str(bad), "--in", str(img),
                "--out", str(tmp_path / "out.sari")]) == 1
