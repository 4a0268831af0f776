import csv

import numpy as np
import pytest
import torch

from srgan_trainer.formats import ImageBlock, Sample
from srgan_trainer.train import (
    HISTORY_FIELDS,
    TrainerConfig,
    evaluate,
    infer,
    load_checkpoint,
    psnr,
    rmse,
    save_checkpoint,
    train,
)


def make_samples(n, size=16, seed=0):
    rng = np.random.default_rng(seed)
    out = []
    for i in range(n):
        tgt = rng.random((size, size))
        inp = np.clip(tgt + 0.1 * rng.standard_normal((size, size)), 0, 1)
        out.append(Sample(ImageBlock(inp, (0.2, 0.2), 0.3),
                          ImageBlock(tgt, (0.2, 0.2), 0.3),
                          {"index": i}))
    return out


TINY = dict(batch_size=4, learning_rate=1e-3, base_channels=4, n_bottlenecks=1)


class TestConfig:
    def test_defaults(self):
        cfg = TrainerConfig()
        assert cfg.max_epochs == 50
        assert cfg.betas == (0.5, 0.999)
        assert cfg.p2p_weight == 100.0

    def test_validation(self):
        with pytest.raises(ValueError):
            TrainerConfig(max_epochs=0)
        with pytest.raises(ValueError):
            TrainerConfig(p2p_weight=0.0)
        with pytest.raises(ValueError):
            TrainerConfig(batch_size=0)


class TestLoop:
    def test_update_accounting(self, tmp_path):
        """8 samples, batch 4, 1 epoch: exactly 2 updates of each network."""
        cfg = TrainerConfig(max_epochs=1, **TINY)
        result = train(make_samples(8), make_samples(4, seed=1), cfg, tmp_path)
        assert result.d_updates == 2
        assert result.g_updates == 2

    def test_history_and_artifacts(self, tmp_path):
        cfg = TrainerConfig(max_epochs=2, **TINY)
        result = train(make_samples(8), make_samples(4, seed=1), cfg, tmp_path)
        assert len(result.history) == 2
        assert result.history[0]["epoch"] == 1
        for row in result.history:
            assert set(row) == set(HISTORY_FIELDS)
            for key in ("l_adv_d", "l_adv_g", "l_perc", "l_p2p"):
                assert row[key] >= 0.0
        assert result.checkpoint_path.is_file()
        with open(tmp_path / "history.csv", newline="") as f:
            rows = list(csv.DictReader(f))
        assert len(rows) == 2
        assert float(rows[1]["test_psnr"]) == pytest.approx(
            result.history[1]["test_psnr"], rel=1e-6)

    def test_deterministic_per_seed(self, tmp_path):
        cfg = TrainerConfig(max_epochs=1, seed=5, **TINY)
        r1 = train(make_samples(8), make_samples(4, seed=1), cfg, tmp_path / "a")
        r2 = train(make_samples(8), make_samples(4, seed=1), cfg, tmp_path / "b")
        assert r1.history == r2.history

    def test_literal_loss_routing_differs(self, tmp_path):
        base = TrainerConfig(max_epochs=1, **TINY)
        lit = TrainerConfig(max_epochs=1, literal_algorithm=True, **TINY)
        r1 = train(make_samples(8), make_samples(4, seed=1), base, tmp_path / "a")
        r2 = train(make_samples(8), make_samples(4, seed=1), lit, tmp_path / "b")
        assert r1.history != r2.history


class TestCheckpoint:
    def test_round_trip(self, tmp_path):
        cfg = TrainerConfig(max_epochs=1, **TINY)
        result = train(make_samples(4), make_samples(4, seed=1), cfg, tmp_path)
        gen = load_checkpoint(result.checkpoint_path)
        x = torch.rand(1, 1, 16, 16)
        with torch.no_grad():
            assert torch.allclose(gen(x), result.generator(x))


class TestInfer:
    def test_shape_and_bounds(self, tmp_path):
        cfg = TrainerConfig(max_epochs=1, **TINY)
        result = train(make_samples(4), make_samples(4, seed=1), cfg, tmp_path)
        img = ImageBlock(np.zeros((16, 16)), (0.2, 0.2), 0.3)
        out = infer(result.generator, img)
        assert out.pixels.shape == (16, 16)
        assert np.all(np.isfinite(out.pixels))
        assert out.pixels.min() >= 0.0 and out.pixels.max() <= 1.0
        assert out.extent == img.extent


class TestMetrics:
    def test_rmse_closed_form(self):
        assert rmse(np.zeros((4, 4)), np.full((4, 4), 0.1)) == pytest.approx(0.1)

    def test_psnr_closed_form_and_cap(self):
        assert psnr(np.zeros((4, 4)), np.full((4, 4), 0.1)) == pytest.approx(20.0)
        a = np.random.default_rng(0).random((4, 4))
        assert psnr(a, a) == 100.0

    def test_evaluate_matches_direct(self):
        torch.manual_seed(0)
        from srgan_trainer.model import Generator, GeneratorSpec

        gen = Generator(GeneratorSpec(4, 1))
        x = torch.rand(3, 1, 16, 16)
        y = torch.rand(3, 1, 16, 16)
        mean_psnr, mean_rmse = evaluate(gen, x, y)
        with torch.no_grad():
            out = gen(x).squeeze(1).numpy()
        expect = np.mean([psnr(g, t) for g, t in zip(out, y.squeeze(1).numpy())])
        assert mean_psnr == pytest.approx(float(expect), rel=1e-6)
        assert mean_rmse > 0
