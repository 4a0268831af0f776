import csv
import json
import math

import numpy as np
import pytest

from freehand_sar.metrics import (
    PSNR_CAP_DB,
    bench,
    metric_record,
    psnr,
    rmse,
    write_comparison_table,
)
from freehand_sar.sarimage import SarImage

try:
    from hypothesis import given, strategies as st

    HAVE_HYPOTHESIS = True
except ImportError:
    HAVE_HYPOTHESIS = False


class TestRmse:
    def test_frozen_values(self):
        a = np.zeros((2, 2))
        b = np.full((2, 2), 0.5)
        assert rmse(a, b) == 0.5
        assert rmse(np.array([[0.0, 1.0]]), np.array([[0.0, 0.0]])) == pytest.approx(
            math.sqrt(0.5), abs=1e-15
        )

    def test_identity(self):
        a = np.random.default_rng(0).random((8, 8))
        assert rmse(a, a) == 0.0

    def test_symmetry(self):
        rng = np.random.default_rng(1)
        a, b = rng.random((8, 8)), rng.random((8, 8))
        assert rmse(a, b) == rmse(b, a)

    def test_accepts_images(self):
        a = SarImage(np.zeros((8, 8)), (0.2, 0.2), 0.3)
        b = SarImage(np.full((8, 8), 0.1), (0.2, 0.2), 0.3)
        assert rmse(a, b) == pytest.approx(0.1, abs=1e-15)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            rmse(np.zeros((4, 4)), np.zeros((4, 5)))

    if HAVE_HYPOTHESIS:

        @given(st.floats(0.0, 1.0), st.floats(0.0, 1.0))
        def test_constant_images(self, u, v):
            a = np.full((6, 6), u)
            b = np.full((6, 6), v)
            assert rmse(a, b) == pytest.approx(abs(u - v), abs=1e-12)


class TestPsnr:
    def test_frozen_value(self):
        # rmse 0.1 -> 20*log10(10) = 20 dB
        a = np.zeros((4, 4))
        b = np.full((4, 4), 0.1)
        assert psnr(a, b) == pytest.approx(20.0, abs=1e-12)

    def test_cap_on_identical(self):
        a = np.random.default_rng(2).random((8, 8))
        assert psnr(a, a) == PSNR_CAP_DB

    def test_cap_threshold(self):
        a = np.zeros((4, 4))
        almost = np.full((4, 4), 9e-6)
        assert psnr(a, almost) == PSNR_CAP_DB
        above = np.full((4, 4), 2e-5)
        assert psnr(a, above) < PSNR_CAP_DB

    def test_monotone_in_error(self):
        a = np.zeros((4, 4))
        values = [psnr(a, np.full((4, 4), e)) for e in (0.01, 0.05, 0.2, 0.5)]
        assert all(x > y for x, y in zip(values, values[1:]))


class TestBench:
    def test_basic(self):
        calls = []
        res = bench(lambda: calls.append(1), repetitions=3, warmup=2)
        assert len(calls) == 5
        assert res.repetitions == 3
        assert res.min_s <= res.mean_s
        assert res.std_s >= 0
        assert "python" in res.machine

    def test_validation(self):
        with pytest.raises(ValueError):
            bench(lambda: None, repetitions=0)

    def test_as_dict(self):
        res = bench(lambda: None, repetitions=1, warmup=0)
        d = res.as_dict()
        assert set(d) == {"mean_s", "std_s", "min_s", "repetitions", "machine"}


def test_metric_record_format():
    rec = json.loads(metric_record("psnr_db", 20.5, "a.sari", "b.sari"))
    assert rec == {"metric": "psnr_db", "value": 20.5, "image_a": "a.sari", "image_b": "b.sari"}


def test_comparison_table(tmp_path):
    path = tmp_path / "table.csv"
    write_comparison_table(
        path,
        ["BPA", "RMA"],
        {"PSNR (dB)": {"BPA": 34.9, "RMA": 20.2}, "Time (s)": {"BPA": 1324.8}},
    )
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    assert rows[0] == ["Metrics", "BPA", "RMA"]
    assert rows[1] == ["PSNR (dB)", "34.9", "20.2"]
    assert rows[2] == ["Time (s)", "1324.8", ""]
