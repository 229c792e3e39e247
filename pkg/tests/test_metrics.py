import numpy as np
import pytest

import trapml as tm
from trapml.errors import DomainError
from trapml.metrics import classification_summary, write_roc_csv
from trapml.rng import PortableRng


class TestRmse:
    def test_perfect(self):
        assert tm.rmse([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]) == 0.0

    def test_symmetric_unit_case(self):
        assert tm.rmse([0.0, 0.0], [1.0, -1.0]) == pytest.approx(1.0)

    def test_constant_shift(self):
        y = np.linspace(-2, 5, 31)
        assert tm.rmse(y, y + 0.37) == pytest.approx(0.37)
        assert tm.rmse(y, y - 0.37) == pytest.approx(0.37)

    def test_length_mismatch(self):
        with pytest.raises(DomainError):
            tm.rmse([1.0], [1.0, 2.0])


class TestR2:
    def test_perfect(self):
        y = np.linspace(0, 1, 11)
        assert tm.r2(y, y) == 1.0

    def test_mean_predictor_is_zero(self):
        y = np.array([1.0, 3.0, 5.0, 7.0])
        assert tm.r2(y, np.full(4, y.mean())) == pytest.approx(0.0, abs=1e-15)

    def test_never_exceeds_one(self):
        rng = PortableRng(3)
        y = rng.normal(200)
        pred = rng.normal(200)
        assert tm.r2(y, pred) <= 1.0

    def test_constant_target_rejected(self):
        with pytest.raises(DomainError):
            tm.r2([2.0, 2.0, 2.0], [1.0, 2.0, 3.0])


class TestRocAuc:
    def test_perfect_separation(self):
        y = np.array([0, 0, 0, 1, 1, 1])
        s = np.array([0.1, 0.2, 0.3, 0.7, 0.8, 0.9])
        roc, auc = tm.roc_and_auc(y, s)
        assert auc == 1.0
        assert roc[0] == (0.0, 0.0, float("inf"))
        assert roc[-1][:2] == (1.0, 1.0)

    def test_random_scores_near_half(self):
        rng = PortableRng(17)
        y = (rng.random(4000) < 0.5).astype(int)
        s = rng.random(4000)
        _, auc = tm.roc_and_auc(y, s)
        assert 0.45 <= auc <= 0.55

    def test_monotone_transform_invariance(self):
        rng = PortableRng(23)
        y = (rng.random(300) < 0.4).astype(int)
        s = rng.normal(300)
        _, auc1 = tm.roc_and_auc(y, s)
        _, auc2 = tm.roc_and_auc(y, np.exp(2.0 * s) + 5.0)
        assert auc1 == pytest.approx(auc2, abs=1e-15)

    def test_tied_scores_grouped(self):
        y = np.array([1, 0, 1, 0])
        s = np.array([0.5, 0.5, 0.5, 0.5])
        roc, auc = tm.roc_and_auc(y, s)
        assert len(roc) == 2  # (0,0) then the single tie group
        assert auc == pytest.approx(0.5)

    def test_single_class_rejected(self):
        with pytest.raises(DomainError):
            tm.roc_and_auc(np.ones(5, dtype=int), np.linspace(0, 1, 5))

    def test_fpr_monotone(self):
        rng = PortableRng(29)
        y = (rng.random(100) < 0.5).astype(int)
        s = rng.random(100)
        roc, _ = tm.roc_and_auc(y, s)
        fprs = [p[0] for p in roc]
        assert all(b >= a for a, b in zip(fprs, fprs[1:]))


class TestConfusion:
    def test_all_correct_balanced(self):
        y = np.array([0] * 10 + [1] * 10)
        m = tm.confusion(y, y, 2)
        assert np.array_equal(m, np.diag([10, 10]))

    def test_all_flipped(self):
        y = np.array([0] * 4 + [1] * 6)
        m = tm.confusion(y, 1 - y, 2)
        assert m[0, 1] == 4 and m[1, 0] == 6
        assert m[0, 0] == 0 and m[1, 1] == 0

    def test_row_sums_are_true_counts(self):
        rng = PortableRng(31)
        y = np.array([rng.below(3) for _ in range(200)], dtype=np.int64)
        pred = np.array([rng.below(3) for _ in range(200)], dtype=np.int64)
        m = tm.confusion(y, pred, 3)
        assert np.array_equal(m.sum(axis=1), np.bincount(y, minlength=3))
        assert int(m.sum()) == 200

    def test_out_of_range_rejected(self):
        with pytest.raises(DomainError):
            tm.confusion([0, 1, 2], [0, 1, 1], 2)

    def test_binary_summary(self):
        y = np.array([1, 1, 0, 0, 1])
        pred = np.array([1, 0, 0, 1, 1])
        s = classification_summary(y, pred)
        assert s["accuracy"] == pytest.approx(0.6)
        assert s["precision"] == pytest.approx(2 / 3)
        assert s["recall"] == pytest.approx(2 / 3)


def test_roc_csv(tmp_path):
    y = np.array([0, 1, 0, 1])
    s = np.array([0.2, 0.9, 0.4, 0.6])
    roc, _ = tm.roc_and_auc(y, s)
    path = tmp_path / "roc.csv"
    write_roc_csv(path, roc)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "fpr,tpr,threshold"
    assert len(lines) == len(roc) + 1
