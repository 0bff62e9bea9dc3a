import numpy as np
import pytest

from neglearn import evaluation
from neglearn.evaluation import (LABEL_ANOMALY, LABEL_NORMAL, ScoreSet,
                                 histogram, lda_fit, lda_score, roc,
                                 roc_curve, score, score_sets)
from neglearn.rng import Rng


class IdentityModel:
    """Duck-typed stand-in whose reconstruction is perfect."""

    def reconstruct(self, x):
        return x.copy()


class ShiftModel:
    def __init__(self, shift):
        self.shift = shift

    def reconstruct(self, x):
        return x + self.shift


def make_scoreset(normal_scores, anomaly_scores):
    s = np.concatenate([normal_scores, anomaly_scores]).astype(np.float64)
    labels = np.concatenate([
        np.zeros(len(normal_scores), dtype=np.int64),
        np.ones(len(anomaly_scores), dtype=np.int64)])
    return ScoreSet(np.arange(len(s)), s, labels)


def test_identity_model_scores_zero():
    x = Rng(1).uniform(6, 5)
    s = score(IdentityModel(), x)
    assert np.all(s.scores == 0.0)


def test_scoring_order_independent():
    x = Rng(2).uniform(10, 4)
    model = ShiftModel(0.1 * np.arange(4))
    perm = Rng(3).permutation(10)
    s = score(model, x)
    sp = score(model, x[perm])
    np.testing.assert_array_equal(sp.scores, s.scores[perm])


def test_scoreset_validation():
    with pytest.raises(ValueError):
        ScoreSet(np.arange(2), np.array([-0.1, 0.2]), np.array([0, 1]))
    with pytest.raises(ValueError):
        ScoreSet(np.arange(2), np.array([0.1, 0.2]), np.array([0, 7]))


def test_roc_perfect_separation():
    s = make_scoreset([0.1, 0.2, 0.3], [0.4, 0.5])
    assert roc(s).auroc == 1.0


def test_roc_endpoints_and_monotonicity():
    rng = Rng(4)
    s = make_scoreset(rng.random(40), rng.random(30))
    curve = roc(s)
    assert curve.fpr[0] == 0.0 and curve.tpr[0] == 0.0
    assert curve.fpr[-1] == 1.0 and curve.tpr[-1] == 1.0
    assert np.all(np.diff(curve.tpr) >= 0)
    assert np.all(np.diff(curve.fpr) >= 0)
    assert 0.0 <= curve.auroc <= 1.0


def test_roc_hand_value_point75():
    # normals {0.1, 0.4}, anomalies {0.3, 0.9}: 3 of 4 pairs ordered
    s = make_scoreset([0.1, 0.4], [0.3, 0.9])
    assert roc(s).auroc == 0.75


def test_roc_coin_labels_near_half():
    rng = Rng(5)
    scores = rng.random(4000)
    labels = (rng.random(4000) < 0.5).astype(np.int64)
    curve = roc_curve(scores, labels)
    assert abs(curve.auroc - 0.5) < 0.05


def _pairwise_auroc(scores, labels):
    pos = scores[labels == LABEL_ANOMALY]
    neg = scores[labels == LABEL_NORMAL]
    wins = ties = 0
    for a in pos:
        for b in neg:
            if a > b:
                wins += 1
            elif a == b:
                ties += 1
    return (wins + 0.5 * ties) / (len(pos) * len(neg))


def test_auroc_equals_pairwise_oracle_with_ties():
    rng = Rng(6)
    for trial in range(100):
        n = 2 + int(rng.integers(24, 1)[0])
        m = 2 + int(rng.integers(24, 1)[0])
        # quantized scores force plenty of ties
        scores = np.round(rng.random(n + m) * 8) / 8.0
        labels = np.concatenate([np.zeros(n, np.int64), np.ones(m, np.int64)])
        got = roc_curve(scores, labels).auroc
        want = _pairwise_auroc(scores, labels)
        assert abs(got - want) < 1e-9, f"trial {trial}: {got} vs {want}"


def test_auroc_invariant_under_monotone_transform():
    rng = Rng(7)
    s = make_scoreset(rng.random(50), rng.random(20) + 0.2)
    base = roc(s).auroc
    for fn in (lambda v: 3 * v + 1, np.exp, lambda v: v ** 3):
        transformed = ScoreSet(s.sample_ids, fn(s.scores), s.labels)
        assert roc(transformed).auroc == pytest.approx(base, abs=1e-12)


def test_roc_single_label_rejected():
    s = ScoreSet(np.arange(2), np.array([0.1, 0.2]), np.zeros(2, np.int64))
    with pytest.raises(ValueError):
        roc(s)


def test_histogram_conserves_population():
    rng = Rng(8)
    s = make_scoreset(rng.random(70), rng.random(31))
    h = histogram(s, bins=13)
    assert h.normal_counts.sum() == 70
    assert h.anomaly_counts.sum() == 31
    assert np.all(h.normal_counts >= 0) and np.all(h.anomaly_counts >= 0)
    assert len(h.bin_edges) == 14
    assert h.bin_edges[0] == 0.0


def test_histogram_all_equal_scores_single_bin():
    s = make_scoreset([0.5, 0.5, 0.5], [0.5])
    h = histogram(s, bins=10)
    assert (h.normal_counts > 0).sum() == 1
    assert (h.anomaly_counts > 0).sum() == 1


def test_histogram_rejects_bad_input():
    s = make_scoreset([0.1], [0.2])
    with pytest.raises(ValueError):
        histogram(s, bins=1)
    empty = ScoreSet(np.array([], np.int64), np.array([]), np.array([], np.int64))
    with pytest.raises(ValueError):
        histogram(empty)


def test_histogram_overlap_bounds():
    far = make_scoreset([0.1, 0.11], [0.9, 0.91])
    near = make_scoreset([0.5, 0.52], [0.5, 0.52])
    assert histogram(far, 10).overlap() == 0.0
    assert histogram(near, 10).overlap() == 1.0


def _blobs(rng, n, d, separation):
    a = rng.uniform(n, d, -1, 1)
    b = rng.uniform(n, d, -1, 1) + separation
    x = np.vstack([a, b])
    labels = np.concatenate([np.zeros(n, np.int64), np.ones(n, np.int64)])
    return x, labels


def test_lda_separated_blobs():
    x, labels = _blobs(Rng(9), 200, 5, separation=4.0)
    model = lda_fit(x, labels)
    curve = roc_curve(lda_score(model, x), labels)
    assert curve.auroc >= 0.99


def test_lda_label_swap_negates_scores():
    x, labels = _blobs(Rng(10), 100, 4, separation=1.0)
    m1 = lda_fit(x, labels)
    m2 = lda_fit(x, 1 - labels)
    np.testing.assert_allclose(lda_score(m2, x), -lda_score(m1, x),
                               rtol=1e-9, atol=1e-9)


def test_lda_identical_classes_near_chance():
    rng = Rng(11)
    x = rng.uniform(400, 6, -1, 1)
    labels = np.concatenate([np.zeros(200, np.int64), np.ones(200, np.int64)])
    curve = roc_curve(lda_score(lda_fit(x, labels), x), labels)
    assert abs(curve.auroc - 0.5) < 0.1


def test_lda_requires_two_per_class():
    x = np.zeros((3, 2))
    labels = np.array([0, 0, 1])
    with pytest.raises(ValueError):
        lda_fit(x, labels)


def test_lda_handles_rank_deficient_features():
    # constant columns make the raw covariance singular; the ridge term
    # must keep it invertible
    rng = Rng(12)
    x = rng.uniform(60, 4, -1, 1)
    x = np.hstack([x, np.ones((60, 1)), x[:, :1]])
    labels = (rng.random(60) < 0.5).astype(np.int64)
    labels[:2] = [0, 1]
    model = lda_fit(x, labels)
    assert np.isfinite(lda_score(model, x)).all()


def test_score_sets_concatenates_labels():
    x = Rng(13).uniform(4, 3)
    y = Rng(14).uniform(2, 3)
    s = score_sets(IdentityModel(), x, y)
    assert list(s.labels) == [0, 0, 0, 0, 1, 1]


def test_csv_exports(tmp_path):
    s = make_scoreset([0.1, 0.2], [0.3])
    curve = roc(s)
    h = histogram(s, bins=4)
    s.to_csv(tmp_path / "s.csv", provenance="seed=1")
    curve.to_csv(tmp_path / "r.csv")
    h.to_csv(tmp_path / "h.csv")
    assert (tmp_path / "s.csv").read_text().splitlines()[0] == "# seed=1"
    assert "fpr,tpr,threshold" in (tmp_path / "r.csv").read_text()
    assert "bin_lo,bin_hi,normal_count,anomaly_count" in (tmp_path / "h.csv").read_text()
