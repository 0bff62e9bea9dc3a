import numpy as np
import pytest

from neglearn import dense, rbm, synth, trainer
from neglearn.dense import OptimizerConfig
from neglearn.errors import DivergenceError, ShapeError
from neglearn.rbm import CdConfig, MEAN_FIELD
from neglearn.rng import Rng
from neglearn.trainer import (PHASE_NEGATIVE, PHASE_POSITIVE, EvalSets,
                              TrainingConfig, negative_learning,
                              positive_learning, train)

X_BARS, Y_BARS = synth.bar_patterns()


def toy_cfg(**kw):
    base = dict(epochs=3, batch_size=4, seed=5,
                optimizer=OptimizerConfig(kind="sgd", learning_rate=0.3))
    base.update(kw)
    return TrainingConfig(**base)


def toy_model(seed=1):
    return dense.init_dense(16, 8, Rng(seed), output_activation="sigmoid")


def test_positive_pass_reduces_mse():
    model = toy_model()
    before = dense.loss(model, X_BARS)
    m, _ = positive_learning(model, X_BARS, toy_cfg(), Rng(2))
    assert dense.loss(m, X_BARS) <= before


def test_negative_pass_increases_mse():
    model = toy_model()
    before = dense.loss(model, Y_BARS)
    m, _ = negative_learning(model, Y_BARS, toy_cfg(), Rng(2))
    assert dense.loss(m, Y_BARS) >= before


def test_positive_pass_reproducible_bitwise():
    outs = []
    for _ in range(2):
        m, _ = positive_learning(toy_model(), X_BARS, toy_cfg(shuffle=False), Rng(3))
        outs.append(m)
    for a, b in zip(outs[0].params(), outs[1].params()):
        np.testing.assert_array_equal(a, b)


def test_short_tail_batch_is_processed():
    # 8 rows with batch_size 5 -> batches of 5 and 3; compare against an
    # explicit two-step reference to prove the tail contributed
    model = toy_model()
    cfg = toy_cfg(batch_size=5, shuffle=False)
    m, _ = positive_learning(model, X_BARS, cfg, Rng(4))
    opt = OptimizerConfig(kind="sgd", learning_rate=0.3)
    ref = dense.sgd_step(model, dense.gradients(model, X_BARS[:5], 1), opt)
    ref = dense.sgd_step(ref, dense.gradients(ref, X_BARS[5:], 1), opt)
    for a, b in zip(m.params(), ref.params()):
        np.testing.assert_array_equal(a, b)


def test_opposite_signs_at_identical_point():
    # a positive and a negative update from the same parameters move
    # exactly opposite ways when fed the same data
    model = toy_model()
    g_pos = dense.gradients(model, X_BARS, 1)
    g_neg = dense.gradients(model, X_BARS, -1)
    for a, b in zip(g_pos.params(), g_neg.params()):
        np.testing.assert_array_equal(a, -b)


def test_train_requires_anomalies_only_when_q_positive():
    model = toy_model()
    m, log = train(model, X_BARS, None, toy_cfg(q_negative=0))
    assert len(log.records) == 3
    with pytest.raises(ShapeError):
        train(model, X_BARS, None, toy_cfg(q_negative=1))


def test_negative_learning_never_invoked_when_q_zero(monkeypatch):
    calls = []
    real = trainer.negative_learning

    def spy(*args, **kw):
        calls.append(1)
        return real(*args, **kw)

    monkeypatch.setattr(trainer, "negative_learning", spy)
    train(toy_model(), X_BARS, Y_BARS, toy_cfg(q_negative=0))
    assert calls == []


def test_phase_trace_follows_schedule():
    _, log = train(toy_model(), X_BARS, Y_BARS, toy_cfg(epochs=4, q_negative=2))
    expect = [PHASE_POSITIVE] + [PHASE_NEGATIVE, PHASE_NEGATIVE, PHASE_POSITIVE] * 3
    assert log.phase_trace == expect


def test_epoch_count_matches_config():
    _, log = train(toy_model(), X_BARS, Y_BARS, toy_cfg(epochs=5, q_negative=1))
    assert [r.epoch for r in log.records] == [1, 2, 3, 4, 5]


def test_log_reproducible_for_fixed_seed():
    logs = []
    for _ in range(2):
        _, log = train(toy_model(), X_BARS, Y_BARS,
                       toy_cfg(epochs=4, q_negative=1),
                       eval_sets=EvalSets(X_BARS, Y_BARS))
        logs.append([(r.positive_mse, r.negative_mse, r.auroc) for r in log.records])
    assert logs[0] == logs[1]


def test_auroc_nan_without_eval_sets():
    _, log = train(toy_model(), X_BARS, Y_BARS, toy_cfg(q_negative=1))
    assert all(np.isnan(r.auroc) for r in log.records)


def test_divergence_guard_aborts_with_checkpoint():
    # identity output keeps the ascent objective unbounded (a sigmoid
    # output would saturate the gradients before the bound is reached)
    model = dense.init_dense(16, 8, Rng(1), output_activation="identity")
    cfg = toy_cfg(epochs=200, q_negative=5, negative_rate_ratio=4000.0,
                  optimizer=OptimizerConfig(kind="sgd", learning_rate=0.5))
    with pytest.raises(DivergenceError) as info:
        train(model, X_BARS, Y_BARS, cfg)
    err = info.value
    assert err.model is not None
    for p in err.model.params():
        assert np.isfinite(p).all()
        assert np.abs(p).max() <= trainer.PARAM_BOUND
    assert err.log is not None


def test_rbm_training_through_trainer():
    rng = Rng(41)
    x = (rng.uniform(12, 9) > 0.5).astype(np.float64)
    model = rbm.init_rbm(9, 4, Rng(42))
    cfg = TrainingConfig(epochs=10, batch_size=4, seed=43,
                         optimizer=CdConfig(learning_rate=0.2,
                                            hidden_sampling=MEAN_FIELD))
    before = np.mean((rbm.reconstruct(model, x) - x) ** 2)
    m, log = train(model, x, None, cfg)
    after = np.mean((rbm.reconstruct(m, x) - x) ** 2)
    assert after < before
    assert len(log.records) == 10


def test_conflict_property_bars():
    """Negative learning must make the anomaly family reconstruct at
    least 3x worse than the normal family, while conventional training
    keeps the two within 1.5x, for identical budgets."""
    def ratio(q):
        model = dense.init_dense(16, 8, Rng(2), output_activation="sigmoid")
        cfg = TrainingConfig(
            epochs=500, batch_size=4, q_negative=q, seed=2,
            optimizer=OptimizerConfig(kind="sgd", learning_rate=0.5))
        m, _ = train(model, X_BARS, Y_BARS if q else None, cfg)
        return dense.loss(m, Y_BARS) / dense.loss(m, X_BARS)

    assert ratio(2) >= 3.0
    assert ratio(0) < 1.5


def test_training_config_validation():
    with pytest.raises(ValueError):
        toy_cfg(epochs=0)
    with pytest.raises(ValueError):
        toy_cfg(batch_size=0)
    with pytest.raises(ValueError):
        toy_cfg(q_negative=-1)
    with pytest.raises(ValueError):
        toy_cfg(negative_rate_ratio=0.0)


def test_trainlog_csv_and_json(tmp_path):
    _, log = train(toy_model(), X_BARS, Y_BARS, toy_cfg(epochs=3, q_negative=1),
                   eval_sets=EvalSets(X_BARS, Y_BARS))
    csv_path = tmp_path / "log.csv"
    json_path = tmp_path / "log.json"
    log.to_csv(csv_path, provenance="seed=5")
    log.to_json(json_path)
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "# seed=5"
    assert lines[1] == "epoch,positive_mse,negative_mse,auroc"
    assert len(lines) == 2 + 3
    import json as jsonlib
    payload = jsonlib.loads(json_path.read_text())
    assert len(payload["epochs"]) == 3
    assert all("wall_clock_sec" in r for r in payload["epochs"])
