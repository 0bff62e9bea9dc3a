import numpy as np
import pytest

from neglearn import modelio
from neglearn.data import Dataset, NormalizationRecord
from neglearn.dense import init_dense
from neglearn.errors import DataFormatError
from neglearn.rbm import init_rbm
from neglearn.rng import Rng


def test_rbm_round_trip(tmp_path):
    m = init_rbm(9, 4, Rng(1))
    p = tmp_path / "m.nlm"
    modelio.save_model(p, m)
    back = modelio.load_model(p)
    np.testing.assert_array_equal(back.weights, m.weights)
    np.testing.assert_array_equal(back.visible_bias, m.visible_bias)
    np.testing.assert_array_equal(back.hidden_bias, m.hidden_bias)


def test_dense_round_trip(tmp_path):
    m = init_dense(7, 3, Rng(2), output_activation="identity")
    p = tmp_path / "m.nlm"
    modelio.save_model(p, m)
    back = modelio.load_model(p)
    assert back.output_activation == "identity"
    for a, b in zip(back.params(), m.params()):
        np.testing.assert_array_equal(a, b)


def test_save_is_byte_deterministic(tmp_path):
    m = init_dense(5, 2, Rng(3))
    p1, p2 = tmp_path / "a.nlm", tmp_path / "b.nlm"
    modelio.save_model(p1, m)
    modelio.save_model(p2, m)
    assert p1.read_bytes() == p2.read_bytes()


def test_bad_magic_rejected(tmp_path):
    p = tmp_path / "junk.nlm"
    p.write_bytes(b"XXXX" + b"\x00" * 20)
    with pytest.raises(DataFormatError, match="magic"):
        modelio.load_model(p)


def test_truncation_names_offset(tmp_path):
    m = init_rbm(6, 3, Rng(4))
    p = tmp_path / "m.nlm"
    modelio.save_model(p, m)
    clipped = tmp_path / "clipped.nlm"
    clipped.write_bytes(p.read_bytes()[:40])
    with pytest.raises(DataFormatError, match="byte offset"):
        modelio.load_model(clipped)


def test_trailing_bytes_rejected(tmp_path):
    m = init_rbm(4, 2, Rng(5))
    p = tmp_path / "m.nlm"
    modelio.save_model(p, m)
    p.write_bytes(p.read_bytes() + b"\x00")
    with pytest.raises(DataFormatError, match="trailing"):
        modelio.load_model(p)


def test_dataset_round_trip(tmp_path):
    ds = Dataset(Rng(6).uniform(8, 5), labels=np.arange(8),
                 image_shape=(1, 5),
                 normalization=NormalizationRecord(0.25, 1.5))
    p = tmp_path / "d.nld"
    modelio.save_dataset(p, ds)
    back = modelio.load_dataset(p)
    np.testing.assert_array_equal(back.samples, ds.samples)
    np.testing.assert_array_equal(back.labels, ds.labels)
    assert back.image_shape == (1, 5)
    assert back.normalization == ds.normalization


def test_dataset_without_optionals(tmp_path):
    ds = Dataset(Rng(7).uniform(3, 4))
    p = tmp_path / "d.nld"
    modelio.save_dataset(p, ds)
    back = modelio.load_dataset(p)
    assert back.labels is None and back.normalization is None
    np.testing.assert_array_equal(back.samples, ds.samples)


def test_kind_confusion_rejected(tmp_path):
    ds = Dataset(Rng(8).uniform(3, 4))
    p = tmp_path / "d.nld"
    modelio.save_dataset(p, ds)
    with pytest.raises(DataFormatError, match="not a model file"):
        modelio.load_model(p)
    m = init_rbm(3, 2, Rng(9))
    q = tmp_path / "m.nlm"
    modelio.save_model(q, m)
    with pytest.raises(DataFormatError, match="not a dataset file"):
        modelio.load_dataset(q)


def test_json_variant_round_trip(tmp_path):
    for model in (init_rbm(4, 3, Rng(10)), init_dense(4, 2, Rng(11))):
        p = tmp_path / "m.json"
        modelio.save_model_json(p, model)
        back = modelio.load_model_json(p)
        assert type(back) is type(model)
        if hasattr(model, "weights"):
            np.testing.assert_array_equal(back.weights, model.weights)
        else:
            np.testing.assert_array_equal(back.encoder_weights,
                                          model.encoder_weights)


def test_binary_and_json_agree(tmp_path):
    m = init_rbm(5, 2, Rng(12))
    pb, pj = tmp_path / "m.nlm", tmp_path / "m.json"
    modelio.save_model(pb, m)
    modelio.save_model_json(pj, m)
    a = modelio.load_model(pb)
    b = modelio.load_model_json(pj)
    np.testing.assert_array_equal(a.weights, b.weights)
