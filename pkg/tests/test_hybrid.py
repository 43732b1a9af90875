"""Tests for the composed model: forward composition, exact gradients, checkpoints."""

import json

import numpy as np
import pytest

from oniq.errors import (
    BadMagicError,
    ShapeInconsistentError,
    ShapeMismatchError,
    TruncatedFileError,
    VersionMismatchError,
    ZeroVectorError,
)
from oniq.graph import GraphConfig, aggregate, gcn_forward, normalize_adjacency
from oniq.hybrid import (
    HybridModel,
    backward,
    forward,
    forward_batch,
    init_model,
    load_checkpoint,
    mse_loss,
    save_checkpoint,
)
from oniq.qsim import AnsatzSpec, amplitude_encode, expect_all_z, param_count, run_ansatz


def toy_model(kind="strongly", seed=0, activation="tanh"):
    config = GraphConfig(n_nodes=4, layer_dims=(3, 5, 4), activation=activation)
    spec = AnsatzSpec(kind=kind, n_layers=1, n_qubits=2, seed=3)
    return init_model(config, spec, seed=seed)


def toy_features(rng, batch=None, n_nodes=4, d0=3):
    shape = (n_nodes, d0) if batch is None else (batch, n_nodes, d0)
    return rng.normal(size=shape)


def fd_grads(model, feats, targets, keys, eps=1e-5):
    """Central-difference gradients of the batch-mean squared error."""
    params = model.parameters()
    out = {}
    for key in keys:
        arr = params[key]
        g = np.zeros_like(arr)
        if arr.size == 0:
            out[key] = g
            continue
        it = np.nditer(arr, flags=["multi_index"])
        for _ in it:
            idx = it.multi_index
            saved = arr[idx]
            arr[idx] = saved + eps
            lp = mse_loss(forward_batch(model, feats)[0], targets)
            arr[idx] = saved - eps
            lm = mse_loss(forward_batch(model, feats)[0], targets)
            arr[idx] = saved
            g[idx] = (lp - lm) / (2.0 * eps)
        out[key] = g
    return out


# ---------------------------------------------------------------------------
# forward


def test_forward_matches_composition_of_public_ops():
    rng = np.random.default_rng(11)
    model = toy_model(seed=5)
    feats = toy_features(rng)

    A = normalize_adjacency(model.S)
    Z = feats
    for W in model.Ws:
        Z = gcn_forward(Z, A, W, model.graph_config.activation)
    u = aggregate(Z) @ model.proj_w + model.proj_b
    state = amplitude_encode(u, model.spec.n_qubits)
    run_ansatz(state, model.spec, model.circ_params)
    expected = float(expect_all_z(state) @ model.readout_w + model.readout_b[0])

    pred, _ = forward(model, feats)
    assert pred == pytest.approx(expected, abs=1e-14)


def test_forward_batch_matches_per_sample():
    rng = np.random.default_rng(4)
    model = toy_model(kind="random", seed=1)
    feats = toy_features(rng, batch=5)
    preds, _ = forward_batch(model, feats)
    singles = np.array([forward(model, f)[0] for f in feats])
    np.testing.assert_array_equal(preds, singles)


def test_forward_is_deterministic():
    rng = np.random.default_rng(9)
    model = toy_model(seed=2)
    feats = toy_features(rng)
    assert forward(model, feats)[0] == forward(model, feats)[0]


def test_forward_rejects_bad_shapes():
    model = toy_model()
    with pytest.raises(ShapeMismatchError):
        forward(model, np.ones((4, 3, 1)))
    with pytest.raises(ShapeMismatchError):
        forward_batch(model, np.ones((4, 3)))
    with pytest.raises(ShapeMismatchError):
        forward(model, np.ones((5, 3)))


def test_forward_propagates_zero_vector_error():
    model = toy_model(activation="relu")
    # force the encoder input to the exact zero vector
    model.proj_w[:] = 0.0
    model.proj_b[:] = 0.0
    with pytest.raises(ZeroVectorError):
        forward(model, np.ones((4, 3)))


def test_readout_scaling_scales_prediction():
    rng = np.random.default_rng(3)
    model = toy_model(seed=8)
    feats = toy_features(rng)
    base, _ = forward(model, feats)
    model.readout_w *= 2.0
    model.readout_b *= 2.0
    doubled, _ = forward(model, feats)
    assert doubled == pytest.approx(2.0 * base, rel=1e-12)


def test_model_shape_validation():
    config = GraphConfig(n_nodes=2, layer_dims=(2, 3), activation="tanh")
    spec = AnsatzSpec(kind="basic", n_layers=1, n_qubits=2)
    good = init_model(config, spec)
    with pytest.raises(ShapeMismatchError):
        HybridModel(config, good.S, good.Ws, np.zeros((3, 5)), good.proj_b,
                    spec, good.circ_params, good.readout_w, good.readout_b)
    with pytest.raises(ShapeMismatchError):
        HybridModel(config, good.S, good.Ws, good.proj_w, good.proj_b,
                    spec, np.zeros(99), good.readout_w, good.readout_b)
    with pytest.raises(ShapeMismatchError):
        HybridModel(config, good.S, good.Ws, good.proj_w, good.proj_b,
                    spec, good.circ_params, np.zeros(3), good.readout_b)


def test_mse_loss_values():
    assert mse_loss(2.0, 2.0) == 0.0
    assert mse_loss(3.0, 1.0) == 4.0
    assert mse_loss(np.array([1.0, 3.0]), np.array([0.0, 0.0])) == 5.0


# ---------------------------------------------------------------------------
# gradients


@pytest.mark.parametrize("kind", ["strongly", "basic", "random"])
def test_backward_matches_finite_differences(kind):
    rng = np.random.default_rng(17)
    model = toy_model(kind=kind, seed=6)
    feats = toy_features(rng, batch=2)
    targets = rng.normal(size=2)
    _, cache = forward_batch(model, feats)
    grads = backward(model, cache, targets)
    fd = fd_grads(model, feats, targets, list(grads))
    for key, g in grads.items():
        np.testing.assert_allclose(g, fd[key], rtol=1e-4, atol=1e-7, err_msg=key)


def test_backward_random_ansatz_with_rotations_matches_finite_differences():
    config = GraphConfig(n_nodes=4, layer_dims=(3, 5, 4), activation="tanh")
    spec = AnsatzSpec(kind="random", n_layers=3, n_qubits=2, seed=1)
    model = init_model(config, spec, seed=6)
    assert param_count(spec) > 0
    rng = np.random.default_rng(17)
    feats = toy_features(rng, batch=2)
    targets = rng.normal(size=2)
    _, cache = forward_batch(model, feats)
    grads = backward(model, cache, targets)
    fd = fd_grads(model, feats, targets, list(grads))
    for key, g in grads.items():
        np.testing.assert_allclose(g, fd[key], rtol=1e-4, atol=1e-7, err_msg=key)


def test_backward_single_sample_matches_finite_differences():
    rng = np.random.default_rng(21)
    model = toy_model(seed=12)
    feats = toy_features(rng)
    target = 0.7
    _, cache = forward(model, feats)
    grads = backward(model, cache, target)
    fd = fd_grads(model, feats[None], np.array([target]), list(grads))
    for key, g in grads.items():
        np.testing.assert_allclose(g, fd[key], rtol=1e-4, atol=1e-7, err_msg=key)


def test_backward_zero_when_prediction_equals_target():
    rng = np.random.default_rng(30)
    model = toy_model(seed=4)
    feats = toy_features(rng)
    pred, cache = forward(model, feats)
    grads = backward(model, cache, pred)
    for key, g in grads.items():
        assert not np.any(g), key


def test_projection_bias_gradient_orthogonal_to_encoder_input():
    # gradients pass through the encoder's normalization, which discards
    # the radial direction, so d(loss)/du must be orthogonal to u
    rng = np.random.default_rng(14)
    model = toy_model(seed=9)
    feats = toy_features(rng)
    _, cache = forward(model, feats)
    grads = backward(model, cache, 1.5)
    du = grads["proj_b"]
    u = cache.u[0]
    assert abs(du @ u) < 1e-8 * max(1.0, np.linalg.norm(du) * np.linalg.norm(u))


def test_backward_requires_matching_target_count():
    rng = np.random.default_rng(2)
    model = toy_model()
    _, cache = forward_batch(model, toy_features(rng, batch=3))
    with pytest.raises(ShapeMismatchError):
        backward(model, cache, np.zeros(2))


def test_gradient_keys_match_parameters():
    rng = np.random.default_rng(5)
    model = toy_model()
    _, cache = forward(model, toy_features(rng))
    grads = backward(model, cache, 0.0)
    assert set(grads) == set(model.parameters())
    for key, g in grads.items():
        assert g.shape == model.parameters()[key].shape, key


# ---------------------------------------------------------------------------
# checkpoints


def test_checkpoint_round_trip_bit_identical(tmp_path):
    rng = np.random.default_rng(8)
    model = toy_model(kind="random", seed=13)
    feats = toy_features(rng, batch=4)
    preds, _ = forward_batch(model, feats)

    path = str(tmp_path / "model.hqgm")
    save_checkpoint(model, path)
    loaded = load_checkpoint(path)

    for key, arr in model.parameters().items():
        np.testing.assert_array_equal(arr, loaded.parameters()[key], err_msg=key)
    assert loaded.spec == model.spec
    assert loaded.graph_config == model.graph_config
    np.testing.assert_array_equal(forward_batch(loaded, feats)[0], preds)


def test_checkpoint_save_is_deterministic(tmp_path):
    model = toy_model(seed=1)
    p1, p2 = str(tmp_path / "a.hqgm"), str(tmp_path / "b.hqgm")
    save_checkpoint(model, p1)
    save_checkpoint(model, p2)
    assert open(p1, "rb").read() == open(p2, "rb").read()
    assert open(p1 + ".json").read() == open(p2 + ".json").read()


def test_checkpoint_sidecar_contents(tmp_path):
    model = toy_model(kind="strongly", seed=1)
    path = str(tmp_path / "model.hqgm")
    save_checkpoint(model, path)
    sidecar = json.load(open(path + ".json"))
    assert sidecar["format"] == "HQGM"
    assert sidecar["graph"]["layer_dims"] == [3, 5, 4]
    assert sidecar["ansatz"]["kind"] == "strongly"
    assert sidecar["ansatz"]["n_qubits"] == 2


def test_checkpoint_bad_magic(tmp_path):
    model = toy_model()
    path = str(tmp_path / "model.hqgm")
    save_checkpoint(model, path)
    data = bytearray(open(path, "rb").read())
    data[:4] = b"NOPE"
    open(path, "wb").write(bytes(data))
    with pytest.raises(BadMagicError):
        load_checkpoint(path)


def test_checkpoint_version_mismatch(tmp_path):
    model = toy_model()
    path = str(tmp_path / "model.hqgm")
    save_checkpoint(model, path)
    data = bytearray(open(path, "rb").read())
    data[4:8] = (99).to_bytes(4, "little")
    open(path, "wb").write(bytes(data))
    with pytest.raises(VersionMismatchError):
        load_checkpoint(path)


def test_checkpoint_truncated(tmp_path):
    model = toy_model()
    path = str(tmp_path / "model.hqgm")
    save_checkpoint(model, path)
    data = open(path, "rb").read()
    open(path, "wb").write(data[: len(data) - 5])
    with pytest.raises(TruncatedFileError):
        load_checkpoint(path)


def test_checkpoint_trailing_bytes(tmp_path):
    model = toy_model()
    path = str(tmp_path / "model.hqgm")
    save_checkpoint(model, path)
    with open(path, "ab") as fh:
        fh.write(b"\x00" * 8)
    with pytest.raises(ShapeInconsistentError):
        load_checkpoint(path)


def test_checkpoint_missing_sidecar(tmp_path):
    model = toy_model()
    path = str(tmp_path / "model.hqgm")
    save_checkpoint(model, path)
    (tmp_path / "model.hqgm.json").unlink()
    with pytest.raises(FileNotFoundError):
        load_checkpoint(path)
