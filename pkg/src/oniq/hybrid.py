"""The composed forecasting model and its end-to-end gradients.

Pipeline per sample: GCN propagation -> node-mean pooling -> trainable
linear projection up to 2**n_qubits features -> amplitude encoding ->
variational circuit -> per-qubit <Z> readout -> scalar index prediction
via a linear map plus bias.

Circuit parameter gradients use the parameter-shift rule; gradients into
the classical stack flow through the encoder normalization Jacobian.
Checkpoints are written as a single "HQGM" binary (length-prefixed
little-endian float64 arrays) plus a JSON sidecar holding the config; the
exact layout is documented in the package README.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass

import numpy as np

from . import qsim
from .errors import (
    BadMagicError,
    MissingCacheError,
    ShapeInconsistentError,
    ShapeMismatchError,
    TruncatedFileError,
    VersionMismatchError,
)
from .graph import GraphCache, GraphConfig, glorot_uniform, graph_backward, graph_forward, init_graph_params
from .qsim import AnsatzSpec

CHECKPOINT_MAGIC = b"HQGM"
CHECKPOINT_VERSION = 1


@dataclass
class HybridModel:
    """All trainable state: graph, projection, circuit, and readout."""

    graph_config: GraphConfig
    S: np.ndarray
    Ws: list[np.ndarray]
    proj_w: np.ndarray
    proj_b: np.ndarray
    spec: AnsatzSpec
    circ_params: np.ndarray
    readout_w: np.ndarray
    readout_b: np.ndarray  # length-1 array so the optimizer treats it uniformly

    def __post_init__(self):
        dim = 1 << self.spec.n_qubits
        d_out = self.graph_config.out_dim
        if self.proj_w.shape != (d_out, dim) or self.proj_b.shape != (dim,):
            raise ShapeMismatchError("projection does not bridge graph output to 2**n_qubits")
        if self.readout_w.shape != (self.spec.n_qubits,) or self.readout_b.shape != (1,):
            raise ShapeMismatchError("readout width must equal n_qubits")
        if self.circ_params.shape != (qsim.param_count(self.spec),):
            raise ShapeMismatchError("circuit parameter count does not match the spec")

    def parameters(self) -> dict[str, np.ndarray]:
        """Named views of every trainable array (updated in place by the optimizer)."""
        params = {"S": self.S}
        for l, W in enumerate(self.Ws):
            params[f"W{l}"] = W
        params.update(
            proj_w=self.proj_w,
            proj_b=self.proj_b,
            circ=self.circ_params,
            readout_w=self.readout_w,
            readout_b=self.readout_b,
        )
        return params


def init_model(graph_config: GraphConfig, spec: AnsatzSpec, seed: int = 0) -> HybridModel:
    """Seeded initialization.

    Adjacency logits start at zero (uniform mixing plus self-loops), weights
    are Glorot-uniform, the projection bias is a small positive constant so
    the encoder input cannot start at the zero vector, and circuit angles
    are uniform in [0, 2*pi).
    """
    rng = np.random.default_rng(seed)
    S, Ws = init_graph_params(graph_config, rng)
    dim = 1 << spec.n_qubits
    proj_w = glorot_uniform(rng, graph_config.out_dim, dim)
    proj_b = np.full(dim, 0.1)
    circ_params = rng.uniform(0.0, 2.0 * np.pi, size=qsim.param_count(spec))
    readout_w = glorot_uniform(rng, spec.n_qubits, 1)[:, 0]
    return HybridModel(
        graph_config, S, Ws, proj_w, proj_b, spec, circ_params, readout_w, np.zeros(1)
    )


@dataclass
class ForwardCache:
    graph: GraphCache
    v: np.ndarray       # pooled graph output (B, d_L)
    u: np.ndarray       # projected encoder input (B, 2**n)
    a: np.ndarray       # encoded real amplitudes (B, 2**n)
    e: np.ndarray       # per-qubit <Z> (B, n_qubits)
    preds: np.ndarray   # (B,)


def forward_batch(model: HybridModel, features: np.ndarray) -> tuple[np.ndarray, ForwardCache]:
    """Predictions for a stack of feature matrices, shape (B, N, d_0)."""
    features = np.asarray(features, dtype=np.float64)
    if features.ndim != 3:
        raise ShapeMismatchError(f"expected (B, N, d_0) features, got {features.shape}")
    n = model.spec.n_qubits
    v, gcache = graph_forward(model.graph_config, model.S, model.Ws, features)
    u = v @ model.proj_w + model.proj_b
    a = qsim._encode_rows(u, n)
    psi = qsim._run_gates(a.astype(np.complex128), n, qsim.build_sequence(model.spec), model.circ_params)
    e = qsim._expect_all_z(psi, n)
    preds = e @ model.readout_w + model.readout_b[0]
    return preds, ForwardCache(gcache, v, u, a, e, preds)


def forward(model: HybridModel, features: np.ndarray) -> tuple[float, ForwardCache]:
    """Scalar index prediction for one N x d_0 feature matrix."""
    features = np.asarray(features, dtype=np.float64)
    if features.ndim != 2:
        raise ShapeMismatchError(f"expected (N, d_0) features, got {features.shape}")
    preds, cache = forward_batch(model, features[None])
    return float(preds[0]), cache


def mse_loss(pred, target) -> float:
    """Squared error; the mean over a batch for array arguments."""
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    return float(np.mean((pred - target) ** 2))


def backward(model: HybridModel, cache: ForwardCache, target) -> dict[str, np.ndarray]:
    """Gradients of the (batch-mean) squared error for every parameter group.

    Keys match :meth:`HybridModel.parameters`.
    """
    if cache is None:
        raise MissingCacheError("forward cache required")
    targets = np.atleast_1d(np.asarray(target, dtype=np.float64))
    B = cache.preds.shape[0]
    if targets.shape != (B,):
        raise ShapeMismatchError(f"expected {B} targets, got {targets.shape}")
    n = model.spec.n_qubits

    gy = 2.0 * (cache.preds - targets) / B
    grads: dict[str, np.ndarray] = {
        "readout_b": np.array([gy.sum()]),
        "readout_w": cache.e.T @ gy,
    }
    de = gy[:, None] * model.readout_w[None, :]

    # circuit angles via the parameter-shift rule, all qubits per shifted run
    a_c = cache.a.astype(np.complex128)
    shift_table = qsim._param_shift_table(model.spec, model.circ_params, a_c)
    grads["circ"] = np.einsum("pbq,bq->p", shift_table, de)

    # encoder input: observable sum_q de_q Z_q backpropagated through the circuit
    zdiags = np.stack([qsim._z_diag(n, q) for q in range(n)])
    diag = de @ zdiags
    ma = qsim._observable_backprop(model.spec, model.circ_params, a_c, diag)
    ga = 2.0 * ma.real
    unorm = np.linalg.norm(cache.u, axis=-1, keepdims=True)
    du = (ga - (ga * cache.a).sum(axis=-1, keepdims=True) * cache.a) / unorm

    grads["proj_b"] = du.sum(axis=0)
    grads["proj_w"] = cache.v.T @ du
    dv = du @ model.proj_w.T

    dS, dWs, _ = graph_backward(cache.graph, dv)
    grads["S"] = dS
    for l, dW in enumerate(dWs):
        grads[f"W{l}"] = dW
    return grads


# ---------------------------------------------------------------------------
# checkpoint io


def _checkpoint_arrays(model: HybridModel) -> list[np.ndarray]:
    return (
        [model.S]
        + list(model.Ws)
        + [model.proj_w, model.proj_b, model.circ_params, model.readout_w, model.readout_b]
    )


def save_checkpoint(model: HybridModel, path: str):
    """Write the HQGM binary and its JSON config sidecar (<path>.json)."""
    arrays = _checkpoint_arrays(model)
    blob = bytearray()
    blob += struct.pack("<4sII", CHECKPOINT_MAGIC, CHECKPOINT_VERSION, len(arrays))
    for arr in arrays:
        flat = np.ascontiguousarray(arr, dtype="<f8").reshape(-1)
        blob += struct.pack("<Q", flat.size)
        blob += flat.tobytes()
    with open(path, "wb") as fh:
        fh.write(blob)
    sidecar = {
        "format": "HQGM",
        "version": CHECKPOINT_VERSION,
        "graph": {
            "n_nodes": model.graph_config.n_nodes,
            "layer_dims": list(model.graph_config.layer_dims),
            "activation": model.graph_config.activation,
        },
        "ansatz": {
            "kind": model.spec.kind,
            "n_layers": model.spec.n_layers,
            "n_qubits": model.spec.n_qubits,
            "seed": model.spec.seed,
            "ranges": list(model.spec.ranges) if model.spec.ranges is not None else None,
        },
    }
    with open(path + ".json", "w") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_checkpoint(path: str) -> HybridModel:
    """Reconstruct a model from the HQGM binary and its sidecar."""
    with open(path + ".json") as fh:
        sidecar = json.load(fh)
    config = GraphConfig(
        n_nodes=sidecar["graph"]["n_nodes"],
        layer_dims=tuple(sidecar["graph"]["layer_dims"]),
        activation=sidecar["graph"]["activation"],
    )
    ans = sidecar["ansatz"]
    spec = AnsatzSpec(
        kind=ans["kind"],
        n_layers=ans["n_layers"],
        n_qubits=ans["n_qubits"],
        seed=ans["seed"],
        ranges=tuple(ans["ranges"]) if ans["ranges"] is not None else None,
    )

    with open(path, "rb") as fh:
        data = fh.read()
    if data[:4] != CHECKPOINT_MAGIC:
        raise BadMagicError(f"not an HQGM file: {path}")
    if len(data) < 12:
        raise TruncatedFileError("header cut short")
    version, n_arrays = struct.unpack_from("<II", data, 4)
    if version != CHECKPOINT_VERSION:
        raise VersionMismatchError(f"unsupported checkpoint version {version}")
    arrays = []
    offset = 12
    for _ in range(n_arrays):
        if offset + 8 > len(data):
            raise TruncatedFileError("array header cut short")
        (count,) = struct.unpack_from("<Q", data, offset)
        offset += 8
        end = offset + 8 * count
        if end > len(data):
            raise TruncatedFileError("array payload cut short")
        arrays.append(np.frombuffer(data[offset:end], dtype="<f8").copy())
        offset = end
    if offset != len(data):
        raise ShapeInconsistentError("trailing bytes after declared arrays")

    dims = config.layer_dims
    dim = 1 << spec.n_qubits
    shapes = (
        [(config.n_nodes, config.n_nodes)]
        + [(dims[l], dims[l + 1]) for l in range(config.n_layers)]
        + [(config.out_dim, dim), (dim,), (qsim.param_count(spec),), (spec.n_qubits,), (1,)]
    )
    if len(arrays) != len(shapes):
        raise ShapeInconsistentError(f"expected {len(shapes)} arrays, found {len(arrays)}")
    shaped = []
    for arr, shape in zip(arrays, shapes):
        if arr.size != int(np.prod(shape)):
            raise ShapeInconsistentError(f"array of {arr.size} values cannot fill {shape}")
        shaped.append(arr.reshape(shape))

    L = config.n_layers
    return HybridModel(
        config,
        shaped[0],
        shaped[1 : 1 + L],
        shaped[1 + L],
        shaped[2 + L],
        spec,
        shaped[3 + L],
        shaped[4 + L],
        shaped[5 + L],
    )
