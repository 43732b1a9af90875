"""Graph convolution with a learnable adjacency matrix.

Propagation per layer is ``Z = act(A @ Z_prev @ W)`` where A is derived from
the raw parameter matrix S by ``row_normalize(softplus(S) + I)``, so A is
always strictly positive and row-stochastic.  The readout aggregates node
embeddings by a column-wise mean.

All forward/backward functions accept node features of shape (N, d) or with
a leading batch axis (B, N, d); batched backward accumulates (sums) the
parameter gradients over the batch.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MissingCacheError, ShapeMismatchError

ACTIVATIONS = ("relu", "tanh", "identity")


@dataclass(frozen=True)
class GraphConfig:
    """Node count, layer widths [d_0, ..., d_L], and activation name."""

    n_nodes: int
    layer_dims: tuple[int, ...]
    activation: str = "relu"

    def __post_init__(self):
        if self.n_nodes < 1:
            raise ValueError("n_nodes must be >= 1")
        if len(self.layer_dims) < 2 or any(d < 1 for d in self.layer_dims):
            raise ValueError("layer_dims needs at least [d_0, d_1], all >= 1")
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"activation must be one of {ACTIVATIONS}")
        object.__setattr__(self, "layer_dims", tuple(int(d) for d in self.layer_dims))

    @property
    def n_layers(self) -> int:
        return len(self.layer_dims) - 1

    @property
    def out_dim(self) -> int:
        return self.layer_dims[-1]


def _act(p: np.ndarray, name: str) -> np.ndarray:
    if name == "relu":
        return np.maximum(p, 0.0)
    if name == "tanh":
        return np.tanh(p)
    return p


def _act_deriv(p: np.ndarray, z: np.ndarray, name: str) -> np.ndarray:
    if name == "relu":
        return (p > 0.0).astype(p.dtype)
    if name == "tanh":
        return 1.0 - z * z
    return np.ones_like(p)


def normalize_adjacency(S: np.ndarray) -> np.ndarray:
    """Positive row-stochastic adjacency from the raw parameter matrix.

    A = row_normalize(softplus(S) + I); the self-loop keeps every row sum
    strictly positive regardless of S.
    """
    S = np.asarray(S, dtype=np.float64)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise ShapeMismatchError(f"S must be square, got {S.shape}")
    B = np.logaddexp(0.0, S) + np.eye(S.shape[0])
    return B / B.sum(axis=1, keepdims=True)


def gcn_forward(Z_prev: np.ndarray, A: np.ndarray, W: np.ndarray, activation: str) -> np.ndarray:
    """One propagation step: act(A @ Z_prev @ W)."""
    Z_prev = np.asarray(Z_prev, dtype=np.float64)
    n = A.shape[0]
    if Z_prev.shape[-2] != n or W.shape[0] != Z_prev.shape[-1]:
        raise ShapeMismatchError(
            f"shapes do not chain: A {A.shape}, Z {Z_prev.shape}, W {W.shape}"
        )
    return _act(A @ Z_prev @ W, activation)


def aggregate(Z: np.ndarray) -> np.ndarray:
    """Column-wise mean over nodes."""
    return np.asarray(Z, dtype=np.float64).mean(axis=-2)


@dataclass
class GraphCache:
    """Forward intermediates retained for the backward pass."""

    S: np.ndarray
    A: np.ndarray
    Ws: list[np.ndarray]
    zs: list[np.ndarray]      # Z^0 .. Z^L
    pres: list[np.ndarray]    # pre-activations P_1 .. P_L
    hs: list[np.ndarray]      # H_l = Z^{l-1} @ W_l
    activation: str


def graph_forward(
    config: GraphConfig, S: np.ndarray, Ws: list[np.ndarray], Z0: np.ndarray
) -> tuple[np.ndarray, GraphCache]:
    """Full propagation and aggregation; returns (pooled vector, cache)."""
    Z0 = np.asarray(Z0, dtype=np.float64)
    if Z0.shape[-2:] != (config.n_nodes, config.layer_dims[0]):
        raise ShapeMismatchError(
            f"features {Z0.shape} do not match config "
            f"({config.n_nodes}, {config.layer_dims[0]})"
        )
    A = normalize_adjacency(S)
    zs, pres, hs = [Z0], [], []
    for W in Ws:
        H = zs[-1] @ W
        P = A @ H
        hs.append(H)
        pres.append(P)
        zs.append(_act(P, config.activation))
    cache = GraphCache(np.asarray(S, dtype=np.float64), A, list(Ws), zs, pres, hs, config.activation)
    return aggregate(zs[-1]), cache


def graph_backward(cache: GraphCache, upstream: np.ndarray):
    """Exact reverse-mode gradients {dS, dWs, dZ0} for graph_forward.

    ``upstream`` is d(loss)/d(pooled vector), shape (d_L,) or (B, d_L);
    with a batch axis the parameter gradients are summed over the batch.
    """
    if cache is None or not cache.zs:
        raise MissingCacheError("forward cache required")
    upstream = np.asarray(upstream, dtype=np.float64)
    n_nodes = cache.A.shape[0]
    dZ = np.repeat(upstream[..., None, :] / n_nodes, n_nodes, axis=-2)

    dWs = [None] * len(cache.Ws)
    dA = np.zeros_like(cache.A)
    for l in range(len(cache.Ws) - 1, -1, -1):
        dP = dZ * _act_deriv(cache.pres[l], cache.zs[l + 1], cache.activation)
        # P = A @ H with H = Z^{l-1} @ W
        dA += _batch_mat_accum(dP, _swap(cache.hs[l]))
        dH = _swap_mat(cache.A) @ dP
        dWs[l] = _batch_mat_accum(_swap(cache.zs[l]), dH)
        dZ = dH @ _swap_mat(cache.Ws[l])

    dS = _adjacency_backward(cache.S, cache.A, dA)
    return dS, dWs, dZ


def _swap(x: np.ndarray) -> np.ndarray:
    return np.swapaxes(x, -1, -2)


def _swap_mat(x: np.ndarray) -> np.ndarray:
    return x.T


def _batch_mat_accum(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matmul, summing any leading batch axes of the product."""
    prod = a @ b
    if prod.ndim > 2:
        prod = prod.reshape(-1, *prod.shape[-2:]).sum(axis=0)
    return prod


def _adjacency_backward(S: np.ndarray, A: np.ndarray, dA: np.ndarray) -> np.ndarray:
    # A = B / r with B = softplus(S) + I, r = row sums of B
    r = (np.logaddexp(0.0, S) + np.eye(S.shape[0])).sum(axis=1, keepdims=True)
    dB = (dA - (dA * A).sum(axis=1, keepdims=True)) / r
    sigmoid = 1.0 / (1.0 + np.exp(-S))
    return dB * sigmoid


def glorot_uniform(rng: np.random.Generator, d_in: int, d_out: int) -> np.ndarray:
    """Uniform init in +-sqrt(6 / (d_in + d_out))."""
    limit = np.sqrt(6.0 / (d_in + d_out))
    return rng.uniform(-limit, limit, size=(d_in, d_out))


def init_graph_params(config: GraphConfig, rng: np.random.Generator):
    """Zero adjacency logits (uniform mixing + self-loops) and Glorot weights."""
    S = np.zeros((config.n_nodes, config.n_nodes))
    Ws = [
        glorot_uniform(rng, config.layer_dims[l], config.layer_dims[l + 1])
        for l in range(config.n_layers)
    ]
    return S, Ws
