"""Mini-batch training loop: adaptive-moment updates, seeding, logging.

One seeded PRNG drives the per-epoch shuffles, so (seed, config, dataset)
fully determines the trained model. The CSV log column wall_seconds is
written as 0.000 unless timing is explicitly enabled, keeping logs
byte-identical across repeated runs.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .data import Dataset
from .errors import EmptyDatasetError, ShapeMismatchError
from .hybrid import HybridModel, backward, forward_batch, save_checkpoint


@dataclass
class TrainConfig:
    learning_rate: float = 1e-3
    epochs: int = 5
    batch_size: int = 32
    seed: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self):
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be >= 0")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if not (0.0 <= self.beta1 < 1.0 and 0.0 <= self.beta2 < 1.0):
            raise ValueError("betas must lie in [0, 1)")


@dataclass
class OptimizerState:
    """First/second moment estimates per parameter group plus the step count."""

    m: dict[str, np.ndarray]
    v: dict[str, np.ndarray]
    t: int = 0

    @classmethod
    def init_like(cls, params: dict[str, np.ndarray]) -> "OptimizerState":
        return cls(
            m={k: np.zeros_like(p) for k, p in params.items()},
            v={k: np.zeros_like(p) for k, p in params.items()},
        )


def adam_step(
    params: dict[str, np.ndarray],
    grads: dict[str, np.ndarray],
    state: OptimizerState,
    config: TrainConfig,
) -> OptimizerState:
    """Bias-corrected adaptive-moment update, applied to params in place."""
    state.t += 1
    c1 = 1.0 - config.beta1**state.t
    c2 = 1.0 - config.beta2**state.t
    for key, p in params.items():
        g = grads[key]
        if g.shape != p.shape:
            raise ShapeMismatchError(f"gradient shape {g.shape} != param shape {p.shape} for {key}")
        m, v = state.m[key], state.v[key]
        m *= config.beta1
        m += (1.0 - config.beta1) * g
        v *= config.beta2
        v += (1.0 - config.beta2) * g * g
        p -= config.learning_rate * (m / c1) / (np.sqrt(v / c2) + config.eps)
    return state


@dataclass
class EpochStats:
    epoch: int
    train_mse: float
    wall_seconds: float


def write_log(trace: list[EpochStats], path: str):
    """CSV `epoch,train_mse,wall_seconds`."""
    lines = ["epoch,train_mse,wall_seconds"]
    for s in trace:
        lines.append(f"{s.epoch},{s.train_mse:.12e},{s.wall_seconds:.3f}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def fit(
    model: HybridModel,
    dataset: Dataset,
    config: TrainConfig,
    log_path: str | None = None,
    checkpoint_path: str | None = None,
    log_timing: bool = False,
) -> list[EpochStats]:
    """Train in place; returns the per-epoch loss trace (length = epochs).

    Each epoch shuffles with the seeded PRNG and walks contiguous
    mini-batches; the reported MSE averages the pre-update squared errors
    seen during the epoch. The checkpoint, if requested, is written once
    after the final epoch.
    """
    if len(dataset) == 0:
        raise EmptyDatasetError("cannot fit on an empty dataset")
    feats = dataset.features_array()
    targets = dataset.targets_array()
    n = len(dataset)

    params = model.parameters()
    state = OptimizerState.init_like(params)
    rng = np.random.default_rng(config.seed)
    trace: list[EpochStats] = []

    for epoch in range(1, config.epochs + 1):
        t0 = time.perf_counter()
        order = rng.permutation(n)
        total_sq = 0.0
        for start in range(0, n, config.batch_size):
            idx = order[start : start + config.batch_size]
            preds, cache = forward_batch(model, feats[idx])
            grads = backward(model, cache, targets[idx])
            total_sq += float(((preds - targets[idx]) ** 2).sum())
            adam_step(params, grads, state, config)
        wall = time.perf_counter() - t0 if log_timing else 0.0
        trace.append(EpochStats(epoch, total_sq / n, wall))

    if log_path is not None:
        write_log(trace, log_path)
    if checkpoint_path is not None:
        save_checkpoint(model, checkpoint_path)
    return trace
