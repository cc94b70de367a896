"""Training: MSE loss, explicit gradients, Adam, plateau decay, early stopping."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from nirm.model import (
    ModelConfig,
    ModelParameters,
    Topology,
    backward,
    build_features,
    forward,
    init_parameters,
)
from nirm.oracle import TrainingSample

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainConfig:
    lr: float = 1e-3
    l2: float = 1e-4
    lr_decay: float = 0.4
    batch_size: int = 6
    max_epochs: int = 50
    patience: int = 8
    plateau: int = 4
    val_fraction: float = 0.05
    seed: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    dropout: bool = True

    def __post_init__(self):
        for name in ("lr", "lr_decay", "val_fraction"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.l2 < 0:
            raise ValueError("l2 must be non-negative")
        if self.batch_size < 1 or self.patience < 1 or self.plateau < 1:
            raise ValueError("batch_size, patience and plateau must be >= 1")


def mse(labels, preds) -> float:
    labels = np.asarray(labels, dtype=np.float64)
    preds = np.asarray(preds, dtype=np.float64)
    if labels.shape != preds.shape:
        raise ValueError(f"shape mismatch: labels {labels.shape} vs predictions {preds.shape}")
    return float(np.mean((labels - preds) ** 2))


def l2_penalty(params: ModelParameters, l2: float) -> float:
    return l2 * sum(float(np.sum(t * t)) for t in params.tensors.values())


class _Prepared:
    """A training sample with its features and topology precomputed."""

    __slots__ = ("topo", "x", "labels")

    def __init__(self, sample: TrainingSample):
        self.topo = Topology(sample.graph)
        self.x = build_features(sample.graph)
        self.labels = np.asarray(sample.labels, dtype=np.float64)


def _prep(sample):
    return sample if isinstance(sample, _Prepared) else _Prepared(sample)


def sample_loss(sample, params: ModelParameters) -> float:
    """Eval-mode data loss (no dropout, no penalty)."""
    s = _prep(sample)
    state, _ = forward(s.topo, s.x, params)
    return mse(s.labels, state.s_dis)


def gradients(sample, params: ModelParameters, l2: float = 0.0, seed=None):
    """Loss and exact gradients for one sample.

    Dropout is drawn from ``np.random.default_rng(seed)`` when ``seed`` is
    not None; with ``seed=None`` the forward pass is deterministic. The L2
    term ``l2 * sum(theta**2)`` is included when ``l2 > 0``.
    """
    s = _prep(sample)
    rng = None if seed is None else np.random.default_rng(seed)
    state, cache = forward(s.topo, s.x, params, rng=rng, keep_cache=True)
    n = len(s.labels)
    loss = mse(s.labels, state.s_dis)
    grads = backward(s.topo, params, cache, 2.0 * (state.s_dis - s.labels) / n)
    if l2:
        loss += l2_penalty(params, l2)
        for name, t in params.tensors.items():
            grads[name] = grads[name] + 2.0 * l2 * t
    return loss, grads


@dataclass
class OptimizerState:
    m: dict
    v: dict
    step: int = 0
    lr: float = 1e-3

    @classmethod
    def for_params(cls, params: ModelParameters, lr: float) -> "OptimizerState":
        return cls(
            {k: np.zeros_like(t) for k, t in params.tensors.items()},
            {k: np.zeros_like(t) for k, t in params.tensors.items()},
            0,
            lr,
        )


def adam_step(state: OptimizerState, params: ModelParameters, grads: dict,
              cfg: TrainConfig = TrainConfig()) -> None:
    """Bias-corrected Adam update, in place on ``params`` and ``state``."""
    state.step += 1
    b1, b2 = cfg.beta1, cfg.beta2
    c1 = 1.0 - b1 ** state.step
    c2 = 1.0 - b2 ** state.step
    for name, t in params.tensors.items():
        g = grads[name]
        state.m[name] = b1 * state.m[name] + (1.0 - b1) * g
        state.v[name] = b2 * state.v[name] + (1.0 - b2) * g * g
        m_hat = state.m[name] / c1
        v_hat = state.v[name] / c2
        t -= state.lr * m_hat / (np.sqrt(v_hat) + cfg.eps)


@dataclass
class History:
    initial_val_loss: float
    epochs: list = field(default_factory=list)  # (epoch, train_loss, val_loss, lr)
    best_epoch: int = 0
    best_val_loss: float = np.inf

    def to_csv(self) -> str:
        lines = ["epoch,train_loss,val_loss,lr"]
        for e, tr, va, lr in self.epochs:
            lines.append(f"{e},{tr!r},{va!r},{lr!r}")
        return "\n".join(lines) + "\n"


def split_dataset(n: int, val_fraction: float, seed: int):
    """Seeded shuffle, then the first ``round(val_fraction * n)`` (>= 1) go to validation."""
    perm = np.random.default_rng([seed, 1]).permutation(n)
    n_val = max(1, int(round(val_fraction * n)))
    return perm[n_val:], perm[:n_val]


def usable(samples) -> list:
    """Drop degenerate samples whose labels are all zero."""
    return [s for s in samples if np.any(np.asarray(s.labels) > 0)]


def train(dataset, cfg: TrainConfig = TrainConfig(), model_cfg: ModelConfig = ModelConfig(),
          params: ModelParameters | None = None, progress=None):
    """Fit parameters; returns ``(best_params, history)``.

    ``progress``, if given, is called with each history row.
    """
    data = [_prep(s) for s in usable(dataset)]
    if not data:
        raise ValueError("dataset is empty")
    if len(data) < 2:
        raise ValueError("need at least two usable samples for a train/validation split")
    train_idx, val_idx = split_dataset(len(data), cfg.val_fraction, cfg.seed)
    if params is None:
        params = init_parameters(model_cfg, seed=cfg.seed)
    else:
        params = params.copy()

    def val_loss(p):
        return float(np.mean([sample_loss(data[i], p) for i in val_idx]))

    opt = OptimizerState.for_params(params, cfg.lr)
    hist = History(initial_val_loss=val_loss(params))
    best = params.copy()
    hist.best_val_loss = hist.initial_val_loss
    since_best = 0
    since_decay = 0
    order_rng = np.random.default_rng([cfg.seed, 2])
    for epoch in range(1, cfg.max_epochs + 1):
        order = order_rng.permutation(train_idx)
        batch_losses = []
        for b, start in enumerate(range(0, len(order), cfg.batch_size)):
            batch = order[start:start + cfg.batch_size]
            total = {k: np.zeros_like(t) for k, t in params.tensors.items()}
            losses = []
            for j, i in enumerate(batch):
                seed = [cfg.seed, epoch, b, j] if cfg.dropout else None
                loss, g = gradients(data[i], params, 0.0, seed)
                losses.append(loss)
                for k in total:
                    total[k] += g[k]
            for k, t in params.tensors.items():
                total[k] = total[k] / len(batch) + 2.0 * cfg.l2 * t
            adam_step(opt, params, total, cfg)
            batch_losses.append(np.mean(losses))
        vl = val_loss(params)
        row = (epoch, float(np.mean(batch_losses)), vl, opt.lr)
        hist.epochs.append(row)
        if progress is not None:
            progress(row)
        log.info("epoch %d train %.6f val %.6f lr %.2e", *row)
        if vl < hist.best_val_loss:
            hist.best_val_loss = vl
            hist.best_epoch = epoch
            best = params.copy()
            since_best = 0
            since_decay = 0
        else:
            since_best += 1
            since_decay += 1
            if since_best >= cfg.patience:
                break
            if since_decay >= cfg.plateau:
                opt.lr *= cfg.lr_decay
                since_decay = 0
    return best, hist
