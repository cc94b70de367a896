"""Exhaustive minimum attack sets and training labels for tiny graphs."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from nirm import kernels
from nirm.graph import Graph


class SearchBudgetError(RuntimeError):
    pass


@dataclass(frozen=True)
class OracleConfig:
    theta_train: float = 0.2
    max_tas_size: int = 12
    label_mode: str = "score"  # or "rank"

    def __post_init__(self):
        if not 0.0 < self.theta_train <= 1.0:
            raise ValueError(f"theta_train must be in (0, 1], got {self.theta_train}")
        if self.label_mode not in ("score", "rank"):
            raise ValueError(f"label_mode must be 'score' or 'rank', got {self.label_mode!r}")


@dataclass
class TrainingSample:
    graph: Graph
    optimal_sets: list[tuple[int, ...]]
    initial_scores: np.ndarray
    scores: np.ndarray  # propagated, before normalization
    labels: np.ndarray

    @property
    def k_star(self) -> int:
        return len(self.optimal_sets[0]) if self.optimal_sets else 0


def gcc_limit(theta: float, n: int) -> int:
    """Largest residual component allowed: ``ceil(theta * n)``.

    Rounded to 9 decimals first so products like ``0.3 * 10`` do not ceil up
    through floating-point noise.
    """
    return int(math.ceil(round(theta * n, 9)))


def _bitmasks(g: Graph) -> list[int]:
    out = []
    for v in range(g.n):
        bits = 0
        for w in g.neighbors(v).tolist():
            bits |= 1 << w
        out.append(bits)
    return out


def _unpack(bits: int) -> tuple[int, ...]:
    out = []
    while bits:
        low = bits & -bits
        out.append(low.bit_length() - 1)
        bits ^= low
    return tuple(out)


def find_all_min_tas(g: Graph, cfg: OracleConfig = OracleConfig()) -> list[tuple[int, ...]]:
    """Every minimum-size node set whose removal leaves all components small.

    "Small" means at most ``gcc_limit(cfg.theta_train, n)`` nodes. Sets are
    sorted tuples, listed lexicographically. An already-dismantled graph
    yields ``[()]``.
    """
    limit = gcc_limit(cfg.theta_train, g.n)
    adj = _bitmasks(g)
    for k in range(0, g.n + 1):
        if k > cfg.max_tas_size:
            raise SearchBudgetError(
                f"minimum attack set exceeds max_tas_size={cfg.max_tas_size} (n={g.n})"
            )
        found = kernels.min_tas_search(adj, g.n, limit, k)
        if found:
            return sorted(_unpack(b) for b in found)
    raise AssertionError("removing every node always satisfies the threshold")


def initial_scores(g: Graph, optimal_sets) -> np.ndarray:
    """Appearance count of each node across the optimal sets over the max count."""
    if not optimal_sets:
        raise ValueError("optimal_sets must not be empty")
    counts = np.zeros(g.n, dtype=np.float64)
    for s in optimal_sets:
        counts[list(s)] += 1.0
    top = counts.max()
    return counts / top if top > 0 else counts


def propagate_scores(g: Graph, c0) -> np.ndarray:
    """Each node keeps its score and splits it equally among its neighbors."""
    c0 = np.asarray(c0, dtype=np.float64)
    deg = g.degrees
    share = np.divide(c0, deg, out=np.zeros_like(c0), where=deg > 0)
    received = np.bincount(g.sources, weights=share[g.indices], minlength=g.n)
    return received + c0


def rank_labels(c: np.ndarray) -> np.ndarray:
    """Dense ranks of ``c`` scaled to [0, 1]; zero scores map to 0."""
    values = np.unique(c)
    if len(values) < 2:
        return np.zeros_like(c) if values.size == 0 or values[0] == 0 else np.ones_like(c)
    idx = np.searchsorted(values, c).astype(np.float64)
    if values[0] > 0:
        idx += 1
        return idx / len(values)
    return idx / (len(values) - 1)


def label_sample(g: Graph, cfg: OracleConfig = OracleConfig()) -> TrainingSample:
    sets = find_all_min_tas(g, cfg)
    if sets == [()]:
        zeros = np.zeros(g.n)
        return TrainingSample(g, sets, zeros, zeros.copy(), zeros.copy())
    c0 = initial_scores(g, sets)
    c = propagate_scores(g, c0)
    if cfg.label_mode == "rank":
        labels = rank_labels(c)
    else:
        labels = c / c.max()
    return TrainingSample(g, sets, c0, c, labels)
