"""One-pass and adaptive dismantling, with NGCC curves and curve areas."""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import partial
from typing import Callable

import numpy as np

from nirm import centrality, kernels
from nirm.graph import Graph, gcc_size
from nirm.model import ModelParameters, intermediate_scores, nirm_rank

Scorer = Callable[[Graph, np.ndarray], np.ndarray]

METHODS = ("nirm", "nirm-is", "nirm-ls", "nirm-gs", "dc", "ci", "bc", "cc", "hc", "pc", "ec", "corehd")
STRATEGIES = ("one-pass", "adaptive")


@dataclass
class DismantleTrace:
    removal_order: list
    ngcc: list  # NGCC before any removal, then after each removal
    n: int

    @property
    def rho(self) -> float:
        return (len(self.ngcc) - 1) / self.n if self.n else 0.0

    @property
    def area(self) -> float:
        return ngcc_curve_area(self)

    def to_json(self, names=None) -> str:
        order = [names[v] for v in self.removal_order] if names is not None else self.removal_order
        return json.dumps(
            {"n": self.n, "removal_order": order, "ngcc": self.ngcc,
             "rho": self.rho, "area": self.area},
            indent=1,
        )

    def curve_csv(self) -> str:
        lines = ["removed,fraction_removed,ngcc"]
        for i, y in enumerate(self.ngcc):
            lines.append(f"{i},{i / self.n!r},{y!r}")
        return "\n".join(lines) + "\n"


def _within(gcc: int, n: int, theta: float) -> bool:
    return gcc <= theta * n + 1e-9


def ngcc_curve_area(trace: DismantleTrace) -> float:
    """Trapezoidal area under NGCC (%) against fraction removed (%)."""
    if len(trace.ngcc) < 2:
        return 0.0
    y = 100.0 * np.asarray(trace.ngcc)
    dx = 100.0 / trace.n
    return float(dx * (y[:-1] + y[1:]).sum() / 2.0)


def trace_from_order(g: Graph, order, theta: float) -> DismantleTrace:
    """Remove ``order`` front to back, stopping once NGCC <= theta."""
    order = [int(v) for v in order]
    curve = kernels.removal_gcc_curve(g.indptr, g.indices, np.zeros(g.n, np.uint8), order)
    stop = len(order)
    for t, size in enumerate(curve.tolist()):
        if _within(size, g.n, theta):
            stop = t
            break
    return DismantleTrace(order[:stop], (curve[:stop + 1] / g.n).tolist(), g.n)


def one_pass(g: Graph, scores, theta: float) -> DismantleTrace:
    """Remove nodes by descending intact-graph score (ties: lower id)."""
    return trace_from_order(g, centrality.ranking(np.asarray(scores, dtype=np.float64)), theta)


def adaptive(g: Graph, scorer: Scorer, theta: float) -> DismantleTrace:
    """Re-score the surviving graph and remove its top node, until NGCC <= theta."""
    mask = np.zeros(g.n, dtype=bool)
    gcc = gcc_size(g, mask)
    order, curve = [], [gcc / g.n]
    while not _within(gcc, g.n, theta):
        v = centrality.top_node(scorer(g, mask))
        if mask[v]:
            raise RuntimeError(f"scorer selected removed node {v}")
        mask[v] = True
        order.append(v)
        gcc = gcc_size(g, mask)
        curve.append(gcc / g.n)
    return DismantleTrace(order, curve, g.n)


def ablation_scores(g: Graph, mask, params: ModelParameters, which: str) -> np.ndarray:
    return intermediate_scores(g, mask, params, which)


def make_scorer(method: str, params: ModelParameters | None = None, ci_radius: int = 2) -> Scorer:
    if method.startswith("nirm"):
        if params is None:
            raise ValueError(f"method {method!r} needs a trained model")
        if method == "nirm":
            return partial(_nirm, params=params)
        which = {"nirm-is": "init", "nirm-ls": "local", "nirm-gs": "global"}[method]
        return partial(_ablation, params=params, which=which)
    if method == "ci":
        return partial(centrality.collective_influence, radius=ci_radius)
    if method in centrality.RANKERS:
        return centrality.RANKERS[method]
    raise ValueError(f"unknown method {method!r}; valid methods: {', '.join(METHODS)}")


def _nirm(g, mask, params):
    return nirm_rank(g, mask, params)


def _ablation(g, mask, params, which):
    return intermediate_scores(g, mask, params, which)


def dismantle(g: Graph, method: str, strategy: str, theta: float,
              params: ModelParameters | None = None, ci_radius: int = 2) -> DismantleTrace:
    if not 0.0 < theta <= 1.0:
        raise ValueError(f"theta must be in (0, 1], got {theta}")
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; valid: {', '.join(STRATEGIES)}")
    if method == "corehd":
        # inherently adaptive: same order under either strategy
        return trace_from_order(g, centrality.corehd_order(g, theta), theta)
    scorer = make_scorer(method, params, ci_radius)
    if strategy == "adaptive":
        return adaptive(g, scorer, theta)
    return one_pass(g, scorer(g, np.zeros(g.n, dtype=bool)), theta)
