"""Seeded generators for the tiny synthetic training networks."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from nirm.graph import Graph

MODELS = ("ER", "WS", "BA", "PLC")
MAX_ATTEMPTS = 1000


class GenerationError(RuntimeError):
    pass


@dataclass(frozen=True)
class GeneratorSpec:
    model: str
    n: int
    p: float = 0.0
    k: int = 0
    m: int = 0
    seed: int = 0

    def validate(self) -> None:
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}; expected one of {MODELS}")
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.model in ("ER", "WS", "PLC") and not 0.0 <= self.p <= 1.0:
            raise ValueError(f"{self.model} needs 0 <= p <= 1, got {self.p}")
        if self.model == "WS" and (self.k % 2 or not 0 <= self.k < self.n):
            raise ValueError(f"WS needs even k < n, got k={self.k}, n={self.n}")
        if self.model in ("BA", "PLC") and not 1 <= self.m < self.n:
            raise ValueError(f"{self.model} needs 1 <= m < n, got m={self.m}, n={self.n}")

    def to_dict(self) -> dict:
        return asdict(self)


def default_spec(model: str, n: int, seed: int = 0) -> GeneratorSpec:
    """Training-set parameters: ER p=0.1, WS k=4 p=0.1, BA m=3, PLC m=3 p=0.05."""
    params = {
        "ER": dict(p=0.1),
        "WS": dict(k=4, p=0.1),
        "BA": dict(m=3),
        "PLC": dict(m=3, p=0.05),
    }[model]
    return GeneratorSpec(model=model, n=n, seed=seed, **params)


def _erdos_renyi(n, p, rng):
    iu, ju = np.triu_indices(n, 1)
    keep = rng.random(len(iu)) < p
    return list(zip(iu[keep].tolist(), ju[keep].tolist()))


def _watts_strogatz(n, k, p, rng):
    adj = [set() for _ in range(n)]
    for j in range(1, k // 2 + 1):
        for u in range(n):
            v = (u + j) % n
            adj[u].add(v)
            adj[v].add(u)
    for j in range(1, k // 2 + 1):
        for u in range(n):
            v = (u + j) % n
            if v not in adj[u] or rng.random() >= p:
                continue
            choices = [w for w in range(n) if w != u and w not in adj[u]]
            if not choices:
                continue
            w = choices[rng.integers(len(choices))]
            adj[u].discard(v)
            adj[v].discard(u)
            adj[u].add(w)
            adj[w].add(u)
    return [(u, v) for u in range(n) for v in adj[u] if u < v]


def _pick_targets(repeated, m, n_seed, rng):
    """``m`` distinct nodes drawn with probability proportional to degree.

    ``repeated`` lists each node once per incident edge; while it is empty
    the targets come uniformly from the seed nodes.
    """
    if not repeated:
        return rng.permutation(n_seed)[:m].tolist()
    targets: list[int] = []
    while len(targets) < m:
        t = repeated[rng.integers(len(repeated))]
        if t not in targets:
            targets.append(t)
    return targets


def _barabasi_albert(n, m, rng):
    edges = []
    repeated: list[int] = []
    for src in range(m, n):
        for t in _pick_targets(repeated, m, m, rng):
            edges.append((t, src))
            repeated.append(t)
        repeated.extend([src] * m)
    return edges


def _powerlaw_cluster(n, m, p, rng):
    adj = [set() for _ in range(n)]
    repeated: list[int] = []
    for src in range(m, n):
        targets = _pick_targets(repeated, m, m, rng)
        target = targets.pop()
        adj[src].add(target)
        adj[target].add(src)
        repeated.append(target)
        count = 1
        while count < m:
            if rng.random() < p:
                closable = sorted(w for w in adj[target] if w != src and w not in adj[src])
                if closable:
                    w = closable[rng.integers(len(closable))]
                    adj[src].add(w)
                    adj[w].add(src)
                    repeated.append(w)
                    count += 1
                    continue
            # preferential attachment; targets may have been used by closures
            while targets and targets[-1] in adj[src]:
                targets.pop()
            if not targets:
                targets = [t for t in _pick_targets(repeated, m, m, rng) if t not in adj[src]]
                if not targets:
                    continue
            target = targets.pop()
            adj[src].add(target)
            adj[target].add(src)
            repeated.append(target)
            count += 1
        repeated.extend([src] * m)
    return [(u, v) for u in range(n) for v in adj[u] if u < v]


def sample_once(spec: GeneratorSpec, rng: np.random.Generator) -> Graph:
    """One draw from the model, with no connectivity filter."""
    if spec.model == "ER":
        edges = _erdos_renyi(spec.n, spec.p, rng)
    elif spec.model == "WS":
        edges = _watts_strogatz(spec.n, spec.k, spec.p, rng)
    elif spec.model == "BA":
        edges = _barabasi_albert(spec.n, spec.m, rng)
    else:
        edges = _powerlaw_cluster(spec.n, spec.m, spec.p, rng)
    return Graph.from_edges(spec.n, edges)


def generate(spec: GeneratorSpec) -> Graph:
    """Connected graph from ``spec``; deterministic in ``spec.seed``.

    Disconnected draws are discarded and redrawn from a fresh seed derived
    from ``(spec.seed, attempt)``.
    """
    spec.validate()
    for attempt in range(MAX_ATTEMPTS):
        rng = np.random.default_rng([spec.seed, attempt])
        g = sample_once(spec, rng)
        if g.is_connected():
            return g
    raise GenerationError(f"no connected graph after {MAX_ATTEMPTS} attempts for {spec}")


def derive_seed(master_seed: int, index: int) -> int:
    ss = np.random.SeedSequence([master_seed, index])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def dataset_specs(count: int, size_range=(20, 30), master_seed: int = 0, start: int = 0):
    """Specs for graphs ``start..start+count-1``: models cycled, sizes uniform."""
    if count < 1:
        raise ValueError("count must be at least 1")
    n_min, n_max = size_range
    out = []
    for idx in range(start, start + count):
        seed = derive_seed(master_seed, idx)
        n = int(np.random.default_rng([seed, 0xC0FFEE]).integers(n_min, n_max + 1))
        out.append(default_spec(MODELS[idx % len(MODELS)], n, seed))
    return out


def generate_dataset(count: int, size_range=(20, 30), master_seed: int = 0) -> list[Graph]:
    return [generate(s) for s in dataset_specs(count, size_range, master_seed)]
