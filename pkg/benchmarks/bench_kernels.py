"""Time the compiled kernels against the pure-Python fallback.

Usage: python benchmarks/bench_kernels.py [--n 3000] [--repeat 3]

Each kernel runs on the same inputs under both backends; outputs are checked
for agreement before timings are reported.
"""

import argparse
import time

import numpy as np

from nirm.generators import GeneratorSpec, dataset_specs, generate
from nirm.kernels import available_backends
from nirm.oracle import OracleConfig, gcc_limit


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def same(a, b):
    if isinstance(a, tuple):
        return all(same(x, y) for x, y in zip(a, b))
    if isinstance(a, list):
        return sorted(a) == sorted(b)
    if isinstance(a, (int, np.integer)):
        return a == b
    return np.allclose(a, b, rtol=1e-12, atol=1e-12)


def cases(n, seed):
    g = generate(GeneratorSpec("BA", n, m=3, seed=seed))
    small = generate(GeneratorSpec("BA", n // 10, m=3, seed=seed))
    rng = np.random.default_rng(seed)
    removed = (rng.random(g.n) < 0.05).astype(np.uint8)
    keep = np.zeros(g.n, np.uint8)
    order = rng.permutation(g.n).astype(np.int64)
    ones = np.ones(small.n)
    tiny = [generate(s) for s in dataset_specs(20, master_seed=seed)]
    masks = []
    for t in tiny:
        adj = [0] * t.n
        for u, v in ((int(a), int(b)) for a, b in t.edges()):
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        masks.append((adj, t.n, gcc_limit(OracleConfig().theta_train, t.n)))

    def search(k_mod):
        out = []
        for adj, nn, limit in masks:
            for k in range(nn + 1):
                found = k_mod.min_tas_search(adj, nn, limit, k)
                if found:
                    out.append(len(found))
                    break
        return out

    return [
        (f"component_labels n={g.n}", lambda k: k.component_labels(g.indptr, g.indices, removed)),
        (f"removal_gcc_curve n={g.n}", lambda k: k.removal_gcc_curve(g.indptr, g.indices, keep, order)),
        (f"local_counts n={g.n}", lambda k: k.local_counts(g.indptr, g.indices, removed)),
        (f"ball_surface r=2 n={g.n}", lambda k: k.ball_surface(g.indptr, g.indices, removed, 2)),
        (f"brandes n={small.n}", lambda k: k.brandes(small.indptr, small.indices, np.zeros(small.n, np.uint8), ones)),
        (f"distance_sums n={small.n}", lambda k: k.distance_sums(small.indptr, small.indices,
                                                                 np.zeros(small.n, np.uint8))),
        ("min_tas_search 20 training graphs", search),
    ]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=3000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    backends = available_backends()
    if "cython" not in backends:
        print("compiled extension not built; only the Python backend is available")
    print(f"{'kernel':38s} {'python s':>10s} {'cython s':>10s} {'speedup':>8s}")
    for name, fn in cases(args.n, args.seed):
        tp, op = best_of(lambda: fn(backends["python"]), args.repeat)
        if "cython" in backends:
            tc, oc = best_of(lambda: fn(backends["cython"]), args.repeat)
            assert same(op, oc), f"backends disagree on {name}"
            print(f"{name:38s} {tp:10.4f} {tc:10.4f} {tp / tc:8.1f}")
        else:
            print(f"{name:38s} {tp:10.4f} {'-':>10s} {'-':>8s}")


if __name__ == "__main__":
    main()
