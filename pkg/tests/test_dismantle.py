import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import complete, cycle, path, random_connected, star
from nirm.centrality import degree_centrality
from nirm.dismantle import (
    METHODS,
    DismantleTrace,
    ablation_scores,
    adaptive,
    dismantle,
    ngcc_curve_area,
    one_pass,
    trace_from_order,
)
from nirm.graph import gcc_size, mask_from
from nirm.model import ModelParameters, init_parameters


def trapezoid(trace):
    xs = [100.0 * i / trace.n for i in range(len(trace.ngcc))]
    ys = [100.0 * y for y in trace.ngcc]
    return sum((xs[i + 1] - xs[i]) * (ys[i] + ys[i + 1]) / 2 for i in range(len(xs) - 1))


def test_complete_graph_one_pass():
    g = complete(5)
    t = one_pass(g, np.arange(5.0)[::-1], 0.2)
    assert len(t.removal_order) == 4
    assert t.ngcc[-1] == 0.2


def test_star_one_pass_and_adaptive():
    g = star(9)
    for t in (one_pass(g, degree_centrality(g), 0.1), adaptive(g, degree_centrality, 0.1)):
        assert t.removal_order == [0]
        assert t.ngcc == [1.0, 0.1]
        assert t.rho == pytest.approx(0.1)


def test_rho_arithmetic():
    t = DismantleTrace(list(range(379)), [1.0] * 380, 1010)
    assert round(100 * t.rho, 2) == 37.52


def test_adaptive_path_follows_tie_rule():
    # degree ties among ids 1, 2, 3 go to id 1, which leaves a 3-node piece
    t = adaptive(path(5), degree_centrality, 0.4)
    assert t.removal_order == [1, 3]
    np.testing.assert_allclose(t.ngcc, [1.0, 0.6, 0.2])


def test_adaptive_cycle_follows_tie_rule():
    t = adaptive(cycle(6), degree_centrality, 0.34)
    assert t.removal_order == [0, 2, 4]
    np.testing.assert_allclose(t.ngcc, [1.0, 5 / 6, 0.5, 1 / 6])


def test_theta_one_is_empty():
    for strategy in ("one-pass", "adaptive"):
        t = dismantle(path(5), "dc", strategy, 1.0)
        assert t.removal_order == [] and t.rho == 0 and t.area == 0


def test_area_examples():
    assert ngcc_curve_area(DismantleTrace([0], [1.0, 1.0], 10)) == pytest.approx(1000.0)
    t = dismantle(star(9), "dc", "adaptive", 0.1)
    assert t.area == pytest.approx((100 + 10) / 2 * 10)


def test_trace_json_and_csv():
    t = dismantle(path(5), "dc", "adaptive", 0.4)
    doc = json.loads(t.to_json(names=["a", "b", "c", "d", "e"]))
    assert doc["removal_order"] == ["b", "d"]
    assert doc["rho"] == pytest.approx(0.4)
    lines = t.curve_csv().splitlines()
    assert lines[0] == "removed,fraction_removed,ngcc"
    assert len(lines) == 1 + len(t.ngcc)


def test_bad_arguments():
    with pytest.raises(ValueError):
        dismantle(path(4), "dc", "adaptive", 0.0)
    with pytest.raises(ValueError):
        dismantle(path(4), "dc", "sideways", 0.5)
    with pytest.raises(ValueError, match="valid methods"):
        dismantle(path(4), "magic", "adaptive", 0.5)
    with pytest.raises(ValueError):
        dismantle(path(4), "nirm", "adaptive", 0.5)


def test_local_ablation_with_zero_embeddings_is_degree():
    g = random_connected(30, 0.1, np.random.default_rng(5))
    p = ModelParameters.zeros()
    s = ablation_scores(g, None, p, "local")
    np.testing.assert_allclose(s, g.degrees / g.degrees.max(), rtol=0, atol=0)
    a = dismantle(g, "nirm-ls", "one-pass", 0.1, params=p)
    b = dismantle(g, "dc", "one-pass", 0.1)
    assert a.removal_order == b.removal_order


def test_init_ablation_equal_on_cycle():
    s = ablation_scores(cycle(7), None, init_parameters(seed=1), "init")
    assert np.ptp(s) == 0


def _check(g, t, theta):
    n = g.n
    assert len(t.ngcc) == len(t.removal_order) + 1
    assert np.all(np.diff(t.ngcc) <= 0)
    assert t.ngcc[-1] <= theta + 1e-9
    if t.removal_order:
        assert t.ngcc[-2] > theta
    assert 0.0 <= t.rho <= 1.0
    assert (t.rho == 0) == (gcc_size(g) / n <= theta + 1e-9)
    for i in range(len(t.removal_order) + 1):
        assert t.ngcc[i] == gcc_size(g, mask_from(g, t.removal_order[:i])) / n
    assert t.area == pytest.approx(trapezoid(t), abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(
    st.integers(2, 40),
    st.integers(0, 10**6),
    st.sampled_from([m for m in METHODS if not m.startswith("nirm")] + ["nirm", "nirm-gs"]),
    st.sampled_from(["one-pass", "adaptive"]),
    st.sampled_from([0.05, 0.1, 0.3, 0.5]),
)
def test_trace_invariants(n, seed, method, strategy, theta):
    rng = np.random.default_rng(seed)
    g = random_connected(n, 0.1, rng)
    params = init_parameters(seed=seed % 5)
    t = dismantle(g, method, strategy, theta, params=params)
    _check(g, t, theta)


def test_trace_from_order_truncates():
    g = star(6)
    t = trace_from_order(g, [0, 1, 2, 3], 0.2)
    assert t.removal_order == [0]


def test_adaptive_nirm_recomputes_each_step():
    g = random_connected(25, 0.15, np.random.default_rng(8))
    p = init_parameters(seed=2)
    p.tensors["feat.b_b"][:] = 0.5
    t = dismantle(g, "nirm", "adaptive", 0.2, params=p)
    from nirm.model import nirm_rank

    mask = np.zeros(g.n, bool)
    for v in t.removal_order:
        s = nirm_rank(g, mask, p)
        assert v == int(np.argmax(s))
        mask[v] = True
