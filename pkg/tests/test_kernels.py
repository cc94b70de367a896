"""The compiled and pure-Python kernels must agree exactly."""

import subprocess
import sys

import numpy as np
import pytest

from conftest import random_connected
from nirm import kernels
from nirm.oracle import _bitmasks

backends = kernels.available_backends()
needs_both = pytest.mark.skipif("cython" not in backends, reason="extension not built")


def _cases():
    rng = np.random.default_rng(7)
    for i in range(12):
        g = random_connected(int(rng.integers(2, 40)), float(rng.uniform(0.02, 0.3)), rng)
        removed = (rng.random(g.n) < 0.2).astype(np.uint8)
        yield g, removed


@needs_both
def test_traversal_kernels_agree():
    py, cy = backends["python"], backends["cython"]
    for g, removed in _cases():
        args = (g.indptr, g.indices, removed)
        lp, sp = py.component_labels(*args)
        lc, sc = cy.component_labels(*args)
        np.testing.assert_array_equal(lp, lc)
        np.testing.assert_array_equal(sp, sc)
        assert py.gcc_size(*args) == cy.gcc_size(*args)
        for a, b in zip(py.local_counts(*args), cy.local_counts(*args)):
            np.testing.assert_array_equal(a, b)
        for a, b in zip(py.distance_sums(*args), cy.distance_sums(*args)):
            np.testing.assert_allclose(a, b, rtol=0, atol=1e-12)
        for r in (1, 2, 3):
            for a, b in zip(py.ball_surface(*args, r), cy.ball_surface(*args, r)):
                np.testing.assert_array_equal(a, b)
        w = np.random.default_rng(g.n).random(g.n)
        np.testing.assert_allclose(py.brandes(*args, w), cy.brandes(*args, w), rtol=1e-12, atol=1e-12)


@needs_both
def test_removal_curves_agree():
    py, cy = backends["python"], backends["cython"]
    for g, removed in _cases():
        order = np.random.default_rng(g.n).permutation(g.n)[: g.n // 2].tolist()
        base = np.zeros(g.n, np.uint8)
        np.testing.assert_array_equal(
            py.removal_gcc_curve(g.indptr, g.indices, base, order),
            cy.removal_gcc_curve(g.indptr, g.indices, base, order),
        )


@needs_both
def test_min_tas_search_agrees():
    py, cy = backends["python"], backends["cython"]
    rng = np.random.default_rng(3)
    for _ in range(10):
        g = random_connected(int(rng.integers(6, 16)), 0.2, rng)
        adj = _bitmasks(g)
        for k in range(4):
            assert sorted(py.min_tas_search(adj, g.n, 3, k)) == sorted(cy.min_tas_search(adj, g.n, 3, k))


def test_removal_curve_matches_recount():
    for g, _ in _cases():
        order = np.random.default_rng(1).permutation(g.n).tolist()
        curve = kernels.removal_gcc_curve(g.indptr, g.indices, np.zeros(g.n, np.uint8), order)
        removed = np.zeros(g.n, np.uint8)
        assert curve[0] == kernels.gcc_size(g.indptr, g.indices, removed)
        for t, v in enumerate(order, 1):
            removed[v] = 1
            assert curve[t] == kernels.gcc_size(g.indptr, g.indices, removed)


def test_env_var_forces_python():
    code = "import nirm.kernels as k; print(k.BACKEND)"
    out = subprocess.run(
        [sys.executable, "-c", code], env={"NIRM_PURE_PYTHON": "1", "PATH": ""},
        capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"
