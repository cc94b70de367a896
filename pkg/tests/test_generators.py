import numpy as np
import pytest

from nirm.generators import (
    MODELS,
    GenerationError,
    GeneratorSpec,
    dataset_specs,
    default_spec,
    generate,
    generate_dataset,
    sample_once,
)


def test_ring_lattice_without_rewiring():
    g = generate(GeneratorSpec("WS", 20, p=0.0, k=4, seed=1))
    assert g.num_edges == 40
    assert set(g.degrees.tolist()) == {4}


@pytest.mark.parametrize("n,m", [(20, 3), (30, 2), (25, 1)])
def test_ba_edge_count(n, m):
    g = generate(GeneratorSpec("BA", n, m=m, seed=n))
    assert g.num_edges == m * (n - m)
    assert g.degrees[m:].min() >= m


@pytest.mark.parametrize("model", MODELS)
def test_connected_and_deterministic(model):
    for seed in range(5):
        spec = default_spec(model, 25, seed=seed)
        a, b = generate(spec), generate(spec)
        assert a.is_connected()
        assert a.edge_set() == b.edge_set()


def test_plc_min_degree():
    for seed in range(10):
        g = generate(default_spec("PLC", 30, seed=seed))
        assert g.degrees[3:].min() >= 3


def test_plc_closes_triangles_more_than_ba():
    from nirm.graph import local_clustering

    def mean_cc(model, p):
        vals = []
        for seed in range(20):
            spec = GeneratorSpec(model, 60, p=p, m=3, seed=seed)
            g = generate(spec)
            vals.append(np.mean([local_clustering(g, v) for v in range(g.n)]))
        return np.mean(vals)

    assert mean_cc("PLC", 0.9) > mean_cc("BA", 0.0)


def test_er_mean_edge_count():
    rng = np.random.default_rng(0)
    spec = GeneratorSpec("ER", 30, p=0.3)
    counts = [sample_once(spec, rng).num_edges for _ in range(1000)]
    expect = 0.3 * 30 * 29 / 2
    assert abs(np.mean(counts) - expect) / expect < 0.05


def test_generation_error_reports_spec():
    with pytest.raises(GenerationError, match="ER"):
        generate(GeneratorSpec("ER", 30, p=0.0, seed=0))


@pytest.mark.parametrize(
    "spec",
    [
        GeneratorSpec("ER", 10, p=1.5),
        GeneratorSpec("WS", 10, k=3, p=0.1),
        GeneratorSpec("WS", 10, k=10, p=0.1),
        GeneratorSpec("BA", 10, m=0),
        GeneratorSpec("PLC", 5, m=5, p=0.1),
        GeneratorSpec("XX", 10),
    ],
)
def test_invalid_specs(spec):
    with pytest.raises(ValueError):
        generate(spec)


def test_dataset_cycles_models_and_sizes():
    specs = dataset_specs(4)
    assert [s.model for s in specs] == list(MODELS)
    specs = dataset_specs(400, (20, 30), master_seed=5)
    assert {s.model: 0 for s in specs} == dict.fromkeys(MODELS, 0)
    for model in MODELS:
        assert sum(s.model == model for s in specs) == 100
    sizes = [s.n for s in specs]
    assert min(sizes) >= 20 and max(sizes) <= 30
    assert len(set(sizes)) == 11


def test_dataset_determinism():
    a = generate_dataset(12, master_seed=9)
    b = generate_dataset(12, master_seed=9)
    assert [g.edge_set() for g in a] == [g.edge_set() for g in b]
    c = generate_dataset(12, master_seed=10)
    assert [g.edge_set() for g in a] != [g.edge_set() for g in c]


def test_specs_with_offset_continue_the_sequence():
    full = dataset_specs(10, master_seed=2)
    assert dataset_specs(4, master_seed=2, start=6) == full[6:]
