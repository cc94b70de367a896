"""On-disk training datasets: edge lists, label files and a manifest."""

from __future__ import annotations

import json
import logging
import math
import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from nirm.generators import GenerationError, GeneratorSpec, dataset_specs, generate
from nirm.graph import Graph, atomic_write, read_edge_list, write_edge_list
from nirm.oracle import OracleConfig, SearchBudgetError, TrainingSample, label_sample

log = logging.getLogger(__name__)


class DatasetError(ValueError):
    pass


def format_labels(g: Graph, labels) -> str:
    names = g.names if g.names is not None else range(g.n)
    return "".join(f"{names[v]}\t{float(x):.12g}\n" for v, x in enumerate(labels))


def parse_labels(text: str, g: Graph, source: str) -> np.ndarray:
    index = {name: i for i, name in enumerate(g.names)} if g.names is not None else None
    out = np.full(g.n, np.nan)
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line[0] in "#%":
            continue
        parts = line.split("\t") if "\t" in line else line.split()
        if len(parts) != 2:
            raise DatasetError(f"{source}:{lineno}: expected 'node_id<TAB>label'")
        tok, val = parts
        key = int(tok) if tok.lstrip("-").isdigit() else tok
        v = index.get(key) if index is not None else int(key)
        if v is None or not 0 <= v < g.n:
            raise DatasetError(f"{source}:{lineno}: unknown node {tok!r}")
        try:
            out[v] = float(val)
        except ValueError:
            raise DatasetError(f"{source}:{lineno}: bad label {val!r}") from None
    if np.isnan(out).any():
        missing = int(np.flatnonzero(np.isnan(out))[0])
        raise DatasetError(f"{source}: no label for node {g.names[missing] if g.names else missing}")
    return out


def _label_one(args):
    index, spec, cfg = args
    try:
        g = generate(spec)
        sample = label_sample(g, cfg)
    except (GenerationError, SearchBudgetError) as exc:
        return index, spec, None, str(exc)
    if sample.k_star == 0:
        return index, spec, None, "already dismantled (k*=0)"
    return index, spec, sample, None


def build_samples(count: int, size_range=(20, 30), master_seed: int = 0,
                  cfg: OracleConfig = OracleConfig(), workers: int = 1):
    """Generate and label ``count`` usable samples.

    Graphs that fail generation or exceed the search budget are skipped and
    replaced by the next index, so results depend only on the arguments.
    Returns a list of ``(index, spec, sample)``.
    """
    out = []
    start = 0
    pool = ProcessPoolExecutor(workers) if workers > 1 else None
    try:
        while len(out) < count:
            need = count - len(out)
            specs = dataset_specs(need, size_range, master_seed, start=start)
            jobs = [(start + i, s, cfg) for i, s in enumerate(specs)]
            results = pool.map(_label_one, jobs, chunksize=8) if pool else map(_label_one, jobs)
            for index, spec, sample, err in results:
                if err is not None:
                    log.warning("skipping graph %d (%s): %s", index, spec.model, err)
                    continue
                out.append((index, spec, sample))
            start += need
    finally:
        if pool is not None:
            pool.shutdown()
    return out


def label_entropy(labels) -> float:
    p = np.asarray(labels, dtype=np.float64)
    p = p[p > 0] / p.sum()
    return float(-(p * np.log(p)).sum())


def write_dataset(out_dir, items, cfg: OracleConfig, master_seed: int, size_range) -> dict:
    """Write graphs/, labels/, manifest.jsonl and meta.json; returns a summary."""
    out = Path(out_dir)
    (out / "graphs").mkdir(parents=True, exist_ok=True)
    (out / "labels").mkdir(parents=True, exist_ok=True)
    lines = []
    for index, spec, sample in items:
        gid = f"g{index:05d}"
        header = json.dumps(spec.to_dict(), sort_keys=True)
        write_edge_list(sample.graph, out / "graphs" / f"{gid}.edges", header=header)
        atomic_write(out / "labels" / f"{gid}.labels", format_labels(sample.graph, sample.labels))
        lines.append(json.dumps({
            "id": gid,
            "index": index,
            "spec": spec.to_dict(),
            "n": sample.graph.n,
            "m": sample.graph.num_edges,
            "k_star": sample.k_star,
            "optimal_sets": [list(s) for s in sample.optimal_sets],
        }, sort_keys=True))
    atomic_write(out / "manifest.jsonl", "\n".join(lines) + "\n")
    meta = {
        "count": len(items),
        "master_seed": master_seed,
        "size_range": list(size_range),
        "theta_train": cfg.theta_train,
        "label_mode": cfg.label_mode,
        "max_tas_size": cfg.max_tas_size,
    }
    atomic_write(out / "meta.json", json.dumps(meta, indent=1, sort_keys=True) + "\n")
    return summarize(items)


def summarize(items) -> dict:
    models = Counter(spec.model for _, spec, _ in items)
    ks = [s.k_star for _, _, s in items]
    ents = [label_entropy(s.labels) for _, _, s in items]
    return {
        "count": len(items),
        "per_model": dict(sorted(models.items())),
        "mean_k_star": float(np.mean(ks)) if ks else math.nan,
        "mean_label_entropy": float(np.mean(ents)) if ents else math.nan,
    }


def load_dataset(data_dir) -> list[TrainingSample]:
    """Read a dataset directory written by ``write_dataset``."""
    root = Path(data_dir)
    manifest = root / "manifest.jsonl"
    if not manifest.is_file():
        raise DatasetError(f"{manifest}: missing manifest")
    samples = []
    with open(manifest) as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                entry = json.loads(line)
                gid = entry["id"]
            except (ValueError, KeyError) as exc:
                raise DatasetError(f"{manifest}:{lineno}: {exc}") from None
            gpath = root / "graphs" / f"{gid}.edges"
            lpath = root / "labels" / f"{gid}.labels"
            try:
                g = read_edge_list(gpath)
            except OSError as exc:
                raise DatasetError(f"{gpath}: {exc.strerror}") from None
            except ValueError as exc:
                raise DatasetError(str(exc)) from None
            try:
                text = lpath.read_text()
            except OSError as exc:
                raise DatasetError(f"{lpath}: {exc.strerror}") from None
            labels = parse_labels(text, g, os.fspath(lpath))
            sets = [tuple(g.names.index(v) for v in s) for s in entry.get("optimal_sets", [])]
            samples.append(TrainingSample(g, sets, np.zeros(g.n), np.zeros(g.n), labels))
    if not samples:
        raise DatasetError(f"{manifest}: dataset is empty")
    return samples


def spec_from_dict(d: dict) -> GeneratorSpec:
    return GeneratorSpec(**d)
