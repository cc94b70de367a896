"""Command-line entry point: ``nirm <command> ...``.

Errors print a single ``error: <kind>: <message>`` line to stderr and exit 1
(usage errors exit 2).
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from nirm import centrality
from nirm.dataset import DatasetError, build_samples, load_dataset, write_dataset
from nirm.dismantle import METHODS, STRATEGIES, dismantle
from nirm.graph import Graph, atomic_write, read_edge_list
from nirm.model import ModelConfig, ModelParameters, count_parameters, nirm_rank
from nirm.oracle import OracleConfig
from nirm.train import TrainConfig, train

log = logging.getLogger("nirm")

NEEDS_MODEL = ("nirm", "nirm-is", "nirm-ls", "nirm-gs")


class CLIError(Exception):
    def __init__(self, kind: str, message: str):
        super().__init__(kind, message)
        self.kind = kind
        self.message = message

    def __str__(self):
        return self.message


def _names(g: Graph):
    return g.names if g.names is not None else list(range(g.n))


def _load_graph(path) -> Graph:
    try:
        return read_edge_list(path)
    except OSError as exc:
        raise CLIError("io", f"{path}: {exc.strerror or exc}") from None
    except ValueError as exc:
        raise CLIError("parse", str(exc)) from None


def _load_model(path) -> ModelParameters:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CLIError("io", f"{path}: {exc.strerror or exc}") from None
    try:
        return ModelParameters.from_json(text)
    except (ValueError, KeyError, TypeError) as exc:
        raise CLIError("model", f"{path}: {exc}") from None


def _csv(rows, header) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _write(path, text):
    try:
        atomic_write(path, text)
    except OSError as exc:
        raise CLIError("io", f"{path}: {exc.strerror or exc}") from None


def _methods(text: str) -> list[str]:
    out = [m.strip() for m in text.split(",") if m.strip()]
    for m in out:
        if m not in METHODS:
            raise CLIError("usage", f"unknown method {m!r}; valid: {', '.join(METHODS)}")
    return out


def _strategies(text: str) -> list[str]:
    out = [s.strip() for s in text.split(",") if s.strip()]
    for s in out:
        if s not in STRATEGIES:
            raise CLIError("usage", f"unknown strategy {s!r}; valid: {', '.join(STRATEGIES)}")
    return out


def _theta(text: str) -> float:
    v = float(text)
    if not 0.0 < v <= 1.0:
        raise argparse.ArgumentTypeError("theta must be in (0, 1]")
    return v


# commands

def cmd_gen_data(args) -> int:
    if args.min_n > args.max_n or args.min_n < 2:
        raise CLIError("usage", "need 2 <= --min-n <= --max-n")
    if args.count < 1:
        raise CLIError("usage", "--count must be >= 1")
    cfg = OracleConfig(args.theta_train, args.max_tas_size, args.label_mode)
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CLIError("io", f"{out}: {exc.strerror or exc}") from None
    items = build_samples(args.count, (args.min_n, args.max_n), args.seed, cfg, args.workers)
    try:
        summary = write_dataset(out, items, cfg, args.seed, (args.min_n, args.max_n))
    except OSError as exc:
        raise CLIError("io", f"{exc.filename or out}: {exc.strerror or exc}") from None
    print(f"graphs: {summary['count']}")
    for model, c in summary["per_model"].items():
        print(f"  {model}: {c}")
    print(f"mean k*: {summary['mean_k_star']:.4f}")
    print(f"mean label entropy: {summary['mean_label_entropy']:.4f}")
    return 0


def cmd_train(args) -> int:
    try:
        data = load_dataset(args.data)
    except DatasetError as exc:
        raise CLIError("parse", str(exc)) from None
    cfg = TrainConfig(
        lr=args.lr, l2=args.l2, lr_decay=args.lr_decay, batch_size=args.batch_size,
        max_epochs=args.epochs, patience=args.patience, plateau=args.plateau,
        val_fraction=args.val_fraction, seed=args.seed, dropout=not args.no_dropout,
    )
    mcfg = ModelConfig()
    total, _ = count_parameters(mcfg)
    print(f"# samples={len(data)} parameters={total}")
    print(f"# heads={list(mcfg.heads)} dims={list(mcfg.dims)} "
          f"attn_dropout={mcfg.attn_dropout} hidden_dropout={mcfg.hidden_dropout}")
    print(f"# lr={cfg.lr} l2={cfg.l2} lr_decay={cfg.lr_decay} batch_size={cfg.batch_size} "
          f"max_epochs={cfg.max_epochs} patience={cfg.patience} optimizer=adam")

    def progress(row):
        if not args.quiet:
            print("epoch {} train {:.6f} val {:.6f} lr {:.2e}".format(*row))

    try:
        best, hist = train(data, cfg, mcfg, progress=progress)
    except ValueError as exc:
        raise CLIError("data", str(exc)) from None
    history = args.history or str(Path(args.out).with_suffix(".history.csv"))
    _write(args.out, best.to_json())
    _write(history, hist.to_csv())
    print(f"initial val {hist.initial_val_loss:.6f} best val {hist.best_val_loss:.6f} "
          f"at epoch {hist.best_epoch}")
    return 0


def cmd_rank(args) -> int:
    params = _load_model(args.model)
    g = _load_graph(args.graph)
    scores = nirm_rank(g, None, params)
    order = centrality.ranking(scores)
    rank = np.empty(g.n, dtype=np.int64)
    rank[order] = np.arange(1, g.n + 1)
    names = _names(g)
    rows = [(names[v], repr(float(scores[v])), int(rank[v])) for v in range(g.n)]
    _write(args.out, _csv(rows, ("node_id", "score", "rank")))
    return 0


def cmd_baseline(args) -> int:
    g = _load_graph(args.graph)
    if args.method not in centrality.RANKERS:
        raise CLIError("usage", f"unknown method {args.method!r}; "
                                f"valid: {', '.join(centrality.RANKERS)}")
    if args.method == "ci":
        scores = centrality.collective_influence(g, None, args.ci_radius)
    else:
        scores = centrality.RANKERS[args.method](g)
    order = centrality.ranking(scores)
    rank = np.empty(g.n, dtype=np.int64)
    rank[order] = np.arange(1, g.n + 1)
    names = _names(g)
    rows = [(names[v], repr(float(scores[v])), int(rank[v])) for v in range(g.n)]
    _write(args.out, _csv(rows, ("node_id", "score", "rank")))
    return 0


def _run_one(g, method, strategy, theta, params, ci_radius):
    if method in NEEDS_MODEL and params is None:
        raise CLIError("usage", f"method {method!r} needs --model")
    return dismantle(g, method, strategy, theta, params=params, ci_radius=ci_radius)


def _one(values: list[str], flag: str) -> str:
    if len(values) != 1:
        raise CLIError("usage", f"{flag} takes exactly one value")
    return values[0]


def cmd_dismantle(args) -> int:
    method = _one(_methods(args.method), "--method")
    strategy = _one(_strategies(args.strategy), "--strategy")
    params = _load_model(args.model) if args.model else None
    g = _load_graph(args.graph)
    trace = _run_one(g, method, strategy, args.theta, params, args.ci_radius)
    _write(args.out, trace.to_json(_names(g)))
    if args.curve_csv:
        _write(args.curve_csv, trace.curve_csv())
    print(f"rho {trace.rho!r}")
    print(f"area {trace.area!r}")
    return 0


def _eval_job(job):
    path, method, strategy, theta, params, ci_radius = job
    g = _load_graph(path)
    trace = _run_one(g, method, strategy, theta, params, ci_radius)
    return g.n, trace


def cmd_eval(args) -> int:
    methods = _methods(args.methods)
    strategies = _strategies(args.strategies)
    params = _load_model(args.model) if args.model else None
    if params is None and any(m in NEEDS_MODEL for m in methods):
        raise CLIError("usage", "nirm methods need --model")
    root = Path(args.graphs)
    if not root.is_dir():
        raise CLIError("io", f"{root}: not a directory")
    paths = sorted(p for p in root.iterdir() if p.suffix in (".edges", ".txt", ".el"))
    if not paths:
        raise CLIError("io", f"{root}: no edge-list files (*.edges, *.txt, *.el)")
    if args.curves:
        try:
            Path(args.curves).mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise CLIError("io", f"{args.curves}: {exc.strerror or exc}") from None
    jobs = [(p, m, s, args.theta, params, args.ci_radius)
            for p in paths for m in methods for s in strategies]
    if args.workers > 1:
        with ProcessPoolExecutor(args.workers) as pool:
            results = list(pool.map(_eval_job, jobs))
    else:
        results = [_eval_job(j) for j in jobs]
    rows = []
    acc: dict[tuple[str, str], list] = {}
    for (path, m, s, *_), (n, trace) in zip(jobs, results):
        rows.append((path.stem, m, s, n, len(trace.removal_order), repr(trace.rho), repr(trace.area)))
        acc.setdefault((m, s), []).append((trace.rho, trace.area))
        if args.curves:
            _write(Path(args.curves) / f"{path.stem}.{m}.{s}.csv", trace.curve_csv())
    for (m, s), vals in acc.items():
        rho = float(np.mean([v[0] for v in vals]))
        area = float(np.mean([v[1] for v in vals]))
        rows.append(("AVERAGE", m, s, "", "", repr(rho), repr(area)))
    _write(args.out, _csv(rows, ("graph", "method", "strategy", "n", "removed", "rho", "area")))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nirm", description="Node ranking and network dismantling.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("gen-data", help="generate and label a training dataset")
    s.add_argument("--out", required=True)
    s.add_argument("--count", type=int, default=4000)
    s.add_argument("--min-n", type=int, default=20)
    s.add_argument("--max-n", type=int, default=30)
    s.add_argument("--theta-train", type=_theta, default=0.2)
    s.add_argument("--max-tas-size", type=int, default=12)
    s.add_argument("--label-mode", choices=("score", "rank"), default="score")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_gen_data)

    d = TrainConfig()
    s = sub.add_parser("train", help="train a model on a generated dataset")
    s.add_argument("--data", required=True)
    s.add_argument("--out", required=True, help="model JSON path")
    s.add_argument("--history", help="history CSV (default: <out>.history.csv)")
    s.add_argument("--epochs", type=int, default=d.max_epochs)
    s.add_argument("--lr", type=float, default=d.lr)
    s.add_argument("--l2", type=float, default=d.l2)
    s.add_argument("--lr-decay", type=float, default=d.lr_decay)
    s.add_argument("--batch-size", type=int, default=d.batch_size)
    s.add_argument("--patience", type=int, default=d.patience)
    s.add_argument("--plateau", type=int, default=d.plateau)
    s.add_argument("--val-fraction", type=float, default=d.val_fraction)
    s.add_argument("--seed", type=int, default=d.seed)
    s.add_argument("--no-dropout", action="store_true")
    s.add_argument("--quiet", action="store_true", help="no per-epoch lines")
    s.set_defaults(func=cmd_train)

    s = sub.add_parser("rank", help="score every node of a graph with a trained model")
    s.add_argument("--model", required=True)
    s.add_argument("--graph", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_rank)

    s = sub.add_parser("baseline", help="classical centrality scores as CSV")
    s.add_argument("--graph", required=True)
    s.add_argument("--method", required=True, help=f"one of {', '.join(centrality.RANKERS)}")
    s.add_argument("--ci-radius", type=int, default=2)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_baseline)

    s = sub.add_parser("dismantle", help="dismantle one graph")
    s.add_argument("--graph", required=True)
    s.add_argument("--method", required=True, help=f"one of {', '.join(METHODS)}")
    s.add_argument("--strategy", default="adaptive", help="one-pass or adaptive")
    s.add_argument("--theta", type=_theta, default=0.01)
    s.add_argument("--model")
    s.add_argument("--ci-radius", type=int, default=2)
    s.add_argument("--out", required=True, help="trace JSON path")
    s.add_argument("--curve-csv", help="also write the NGCC curve here")
    s.set_defaults(func=cmd_dismantle)

    s = sub.add_parser("eval", help="compare methods over a directory of graphs")
    s.add_argument("--graphs", required=True)
    s.add_argument("--methods", default="dc,ci,nirm")
    s.add_argument("--strategies", default="one-pass,adaptive")
    s.add_argument("--theta", type=_theta, default=0.01)
    s.add_argument("--model")
    s.add_argument("--ci-radius", type=int, default=2)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--curves", help="directory for per-run NGCC curve CSVs")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_eval)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except CLIError as exc:
        print(f"error: {exc.kind}: {exc}", file=sys.stderr)
        return 2 if exc.kind == "usage" else 1
    except (ValueError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
