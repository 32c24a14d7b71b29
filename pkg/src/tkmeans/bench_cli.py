"""Experiment runner CLI.

Subcommands:

* ``tkmeans run``   cluster-sweep benchmark: for each cluster count c in a
  range and each trial, draw c ground-truth classes, solve, and score purity
  and entropy; emit per-trial CSV and a per-c markdown summary.
* ``tkmeans trace`` single solve on a dataset, emitting the per-iteration
  convergence trace as CSV.
* ``tkmeans synth`` generate a separable Gaussian-blob corpus on disk for
  smoke tests and calibration.

All randomness derives from one master seed: trial (c, t) uses the seed
sequence spawned at key (c, t), so adding trials or extending the cluster
range never changes earlier trials.  Report files exclude wall-clock times
(those go to timing.csv) and are byte-identical across reruns of the same
config.  Exit codes: 0 all trials ok, 2 some trials failed, 1 fatal error.
"""

import argparse
import csv
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import data_pipeline, joint_solver, metrics
from .exceptions import TkmeansError

CONFIG_DEFAULTS = {
    "data": None,          # features file (triplet format); required
    "labels": None,        # labels file, one class id per line; required
    "out": "results",      # output directory
    "normalize": "tfidf",  # tfidf | none
    "dim": "100",          # SVD target dim; "none" skips reduction
    "clusters": "2..10",   # cluster-count sweep, inclusive
    "trials": "10",        # trials per cluster count
    "lambda": "1.0",       # transform regularization weight
    "mu": "1.0",           # clustering term weight
    "max_outer_iters": "50",
    "outer_tol": "1e-6",
    "init_restarts": "50",  # k-means restarts for the initial assignment
    "seed": "0",           # master seed
}


@dataclass(frozen=True)
class ExperimentConfig:
    data: str
    labels: str
    out: str
    normalize: str = "tfidf"
    dim: int = 100         # None skips reduction
    c_min: int = 2
    c_max: int = 10
    trials: int = 10
    lam: float = 1.0
    mu: float = 1.0
    max_outer_iters: int = 50
    outer_tol: float = 1e-6
    init_restarts: int = 50
    seed: int = 0

    def __post_init__(self):
        if self.normalize not in ("tfidf", "none"):
            raise ValueError(f"normalize must be 'tfidf' or 'none', got {self.normalize!r}")
        if not (2 <= self.c_min <= self.c_max):
            raise ValueError(f"need 2 <= c_min <= c_max, got [{self.c_min}, {self.c_max}]")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")


@dataclass
class TrialResult:
    c: int
    trial: int
    subsample_seed: int
    solver_seed: int
    status: str = "ok"
    purity: float = None
    entropy: float = None
    iterations: int = None
    seconds: float = None
    error: str = ""


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    rows: list = field(default_factory=list)

    def failed(self):
        return [r for r in self.rows if r.status != "ok"]

    def aggregate(self):
        """Per-c mean/std of purity and entropy over successful trials."""
        out = []
        for c in range(self.config.c_min, self.config.c_max + 1):
            ok = [r for r in self.rows if r.c == c and r.status == "ok"]
            entry = {"c": c, "trials_ok": len(ok), "trials": self.config.trials}
            for name in ("entropy", "purity"):
                vals = np.array([getattr(r, name) for r in ok])
                entry[f"{name}_mean"] = float(vals.mean()) if len(ok) else float("nan")
                entry[f"{name}_std"] = float(vals.std()) if len(ok) else float("nan")
            out.append(entry)
        return out


def trial_seeds(master_seed, c, trial):
    """Two independent 32-bit seeds for (subsample, solver) of one trial.

    Derived via numpy's SeedSequence spawned at key (c, trial): a pure
    function of its inputs, so extending the sweep never perturbs existing
    trials.
    """
    ss = np.random.SeedSequence(master_seed, spawn_key=(c, trial))
    sub, solv = ss.generate_state(2)
    return int(sub), int(solv)


def run_experiment(config):
    """Execute the cluster sweep described by ``config``.

    Dataset problems abort; per-trial solver failures are recorded on their
    row and the sweep continues.
    """
    corpus = data_pipeline.load_corpus(config.data, config.labels)
    if config.c_max > corpus.class_count:
        raise ValueError(
            f"c_max={config.c_max} exceeds the {corpus.class_count} classes in the data"
        )
    if config.normalize == "tfidf":
        corpus = data_pipeline.tfidf_normalize(corpus, on_empty="drop")
    reduced = data_pipeline.as_reduced(corpus, d=config.dim, seed=config.seed)

    report = ExperimentReport(config=config)
    for c in range(config.c_min, config.c_max + 1):
        for trial in range(config.trials):
            sub_seed, solver_seed = trial_seeds(config.seed, c, trial)
            row = TrialResult(c=c, trial=trial,
                              subsample_seed=sub_seed, solver_seed=solver_seed)
            try:
                subset = data_pipeline.subsample_classes(reduced, c, sub_seed)
                params = joint_solver.JointHyperparams(
                    lam=config.lam, mu=config.mu, k=c,
                    max_outer_iters=config.max_outer_iters,
                    outer_tol=config.outer_tol, seed=solver_seed,
                )
                result = joint_solver.solve(
                    subset.X, params, init_restarts=config.init_restarts
                )
                table = metrics.contingency(result.labels, subset.labels)
                row.purity = metrics.purity(table)
                row.entropy = metrics.entropy(table)
                row.iterations = len(result.trace)
                row.seconds = sum(r.seconds for r in result.trace)
            except Exception as exc:  # noqa: BLE001 - record and continue
                row.status = "failed"
                row.error = f"{type(exc).__name__}: {exc}"
            report.rows.append(row)
    report.rows.sort(key=lambda r: (r.c, r.trial))
    return report


def _atomic_write(path, text):
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _fmt(value):
    """Full-precision, round-trippable cell formatting."""
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_report(report, out_dir, formats=("csv", "markdown")):
    """Write the report files; returns the written paths.

    ``report.csv`` (per-trial rows) and ``report.md`` (per-c aggregates)
    contain no wall-clock data and are deterministic for a fixed config;
    runtimes go to ``timing.csv``.
    """
    if not report.rows:
        raise ValueError("refusing to emit an empty report")
    os.makedirs(out_dir, exist_ok=True)
    written = []

    if "csv" in formats:
        lines = ["c,trial,subsample_seed,solver_seed,status,purity,entropy,iterations,error"]
        for r in report.rows:
            err = r.error.replace(",", ";").replace("\n", " ")
            lines.append(
                f"{r.c},{r.trial},{r.subsample_seed},{r.solver_seed},{r.status},"
                f"{_fmt(r.purity)},{_fmt(r.entropy)},{_fmt(r.iterations)},{err}"
            )
        path = os.path.join(out_dir, "report.csv")
        _atomic_write(path, "\n".join(lines) + "\n")
        written.append(path)

        lines = ["c,trial,seconds"]
        for r in report.rows:
            lines.append(f"{r.c},{r.trial},{_fmt(r.seconds)}")
        path = os.path.join(out_dir, "timing.csv")
        _atomic_write(path, "\n".join(lines) + "\n")
        written.append(path)

    if "markdown" in formats:
        lines = [
            "| clusters | trials ok | entropy (mean ± std) | purity (mean ± std) |",
            "|---:|---:|---:|---:|",
        ]
        for row in report.aggregate():
            lines.append(
                f"| {row['c']} | {row['trials_ok']}/{row['trials']} "
                f"| {row['entropy_mean']:.4f} ± {row['entropy_std']:.4f} "
                f"| {row['purity_mean']:.4f} ± {row['purity_std']:.4f} |"
            )
        path = os.path.join(out_dir, "report.md")
        _atomic_write(path, "\n".join(lines) + "\n")
        written.append(path)
    return written


def emit_trace(result, path):
    """Write a solve's per-iteration trace as CSV; returns the path."""
    trace = result.trace
    if not len(trace):
        raise ValueError("refusing to emit an empty trace")
    lines = [",".join(trace.CSV_HEADER)]
    for row in trace.rows():
        lines.append(",".join(_fmt(v) for v in row))
    _atomic_write(path, "\n".join(lines) + "\n")
    return path


def read_config_file(path):
    """Parse a key=value config file ('#' comments, blank lines allowed)."""
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for i, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{i}: expected 'key = value', got {raw!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in CONFIG_DEFAULTS:
                raise ValueError(f"{path}:{i}: unknown config key {key!r}")
            values[key] = value
    return values


def _parse_cluster_range(text):
    if ".." in text:
        lo, hi = text.split("..", 1)
        return int(lo), int(hi)
    value = int(text)
    return value, value


def build_config(file_values, overrides):
    merged = dict(CONFIG_DEFAULTS)
    merged.update(file_values)
    merged.update({k: v for k, v in overrides.items() if v is not None})
    missing = [key for key in ("data", "labels") if not merged.get(key)]
    if missing:
        raise ValueError(f"missing required config keys: {', '.join(missing)}")
    c_min, c_max = _parse_cluster_range(str(merged["clusters"]))
    dim = None if str(merged["dim"]).lower() == "none" else int(merged["dim"])
    return ExperimentConfig(
        data=str(merged["data"]),
        labels=str(merged["labels"]),
        out=str(merged["out"]),
        normalize=str(merged["normalize"]),
        dim=dim,
        c_min=c_min,
        c_max=c_max,
        trials=int(merged["trials"]),
        lam=float(merged["lambda"]),
        mu=float(merged["mu"]),
        max_outer_iters=int(merged["max_outer_iters"]),
        outer_tol=float(merged["outer_tol"]),
        init_restarts=int(merged["init_restarts"]),
        seed=int(merged["seed"]),
    )


def _add_override_flags(parser):
    parser.add_argument("--data", help="features file (triplet format)")
    parser.add_argument("--labels", help="labels file")
    parser.add_argument("--normalize", choices=["tfidf", "none"])
    parser.add_argument("--dim", help="SVD target dim, or 'none'")
    parser.add_argument("--lambda", dest="lam", type=float,
                        help="transform regularization weight")
    parser.add_argument("--mu", type=float, help="clustering term weight")
    parser.add_argument("--seed", type=int, help="master seed")
    parser.add_argument("--out", help="output directory")


def _cmd_run(args):
    file_values = read_config_file(args.config) if args.config else {}
    overrides = {
        "data": args.data, "labels": args.labels, "normalize": args.normalize,
        "dim": args.dim, "clusters": args.clusters, "trials": args.trials,
        "lambda": args.lam, "mu": args.mu, "seed": args.seed, "out": args.out,
        "max_outer_iters": args.max_outer_iters, "outer_tol": args.outer_tol,
        "init_restarts": args.init_restarts,
    }
    config = build_config(file_values, overrides)
    report = run_experiment(config)
    paths = emit_report(report, config.out)
    for path in paths:
        print(f"wrote {path}")
    for row in report.aggregate():
        print(
            f"c={row['c']}: {row['trials_ok']}/{row['trials']} ok, "
            f"entropy {row['entropy_mean']:.4f} ± {row['entropy_std']:.4f}, "
            f"purity {row['purity_mean']:.4f} ± {row['purity_std']:.4f}"
        )
    failed = report.failed()
    if failed:
        print(f"{len(failed)} trial(s) failed", file=sys.stderr)
        return 2
    return 0


def _cmd_trace(args):
    if not args.data or not args.labels:
        raise ValueError("trace requires --data and --labels")
    corpus = data_pipeline.load_corpus(args.data, args.labels)
    if (args.normalize or "tfidf") == "tfidf":
        corpus = data_pipeline.tfidf_normalize(corpus, on_empty="drop")
    dim = None if args.dim is None or str(args.dim).lower() == "none" else int(args.dim)
    reduced = data_pipeline.as_reduced(corpus, d=dim, seed=args.seed or 0)

    params = joint_solver.JointHyperparams(
        lam=args.lam if args.lam is not None else 1.0,
        mu=args.mu if args.mu is not None else 1.0,
        k=args.k,
        max_outer_iters=args.max_outer_iters,
        outer_tol=args.outer_tol,
        seed=args.seed or 0,
    )
    result = joint_solver.solve(reduced.X, params, init_restarts=args.init_restarts)
    emit_trace(result, args.trace_out)
    table = metrics.contingency(result.labels, reduced.labels)
    print(f"wrote {args.trace_out}")
    print(
        f"iterations={len(result.trace)} purity={metrics.purity(table):.4f} "
        f"entropy={metrics.entropy(table):.4f}"
    )
    return 0


def _cmd_synth(args):
    corpus = data_pipeline.blobs_corpus(
        n_samples=args.samples, dim=args.dim, clusters=args.clusters,
        separation=args.sep, cluster_std=args.std, seed=args.seed,
    )
    os.makedirs(args.out, exist_ok=True)
    features_path = os.path.join(args.out, "features.txt")
    labels_path = os.path.join(args.out, "labels.txt")
    data_pipeline.save_corpus(corpus, features_path, labels_path)
    # ready-to-run config: blob values are signed, so tf-idf must stay off
    config_path = os.path.join(args.out, "config.txt")
    _atomic_write(
        config_path,
        f"data = {features_path}\n"
        f"labels = {labels_path}\n"
        "normalize = none\n"
        "dim = none\n"
        f"clusters = 2..{args.clusters}\n"
        f"out = {os.path.join(args.out, 'results')}\n",
    )
    print(f"wrote {features_path}")
    print(f"wrote {labels_path}")
    print(f"wrote {config_path}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="tkmeans",
        description="Transformed K-means clustering benchmark harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="cluster-sweep experiment")
    p_run.add_argument("--config", help="key=value config file")
    _add_override_flags(p_run)
    p_run.add_argument("--clusters", help="cluster range, e.g. 2..10")
    p_run.add_argument("--trials", type=int, help="trials per cluster count")
    p_run.add_argument("--max-outer-iters", dest="max_outer_iters", type=int)
    p_run.add_argument("--outer-tol", dest="outer_tol", type=float)
    p_run.add_argument("--init-restarts", dest="init_restarts", type=int)
    p_run.set_defaults(func=_cmd_run)

    p_trace = sub.add_parser("trace", help="single solve, emit convergence trace")
    _add_override_flags(p_trace)
    p_trace.add_argument("--k", type=int, required=True, help="cluster count")
    p_trace.add_argument("--max-outer-iters", dest="max_outer_iters",
                         type=int, default=50)
    p_trace.add_argument("--outer-tol", dest="outer_tol", type=float, default=1e-6)
    p_trace.add_argument("--init-restarts", dest="init_restarts", type=int, default=50)
    p_trace.add_argument("--trace-out", default="trace.csv", help="output CSV path")
    p_trace.set_defaults(func=_cmd_trace)

    p_synth = sub.add_parser("synth", help="generate a synthetic blob corpus")
    p_synth.add_argument("--out", default="synth", help="output directory")
    p_synth.add_argument("--samples", type=int, default=300)
    p_synth.add_argument("--dim", type=int, default=10)
    p_synth.add_argument("--clusters", type=int, default=3)
    p_synth.add_argument("--sep", type=float, default=20.0,
                         help="center separation in units of cluster std")
    p_synth.add_argument("--std", type=float, default=1.0)
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.set_defaults(func=_cmd_synth)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (TkmeansError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def cli_entry():
    sys.exit(main())


if __name__ == "__main__":
    cli_entry()
