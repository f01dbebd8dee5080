"""Simulation harness: profile sweeps (exp1) and the full selection
pipeline (exp2) over generated sequences, with the summary statistics the
selection procedure is judged by.

Runs are deterministic: every replica derives its RNG stream from the base
seed and its own indices, aggregation order is fixed, and floats are written
with shortest-roundtrip repr, so identical configs produce byte-identical
output files regardless of worker scheduling.

Output files (exp2): ``confusion_T*.csv``, ``alpha_stats.csv``,
``dispersion.csv``, ``report.json``, ``summary.txt``; (exp1): per-cell
profile CSVs and per-cell five-number summaries under ``profiles/``.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace

import numpy as np

from .alpha_ml import CountMatrix, fit_alpha
from .dependence import MEASURES, profile
from .fcm import (
    HyperParams,
    build_counts,
    generate,
    prediction_bits,
    replay_occurrences,
)
from .tuner import (
    DEFAULT_ALPHA_GRID,
    DEFAULT_K_GRID,
    grid_search,
    two_step_select,
)

EXPERIMENTS = ("exp1_profiles", "exp2_pipeline")

REPORT_SCHEMA = "fcmtune-exp2-report/1"

DISPERSION_COLUMNS = (
    "replica", "T", "k", "alpha", "k_star", "alpha_star_kstar",
    "alpha_star_k", "bps_true", "bps_two_step", "bps_grid", "k_grid",
    "alpha_grid", "k_match", "evals_two_step", "evals_grid",
)


class SimError(Exception):
    """Raised for invalid experiment configurations."""


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment's grid, scale, and seeding.

    exp1_profiles sweeps k_set x alpha_set x t_set cells with `replicas`
    sequences each and records dependence profiles. exp2_pipeline draws
    `replicas` (k, alpha) pairs from the lattice k_set x {0, alpha_step,
    ..., 1} (redrawing alpha = 0, which cannot generate) and runs the full
    selection pipeline at every T in t_set.
    """

    experiment: str
    k_set: tuple = tuple(range(1, 11))
    alpha_set: tuple = (0.1, 0.5, 0.8, 1.0)
    t_set: tuple = (20_000,)
    replicas: int = 10
    base_seed: int = 0
    h_max: int = 10
    alpha_step: float = 0.005
    run_grid_search: bool = True
    redraw_per_t: bool = False
    workers: int = 1

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise SimError(f"unknown experiment {self.experiment!r}")
        if self.replicas < 1:
            raise SimError("replicas must be >= 1")
        if any(k < 0 for k in self.k_set) or not self.k_set:
            raise SimError("k_set must be non-empty, k >= 0")
        if any(not 0.0 < a for a in self.alpha_set):
            raise SimError("alpha_set values must be positive (alpha = 0 "
                           "cannot generate)")
        if any(t < 1 for t in self.t_set) or not self.t_set:
            raise SimError("t_set must be non-empty, T >= 1")
        if self.h_max < 1 or self.workers < 1:
            raise SimError("h_max and workers must be >= 1")

    def to_dict(self) -> dict:
        d = asdict(self)
        for key in ("k_set", "alpha_set", "t_set"):
            d[key] = list(d[key])
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        for key in ("k_set", "alpha_set", "t_set"):
            if key in d:
                d[key] = tuple(d[key])
        return cls(**d)


def desk_config(experiment: str, base_seed: int = 0) -> ExperimentConfig:
    """Minutes-scale preset: 10 replicas/cell at T=20,000 for profiles;
    200 pipeline replicas at T in {1e3, 1e4, 1e5}."""
    if experiment == "exp1_profiles":
        return ExperimentConfig(experiment, t_set=(20_000,), replicas=10,
                                base_seed=base_seed)
    return ExperimentConfig(experiment, t_set=(1_000, 10_000, 100_000),
                            replicas=200, base_seed=base_seed)


def paper_config(experiment: str, base_seed: int = 0) -> ExperimentConfig:
    """Full-scale preset (hours): 100 replicas/cell over the 200-value
    alpha grid at T=100,000; 1,000 pipeline replicas."""
    if experiment == "exp1_profiles":
        alphas = tuple(round(i / 200, 10) for i in range(1, 201))
        return ExperimentConfig(experiment, alpha_set=alphas,
                                t_set=(100_000,), replicas=100,
                                base_seed=base_seed)
    return ExperimentConfig(experiment, t_set=(1_000, 10_000, 100_000),
                            replicas=1_000, base_seed=base_seed)


def derive_seed(base_seed: int, *ids: int) -> int:
    """Stable 63-bit stream seed from the base seed and item indices."""
    ss = np.random.SeedSequence([int(base_seed), *map(int, ids)])
    return int(ss.generate_state(1, np.uint64)[0] >> 1)


def sample_pairs(config: ExperimentConfig) -> list:
    """Draw (k, alpha) uniformly with replacement from the pair lattice.

    The alpha lattice is {0, step, ..., 1}; draws landing on alpha = 0 are
    redrawn because the adaptive generator rejects it.
    """
    steps = int(round(1.0 / config.alpha_step))
    rng = np.random.Generator(np.random.PCG64(derive_seed(config.base_seed, 17)))
    pairs = []
    while len(pairs) < config.replicas:
        k = int(config.k_set[rng.integers(len(config.k_set))])
        a = round(float(rng.integers(steps + 1)) * config.alpha_step, 10)
        if a == 0.0:
            continue
        pairs.append((k, a))
    return pairs


def pearson_r(z, a) -> float:
    """Product-moment correlation; NaN (degenerate) if either side is
    constant."""
    z = np.asarray(z, dtype=float)
    a = np.asarray(a, dtype=float)
    if z.shape != a.shape or z.size < 2:
        raise SimError("pearson_r needs two equal-length vectors, n >= 2")
    dz = z - z.mean()
    da = a - a.mean()
    denom = math.sqrt(float(dz @ dz) * float(da @ da))
    if denom == 0.0:
        return float("nan")
    return float(dz @ da) / denom


def bias(z, a) -> float:
    """Mean signed error mean(z - a), unwinsorized."""
    z = np.asarray(z, dtype=float)
    a = np.asarray(a, dtype=float)
    if z.shape != a.shape or z.size < 1:
        raise SimError("bias needs two equal-length vectors, n >= 1")
    return float(np.mean(z - a))


@dataclass(frozen=True)
class ConfusionMatrix:
    """Counts of (true k, selected k*) over replicas at one T."""

    k_values: tuple
    kstar_values: tuple
    counts: tuple

    @classmethod
    def from_rows(cls, k_true, k_star, k_values, kstar_values) -> "ConfusionMatrix":
        counts = np.zeros((len(k_values), len(kstar_values)), dtype=np.int64)
        ki = {k: i for i, k in enumerate(k_values)}
        si = {s: i for i, s in enumerate(kstar_values)}
        for k, s in zip(k_true, k_star):
            counts[ki[int(k)], si[int(s)]] += 1
        return cls(tuple(k_values), tuple(kstar_values),
                   tuple(tuple(int(c) for c in row) for row in counts))

    @property
    def total(self) -> int:
        return sum(sum(row) for row in self.counts)

    @property
    def accuracy(self) -> float:
        hits = sum(row[self.kstar_values.index(k)]
                   for k, row in zip(self.k_values, self.counts)
                   if k in self.kstar_values)
        return hits / self.total if self.total else float("nan")


@dataclass(frozen=True)
class AlphaStats:
    """Table-style summary of the alpha estimates at one T, under both
    conditionings (fitted at the selected k* and at the true k)."""

    t: int
    n: int
    r_given_kstar: float
    r_given_k: float
    bias_given_kstar: float
    bias_given_k: float
    pct_gt1_given_kstar: float
    pct_gt1_given_k: float
    pct_gt5_given_kstar: float
    pct_gt5_given_k: float

    @classmethod
    def from_rows(cls, t: int, alpha_true, alpha_kstar, alpha_k) -> "AlphaStats":
        at = np.asarray(alpha_true, dtype=float)
        ks = np.asarray(alpha_kstar, dtype=float)
        kk = np.asarray(alpha_k, dtype=float)
        return cls(
            t=int(t),
            n=int(at.size),
            r_given_kstar=pearson_r(ks, at),
            r_given_k=pearson_r(kk, at),
            bias_given_kstar=bias(ks, at),
            bias_given_k=bias(kk, at),
            pct_gt1_given_kstar=float(100.0 * np.mean(ks > 1.0)),
            pct_gt1_given_k=float(100.0 * np.mean(kk > 1.0)),
            pct_gt5_given_kstar=float(100.0 * np.mean(ks > 5.0)),
            pct_gt5_given_k=float(100.0 * np.mean(kk > 5.0)),
        )


@dataclass(frozen=True)
class ExperimentReport:
    """Everything an exp2 run produced, re-renderable without recompute."""

    config: ExperimentConfig
    pairs: tuple
    rows: tuple
    failures: tuple = ()

    def rows_at(self, t: int) -> list:
        return [r for r in self.rows if r["T"] == t]

    def confusion(self, t: int) -> ConfusionMatrix:
        rows = self.rows_at(t)
        axis = tuple(sorted(set(self.config.k_set)))
        kstar_axis = tuple(range(1, self.config.h_max + 1))
        return ConfusionMatrix.from_rows([r["k"] for r in rows],
                                         [r["k_star"] for r in rows],
                                         axis, kstar_axis)

    def alpha_stats(self, t: int) -> AlphaStats:
        rows = self.rows_at(t)
        return AlphaStats.from_rows(
            t, [r["alpha"] for r in rows],
            [r["alpha_star_kstar"] for r in rows],
            [r["alpha_star_k"] for r in rows])

    def accuracy(self, t: int) -> float:
        rows = self.rows_at(t)
        if not rows:
            return float("nan")
        return sum(r["k_star"] == r["k"] for r in rows) / len(rows)

    def to_json(self) -> str:
        doc = {
            "schema": REPORT_SCHEMA,
            "config": self.config.to_dict(),
            "pairs": [list(p) for p in self.pairs],
            "rows": list(self.rows),
            "failures": list(self.failures),
        }
        return json.dumps(doc, sort_keys=True, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentReport":
        doc = json.loads(text)
        if doc.get("schema") != REPORT_SCHEMA:
            raise SimError(f"unknown report schema {doc.get('schema')!r}")
        return cls(config=ExperimentConfig.from_dict(doc["config"]),
                   pairs=tuple((int(k), float(a)) for k, a in doc["pairs"]),
                   rows=tuple(doc["rows"]),
                   failures=tuple(doc["failures"]))


def _fmt(x) -> str:
    """Shortest-roundtrip text for CSV cells; stable across runs."""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _exp2_item(args) -> dict:
    """One (replica, T) pipeline pass; top-level for process pools."""
    (replica, k, alpha, t, t_idx, base_seed, h_max, run_grid) = args
    seed = derive_seed(base_seed, 3, replica, t_idx)
    params = HyperParams(k, alpha)
    seq = generate(params, t, seed)
    two = two_step_select(seq, h_max)
    fit_k = fit_alpha(CountMatrix.from_counts(build_counts(seq, k)))
    m, big_m = replay_occurrences(seq, k)
    charged, _ = prediction_bits(m, big_m, alpha, seq.alphabet.r)
    bps_true = (min(k, t) * math.log2(seq.alphabet.r) + charged) / t
    row = {
        "replica": replica,
        "T": t,
        "k": k,
        "alpha": alpha,
        "k_star": two.params.k,
        "alpha_star_kstar": two.params.alpha,
        "alpha_star_k": fit_k.alpha_star,
        "bps_true": bps_true,
        "bps_two_step": two.bitrate.bits_per_symbol,
        "k_match": int(two.params.k == k),
        "evals_two_step": two.evaluations,
    }
    if run_grid:
        gs = grid_search(seq, DEFAULT_K_GRID, DEFAULT_ALPHA_GRID)
        row.update(bps_grid=gs.bitrate.bits_per_symbol,
                   k_grid=gs.params.k, alpha_grid=gs.params.alpha,
                   evals_grid=gs.evaluations)
    else:
        row.update(bps_grid=float("nan"), k_grid=0, alpha_grid=float("nan"),
                   evals_grid=0)
    return row


def _run_items(items, worker, workers: int) -> list:
    if workers <= 1:
        return [worker(it) for it in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(worker, items, chunksize=4))


def run_exp2(config: ExperimentConfig) -> ExperimentReport:
    """Sample pairs, run the full pipeline at every T, aggregate."""
    if config.experiment != "exp2_pipeline":
        raise SimError("run_exp2 requires an exp2_pipeline config")
    pairs = sample_pairs(config)
    items = []
    for t_idx, t in enumerate(config.t_set):
        pairs_t = pairs
        if config.redraw_per_t:
            pairs_t = sample_pairs(replace(
                config, base_seed=derive_seed(config.base_seed, 23, t_idx)))
        for replica, (k, alpha) in enumerate(pairs_t):
            items.append((replica, k, alpha, t, t_idx, config.base_seed,
                          config.h_max, config.run_grid_search))
    rows = []
    failures = []
    if config.workers > 1:
        try:
            rows = _run_items(items, _exp2_item, config.workers)
        except Exception:
            rows = []
    if not rows:
        for it in items:
            try:
                rows.append(_exp2_item(it))
            except Exception as exc:  # record and continue, per contract
                failures.append({"replica": it[0], "T": it[3],
                                 "k": it[1], "alpha": it[2],
                                 "error": repr(exc)})
    rows.sort(key=lambda r: (r["T"], r["replica"]))
    return ExperimentReport(config=config, pairs=tuple(pairs),
                            rows=tuple(rows), failures=tuple(failures))


def _exp1_cell(args) -> list:
    (k, alpha, t, cell_idx, replicas, base_seed, h_max) = args
    out = []
    for rep in range(replicas):
        seed = derive_seed(base_seed, 1, cell_idx, rep)
        seq = generate(HyperParams(k, alpha), t, seed)
        for measure in MEASURES:
            prof = profile(seq, measure, h_max)
            for lag, value in zip(prof.lags, prof.values):
                out.append((rep, measure, lag, float(value)))
    return out


def run_exp1(config: ExperimentConfig, out_dir: str) -> list:
    """Sweep the cell grid and write profile CSVs plus five-number
    summaries per (measure, lag) under ``out_dir/profiles``.

    Returns the list of written file paths. Cell failures are recorded in
    ``profiles/failures.csv`` and the sweep continues.
    """
    if config.experiment != "exp1_profiles":
        raise SimError("run_exp1 requires an exp1_profiles config")
    pdir = os.path.join(out_dir, "profiles")
    os.makedirs(pdir, exist_ok=True)
    cells = [(k, a, t) for t in config.t_set for k in config.k_set
             for a in config.alpha_set]
    written = []
    failures = []
    for cell_idx, (k, alpha, t) in enumerate(cells):
        try:
            rows = _exp1_cell((k, alpha, t, cell_idx, config.replicas,
                               config.base_seed, config.h_max))
        except Exception as exc:
            failures.append((k, alpha, t, repr(exc)))
            continue
        stem = f"k{k}_a{_fmt(float(alpha))}_T{t}"
        ppath = os.path.join(pdir, f"profile_{stem}.csv")
        with open(ppath, "w", newline="") as fh:
            fh.write("replica,measure,lag,value\n")
            for rep, measure, lag, value in rows:
                fh.write(f"{rep},{measure},{lag},{_fmt(value)}\n")
        spath = os.path.join(pdir, f"summary_{stem}.csv")
        with open(spath, "w", newline="") as fh:
            fh.write("measure,lag,min,q1,median,q3,max\n")
            for measure in MEASURES:
                for lag in range(1, config.h_max + 1):
                    vals = np.array([v for rep, m, l, v in rows
                                     if m == measure and l == lag])
                    q = np.percentile(vals, [0, 25, 50, 75, 100])
                    cells_txt = ",".join(_fmt(float(x)) for x in q)
                    fh.write(f"{measure},{lag},{cells_txt}\n")
        written.extend([ppath, spath])
    if failures:
        fpath = os.path.join(pdir, "failures.csv")
        with open(fpath, "w", newline="") as fh:
            fh.write("k,alpha,T,error\n")
            for k, alpha, t, err in failures:
                fh.write(f"{k},{_fmt(float(alpha))},{t},{err}\n")
        written.append(fpath)
    return written


def emit_report(report: ExperimentReport, out_dir: str) -> list:
    """Write confusion_T*.csv, alpha_stats.csv, dispersion.csv,
    report.json, and summary.txt; returns the written paths."""
    os.makedirs(out_dir, exist_ok=True)
    written = []

    for t in report.config.t_set:
        cm = report.confusion(t)
        path = os.path.join(out_dir, f"confusion_T{t}.csv")
        with open(path, "w", newline="") as fh:
            fh.write("k\\kstar," + ",".join(map(str, cm.kstar_values)) + "\n")
            for k, row in zip(cm.k_values, cm.counts):
                fh.write(f"{k}," + ",".join(map(str, row)) + "\n")
        written.append(path)

    path = os.path.join(out_dir, "alpha_stats.csv")
    with open(path, "w", newline="") as fh:
        fh.write("T,n,r_given_kstar,r_given_k,bias_given_kstar,bias_given_k,"
                 "pct_gt1_given_kstar,pct_gt1_given_k,pct_gt5_given_kstar,"
                 "pct_gt5_given_k\n")
        for t in report.config.t_set:
            s = report.alpha_stats(t)
            fh.write(",".join(_fmt(x) for x in (
                s.t, s.n, s.r_given_kstar, s.r_given_k, s.bias_given_kstar,
                s.bias_given_k, s.pct_gt1_given_kstar, s.pct_gt1_given_k,
                s.pct_gt5_given_kstar, s.pct_gt5_given_k)) + "\n")
    written.append(path)

    path = os.path.join(out_dir, "dispersion.csv")
    with open(path, "w", newline="") as fh:
        fh.write(",".join(DISPERSION_COLUMNS) + "\n")
        for row in report.rows:
            fh.write(",".join(_fmt(row[c]) for c in DISPERSION_COLUMNS) + "\n")
    written.append(path)

    path = os.path.join(out_dir, "report.json")
    with open(path, "w", newline="") as fh:
        fh.write(report.to_json())
        fh.write("\n")
    written.append(path)

    path = os.path.join(out_dir, "summary.txt")
    with open(path, "w", newline="") as fh:
        fh.write(render_summary(report))
    written.append(path)
    return written


def load_report(path: str) -> ExperimentReport:
    with open(path) as fh:
        return ExperimentReport.from_json(fh.read())


def render_summary(report: ExperimentReport) -> str:
    """Plain-text block: per-T accuracy, the eight alpha statistics, and
    the confusion matrices."""
    lines = []
    cfg = report.config
    lines.append("exp2 pipeline summary")
    lines.append(f"replicas={cfg.replicas} base_seed={cfg.base_seed} "
                 f"h_max={cfg.h_max} grid={'on' if cfg.run_grid_search else 'off'}")
    lines.append("")
    header = f"{'statistic':<22}" + "".join(f"T={t:<12}" for t in cfg.t_set)
    lines.append(header)
    stats = [report.alpha_stats(t) for t in cfg.t_set]
    rows = [
        ("k* accuracy", [f"{report.accuracy(t):.3f}" for t in cfg.t_set]),
        ("r(a*|k*, a)", [f"{s.r_given_kstar:.2f}" for s in stats]),
        ("r(a*|k, a)", [f"{s.r_given_k:.2f}" for s in stats]),
        ("Bias(a*|k*)", [f"{s.bias_given_kstar:.3g}" for s in stats]),
        ("Bias(a*|k)", [f"{s.bias_given_k:.3g}" for s in stats]),
        ("%(a*|k*) > 1", [f"{s.pct_gt1_given_kstar:.1f}" for s in stats]),
        ("%(a*|k) > 1", [f"{s.pct_gt1_given_k:.1f}" for s in stats]),
        ("%(a*|k*) > 5", [f"{s.pct_gt5_given_kstar:.1f}" for s in stats]),
        ("%(a*|k) > 5", [f"{s.pct_gt5_given_k:.1f}" for s in stats]),
    ]
    for name, vals in rows:
        lines.append(f"{name:<22}" + "".join(f"{v:<14}" for v in vals))
    for t in cfg.t_set:
        cm = report.confusion(t)
        lines.append("")
        lines.append(f"confusion matrix, T={t} (rows: true k, cols: k*)")
        lines.append("      " + "".join(f"{s:>5}" for s in cm.kstar_values))
        for k, row in zip(cm.k_values, cm.counts):
            lines.append(f"k={k:<3} " + "".join(f"{c:>5}" for c in row))
    if report.failures:
        lines.append("")
        lines.append(f"failures: {len(report.failures)}")
    lines.append("")
    return "\n".join(lines)
