"""Experiment sweeps over r-values x overlap/decorrelation cells.

Each cell generates n_datasets corpora from seeds derived off the base seed,
fits every r value on each corpus, and appends one CSV row per (dataset, r).
Rows are a pure function of (grid, n_datasets, base_seed); parallel execution
only changes scheduling, never output bytes.
"""

from __future__ import annotations

import csv
import json
import statistics
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from itertools import product

import numpy as np

from . import corpus as corpus_lab, io as pio, metrics, smc
from .errors import DataError

SWEEP_COLUMNS = (
    "r", "vocab_overlap", "temporal_overlap", "decorrelate_fraction", "seed",
    "nmi_text", "nmi_time", "delta_nmi", "n_clusters_found", "n_events",
    "runtime_ms", "replacements",
)

CELL_KEYS = ("vocab_overlap", "temporal_overlap", "decorrelate_fraction")


@dataclass(frozen=True)
class SweepGrid:
    """Parsed grid file: value lists, dataset count, corpus/engine overrides."""

    r_values: tuple
    vocab_overlaps: tuple = (0.0,)
    temporal_overlaps: tuple = (0.0,)
    decorrelate_fractions: tuple = (0.0,)
    n_datasets: int = 20
    corpus: dict = None
    smc: dict = None

    def __post_init__(self):
        if not self.r_values:
            raise DataError("grid needs at least one r value")
        if self.n_datasets < 1:
            raise DataError("n_datasets must be >= 1")
        object.__setattr__(self, "corpus", dict(self.corpus or {}))
        object.__setattr__(self, "smc", dict(self.smc or {}))

    @property
    def cells(self):
        return list(product(self.vocab_overlaps, self.temporal_overlaps,
                            self.decorrelate_fractions))

    @classmethod
    def from_file(cls, path):
        with open(path) as fh:
            raw = json.load(fh)
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise DataError(f"{path}: unknown grid keys {sorted(unknown)}")
        for key in ("r_values", "vocab_overlaps", "temporal_overlaps",
                    "decorrelate_fractions"):
            if key in raw:
                raw[key] = tuple(raw[key])
        return cls(**raw)


def derived_seed(*entropy):
    """Stable, well-mixed seed from a tuple of integers."""
    return int(np.random.SeedSequence(list(entropy)).generate_state(1)[0])


def _dataset_job(args):
    """Generate one corpus and fit every r value on it; returns row dicts."""
    base_seed, cell_idx, cell, ds_idx, r_values, corpus_over, smc_flat = args
    vocab_ov, temporal_ov, deco_f = cell
    corpus_seed = derived_seed(base_seed, cell_idx, ds_idx)
    spec = corpus_lab.CorpusSpec(
        vocab_overlap=vocab_ov, temporal_overlap=temporal_ov,
        decorrelate_fraction=deco_f, seed=corpus_seed, **corpus_over,
    )
    rows = []
    try:
        docs = corpus_lab.generate(spec)
    except Exception as exc:  # corpus failure poisons the whole dataset
        for r_idx, r in enumerate(r_values):
            rows.append(_error_row(r, cell, corpus_seed, exc))
        return cell_idx, ds_idx, rows

    smc_flat = dict(smc_flat)
    smc_flat.setdefault("kernel.timescales", list(spec.timescales))
    for r_idx, r in enumerate(r_values):
        try:
            config = pio.smc_config_from_flat(
                smc_flat, vocab_size=spec.global_vocab_size, r=r,
                seed=derived_seed(base_seed, cell_idx, ds_idx, r_idx),
            )
            result = smc.run_stream(docs, config)
            scores = metrics.score_run(result, docs)
            rows.append({
                "r": r, "vocab_overlap": vocab_ov,
                "temporal_overlap": temporal_ov,
                "decorrelate_fraction": deco_f, "seed": corpus_seed,
                "nmi_text": scores["nmi_text"], "nmi_time": scores["nmi_time"],
                "delta_nmi": scores["delta_nmi"],
                "n_clusters_found": result.n_clusters, "n_events": len(docs),
                "runtime_ms": round(result.runtime_ms, 3),
                "replacements": len(result.replacements),
            })
        except Exception as exc:
            rows.append(_error_row(r, cell, corpus_seed, exc))
    return cell_idx, ds_idx, rows


def _error_row(r, cell, seed, exc):
    print(f"sweep: run failed (r={r}, cell={cell}, seed={seed}): {exc}",
          file=sys.stderr)
    return {
        "r": r, "vocab_overlap": cell[0], "temporal_overlap": cell[1],
        "decorrelate_fraction": cell[2], "seed": seed,
        "nmi_text": "", "nmi_time": "", "delta_nmi": "",
        "n_clusters_found": "", "n_events": "", "runtime_ms": "",
        "replacements": "",
    }


def run_sweep(grid, base_seed, workers=1):
    """Run the full grid; returns rows in deterministic (cell, dataset, r) order."""
    jobs = [
        (base_seed, cell_idx, cell, ds_idx, grid.r_values, grid.corpus, grid.smc)
        for cell_idx, cell in enumerate(grid.cells)
        for ds_idx in range(grid.n_datasets)
    ]
    finished = {}
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for cell_idx, ds_idx, rows in pool.map(_dataset_job, jobs):
                finished[(cell_idx, ds_idx)] = rows
    else:
        for job in jobs:
            cell_idx, ds_idx, rows = _dataset_job(job)
            finished[(cell_idx, ds_idx)] = rows
    out = []
    for key in sorted(finished):
        out.extend(finished[key])
    return out


def write_rows(rows, path):
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=SWEEP_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def aggregate(rows):
    """Per-cell x r aggregates (mean, std, n) of the NMI metrics."""
    groups = {}
    for row in rows:
        if row["nmi_text"] in ("", None):
            continue
        key = (float(row["r"]), float(row["vocab_overlap"]),
               float(row["temporal_overlap"]),
               float(row["decorrelate_fraction"]))
        groups.setdefault(key, []).append(row)
    out = []
    for key in sorted(groups):
        rows_g = groups[key]
        entry = {"r": key[0], "vocab_overlap": key[1], "temporal_overlap": key[2],
                 "decorrelate_fraction": key[3], "n": len(rows_g)}
        for metric in ("nmi_text", "nmi_time", "delta_nmi"):
            vals = [float(r[metric]) for r in rows_g]
            entry[f"{metric}_mean"] = statistics.fmean(vals)
            entry[f"{metric}_std"] = statistics.pstdev(vals) if len(vals) > 1 else 0.0
        out.append(entry)
    return out


def write_report(aggregates, json_path, long_csv_path):
    """Aggregated JSON plus a plot-ready long-format CSV."""
    with open(json_path, "w") as fh:
        json.dump(aggregates, fh, indent=2)
        fh.write("\n")
    with open(long_csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["r", "vocab_overlap", "temporal_overlap",
                         "decorrelate_fraction", "metric", "mean", "std", "n"])
        for entry in aggregates:
            for metric in ("nmi_text", "nmi_time", "delta_nmi"):
                writer.writerow([
                    entry["r"], entry["vocab_overlap"], entry["temporal_overlap"],
                    entry["decorrelate_fraction"], metric,
                    entry[f"{metric}_mean"], entry[f"{metric}_std"], entry["n"],
                ])
