"""Command-line surface.

Verbs: generate (spec -> corpus), fit (corpus -> stream result),
sweep (grid file -> CSV), score (result + corpus -> metrics),
report (CSV -> aggregated JSON + long-format CSV).

Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.
"""

from __future__ import annotations

import argparse
import json
import platform
import sys
import time
from pathlib import Path

from . import __version__, corpus as corpus_lab, io as pio, metrics, smc, sweep
from .errors import DataError, DomainError, PdhpError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3


def _add_engine_flags(p):
    p.add_argument("--config", type=Path, help="flat JSON config file")
    p.add_argument("--r", type=float, help="temporal-reliance exponent")
    p.add_argument("--lambda0", type=float, help="new-cluster rate")
    p.add_argument("--epsilon-dead", type=float, dest="epsilon_dead",
                   help="intensity floor for pruning")
    p.add_argument("--n-particles", type=int, dest="n_particles")
    p.add_argument("--seed", type=int)
    p.add_argument("--theta0", type=float)
    p.add_argument("--em-sweeps", type=int, dest="em_sweeps")
    p.add_argument("--progress-every", type=int, dest="progress_every",
                   help="emit a progress line to stderr every N documents")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="pdhp",
        description="Streaming document clustering with a powered "
                    "Dirichlet-Hawkes prior, plus a synthetic-corpus lab.",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("generate", help="generate a synthetic corpus")
    p.add_argument("--out", type=Path, required=True, help="corpus JSONL path")
    p.add_argument("--spec", type=Path, help="existing spec.json to regenerate from")
    p.add_argument("--n-clusters", type=int, default=2)
    p.add_argument("--vocab-per-cluster", type=int, default=1000)
    p.add_argument("--words-per-doc", type=int, default=20)
    p.add_argument("--horizon", type=float, default=1500.0)
    p.add_argument("--baseline", type=float, default=1.2)
    p.add_argument("--branching", type=float, default=0.5)
    p.add_argument("--vocab-overlap", type=float, default=0.0)
    p.add_argument("--temporal-overlap", type=float, default=0.0)
    p.add_argument("--decorrelate-fraction", type=float, default=0.0)
    p.add_argument("--zipf-exponent", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("fit", help="cluster a corpus stream")
    p.add_argument("corpus", type=Path, help="corpus JSONL")
    p.add_argument("--out", type=Path, required=True, help="result JSON path")
    p.add_argument("--corpus-spec", type=Path,
                   help="spec.json (default: found next to the corpus)")
    _add_engine_flags(p)

    p = sub.add_parser("score", help="score a result against ground truth")
    p.add_argument("result", type=Path, help="result JSON from fit")
    p.add_argument("corpus", type=Path, help="corpus JSONL with ground truth")

    p = sub.add_parser("sweep", help="run an r x overlap experiment grid")
    p.add_argument("grid", type=Path, help="grid JSON file")
    p.add_argument("--out", type=Path, required=True, help="results CSV path")
    p.add_argument("--base-seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("report", help="aggregate a sweep CSV")
    p.add_argument("csv", type=Path, help="sweep results CSV")
    p.add_argument("--out-json", type=Path, required=True)
    p.add_argument("--out-csv", type=Path, required=True,
                   help="plot-ready long-format CSV")
    return parser


def cmd_generate(args):
    if args.spec:
        spec = pio.read_spec(args.spec)
    else:
        spec = corpus_lab.CorpusSpec(
            n_clusters=args.n_clusters,
            vocab_per_cluster=args.vocab_per_cluster,
            words_per_doc=args.words_per_doc,
            horizon=args.horizon,
            baseline=args.baseline,
            branching=args.branching,
            vocab_overlap=args.vocab_overlap,
            temporal_overlap=args.temporal_overlap,
            decorrelate_fraction=args.decorrelate_fraction,
            zipf_exponent=args.zipf_exponent,
            seed=args.seed,
        )
    docs = corpus_lab.generate(spec)
    pio.write_corpus(docs, args.out)
    pio.write_spec(spec, args.out.with_suffix(".spec.json"))
    print(f"wrote {len(docs)} documents to {args.out}")
    return EXIT_OK


def _load_corpus_with_spec(corpus_path, spec_path):
    if spec_path is None:
        spec_path = pio.sibling_spec_path(corpus_path)
    spec = pio.read_spec(spec_path) if spec_path else None
    return pio.ingest(corpus_path, spec), spec


def cmd_fit(args):
    docs, spec = _load_corpus_with_spec(args.corpus, args.corpus_spec)
    flat = pio.load_config_file(args.config) if args.config else {}
    if spec is not None:
        flat.setdefault("kernel.timescales", list(spec.timescales))
    config = pio.smc_config_from_flat(
        flat,
        vocab_size=spec.global_vocab_size if spec else None,
        r=args.r, lambda0=args.lambda0, epsilon_dead=args.epsilon_dead,
        n_particles=args.n_particles, seed=args.seed, theta0=args.theta0,
        em_sweeps=args.em_sweeps, progress_every=args.progress_every,
    )
    result = smc.run_stream(docs, config)
    pio.write_result(result, args.out)
    meta = {
        "versions": {"pdhp": __version__, "python": platform.python_version()},
        "seed": config.seed,
        "wall_ms": round(result.runtime_ms, 3),
    }
    with open(args.out.with_suffix(".meta.json"), "w") as fh:
        json.dump(meta, fh, indent=2)
    print(f"clustered {len(docs)} documents into {result.n_clusters} clusters")
    return EXIT_OK


def cmd_score(args):
    result = pio.read_result(args.result)
    docs = pio.ingest(args.corpus)
    if not pio.has_ground_truth(docs):
        print(json.dumps({"nmi_text": None, "nmi_time": None, "delta_nmi": None}))
        return EXIT_OK
    print(json.dumps(metrics.score_run(result, docs)))
    return EXIT_OK


def cmd_sweep(args):
    grid = sweep.SweepGrid.from_file(args.grid)
    start = time.perf_counter()
    rows = sweep.run_sweep(grid, args.base_seed, workers=args.workers)
    sweep.write_rows(rows, args.out)
    meta = {
        "versions": {"pdhp": __version__, "python": platform.python_version()},
        "seed": args.base_seed,
        "wall_ms": round(1e3 * (time.perf_counter() - start), 3),
    }
    with open(args.out.with_suffix(".meta.json"), "w") as fh:
        json.dump(meta, fh, indent=2)
    print(f"wrote {len(rows)} rows to {args.out}")
    return EXIT_OK


def cmd_report(args):
    aggregates = sweep.aggregate(sweep.read_rows(args.csv))
    sweep.write_report(aggregates, args.out_json, args.out_csv)
    print(f"aggregated {len(aggregates)} cells")
    return EXIT_OK


COMMANDS = {
    "generate": cmd_generate,
    "fit": cmd_fit,
    "score": cmd_score,
    "sweep": cmd_sweep,
    "report": cmd_report,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return COMMANDS[args.verb](args)
    except (DataError, DomainError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except PdhpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
