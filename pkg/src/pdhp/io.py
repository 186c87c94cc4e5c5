"""File formats: corpus JSONL, spec.json, stream results, flat config files."""

from __future__ import annotations

import json
from pathlib import Path

from .corpus import CorpusSpec
from .core import PdhpConfig
from .documents import LabeledDocument
from .errors import DataError
from .point_process import KernelBank
from .smc import SmcConfig, StreamResult

CORPUS_FIELDS = ("id", "t", "tokens")


def write_corpus(docs, path):
    """One document per JSONL line, spec-schema keys."""
    with open(path, "w") as fh:
        for d in docs:
            rec = {"id": d.id, "t": d.t, "tokens": list(d.tokens)}
            if hasattr(d, "text_cluster"):
                rec["text_cluster"] = d.text_cluster
                rec["time_cluster"] = d.time_cluster
            fh.write(json.dumps(rec) + "\n")


def write_spec(spec, path):
    with open(path, "w") as fh:
        json.dump(spec.to_dict(), fh, indent=2)
        fh.write("\n")


def read_spec(path):
    with open(path) as fh:
        return CorpusSpec.from_dict(json.load(fh))


def ingest(path, spec=None):
    """Read, validate and time-sort a corpus JSONL file.

    Unsorted input is accepted (stable tie-break by id). Schema violations
    raise DataError naming the offending line; with a spec, token ids are
    checked against the declared vocabulary bound.
    """
    vocab_bound = spec.global_vocab_size if spec is not None else None
    docs = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}:{lineno}: invalid JSON ({exc})") from exc
            for key in CORPUS_FIELDS:
                if key not in rec:
                    raise DataError(f"{path}:{lineno}: missing field '{key}'")
            tokens = rec["tokens"]
            if not isinstance(tokens, list) or not all(
                isinstance(w, int) and w >= 0 for w in tokens
            ):
                raise DataError(f"{path}:{lineno}: tokens must be non-negative ints")
            if vocab_bound is not None and tokens and max(tokens) >= vocab_bound:
                raise DataError(
                    f"{path}:{lineno}: token {max(tokens)} outside declared "
                    f"vocabulary of size {vocab_bound}"
                )
            docs.append(
                LabeledDocument(
                    id=int(rec["id"]),
                    t=float(rec["t"]),
                    tokens=tuple(tokens),
                    text_cluster=int(rec.get("text_cluster", -1)),
                    time_cluster=int(rec.get("time_cluster", -1)),
                )
            )
    docs.sort(key=lambda d: (d.t, d.id))
    return docs


def has_ground_truth(docs):
    return bool(docs) and all(
        d.text_cluster >= 0 and d.time_cluster >= 0 for d in docs
    )


def write_result(result, path):
    with open(path, "w") as fh:
        json.dump(result.to_dict(), fh)
        fh.write("\n")


def read_result(path):
    with open(path) as fh:
        d = json.load(fh)
    return StreamResult(
        labels=d["labels"],
        n_clusters=d["n_clusters"],
        log_evidence=d["log_evidence"],
        replacements=d["replacements"],
        ess_trace=d.get("ess_trace", []),
        cluster_count_trace=d.get("cluster_count_trace", []),
    )


# -- flat key-value configuration -------------------------------------------


def load_config_file(path):
    """Flat JSON config, e.g. {"pdhp.r": 1.0, "kernel.timescales": [0.5, 2, 8]}."""
    with open(path) as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise DataError(f"{path}: config must be a flat JSON object")
    return cfg


def smc_config_from_flat(flat, vocab_size=None, **overrides):
    """Build an SmcConfig from flat config keys plus explicit overrides.

    Precedence: overrides (CLI) > flat file entries > defaults.
    """
    def get(key, default):
        name = key.rsplit(".", 1)[-1]
        if name in overrides and overrides[name] is not None:
            return overrides[name]
        return flat.get(key, default)

    pdhp_defaults = PdhpConfig()
    pdhp_cfg = PdhpConfig(
        r=float(get("pdhp.r", pdhp_defaults.r)),
        lambda0=float(get("pdhp.lambda0", pdhp_defaults.lambda0)),
        epsilon_dead=float(get("pdhp.epsilon_dead", pdhp_defaults.epsilon_dead)),
    )
    bank = KernelBank(tuple(get("kernel.timescales", KernelBank().timescales)))
    defaults = SmcConfig()
    return SmcConfig(
        n_particles=int(get("smc.n_particles", defaults.n_particles)),
        seed=int(get("smc.seed", defaults.seed)),
        pdhp=pdhp_cfg,
        theta0=float(get("text.theta0", defaults.theta0)),
        bank=bank,
        em_sweeps=int(get("smc.em_sweeps", defaults.em_sweeps)),
        em_max_events=int(get("smc.em_max_events", defaults.em_max_events)),
        vocab_size=int(vocab_size if vocab_size is not None
                       else get("text.vocab_size", defaults.vocab_size)),
        progress_every=int(get("smc.progress_every", defaults.progress_every)),
    )


def sibling_spec_path(corpus_path):
    """Conventional spec.json location next to a corpus file."""
    p = Path(corpus_path)
    candidate = p.with_suffix(".spec.json")
    if candidate.exists():
        return candidate
    candidate = p.parent / "spec.json"
    return candidate if candidate.exists() else None
