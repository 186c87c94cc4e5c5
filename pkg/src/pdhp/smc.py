"""Sequential Monte-Carlo inference over a document stream.

Each particle holds one full clustering hypothesis. For every incoming
document a particle samples a cluster allocation from the posterior (temporal
prior x textual likelihood), updates that cluster's state, re-estimates its
kernel weights, and accumulates the document's marginal likelihood into its
weight. Particles whose normalized weight falls below

    omega = (sum_p L_p) / (2 * N_part)

are replaced by copies of survivors sampled proportionally to weight, after
which all weights reset to uniform.
"""

from __future__ import annotations

import sys
import time
from collections import Counter
from dataclasses import dataclass, field
from math import lgamma

import numpy as np

from . import core, point_process as pp
from .core import PdhpConfig
from .errors import StreamOrderError
from .text_model import DEFAULT_THETA0

DEFAULT_N_PARTICLES = 8


@dataclass(frozen=True)
class SmcConfig:
    """Engine configuration; defaults follow the synthetic-benchmark setup."""

    n_particles: int = DEFAULT_N_PARTICLES
    seed: int = 0
    pdhp: PdhpConfig = field(default_factory=PdhpConfig)
    theta0: float = DEFAULT_THETA0
    bank: pp.KernelBank = field(default_factory=pp.KernelBank)
    em_sweeps: int = 3
    em_max_events: int = 100  # bounds per-document EM cost in streaming use
    vocab_size: int = 1000
    progress_every: int = 0  # 0 disables progress lines

    def __post_init__(self):
        if self.n_particles < 1:
            raise ValueError("need at least one particle")


@dataclass
class Particle:
    """One clustering hypothesis: cluster table, allocations, weight, RNG slot."""

    table: core.ClusterTable
    assignments: list
    log_weight: float
    rng: np.random.Generator

    def adopt(self, other):
        """Replace this hypothesis with a copy of another particle's (RNG kept)."""
        self.table = other.table.copy()
        self.assignments = list(other.assignments)


@dataclass
class StreamResult:
    """Outcome of one streaming run: MAP labeling plus diagnostics."""

    labels: list
    n_clusters: int
    log_evidence: float
    replacements: list
    ess_trace: list
    cluster_count_trace: list
    runtime_ms: float = 0.0

    def to_dict(self):
        return {
            "labels": list(self.labels),
            "n_clusters": self.n_clusters,
            "log_evidence": self.log_evidence,
            "replacements": self.replacements,
        }


def _logsumexp(x):
    m = np.max(x)
    if not np.isfinite(m):
        return m
    return m + np.log(np.exp(x - m).sum())


class SmcEngine:
    """Streaming engine over a fixed particle count."""

    def __init__(self, config):
        self.config = config
        master = np.random.SeedSequence(config.seed)
        children = master.spawn(config.n_particles + 1)
        # one reserved substream (children[-1]) keeps particle streams stable
        # if an engine-level sampler is ever added
        self.particles = [
            Particle(core.ClusterTable(), [], -np.log(config.n_particles),
                     np.random.default_rng(children[i]))
            for i in range(config.n_particles)
        ]
        self.last_t = -np.inf
        self.n_processed = 0
        self.log_evidence = 0.0
        self.replacements = []
        self.ess_trace = []
        self.cluster_count_trace = []

    # -- per-document step ---------------------------------------------------

    def step(self, doc):
        cfg = self.config
        if doc.t < self.last_t:
            raise StreamOrderError(
                f"document {doc.id} at t={doc.t} arrives after t={self.last_t}"
            )
        self.last_t = doc.t

        doc_counter = Counter(doc.tokens)
        n_tok = len(doc.tokens)
        log_marginals = np.empty(cfg.n_particles)
        for p_idx, particle in enumerate(self.particles):
            log_marginals[p_idx] = self._advance(particle, doc, doc_counter, n_tok)

        # evidence increment and weight update (normalized-weight bookkeeping)
        log_w = np.asarray([p.log_weight for p in self.particles])
        self.log_evidence += _logsumexp(log_w + log_marginals)
        log_w = log_w + log_marginals
        log_w -= _logsumexp(log_w)
        for particle, lw in zip(self.particles, log_w):
            particle.log_weight = lw

        self.n_processed += 1
        replaced = self.resample_check()
        if replaced:
            self.replacements.append([self.n_processed - 1, replaced])

        w = np.exp([p.log_weight for p in self.particles])
        self.ess_trace.append(float(1.0 / np.square(w).sum()))
        self.cluster_count_trace.append(len(self._map_particle().table.clusters))
        if cfg.progress_every and self.n_processed % cfg.progress_every == 0:
            print(
                f"step={self.n_processed - 1} "
                f"clusters={self.cluster_count_trace[-1]} "
                f"ess={self.ess_trace[-1]:.3f}",
                file=sys.stderr,
            )

    def _advance(self, particle, doc, doc_counter, n_tok):
        """Sample an allocation for one particle; returns the doc's log marginal."""
        cfg = self.config
        table = particle.table
        core.prune_dead(table, doc.t, cfg.pdhp, cfg.bank)

        intensities = {
            cid: pp.intensity(st.history, st.weights, cfg.bank, doc.t)
            for cid, st in table.clusters.items()
        }
        ids, prior = core.prior_over_clusters(intensities, cfg.pdhp)

        v_theta = cfg.vocab_size * cfg.theta0
        lls = np.empty(len(ids) + 1)
        for k, cid in enumerate(ids):
            lls[k] = self._predictive(table.clusters[cid].counts, doc_counter,
                                      n_tok, v_theta)
        lls[-1] = self._predictive(None, doc_counter, n_tok, v_theta)

        post = core.posterior_over_clusters(prior, lls)
        choice = int(particle.rng.choice(len(post), p=post))
        if choice == len(ids):
            cid = core.open_cluster(table, doc, cfg.bank.default_weights(),
                                    cfg.bank, cfg.vocab_size)
        else:
            cid = ids[choice]
            core.assign_to_cluster(table, cid, doc)
        particle.assignments.append(cid)

        state = table.clusters[cid]
        if len(state.history) >= 2 and cfg.em_sweeps > 0:
            est = pp.estimate_weights(state.history, cfg.bank, cfg.em_sweeps,
                                      init_weights=state.weights,
                                      max_events=cfg.em_max_events,
                                      track_loglik=False)
            state.weights = est.weights

        with np.errstate(divide="ignore"):
            return _logsumexp(np.log(prior) + lls)

    def _predictive(self, counts, doc_counter, n_tok, v_theta):
        theta0 = self.config.theta0
        if counts is None:
            total, get = 0, {}.get
        else:
            total, get = counts.total, counts.counts.get
        ll = lgamma(total + v_theta) - lgamma(total + v_theta + n_tok)
        for w, m in doc_counter.items():
            base = get(w, 0) + theta0
            ll += lgamma(base + m) - lgamma(base)
        return ll

    # -- resampling ----------------------------------------------------------

    def resample_check(self):
        """Replace particles below omega = sum(L_p)/(2 N); returns replaced ids."""
        n = self.config.n_particles
        w = np.exp([p.log_weight for p in self.particles])
        omega = w.sum() / (2 * n)
        low = [i for i in range(n) if w[i] < omega]
        if not low:
            return []
        survivors = [i for i in range(n) if w[i] >= omega]
        sw = w[survivors] / w[survivors].sum()
        for i in low:
            src = survivors[int(self.particles[i].rng.choice(len(survivors), p=sw))]
            self.particles[i].adopt(self.particles[src])
        uniform = -np.log(n)
        for p in self.particles:
            p.log_weight = uniform
        return low

    # -- reporting -----------------------------------------------------------

    def _map_particle(self):
        return max(self.particles, key=lambda p: p.log_weight)

    def result(self, runtime_ms=0.0):
        best = self._map_particle()
        labels = list(best.assignments)
        return StreamResult(
            labels=labels,
            n_clusters=len(set(labels)),
            log_evidence=float(self.log_evidence),
            replacements=self.replacements,
            ess_trace=self.ess_trace,
            cluster_count_trace=self.cluster_count_trace,
            runtime_ms=runtime_ms,
        )


def run_stream(corpus, config):
    """Cluster a corpus sequentially; returns the MAP particle's labeling.

    The corpus is sorted by (timestamp, id) on entry, so unsorted input is
    accepted. An empty corpus yields an empty result.
    """
    docs = sorted(corpus, key=lambda d: (d.t, d.id))
    engine = SmcEngine(config)
    start = time.perf_counter()
    for doc in docs:
        engine.step(doc)
    return engine.result(runtime_ms=1e3 * (time.perf_counter() - start))
