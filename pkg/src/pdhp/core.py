"""Powered temporal prior over clusters, posterior combination, cluster lifecycle.

The prior over an incoming document's cluster raises each cluster's
self-excitation intensity to an exponent r and normalizes together with a
new-cluster rate lambda0:

    P(c)   = lambda_c^r / (lambda0 + sum_c' lambda_c'^r)   existing cluster
    P(new) = lambda0    / (lambda0 + sum_c' lambda_c'^r)

r = 1 recovers the plain intensity-proportional prior; r = 0 the uniform one.
Clusters whose intensity falls below a floor are dropped from the candidate
set for good, which keeps near-dead clusters from silently absorbing mass.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import point_process as pp
from .errors import ConfigurationError, DomainError, StreamOrderError
from .text_model import ClusterWordCounts

DEFAULT_R_GRID = (0.0, 0.3, 0.5, 0.7, 0.9, 1.0, 1.5, 2.0, 3.0, 5.0, 8.0)


@dataclass(frozen=True)
class PdhpConfig:
    """Prior parameters: exponent r, new-cluster rate, pruning floor."""

    r: float = 1.0
    lambda0: float = 1e-3
    epsilon_dead: float = 1e-10

    def __post_init__(self):
        if self.r < 0:
            raise ConfigurationError("r must be non-negative")
        if self.lambda0 <= 0:
            raise ConfigurationError("lambda0 must be positive")
        if self.epsilon_dead < 0:
            raise ConfigurationError("epsilon_dead must be non-negative")


@dataclass
class ClusterState:
    """Per-cluster event history, kernel weights and word counts."""

    history: pp.EventHistory
    weights: np.ndarray
    counts: ClusterWordCounts

    def copy(self):
        return ClusterState(self.history.copy(), self.weights.copy(), self.counts.copy())


@dataclass
class ClusterTable:
    """Active and retired clusters of one clustering hypothesis."""

    clusters: dict = field(default_factory=dict)
    dead: dict = field(default_factory=dict)
    next_id: int = 0

    @property
    def n_created(self):
        return self.next_id

    def copy(self):
        return ClusterTable(
            {cid: st.copy() for cid, st in self.clusters.items()},
            {cid: st.copy() for cid, st in self.dead.items()},
            self.next_id,
        )


def powered(lam, r):
    """lam ** r with the 0^0 := 1 convention so r = 0 is exactly uniform."""
    if r == 0:
        return 1.0
    return lam ** r


def prior_over_clusters(intensities, config):
    """Prior over existing cluster ids plus the new-cluster branch.

    intensities maps cluster id -> lambda_c(t); ids with intensity below
    epsilon_dead are excluded before the computation. Returns (ids, probs)
    where probs has one trailing entry for NEW.

    Degenerate case: every surviving powered intensity is 0 with r > 0 ->
    the new-cluster branch gets probability 1.
    """
    ids, lams = [], []
    for cid, lam in intensities.items():
        if not np.isfinite(lam) or lam < 0:
            raise DomainError(f"intensity of cluster {cid} must be finite and >= 0")
        if lam >= config.epsilon_dead or config.epsilon_dead == 0:
            ids.append(cid)
            lams.append(lam)
    pw = np.asarray([powered(lam, config.r) for lam in lams])
    total = pw.sum()
    if ids and total == 0 and config.r > 0:
        return ids, np.concatenate([np.zeros(len(ids)), [1.0]])
    probs = np.concatenate([pw, [config.lambda0]]) / (config.lambda0 + total)
    return ids, probs


def posterior_over_clusters(prior, textual_loglik):
    """Normalized product of the temporal prior and textual likelihoods.

    Both vectors are aligned (last entry = new cluster, whose likelihood is
    the empty-cluster predictive). Computed in log space with max-subtraction.
    """
    prior = np.asarray(prior, dtype=float)
    ll = np.asarray(textual_loglik, dtype=float)
    if prior.shape != ll.shape:
        raise ConfigurationError(
            f"prior has {prior.size} entries, likelihoods {ll.size}"
        )
    with np.errstate(divide="ignore"):
        logp = np.log(prior) + ll
    logp -= logp.max()
    p = np.exp(logp)
    return p / p.sum()


def open_cluster(table, doc, default_weights, bank, vocab_size):
    """Create a cluster seeded with the document; returns the new id."""
    cid = table.next_id
    table.next_id += 1
    hist = pp.EventHistory([float(doc.t)], bank.truncation_window)
    counts = ClusterWordCounts(vocab_size)
    counts.update(doc.tokens)
    table.clusters[cid] = ClusterState(hist, np.asarray(default_weights, dtype=float), counts)
    return cid


def assign_to_cluster(table, cluster_id, doc):
    """Append the document to an existing cluster's history and counts."""
    state = table.clusters[cluster_id]
    if state.history.times and doc.t < state.history.times[-1]:
        raise StreamOrderError(
            f"document at t={doc.t} precedes cluster {cluster_id}'s last event"
        )
    state.history.push(doc.t)
    state.counts.update(doc.tokens)
    return table


def prune_dead(table, t, config, bank):
    """Retire clusters whose intensity at t fell below the floor.

    Retired clusters keep their state for reporting but never re-enter the
    candidate set. A floor of 0 disables pruning.
    """
    if config.epsilon_dead == 0:
        return []
    pruned = []
    for cid, state in list(table.clusters.items()):
        lam = pp.intensity(state.history, state.weights, bank, t)
        if lam < config.epsilon_dead:
            table.dead[cid] = table.clusters.pop(cid)
            pruned.append(cid)
    return pruned
