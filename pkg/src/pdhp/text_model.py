"""Collapsed Dirichlet-multinomial language model per cluster.

The cluster's word distribution is integrated out under a symmetric Dirichlet
prior with concentration theta0 per word, giving the sequential Polya-urn
predictive for a new document. All arithmetic stays in log space.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from math import lgamma

from .errors import DomainError, IntegrityError

DEFAULT_THETA0 = 1.0


@dataclass
class ClusterWordCounts:
    """Word-count sufficient statistics of one cluster over a closed vocabulary."""

    vocab_size: int
    counts: dict = field(default_factory=dict)
    total: int = 0

    def __post_init__(self):
        if self.vocab_size <= 0:
            raise DomainError("vocabulary size must be positive")
        if self.total != sum(self.counts.values()):
            raise IntegrityError("total inconsistent with counts")

    def _check_tokens(self, doc_tokens):
        for w in doc_tokens:
            if not 0 <= w < self.vocab_size:
                raise DomainError(f"token {w} outside vocabulary [0, {self.vocab_size})")

    def update(self, doc_tokens):
        """Add the document's token multiplicities to the counts."""
        self._check_tokens(doc_tokens)
        for w in doc_tokens:
            self.counts[w] = self.counts.get(w, 0) + 1
        self.total += len(doc_tokens)

    def downdate(self, doc_tokens):
        """Remove the document's token multiplicities; inverse of update."""
        self._check_tokens(doc_tokens)
        need = Counter(doc_tokens)
        for w, m in need.items():
            have = self.counts.get(w, 0)
            if have < m:
                raise IntegrityError(f"cannot remove {m} of word {w}, only {have} present")
        for w, m in need.items():
            left = self.counts[w] - m
            if left:
                self.counts[w] = left
            else:
                del self.counts[w]
        self.total -= len(doc_tokens)

    def copy(self):
        return ClusterWordCounts(self.vocab_size, dict(self.counts), self.total)


def predictive_log_likelihood(counts, doc_tokens, theta0=DEFAULT_THETA0):
    """Log predictive probability of a document under the cluster's counts.

    Sequential Polya-urn product: token j (0-based) of word w contributes
    (n_w + m_w^{<j} + theta0) / (N + j + V*theta0), where m_w^{<j} counts the
    word's earlier occurrences inside the document. Order-independent, so the
    product collapses to gamma-function ratios.
    """
    if theta0 <= 0:
        raise DomainError("theta0 must be positive")
    counts._check_tokens(doc_tokens)
    v_theta = counts.vocab_size * theta0
    ll = lgamma(counts.total + v_theta) - lgamma(counts.total + v_theta + len(doc_tokens))
    for w, m in Counter(doc_tokens).items():
        base = counts.counts.get(w, 0) + theta0
        ll += lgamma(base + m) - lgamma(base)
    return ll


def empty_cluster_log_likelihood(doc_tokens, vocab_size, theta0=DEFAULT_THETA0):
    """Predictive of a document under a cluster with no counts yet."""
    return predictive_log_likelihood(
        ClusterWordCounts(vocab_size), doc_tokens, theta0
    )
