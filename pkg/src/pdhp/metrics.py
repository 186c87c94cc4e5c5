"""Clustering metrics: normalized mutual information and run scoring."""

from __future__ import annotations

import numpy as np

from .errors import DomainError


def nmi(labels_a, labels_b):
    """Normalized mutual information, 2 I(A;B) / (H(A) + H(B)).

    Degenerate conventions: both partitions constant (hence identical as
    partitions) -> 1; exactly one constant -> 0.
    """
    a = np.asarray(labels_a)
    b = np.asarray(labels_b)
    if a.shape != b.shape or a.ndim != 1 or a.size == 0:
        raise DomainError("labelings must be equal-length, non-empty 1-d sequences")
    _, ai = np.unique(a, return_inverse=True)
    _, bi = np.unique(b, return_inverse=True)
    n = a.size
    cont = np.zeros((ai.max() + 1, bi.max() + 1))
    np.add.at(cont, (ai, bi), 1.0)
    pij = cont / n
    pa = pij.sum(axis=1)
    pb = pij.sum(axis=0)
    h_a = _entropy(pa)
    h_b = _entropy(pb)
    if h_a == 0 and h_b == 0:
        return 1.0
    if h_a == 0 or h_b == 0:
        return 0.0
    nz = pij > 0
    mi = float((pij[nz] * (np.log(pij[nz])
                           - np.log(np.outer(pa, pb)[nz]))).sum())
    return float(np.clip(2.0 * mi / (h_a + h_b), 0.0, 1.0))


def _entropy(p):
    p = p[p > 0]
    return float(-(p * np.log(p)).sum())


def delta_nmi(labels, text_truth, time_truth):
    """NMI against the textual ground truth minus NMI against the temporal one."""
    nmi_text = nmi(labels, text_truth)
    nmi_time = nmi(labels, time_truth)
    return nmi_text, nmi_time, nmi_text - nmi_time


def score_run(result, corpus):
    """Score a stream result against a corpus's ground-truth labels.

    Labels are aligned with the time-sorted corpus order. Corpora without
    ground truth yield null metric fields.
    """
    docs = sorted(corpus, key=lambda d: (d.t, d.id))
    if len(result.labels) != len(docs):
        raise DomainError(
            f"result has {len(result.labels)} labels for {len(docs)} documents"
        )
    if not docs or not all(hasattr(d, "text_cluster") for d in docs):
        return {"nmi_text": None, "nmi_time": None, "delta_nmi": None}
    text_truth = [d.text_cluster for d in docs]
    time_truth = [d.time_cluster for d in docs]
    nmi_text, nmi_time, delta = delta_nmi(result.labels, text_truth, time_truth)
    return {"nmi_text": nmi_text, "nmi_time": nmi_time, "delta_nmi": delta}
