"""Streaming clustering of timestamped documents with a powered
Dirichlet-Hawkes temporal prior, sequential Monte-Carlo inference, and a
synthetic-corpus evaluation lab."""

__version__ = "0.1.0"

from .core import PdhpConfig, prior_over_clusters, posterior_over_clusters
from .corpus import CorpusSpec, generate, overlap
from .documents import Document, LabeledDocument
from .metrics import nmi, score_run
from .point_process import (
    EventHistory,
    HawkesParams,
    KernelBank,
    estimate_weights,
    intensity,
    self_excitation_log_likelihood,
    simulate_hawkes,
)
from .smc import SmcConfig, StreamResult, run_stream
from .text_model import ClusterWordCounts, predictive_log_likelihood

__all__ = [
    "PdhpConfig", "prior_over_clusters", "posterior_over_clusters",
    "CorpusSpec", "generate", "overlap",
    "Document", "LabeledDocument",
    "nmi", "score_run",
    "EventHistory", "HawkesParams", "KernelBank",
    "estimate_weights", "intensity", "self_excitation_log_likelihood",
    "simulate_hawkes",
    "SmcConfig", "StreamResult", "run_stream",
    "ClusterWordCounts", "predictive_log_likelihood",
]
