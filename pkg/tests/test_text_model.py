import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pdhp.errors import DomainError, IntegrityError
from pdhp.text_model import ClusterWordCounts, predictive_log_likelihood


def sequential_product_oracle(counts, doc_tokens, theta0):
    """Token-by-token Polya-urn product, independent of the lgamma path."""
    n_w = dict(counts.counts)
    total = counts.total
    v = counts.vocab_size
    ll = 0.0
    seen = {}
    for j, w in enumerate(doc_tokens):
        num = n_w.get(w, 0) + seen.get(w, 0) + theta0
        den = total + j + v * theta0
        ll += np.log(num / den)
        seen[w] = seen.get(w, 0) + 1
    return ll


def test_single_token_empty_cluster():
    counts = ClusterWordCounts(1000)
    for theta0 in (0.01, 0.5, 2.0):
        ll = predictive_log_likelihood(counts, [42], theta0)
        assert ll == pytest.approx(np.log(0.001), abs=1e-9)


def test_two_identical_tokens_closed_form():
    counts = ClusterWordCounts(1000)
    ll = predictive_log_likelihood(counts, [7, 7], 0.01)
    assert ll == pytest.approx(np.log(0.001 * 1.01 / 11), abs=1e-10)
    assert np.exp(ll) == pytest.approx(9.1818e-5, rel=1e-4)


def test_matches_sequential_oracle():
    rng = np.random.default_rng(0)
    for _ in range(20):
        counts = ClusterWordCounts(200)
        counts.update(rng.integers(0, 200, size=150).tolist())
        doc = rng.integers(0, 200, size=20).tolist()
        theta0 = float(rng.uniform(0.01, 2.0))
        got = predictive_log_likelihood(counts, doc, theta0)
        assert got == pytest.approx(sequential_product_oracle(counts, doc, theta0),
                                    abs=1e-10)


def test_permutation_invariance():
    rng = np.random.default_rng(1)
    counts = ClusterWordCounts(50)
    counts.update(rng.integers(0, 50, size=80).tolist())
    doc = rng.integers(0, 50, size=15).tolist()
    ref = predictive_log_likelihood(counts, doc, 0.3)
    for _ in range(100):
        rng.shuffle(doc)
        assert predictive_log_likelihood(counts, doc, 0.3) == pytest.approx(
            ref, abs=1e-12
        )


def test_single_token_normalization():
    rng = np.random.default_rng(2)
    v = 100
    counts = ClusterWordCounts(v)
    counts.update(rng.integers(0, v, size=60).tolist())
    total = sum(np.exp(predictive_log_likelihood(counts, [w], 0.7)) for w in range(v))
    assert total == pytest.approx(1.0, abs=1e-9)


def test_monotone_in_cluster_counts():
    v = 100
    doc = [3, 3, 3]
    prev = predictive_log_likelihood(ClusterWordCounts(v), doc, 0.1)
    counts = ClusterWordCounts(v)
    for _ in range(5):
        counts.update([3])
        cur = predictive_log_likelihood(counts, doc, 0.1)
        assert cur > prev
        prev = cur


def test_out_of_vocabulary_rejected():
    counts = ClusterWordCounts(10)
    with pytest.raises(DomainError):
        predictive_log_likelihood(counts, [10], 0.1)
    with pytest.raises(DomainError):
        counts.update([-1])


def test_update_example():
    counts = ClusterWordCounts(10)
    counts.update([3, 3, 7])
    assert counts.counts == {3: 2, 7: 1}
    assert counts.total == 3


def test_downdate_below_zero():
    counts = ClusterWordCounts(10)
    counts.update([3])
    with pytest.raises(IntegrityError):
        counts.downdate([3, 3])


@settings(max_examples=50, deadline=None)
@given(
    base=st.lists(st.integers(0, 29), max_size=60),
    doc=st.lists(st.integers(0, 29), max_size=20),
)
def test_update_downdate_roundtrip(base, doc):
    counts = ClusterWordCounts(30)
    counts.update(base)
    before = (dict(counts.counts), counts.total)
    counts.update(doc)
    counts.downdate(doc)
    assert (counts.counts, counts.total) == before
