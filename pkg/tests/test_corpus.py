import numpy as np
import pytest

from pdhp.corpus import (
    CorpusSpec,
    decorrelate,
    generate,
    make_vocabularies,
    overlap,
    shift_for_temporal_overlap,
    temporal_overlap_measure,
)
from pdhp.errors import DomainError
from pdhp.point_process import HawkesParams, KernelBank, simulate_hawkes

DESK = dict(horizon=120.0)


class TestOverlap:
    def test_identical(self):
        p = np.full(10, 0.1)
        assert overlap(p, p) == pytest.approx(0.5)

    def test_disjoint(self):
        p = np.array([0.5, 0.5, 0.0, 0.0])
        q = np.array([0.0, 0.0, 0.5, 0.5])
        assert overlap(p, q) == 0.0

    def test_half_shared_uniforms(self):
        # two uniform 1000-word vocabularies sharing 500 words
        p = np.zeros(1500)
        q = np.zeros(1500)
        p[:1000] = 1e-3
        q[500:] = 1e-3
        assert overlap(p, q) == pytest.approx(0.25)

    def test_symmetry_and_bounds(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            p = rng.dirichlet(np.ones(30))
            q = rng.dirichlet(np.ones(30))
            assert overlap(p, q) == pytest.approx(overlap(q, p), abs=1e-12)
            assert 0 <= overlap(p, q) <= 0.5

    def test_joint_permutation_invariance(self):
        rng = np.random.default_rng(1)
        p = rng.dirichlet(np.ones(20))
        q = rng.dirichlet(np.ones(20))
        perm = rng.permutation(20)
        assert overlap(p[perm], q[perm]) == pytest.approx(overlap(p, q), abs=1e-12)

    def test_unnormalized_rejected(self):
        with pytest.raises(DomainError):
            overlap(np.full(4, 0.3), np.full(4, 0.25))


class TestVocabularies:
    def test_target_zero(self):
        a, b = make_vocabularies(1000, 0.0, seed=0)
        assert (a[:1000] > 0).all() and (a[1000:] == 0).all()
        assert (b[:1000] == 0).all() and (b[1000:] > 0).all()
        assert overlap(a, b) == 0.0

    def test_target_half_identical(self):
        a, b = make_vocabularies(1000, 0.5, seed=0)
        assert a == pytest.approx(b)
        assert overlap(a, b) == pytest.approx(0.5)

    def test_target_quarter_exact(self):
        a, b = make_vocabularies(1000, 0.25, seed=0)
        assert overlap(a, b) == pytest.approx(0.25, abs=1e-12)

    @pytest.mark.parametrize("target", [0.0, 0.1, 0.25, 0.4, 0.5])
    def test_uniform_targets_hit_within_tolerance(self, target):
        a, b = make_vocabularies(1000, target, seed=3)
        assert overlap(a, b) == pytest.approx(target, abs=1e-3)

    def test_zipf_option_normalized(self):
        a, b = make_vocabularies(500, 0.2, seed=5, zipf_exponent=1.1)
        assert a.sum() == pytest.approx(1.0)
        assert len(np.unique(a[a > 0])) > 1


class TestTemporalShift:
    bank = KernelBank((0.5, 2.0, 8.0))
    params = HawkesParams(1.2, (0.2, 0.2, 0.1))

    def test_self_overlap_is_half(self):
        h = simulate_hawkes(self.params, self.bank, 200.0, 0).times
        assert temporal_overlap_measure(h, h) == pytest.approx(0.5)

    def test_disjoint_after_large_shift(self):
        h = np.asarray(simulate_hawkes(self.params, self.bank, 200.0, 1).times)
        shifted = h + (np.ptp(h) + 50.0)
        assert temporal_overlap_measure(h, shifted) == pytest.approx(0.0, abs=1e-12)

    def test_reaches_target_and_self_checks(self):
        a = np.asarray(simulate_hawkes(self.params, self.bank, 300.0, 2).times)
        b = np.asarray(simulate_hawkes(self.params, self.bank, 300.0, 3).times)
        res = shift_for_temporal_overlap(a, b, target=0.25)
        assert res.converged
        # re-measure on the shifted pair
        assert temporal_overlap_measure(a, b + res.delta) == pytest.approx(
            0.25, abs=0.02
        )

    def test_invalid_target(self):
        with pytest.raises(DomainError):
            shift_for_temporal_overlap([1.0], [2.0], target=0.7)


class TestGenerate:
    def test_deterministic_per_seed(self):
        spec = CorpusSpec(seed=4, **DESK)
        assert generate(spec) == generate(spec)
        other = generate(CorpusSpec(seed=5, **DESK))
        assert other != generate(spec)

    def test_doc_shape_and_sortedness(self):
        docs = generate(CorpusSpec(seed=0, **DESK))
        assert all(len(d.tokens) == 20 for d in docs)
        assert all(a.t <= b.t for a, b in zip(docs, docs[1:]))
        assert [d.id for d in docs] == list(range(len(docs)))

    def test_zero_vocab_overlap_disjoint_tokens(self):
        docs = generate(CorpusSpec(seed=1, **DESK))
        seen = {}
        for d in docs:
            for w in d.tokens:
                assert seen.setdefault(w, d.text_cluster) == d.text_cluster

    def test_labels_consistent_without_decorrelation(self):
        docs = generate(CorpusSpec(seed=2, **DESK))
        assert all(d.text_cluster == d.time_cluster for d in docs)

    def test_temporal_overlap_target_reached(self):
        spec = CorpusSpec(seed=3, horizon=300.0, temporal_overlap=0.25)
        docs = generate(spec)
        a = [d.t for d in docs if d.time_cluster == 0]
        b = [d.t for d in docs if d.time_cluster == 1]
        assert temporal_overlap_measure(a, b) == pytest.approx(0.25, abs=0.05)


class TestDecorrelate:
    def corpus(self, seed=0):
        return generate(CorpusSpec(seed=seed, **DESK))

    def vocabs(self):
        return make_vocabularies(1000, 0.0, seed=0)

    def test_zero_fraction_identity(self):
        docs = self.corpus()
        assert decorrelate(docs, 0.0, seed=1, vocabularies=self.vocabs()) == docs

    def test_exact_resample_count(self):
        docs = self.corpus()
        out = decorrelate(docs, 0.3, seed=1, vocabularies=self.vocabs())
        changed = sum(1 for a, b in zip(docs, out) if a.tokens != b.tokens)
        # every resampled doc draws 20 fresh tokens; collisions are impossible
        # across windows and vanishingly rare within one
        assert changed <= int(np.floor(0.3 * len(docs)))
        relabeled = sum(1 for a, b in zip(docs, out)
                        if b.text_cluster != b.time_cluster)
        assert relabeled > 0

    def test_full_fraction_label_split(self):
        docs = generate(CorpusSpec(seed=7, horizon=300.0))
        out = decorrelate(docs, 1.0, seed=2, vocabularies=self.vocabs())
        frac = np.mean([d.text_cluster != d.time_cluster for d in out])
        assert frac == pytest.approx(0.5, abs=0.03)

    def test_timestamps_and_time_labels_unchanged(self):
        docs = self.corpus()
        out = decorrelate(docs, 0.5, seed=3, vocabularies=self.vocabs())
        assert [(d.t, d.time_cluster, d.id) for d in docs] == [
            (d.t, d.time_cluster, d.id) for d in out
        ]

    def test_nonzero_overlap_corpus_rejected(self):
        docs = generate(CorpusSpec(seed=0, vocab_overlap=0.25, **DESK))
        with pytest.raises(DomainError):
            decorrelate(docs, 0.5, seed=1, vocabularies=self.vocabs())

    def test_generate_with_fraction(self):
        spec = CorpusSpec(seed=5, decorrelate_fraction=0.4, **DESK)
        docs = generate(spec)
        assert any(d.text_cluster != d.time_cluster for d in docs)
        assert generate(spec) == docs
