import logging

import numpy as np
import pytest

from evtcfar.sequence import LabeledSequence
from evtcfar.synth import SynthConfig, generate_corpus
from evtcfar.tail import find_tail, map_scale
from evtcfar.train import TrainConfig, fit_tail_stats, train


def seq(sid, scores, labels=None, condition=None):
    return LabeledSequence(sid, np.asarray(scores, dtype=float), labels, condition)


def test_ramp_single_sequence():
    corpus = [seq("a", np.arange(1, 101))]
    res = fit_tail_stats(corpus, TrainConfig(orientation="anomaly_high"))
    assert (res.n, res.s) == (5, 15)
    assert (res.prior.alpha, res.prior.beta) == (401, 1200)
    # the same tail sizes appear in the lower tail
    low = train(corpus, TrainConfig())
    assert (low.alpha, low.beta) == (401, 1200)


def test_prior_formula_examples():
    # two sequences, mean tail excess 2
    a = seq("a", np.r_[np.zeros(95), [1, 2, 2, 3, 2]], None)
    b = seq("b", np.r_[np.zeros(95), [2, 2, 2, 2, 2]], None)
    prior = train([a, b], TrainConfig(orientation="anomaly_high"))
    assert (prior.alpha, prior.beta) == (401, 800)
    c = seq("c", np.r_[np.zeros(19), 5.0])
    prior = train([c], TrainConfig(w0=1, orientation="anomaly_high"))
    assert (prior.alpha, prior.beta) == (2, 5) and map_scale(prior) == 5


@pytest.mark.parametrize("w0", [1, 37.5, 400, 1e5])
def test_prior_map_is_pooled_mean_excess(w0):
    corpus = generate_corpus(SynthConfig(n=3000, anomaly_rate=0.01), range(5))
    res = fit_tail_stats(corpus, TrainConfig(w0=w0))
    assert map_scale(res.prior) == pytest.approx(res.s / res.n, rel=1e-12)


def test_pooled_statistics_match_per_sequence_tails():
    corpus = generate_corpus(SynthConfig(n=2000, anomaly_rate=0.01), range(3))
    res = fit_tail_stats(corpus)
    tails = [find_tail(-s.scores[s.labels == 0], 0.05) for s in corpus]
    assert res.n == sum(t.n for t in tails)
    assert res.s == pytest.approx(sum(t.s for t in tails), rel=1e-15)


def test_label_masking():
    base = generate_corpus(SynthConfig(n=2000, anomaly_rate=0.02), range(2))
    flipped = []
    for s in base:
        x = s.scores.copy()
        x[s.labels == 1] = -x[s.labels == 1] - 100
        flipped.append(LabeledSequence(s.seq_id, x, s.labels, s.condition))
    assert train(base) == train(flipped)


def test_order_invariance():
    corpus = generate_corpus(SynthConfig(n=1500), range(8))
    ref = train(corpus)
    for perm in np.random.default_rng(0).permutation(np.tile(np.arange(8), (5, 1)), axis=1):
        assert train([corpus[i] for i in perm]) == ref


def test_exclude_and_clear_only():
    corpus = generate_corpus(SynthConfig(n=1000), range(3))
    assert train(corpus, exclude=["synth-1"]) == train([corpus[0], corpus[2]])
    s = corpus[0]
    cond = np.where(np.arange(1000) < 500, "clear", "ballast").astype(object)
    mixed = LabeledSequence("m", s.scores, s.labels, cond)
    head = LabeledSequence("h", s.scores[:500])
    assert train([mixed], TrainConfig(clear_only=True)) == train([head])


def test_short_sequences_skipped(caplog):
    corpus = [seq("long", np.arange(100.0)), seq("short", np.arange(10.0))]
    with caplog.at_level(logging.WARNING):
        res = fit_tail_stats(corpus)
    assert res.used == ("long",) and res.skipped == ("short",)
    assert "short" in caplog.text


def test_errors():
    with pytest.raises(ValueError, match="'z'"):
        fit_tail_stats([seq("z", [1.0, 2.0], [1, 1])])
    with pytest.raises(ValueError):
        fit_tail_stats([seq("s", np.arange(5.0))])
    with pytest.raises(ValueError):
        TrainConfig(w0=0)
    with pytest.raises(ValueError):
        TrainConfig(p_u=1.0)
