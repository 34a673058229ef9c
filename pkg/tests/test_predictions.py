"""Prediction harness: correlations, modeled acceptability, separability."""

import math

import numpy as np
import pytest

from probgram import (AcceptabilityParams, MetricKind, StringForm, WorldConfig,
                      analytic_check, attach_acceptability, build_cube_world,
                      build_random_world, error_distance, message_posterior,
                      minpair_accuracy, mismatched_pairs, pair_distance,
                      pred1_run, pred2_run, pred3_inequality_check, pred3_run,
                      simulate_minimal_pairs, spearman_trend, top_message,
                      with_modeled_logprobs)
from probgram.stats import ConstantInputError
from oracles import oracle_pearson, oracle_spearman


def test_pred1_overall_matches_oracle(cube):
    pairs = simulate_minimal_pairs(cube)
    rep = pred1_run(pairs, k_bins=0)
    xs = [p.gram.total_logprob for p in pairs]
    ys = [p.ungram.total_logprob for p in pairs]
    assert rep.overall_r == pytest.approx(oracle_pearson(xs, ys), abs=1e-12)
    assert rep.n == 7
    assert rep.kind == "pred1"


def test_pred1_bins_partition(cube):
    pairs = simulate_minimal_pairs(cube)
    rep = pred1_run(pairs, k_bins=2, distance="msg")
    assert sum(b.n for b in rep.bins) == len(pairs)
    assert [b.bin_index for b in rep.bins] == [0, 1]
    # distances are sorted across bins
    assert rep.bins[0].mean_distance <= rep.bins[1].mean_distance


def test_pred1_empty_and_degenerate_bins(cube):
    with pytest.raises(ValueError):
        pred1_run([])
    pairs = simulate_minimal_pairs(cube)
    # 7 pairs into 7 bins leaves singleton bins: pearson inside must fail loudly
    with pytest.raises(ConstantInputError, match="bin"):
        pred1_run(pairs, k_bins=7, distance="msg")


def test_analytic_check_is_exact(cube):
    pairs = simulate_minimal_pairs(cube)
    chk = analytic_check(pairs)
    # the variance-decomposition formula with sample estimators reproduces the
    # sample Pearson r identically, not just approximately
    assert chk.predicted_r == pytest.approx(chk.empirical_r, abs=1e-12)
    assert analytic_check(pairs[:2]) is None


def test_pair_distance_preference(cube):
    p = simulate_minimal_pairs(cube)[0]
    assert pair_distance(p, "error") == 1.0
    assert pair_distance(p, "msg") == p.msg_similarity
    assert pair_distance(p, "auto") == p.msg_similarity  # no cosine annotated
    with pytest.raises(ValueError, match="unknown distance"):
        pair_distance(p, "euclid")
    with pytest.raises(ValueError, match="no cosine_dist"):
        pair_distance(p, "cosine")


def test_noiseless_identity_on_minimal_pairs(cube):
    """With modeled log probabilities, every minimal ungrammatical string sits
    one edit from its inferred source, so delta acceptability is an affine
    function of delta log probability and the correlation is exactly 1."""
    pairs = with_modeled_logprobs(cube, simulate_minimal_pairs(cube))
    # precondition: inferred distance is 1 for every ungram member
    for p in pairs:
        u = StringForm(p.ungram.tokens)
        m = top_message(cube, message_posterior(cube, u))
        assert error_distance(cube, cube.realization[m], u) == 1
    params = AcceptabilityParams(w_message=1.0, w_error=0.15, noise_sd=0.0)
    acc = attach_acceptability(cube, pairs, params, seed=0)
    r = pred2_run(acc).overall_r
    assert abs(r - 1.0) < 1e-12


def test_noise_attenuates_and_is_reproducible(cube):
    pairs = with_modeled_logprobs(cube, simulate_minimal_pairs(cube))
    params = AcceptabilityParams(w_message=1.0, w_error=0.15, noise_sd=0.4)
    a = attach_acceptability(cube, pairs, params, seed=3)
    b = attach_acceptability(cube, pairs, params, seed=3)
    assert [p.acc_gram for p in a] == [p.acc_gram for p in b]
    r_noisy = pred2_run(a).overall_r
    assert r_noisy < 1.0
    # per-pair streams: processing order does not change the draws
    shuffled = attach_acceptability(cube, list(reversed(pairs)), params, seed=3)
    by_id = {p.pair_id: p for p in shuffled}
    assert all(by_id[p.pair_id].acc_ungram == p.acc_ungram for p in a)
    # a different seed gives different noise
    c = attach_acceptability(cube, pairs, params, seed=4)
    assert any(x.acc_gram != y.acc_gram for x, y in zip(a, c))


def test_acceptability_params_validation():
    with pytest.raises(ValueError):
        AcceptabilityParams(noise_sd=-0.1)
    with pytest.raises(ValueError):
        AcceptabilityParams(w_message=0.0)


def test_mismatched_pairs(cube):
    base = simulate_minimal_pairs(cube)
    mism = mismatched_pairs(cube, base, seed=5)
    assert len(mism) == len(base)
    assert mism == mismatched_pairs(cube, base, seed=5)
    for p, src in zip(mism, base):
        assert p.pair_id.endswith("~mismatch")
        u = StringForm(p.ungram.tokens)
        m_star = top_message(cube, message_posterior(cube, u))
        paired = p.pair_id.split("~")[0]
        assert paired != m_star
        assert p.gram.text == cube.realization[paired].text
    # single-message worlds cannot be mismatched
    single = build_random_world(WorldConfig(n_messages=1, n_slots=2,
                                            symbols_per_slot=2, law="uniform"))
    lone = simulate_minimal_pairs(single)
    assert mismatched_pairs(single, lone, seed=0) == []


def test_pred3_run_basics(cube):
    pairs = simulate_minimal_pairs(cube)
    pool = {}
    for p in pairs:
        pool.setdefault(p.gram.id, p.gram)
        pool.setdefault(p.ungram.id, p.ungram)
    sentences = [pool[k] for k in sorted(pool)]
    rep = pred3_run(sentences, [MetricKind.LOGPROB, MetricKind.BF_UNIFORM],
                    vocab_size=cube.vocab.size)
    assert set(rep.auc) == {"logprob", "bf_uniform"}
    assert rep.auc["logprob"] == 1.0  # cube grams all outscore cube ungrams
    # at fixed length bf_uniform is a monotone shift: same separability
    assert rep.auc["bf_uniform"] == rep.auc["logprob"]
    assert rep.summary["logprob"]["mean_gram"] > rep.summary["logprob"]["mean_ungram"]
    with pytest.raises(ValueError, match="both classes"):
        pred3_run([s for s in sentences if s.condition == "grammatical"],
                  [MetricKind.LOGPROB])
    with pytest.raises(ValueError):
        pred3_run([], [MetricKind.LOGPROB])


def test_minpair_accuracy(cube):
    pairs = simulate_minimal_pairs(cube)
    assert minpair_accuracy(pairs, MetricKind.LOGPROB) == 1.0
    tied = with_modeled_logprobs(cube, pairs)
    # modeled logprobs can tie when two pairs share message prior and depth;
    # easier: a pair against itself scores 0.5 by construction
    p = pairs[0]
    import dataclasses
    selfpair = dataclasses.replace(
        p, ungram=dataclasses.replace(p.ungram,
                                      token_logprobs=tuple(p.gram.total_logprob / p.ungram.n_tokens
                                                           for _ in p.ungram.tokens)))
    assert minpair_accuracy([selfpair], MetricKind.LOGPROB) == 0.5
    assert 0.0 <= minpair_accuracy(tied, MetricKind.LOGPROB) <= 1.0


def test_inequality_check_on_cube(cube):
    pairs = simulate_minimal_pairs(cube)
    res = pred3_inequality_check(cube, pairs)
    assert res.n_pairs == 7
    assert res.n_agree == 7  # exact ordering matches the margin rule here
    assert res.fraction == 1.0
    assert res.high_margin_n <= res.n_pairs
    empty = pred3_inequality_check(cube, [])
    assert empty.n_pairs == 0 and empty.fraction is None
    assert empty.high_margin_fraction is None


def test_inequality_margin_sign_by_hand(cube):
    # pair m3 ~ "The moon emerge": m_g = m3 (prior 0.1). The ungram string
    # neighbours m1's realization, so m_u = m1 (prior 0.6).
    # margin = ln 0.1 - ln 0.6 - (ln 0.05 - ln 3) = ln(0.1/0.6) + ln(60)
    pairs = [p for p in simulate_minimal_pairs(cube)
             if p.pair_id == "m3~The_moon_emerge"]
    res = pred3_inequality_check(cube, pairs)
    margin = math.log(0.1) - math.log(0.6) - (math.log(0.05) - math.log(3))
    assert margin > 2.0  # lands in the high-margin slice
    assert res.high_margin_n == 1 and res.high_margin_agree == 1


def test_spearman_trend():
    assert spearman_trend([3.0, 2.0, 1.0]) == pytest.approx(-1.0)
    assert spearman_trend([1.0, 2.0, 3.0]) == pytest.approx(1.0)
    assert spearman_trend([2.0, 2.0]) is None
    assert spearman_trend([5.0, 5.0, 5.0]) is None
    vals = [0.9, 0.8, 0.85, 0.4, 0.2]
    assert spearman_trend(vals) == pytest.approx(
        oracle_spearman(vals, list(range(1, 6))), abs=1e-12)


def test_report_json_dict(cube):
    rep = pred1_run(simulate_minimal_pairs(cube), k_bins=2, distance="msg")
    doc = rep.to_json_dict()
    assert doc["kind"] == "pred1"
    assert doc["n"] == 7
    assert len(doc["bins"]) == 2
    assert isinstance(doc["analytic"], dict)
