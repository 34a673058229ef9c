"""Prediction harness: the three model predictions, runnable on simulator
pairs or ingested score dumps.

  1. Grammatical and meaning-matched ungrammatical log probabilities
     correlate, and the correlation weakens as pairs grow less matched.
  2. Modeled acceptability differences track log probability differences
     (exactly, absent noise, for meaning-matched pairs).
  3. Grammaticality is partially separable from string probability: AUC above
     chance but bounded away from 1 as message variance grows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

import numpy as np

from . import genmodel
from .genmodel import pair_noise_rng, top_message
from .records import PairRecord, ScoredSentence
from .scoring import MetricKind, TokenScores, UnigramTable, score
from .stats import (ConstantInputError, RocResult, midranks, pearson_r,
                    quantile_bins, rho_analytic, roc_auc)
from .worlds import StringForm, World, WorldError, message_similarity

HIGH_MARGIN = 2.0  # nats; |margin| above this should decide the inequality


@dataclass(frozen=True)
class AcceptabilityParams:
    """Linear acceptability model: w_message * ln P(m*) + w_error * E + noise,
    with E = d * ln(eps / K). Distinct weights keep acceptability from being a
    plain rescaling of log probability on mismatched pairs."""

    w_message: float = 1.0
    w_error: float = 0.15
    noise_sd: float = 0.0

    def __post_init__(self) -> None:
        if self.noise_sd < 0.0:
            raise ValueError(f"noise_sd must be >= 0, got {self.noise_sd}")
        if self.w_message == 0.0:
            # with no message term the matched deltas are constant and the
            # correlation is undefined
            raise ValueError("w_message must be nonzero")


@dataclass(frozen=True)
class BinStat:
    bin_index: int
    n: int
    mean_distance: float
    r: float


@dataclass(frozen=True)
class AnalyticCheck:
    """Variance-decomposition correlation vs the empirical one.

    X = grammatical total logprob, Z = ungrammatical total logprob, Y = Z - X.
    """

    var_x: float
    var_y: float
    cov_xy: float
    predicted_r: float
    empirical_r: float


@dataclass(frozen=True)
class InequalityAgreement:
    """Agreement between the prior-vs-channel inequality and exact ordering.

    Empty pair lists yield the explicit empty result (fraction None).
    """

    n_pairs: int
    n_agree: int
    fraction: float | None
    high_margin_n: int
    high_margin_agree: int
    high_margin_fraction: float | None


@dataclass(frozen=True)
class PredictionReport:
    kind: str
    n: int
    overall_r: float | None = None
    bins: tuple[BinStat, ...] = ()
    auc: Mapping[str, float] = field(default_factory=dict)
    roc: Mapping[str, RocResult] = field(default_factory=dict)
    summary: Mapping[str, Mapping[str, float]] = field(default_factory=dict)
    analytic: AnalyticCheck | None = None
    notes: tuple[str, ...] = ()

    def to_json_dict(self) -> dict:
        doc: dict = {"kind": self.kind, "n": self.n}
        if self.overall_r is not None:
            doc["overall_r"] = self.overall_r
        if self.bins:
            doc["bins"] = [{"bin": b.bin_index, "n": b.n,
                            "mean_distance": b.mean_distance, "r": b.r}
                           for b in self.bins]
        if self.auc:
            doc["auc"] = dict(sorted(self.auc.items()))
        if self.roc:
            doc["roc"] = {k: [list(p) for p in v.points]
                          for k, v in sorted(self.roc.items())}
        if self.summary:
            doc["summary"] = {k: dict(sorted(v.items()))
                              for k, v in sorted(self.summary.items())}
        if self.analytic is not None:
            doc["analytic"] = {"var_x": self.analytic.var_x, "var_y": self.analytic.var_y,
                               "cov_xy": self.analytic.cov_xy,
                               "predicted_r": self.analytic.predicted_r,
                               "empirical_r": self.analytic.empirical_r}
        if self.notes:
            doc["notes"] = list(self.notes)
        return doc


DISTANCE_FIELDS = {"cosine": "cosine_dist", "msg": "msg_similarity",
                   "lev": "lev_dist", "error": "error_dist"}
AUTO_DISTANCE_ORDER = ("cosine", "msg", "lev", "error")


def pair_distance(pair: PairRecord, prefer: str = "auto") -> float:
    """Distance annotation used for binning. auto prefers cosine, then message
    similarity, then Levenshtein, then error distance."""
    if prefer == "auto":
        for name in AUTO_DISTANCE_ORDER:
            v = getattr(pair, DISTANCE_FIELDS[name])
            if v is not None:
                return float(v)
        raise ValueError(f"pair {pair.pair_id!r} carries no distance annotation")
    try:
        fieldname = DISTANCE_FIELDS[prefer]
    except KeyError:
        raise ValueError(f"unknown distance {prefer!r}; expected one of "
                         f"{('auto',) + tuple(DISTANCE_FIELDS)}") from None
    v = getattr(pair, fieldname)
    if v is None:
        raise ValueError(f"pair {pair.pair_id!r} has no {fieldname} annotation")
    return float(v)


def _binned_r(xs: Sequence[float], ys: Sequence[float], dists: Sequence[float],
              k_bins: int) -> tuple[BinStat, ...]:
    bins = quantile_bins(dists, k_bins)
    out = []
    for b in range(k_bins):
        idx = [i for i, bi in enumerate(bins) if bi == b]
        bx = [xs[i] for i in idx]
        by = [ys[i] for i in idx]
        bd = [dists[i] for i in idx]
        try:
            r = pearson_r(bx, by)
        except (ConstantInputError, ValueError) as e:
            raise ConstantInputError(f"bin {b} ({len(idx)} pairs): {e}") from None
        out.append(BinStat(bin_index=b, n=len(idx),
                           mean_distance=float(np.mean(bd)), r=r))
    return tuple(out)


def pred1_run(pairs: Sequence[PairRecord], k_bins: int = 10,
              distance: str = "auto") -> PredictionReport:
    """Correlation between grammatical and ungrammatical log probabilities,
    overall and within distance bins."""
    if not pairs:
        raise ValueError("pred1 needs at least one pair")
    xs = [p.gram.total_logprob for p in pairs]
    ys = [p.ungram.total_logprob for p in pairs]
    overall = pearson_r(xs, ys)
    bins: tuple[BinStat, ...] = ()
    if k_bins:
        dists = [pair_distance(p, distance) for p in pairs]
        bins = _binned_r(xs, ys, dists, k_bins)
    return PredictionReport(kind="pred1", n=len(pairs), overall_r=overall,
                            bins=bins, analytic=analytic_check(pairs))


def pred2_run(pairs: Sequence[PairRecord], k_bins: int = 0,
              distance: str = "auto") -> PredictionReport:
    """Correlation between acceptability differences and log probability
    differences across pairs."""
    if not pairs:
        raise ValueError("pred2 needs at least one pair")
    xs = [p.delta_acceptability for p in pairs]
    ys = [p.delta_logprob for p in pairs]
    overall = pearson_r(xs, ys)
    bins: tuple[BinStat, ...] = ()
    if k_bins:
        dists = [pair_distance(p, distance) for p in pairs]
        bins = _binned_r(xs, ys, dists, k_bins)
    return PredictionReport(kind="pred2", n=len(pairs), overall_r=overall, bins=bins)


def analytic_check(pairs: Sequence[PairRecord]) -> AnalyticCheck | None:
    """Compare the variance-decomposition correlation against the empirical
    Pearson r. Returns None when the decomposition is degenerate."""
    if len(pairs) < 3:
        return None
    x = np.array([p.gram.total_logprob for p in pairs])
    z = np.array([p.ungram.total_logprob for p in pairs])
    y = z - x
    var_x = float(x.var(ddof=1))
    var_y = float(y.var(ddof=1))
    cov = float(np.cov(x, y, ddof=1)[0, 1])
    try:
        predicted = rho_analytic(var_x, var_y, cov)
        empirical = pearson_r(x, z)
    except (ValueError, ConstantInputError):
        return None
    return AnalyticCheck(var_x=var_x, var_y=var_y, cov_xy=cov,
                         predicted_r=predicted, empirical_r=empirical)


# ---------------------------------------------------------------------------
# modeled acceptability and modeled log probabilities

def _modeled_terms(world: World, s: StringForm, max_depth: int | None,
                   cache: dict | None = None) -> tuple[str, int, float]:
    """(inferred message id, error distance to its realization, ln prior)."""
    if cache is not None and s in cache:
        return cache[s]
    post = genmodel.message_posterior(world, s, max_depth=max_depth)
    m_star = top_message(world, post)
    d = genmodel.error_distance(world, world.realization[m_star], s)
    out = (m_star, d, math.log(world.prior(m_star)))
    if cache is not None:
        cache[s] = out
    return out


def _error_term(world: World) -> float:
    return math.log(world.epsilon / world.k_branch)


def synth_acceptability(world: World, pair: PairRecord, params: AcceptabilityParams,
                        seed: int, max_depth: int | None = None,
                        _cache: dict | None = None) -> tuple[float, float]:
    """Modeled acceptability for both members of a pair.

    Each sentence is rated on its own: the message term uses the sentence's
    inferred message and the error term its own inferred error distance.
    Noise draws come from a per-pair stream, so results do not depend on the
    order pairs are processed in; noise_sd == 0 draws nothing.
    """
    e1 = _error_term(world)
    out = []
    for s in (pair.gram, pair.ungram):
        sf = StringForm(s.tokens)
        _, d, lp_m = _modeled_terms(world, sf, max_depth, _cache)
        out.append(params.w_message * lp_m + params.w_error * d * e1)
    if params.noise_sd > 0.0:
        rng = pair_noise_rng(seed, pair.pair_id)
        out[0] += float(rng.normal(0.0, params.noise_sd))
        out[1] += float(rng.normal(0.0, params.noise_sd))
    return out[0], out[1]


def attach_acceptability(world: World, pairs: Sequence[PairRecord],
                         params: AcceptabilityParams, seed: int,
                         max_depth: int | None = None) -> list[PairRecord]:
    cache: dict = {}
    out = []
    for p in pairs:
        acc_g, acc_u = synth_acceptability(world, p, params, seed, max_depth, cache)
        out.append(replace(p, acc_gram=acc_g, acc_ungram=acc_u))
    return out


def _modeled_sentence(world: World, s: ScoredSentence, max_depth: int | None,
                      cache: dict) -> ScoredSentence:
    sf = StringForm(s.tokens)
    _, d, lp_m = _modeled_terms(world, sf, max_depth, cache)
    lp = lp_m + d * _error_term(world)
    return replace(s, token_logprobs=tuple(lp / len(s.tokens) for _ in s.tokens))


def with_modeled_logprobs(world: World, pairs: Sequence[PairRecord],
                          max_depth: int | None = None) -> list[PairRecord]:
    """Replace sentence log probabilities with the modeled decomposition
    ln P(m*) + d * ln(eps/K); the same decomposition the acceptability model
    weights, so noiseless matched pairs correlate exactly."""
    cache: dict = {}
    return [replace(p,
                    gram=_modeled_sentence(world, p.gram, max_depth, cache),
                    ungram=_modeled_sentence(world, p.ungram, max_depth, cache))
            for p in pairs]


def mismatched_pairs(world: World, pairs: Sequence[PairRecord], seed: int,
                     max_depth: int | None = None) -> list[PairRecord]:
    """Re-pair each ungrammatical member with a random other message.

    The replacement message is drawn uniformly from messages other than the
    ungrammatical sentence's inferred message, so the resulting pairs are
    deliberately not meaning matched. Sentences carry modeled log
    probabilities. Single-message worlds return an empty list.
    """
    rng = np.random.default_rng(seed)
    cache: dict = {}
    out = []
    for p in pairs:
        u = StringForm(p.ungram.tokens)
        m_star, _, _ = _modeled_terms(world, u, max_depth, cache)
        candidates = [m.id for m in world.messages if m.id != m_star]
        if not candidates:
            continue
        mid = candidates[int(rng.integers(len(candidates)))]
        g = world.realization[mid]
        pid = f"{mid}~{'_'.join(u.tokens)}~mismatch"
        gram = _modeled_sentence(
            world, genmodel._sim_sentence(world, g, pid, "grammatical", -1.0),
            max_depth, cache)
        ungram = replace(_modeled_sentence(world, p.ungram, max_depth, cache), pair_id=pid)
        out.append(PairRecord(
            pair_id=pid, gram=gram, ungram=ungram,
            error_dist=genmodel.error_distance(world, g, u),
            msg_similarity=message_similarity(world, mid, m_star)))
    return out


# ---------------------------------------------------------------------------
# prediction 3: separability

def pred3_run(sentences: Sequence[ScoredSentence], metrics: Sequence[MetricKind],
              unigram: UnigramTable | None = None,
              vocab_size: float | None = None) -> PredictionReport:
    """Pool sentences, score them under each metric, and measure how well the
    score separates grammatical from ungrammatical (ROC/AUC)."""
    if not sentences:
        raise ValueError("pred3 needs at least one sentence")
    if not metrics:
        raise ValueError("pred3 needs at least one metric")
    pos_ts = [TokenScores.from_sentence(s) for s in sentences
              if s.condition == "grammatical"]
    neg_ts = [TokenScores.from_sentence(s) for s in sentences
              if s.condition == "ungrammatical"]
    if not pos_ts or not neg_ts:
        raise ValueError(f"pred3 needs both classes; got {len(pos_ts)} grammatical "
                         f"and {len(neg_ts)} ungrammatical sentences")
    auc: dict[str, float] = {}
    roc: dict[str, RocResult] = {}
    summary: dict[str, dict[str, float]] = {}
    for kind in metrics:
        pos = [score(kind, ts, unigram=unigram, vocab_size=vocab_size) for ts in pos_ts]
        neg = [score(kind, ts, unigram=unigram, vocab_size=vocab_size) for ts in neg_ts]
        res = roc_auc(pos, neg)
        auc[kind.value] = res.auc
        roc[kind.value] = res
        summary[kind.value] = {
            "n_gram": float(len(pos)), "n_ungram": float(len(neg)),
            "mean_gram": float(np.mean(pos)), "mean_ungram": float(np.mean(neg)),
            "sd_gram": float(np.std(pos, ddof=1)) if len(pos) > 1 else 0.0,
            "sd_ungram": float(np.std(neg, ddof=1)) if len(neg) > 1 else 0.0,
        }
    return PredictionReport(kind="pred3", n=len(sentences), auc=auc, roc=roc,
                            summary=summary)


def minpair_accuracy(pairs: Sequence[PairRecord], metric: MetricKind,
                     unigram: UnigramTable | None = None,
                     vocab_size: float | None = None) -> float:
    """Fraction of pairs whose grammatical member scores higher; ties 0.5."""
    if not pairs:
        raise ValueError("minpair_accuracy needs at least one pair")
    total = 0.0
    for p in pairs:
        sg = score(metric, TokenScores.from_sentence(p.gram),
                   unigram=unigram, vocab_size=vocab_size)
        su = score(metric, TokenScores.from_sentence(p.ungram),
                   unigram=unigram, vocab_size=vocab_size)
        total += 1.0 if sg > su else (0.5 if sg == su else 0.0)
    return total / len(pairs)


def pred3_inequality_check(world: World, pairs: Sequence[PairRecord],
                           max_depth: int | None = None) -> InequalityAgreement:
    """Check ln P(m_g) - ln P(m_u) > ln eps - ln K against the exact ordering.

    m_u is the likelihood argmax over messages given an error generation
    (ties: higher prior, then smaller id). The high-margin slice keeps pairs
    whose inequality margin exceeds HIGH_MARGIN nats in absolute value.
    """
    if not pairs:
        return InequalityAgreement(0, 0, None, 0, 0, None)
    if max_depth is None:
        max_depth = genmodel.default_max_depth(world)
    table = genmodel.string_prob_table(world, max_depth)
    rhs = math.log(world.epsilon) - math.log(world.k_branch)
    n_agree = 0
    hm_n = 0
    hm_agree = 0
    for p in pairs:
        g = StringForm(p.gram.tokens)
        u = StringForm(p.ungram.tokens)
        if g not in world.message_of:
            raise WorldError(f"pair {p.pair_id!r}: {g.text!r} is not a realization")
        m_g = world.message_of[g].id
        mass = genmodel._walk_error_mass(world, u, max_depth)
        likelihood = {m.id: float(v) for m, v in zip(world.messages, mass)}
        m_u = top_message(world, likelihood)
        margin = math.log(world.prior(m_g)) - math.log(world.prior(m_u)) - rhs
        predicted = margin > 0.0
        actual = table[g].value > table[u].value
        agree = predicted == actual
        n_agree += agree
        if abs(margin) > HIGH_MARGIN:
            hm_n += 1
            hm_agree += agree
    return InequalityAgreement(
        n_pairs=len(pairs), n_agree=n_agree, fraction=n_agree / len(pairs),
        high_margin_n=hm_n, high_margin_agree=hm_agree,
        high_margin_fraction=(hm_agree / hm_n) if hm_n else None)


def spearman_trend(values: Sequence[float]) -> float | None:
    """Spearman correlation of values against their positions (trend test).
    None when fewer than 3 values or the values are constant."""
    if len(values) < 3:
        return None
    ranks = midranks(values)
    try:
        return pearson_r(ranks, np.arange(1.0, len(values) + 1.0))
    except ConstantInputError:
        return None
