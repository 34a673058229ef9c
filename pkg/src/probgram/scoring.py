"""Acceptability scoring metrics over per-token log probabilities.

Five metrics, all monotone in the summed log probability at fixed length:

  logprob       sum_n log p(w_n | ctx)
  bf_uniform    sum + N * ln |vocab|          (Bayes factor vs uniform strings)
  bf_unigram    sum - sum_n ln p_uni(w_n)     (Bayes factor vs unigram strings)
  slor          bf_unigram / N                (mean pointwise mutual information)
  mean_logprob  sum / N

Identities used by the test suite: bf_unigram == N * slor, and with a uniform
unigram table slor == mean_logprob + ln |vocab|.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping

from .records import ScoredSentence


class MetricConfigError(ValueError):
    """A metric was invoked without the resources it needs."""


@dataclass(frozen=True)
class TokenScores:
    """Tokens with aligned conditional log probabilities (each <= 0)."""

    tokens: tuple[str, ...]
    logprobs: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.tokens:
            raise MetricConfigError("TokenScores needs at least one token")
        if len(self.tokens) != len(self.logprobs):
            raise MetricConfigError(f"{len(self.tokens)} tokens vs {len(self.logprobs)} logprobs")
        for lp in self.logprobs:
            if not lp <= 0.0:
                raise MetricConfigError(f"token logprob {lp!r} is not <= 0")

    @classmethod
    def from_sentence(cls, s: ScoredSentence) -> "TokenScores":
        return cls(tokens=s.tokens, logprobs=s.token_logprobs)

    @property
    def n(self) -> int:
        return len(self.tokens)

    @property
    def total(self) -> float:
        return float(sum(self.logprobs))


class MetricKind(enum.Enum):
    LOGPROB = "logprob"
    BF_UNIFORM = "bf_uniform"
    BF_UNIGRAM = "bf_unigram"
    SLOR = "slor"
    MEAN_LOGPROB = "mean_logprob"

    @classmethod
    def from_name(cls, name: str) -> "MetricKind":
        for kind in cls:
            if kind.value == name:
                return kind
        valid = ", ".join(k.value for k in cls)
        raise MetricConfigError(f"unknown metric {name!r}; expected one of: {valid}")

    @property
    def needs_unigram(self) -> bool:
        return self in (MetricKind.BF_UNIGRAM, MetricKind.SLOR)

    @property
    def needs_vocab_size(self) -> bool:
        return self is MetricKind.BF_UNIFORM


@dataclass(frozen=True)
class UnigramTable:
    """Token counts with add-alpha smoothing over a closed vocabulary.

    log_freq(t) = ln((count(t) + alpha) / (total + alpha * vocab_size)).
    vocab_size is the closed vocabulary size and must cover every observed
    token, so total smoothed mass never exceeds 1.
    """

    counts: Mapping[str, float]
    vocab_size: int
    smoothing_alpha: float = 0.0

    def __post_init__(self) -> None:
        if not self.counts:
            raise MetricConfigError("unigram table needs at least one token")
        if self.smoothing_alpha < 0.0:
            raise MetricConfigError(f"alpha must be >= 0, got {self.smoothing_alpha}")
        if self.vocab_size < len(self.counts):
            raise MetricConfigError(f"vocab_size={self.vocab_size} is smaller than the "
                                    f"{len(self.counts)} observed types")
        for tok, c in self.counts.items():
            if c < 0:
                raise MetricConfigError(f"negative count for token {tok!r}")
        if self.total <= 0.0:
            raise MetricConfigError("unigram table has zero total count")

    @cached_property
    def total(self) -> float:
        return float(sum(self.counts.values()))

    @cached_property
    def _log_denom(self) -> float:
        return math.log(self.total + self.smoothing_alpha * self.vocab_size)

    def log_freq(self, token: str) -> float:
        num = self.counts.get(token, 0.0) + self.smoothing_alpha
        if num <= 0.0:
            raise MetricConfigError(f"token {token!r} has zero smoothed frequency "
                                    f"(unseen and alpha=0)")
        return math.log(num) - self._log_denom

    @property
    def log_freqs(self) -> dict[str, float]:
        return {tok: self.log_freq(tok) for tok in sorted(self.counts)}

    @classmethod
    def uniform(cls, vocab: Iterable[str]) -> "UnigramTable":
        counts = {tok: 1.0 for tok in vocab}
        return cls(counts=counts, vocab_size=len(counts), smoothing_alpha=0.0)

    def to_tsv(self, path: str | Path) -> None:
        """Header line of JSON metadata, then token<TAB>count rows."""
        header = json.dumps({"vocab_size": self.vocab_size,
                             "smoothing_alpha": self.smoothing_alpha}, sort_keys=True)
        lines = [f"# {header}"]
        lines += [f"{tok}\t{self.counts[tok]:.17g}" for tok in sorted(self.counts)]
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    @classmethod
    def from_tsv(cls, path: str | Path) -> "UnigramTable":
        raw = Path(path).read_text(encoding="utf-8").splitlines()
        if not raw or not raw[0].startswith("# "):
            raise MetricConfigError(f"{path}: missing '# {{json}}' header line")
        try:
            meta = json.loads(raw[0][2:])
        except json.JSONDecodeError as e:
            raise MetricConfigError(f"{path}: unparseable header: {e}") from None
        counts: dict[str, float] = {}
        for i, line in enumerate(raw[1:], start=2):
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise MetricConfigError(f"{path}:{i}: expected 'token<TAB>count', got {line!r}")
            tok, c = parts
            try:
                counts[tok] = float(c)
            except ValueError:
                raise MetricConfigError(f"{path}:{i}: count {c!r} is not a number") from None
        return cls(counts=counts, vocab_size=int(meta["vocab_size"]),
                   smoothing_alpha=float(meta["smoothing_alpha"]))


def logprob_sum(ts: TokenScores) -> float:
    return ts.total


def bf_uniform(ts: TokenScores, vocab_size: float) -> float:
    if vocab_size is None or vocab_size < 2:
        raise MetricConfigError(f"bf_uniform needs vocab_size >= 2, got {vocab_size!r}")
    return ts.total + ts.n * math.log(vocab_size)


def bf_unigram(ts: TokenScores, table: UnigramTable) -> float:
    if table is None:
        raise MetricConfigError("bf_unigram needs a unigram table")
    return ts.total - sum(table.log_freq(t) for t in ts.tokens)


def slor(ts: TokenScores, table: UnigramTable) -> float:
    if table is None:
        raise MetricConfigError("slor needs a unigram table")
    return bf_unigram(ts, table) / ts.n


def mean_logprob(ts: TokenScores) -> float:
    return ts.total / ts.n


def score(kind: MetricKind, ts: TokenScores, *, unigram: UnigramTable | None = None,
          vocab_size: float | None = None) -> float:
    """Dispatch on MetricKind; raises MetricConfigError naming a missing resource."""
    if kind is MetricKind.LOGPROB:
        return logprob_sum(ts)
    if kind is MetricKind.MEAN_LOGPROB:
        return mean_logprob(ts)
    if kind is MetricKind.BF_UNIFORM:
        if vocab_size is None:
            raise MetricConfigError("metric bf_uniform requires vocab_size")
        return bf_uniform(ts, vocab_size)
    if kind is MetricKind.BF_UNIGRAM:
        if unigram is None:
            raise MetricConfigError("metric bf_unigram requires a unigram table")
        return bf_unigram(ts, unigram)
    if kind is MetricKind.SLOR:
        if unigram is None:
            raise MetricConfigError("metric slor requires a unigram table")
        return slor(ts, unigram)
    raise MetricConfigError(f"unhandled metric {kind!r}")
