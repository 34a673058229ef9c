"""Record types shared across ingestion, scoring, and the prediction harness."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

CONDITIONS = ("grammatical", "ungrammatical")


class RecordError(ValueError):
    """A record violates the schema (lengths, signs, labels)."""


@dataclass(frozen=True)
class ScoredSentence:
    """One scored sentence from a model dump or the simulator.

    token_logprobs are per-token conditional log probabilities, aligned with
    tokens and all <= 0. pair_id is None for unpaired datasets; embedding is
    optional.
    """

    id: str
    dataset: str
    pair_id: str | None
    condition: str
    text: str
    tokens: tuple[str, ...]
    token_logprobs: tuple[float, ...]
    embedding: tuple[float, ...] | None = None
    language: str = ""

    def __post_init__(self) -> None:
        if not self.id:
            raise RecordError("sentence id must be non-empty")
        if self.condition not in CONDITIONS:
            raise RecordError(f"sentence {self.id!r}: condition {self.condition!r} "
                              f"is not one of {CONDITIONS}")
        if not self.tokens:
            raise RecordError(f"sentence {self.id!r}: empty token list")
        if len(self.tokens) != len(self.token_logprobs):
            raise RecordError(f"sentence {self.id!r}: {len(self.tokens)} tokens vs "
                              f"{len(self.token_logprobs)} logprobs")
        for lp in self.token_logprobs:
            if not lp <= 0.0:  # also catches NaN
                raise RecordError(f"sentence {self.id!r}: token logprob {lp!r} is not <= 0")
        if self.embedding is not None and len(self.embedding) == 0:
            raise RecordError(f"sentence {self.id!r}: embedding present but empty")

    @property
    def total_logprob(self) -> float:
        return float(sum(self.token_logprobs))

    @property
    def n_tokens(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True)
class PairRecord:
    """A (grammatical, ungrammatical) sentence pair plus its annotations.

    Distance and acceptability fields default to None until the relevant
    annotation step fills them.
    """

    pair_id: str
    gram: ScoredSentence
    ungram: ScoredSentence
    error_dist: int | None = None
    lev_dist: int | None = None
    cosine_dist: float | None = None
    msg_similarity: float | None = None
    acc_gram: float | None = None
    acc_ungram: float | None = None

    def __post_init__(self) -> None:
        if self.gram.condition != "grammatical":
            raise RecordError(f"pair {self.pair_id!r}: gram member labelled {self.gram.condition!r}")
        if self.ungram.condition != "ungrammatical":
            raise RecordError(f"pair {self.pair_id!r}: ungram member labelled {self.ungram.condition!r}")
        for name in ("error_dist", "lev_dist", "cosine_dist", "msg_similarity"):
            v = getattr(self, name)
            if v is not None and v < 0:
                raise RecordError(f"pair {self.pair_id!r}: {name}={v!r} is negative")

    @property
    def delta_logprob(self) -> float:
        """Grammatical minus ungrammatical total log probability."""
        return self.gram.total_logprob - self.ungram.total_logprob

    @property
    def delta_acceptability(self) -> float:
        if self.acc_gram is None or self.acc_ungram is None:
            raise RecordError(f"pair {self.pair_id!r}: acceptability not annotated")
        return self.acc_gram - self.acc_ungram


@dataclass(frozen=True)
class RatingRecord:
    """One acceptability judgment from one participant."""

    participant: str
    item: str
    rating: float
