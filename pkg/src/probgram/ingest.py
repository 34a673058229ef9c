"""Readers and validators for score dumps, judgments, and corpora.

Score dumps are UTF-8 JSON Lines, one ScoredSentence per line. An optional
first line {"record_type": "header", ...} documents the producing model and
its conventions; it is kept as metadata, never counted as a reject. Loaders
account for every input line: kept + rejected + header + blank == total.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

from .records import PairRecord, RatingRecord, RecordError, ScoredSentence
from .scoring import MetricConfigError, UnigramTable
from .stats import cosine_distance, empirical_quantile, levenshtein

RATING_RANGE = (1.0, 7.0)


class IngestError(ValueError):
    """Input file failed validation; the message lists every problem found."""


@dataclass(frozen=True)
class LineIssue:
    line_no: int
    message: str

    def __str__(self) -> str:
        return f"line {self.line_no}: {self.message}"


@dataclass
class IngestReport:
    records: list[ScoredSentence]
    rejected: list[LineIssue]
    header: dict | None
    n_lines: int
    n_blank: int

    @property
    def n_kept(self) -> int:
        return len(self.records)


_REQUIRED = ("id", "dataset", "pair_id", "condition", "text",
             "tokens", "token_logprobs", "embedding", "language")


def _parse_record(obj: dict, line_no: int) -> ScoredSentence:
    missing = [k for k in _REQUIRED if k not in obj]
    if missing:
        raise RecordError(f"missing field(s): {', '.join(missing)}")
    tokens = obj["tokens"]
    logprobs = obj["token_logprobs"]
    if not isinstance(tokens, list) or not all(isinstance(t, str) for t in tokens):
        raise RecordError("tokens must be a list of strings")
    if not isinstance(logprobs, list) or not all(isinstance(x, (int, float)) for x in logprobs):
        raise RecordError("token_logprobs must be a list of numbers")
    embedding = obj["embedding"]
    if embedding is not None:
        if not isinstance(embedding, list) or not all(isinstance(x, (int, float)) for x in embedding):
            raise RecordError("embedding must be null or a list of numbers")
        embedding = tuple(float(x) for x in embedding)
    pair_id = obj["pair_id"]
    if pair_id is not None and not isinstance(pair_id, str):
        raise RecordError("pair_id must be null or a string")
    return ScoredSentence(
        id=str(obj["id"]), dataset=str(obj["dataset"]), pair_id=pair_id,
        condition=str(obj["condition"]), text=str(obj["text"]),
        tokens=tuple(tokens), token_logprobs=tuple(float(x) for x in logprobs),
        embedding=embedding, language=str(obj["language"]))


def read_scored_jsonl(path: str | Path, on_error: str = "raise") -> IngestReport:
    """Load a score dump. on_error='raise' raises an IngestError listing every
    malformed line; on_error='collect' returns them in the report instead."""
    if on_error not in ("raise", "collect"):
        raise ValueError(f"on_error must be 'raise' or 'collect', got {on_error!r}")
    path = Path(path)
    records: list[ScoredSentence] = []
    rejected: list[LineIssue] = []
    header: dict | None = None
    seen_keys: dict[tuple, int] = {}
    n_lines = 0
    n_blank = 0
    with path.open(encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            n_lines += 1
            stripped = line.strip()
            if not stripped:
                n_blank += 1
                continue
            try:
                obj = json.loads(stripped)
            except json.JSONDecodeError as e:
                rejected.append(LineIssue(line_no, f"unparseable JSON: {e}"))
                continue
            if not isinstance(obj, dict):
                rejected.append(LineIssue(line_no, "line is not a JSON object"))
                continue
            if obj.get("record_type") == "header":
                if line_no == 1:
                    header = obj
                else:
                    rejected.append(LineIssue(line_no, "header record after line 1"))
                continue
            try:
                rec = _parse_record(obj, line_no)
            except RecordError as e:
                rejected.append(LineIssue(line_no, str(e)))
                continue
            if rec.pair_id is not None:
                key = (rec.dataset, rec.pair_id, rec.condition)
                if key in seen_keys:
                    rejected.append(LineIssue(
                        line_no, f"duplicate (dataset, pair_id, condition) = {key!r}, "
                                 f"first seen on line {seen_keys[key]}"))
                    continue
                seen_keys[key] = line_no
            records.append(rec)
    report = IngestReport(records=records, rejected=rejected, header=header,
                          n_lines=n_lines, n_blank=n_blank)
    if rejected and on_error == "raise":
        details = "\n".join(str(i) for i in rejected)
        raise IngestError(f"{path}: {len(rejected)} invalid line(s):\n{details}")
    return report


def build_pairs(records: Sequence[ScoredSentence]) -> tuple[list[PairRecord], list[str]]:
    """Assemble pairs on (dataset, pair_id). Returns (pairs, unpaired keys);
    records with pair_id=None are never paired and never reported missing."""
    groups: dict[tuple[str, str], dict[str, ScoredSentence]] = {}
    for rec in records:
        if rec.pair_id is None:
            continue
        groups.setdefault((rec.dataset, rec.pair_id), {})[rec.condition] = rec
    pairs: list[PairRecord] = []
    unpaired: list[str] = []
    for (dataset, pid), members in sorted(groups.items()):
        if len(members) == 2:
            pairs.append(PairRecord(pair_id=f"{dataset}/{pid}",
                                    gram=members["grammatical"],
                                    ungram=members["ungrammatical"]))
        else:
            unpaired.append(f"{dataset}/{pid}")
    return pairs, unpaired


def read_judgments_csv(path: str | Path) -> tuple[list[RatingRecord], list[LineIssue]]:
    """Read participant,item,rating rows. Non-numeric ratings are errors
    (reported together); ratings outside [1, 7] are flagged but kept."""
    path = Path(path)
    with path.open(encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        cols = reader.fieldnames or []
        missing = [c for c in ("participant", "item", "rating") if c not in cols]
        if missing:
            raise IngestError(f"{path}: missing column(s): {', '.join(missing)}")
        records: list[RatingRecord] = []
        errors: list[LineIssue] = []
        flags: list[LineIssue] = []
        for row_no, row in enumerate(reader, start=2):  # header is line 1
            try:
                rating = float(row["rating"])
            except (TypeError, ValueError):
                errors.append(LineIssue(row_no, f"rating {row['rating']!r} is not numeric"))
                continue
            lo, hi = RATING_RANGE
            if not lo <= rating <= hi:
                flags.append(LineIssue(row_no, f"rating {rating} outside [{lo:g}, {hi:g}]"))
            records.append(RatingRecord(participant=row["participant"],
                                        item=row["item"], rating=rating))
    if errors:
        details = "\n".join(str(e) for e in errors)
        raise IngestError(f"{path}: {len(errors)} invalid row(s):\n{details}")
    return records, flags


def build_unigram(corpus_path: str | Path, vocab_size: int | None = None,
                  alpha: float = 0.0) -> UnigramTable:
    """Count a one-token-per-line corpus into a unigram table.

    vocab_size defaults to the number of distinct observed tokens; passing a
    larger closed-vocabulary size reserves smoothed mass for unseen tokens.
    """
    path = Path(corpus_path)
    counts: dict[str, float] = {}
    for line in path.read_text(encoding="utf-8").splitlines():
        tok = line.strip()
        if tok:
            counts[tok] = counts.get(tok, 0.0) + 1.0
    if not counts:
        raise IngestError(f"{path}: corpus is empty")
    if vocab_size is None:
        vocab_size = len(counts)
    if vocab_size < len(counts):
        raise IngestError(f"{path}: vocab_size={vocab_size} is smaller than the "
                          f"{len(counts)} observed types")
    try:
        return UnigramTable(counts=counts, vocab_size=vocab_size, smoothing_alpha=alpha)
    except MetricConfigError as e:
        raise IngestError(f"{path}: {e}") from None


@dataclass(frozen=True)
class FilterResult:
    kept: tuple[PairRecord, ...]
    dropped: tuple[PairRecord, ...]
    threshold: float
    q: float | None


def filter_levenshtein_quantile(pairs: Sequence[PairRecord], q: float = 0.75,
                                threshold: float | None = None) -> FilterResult:
    """Keep pairs whose Levenshtein distance is strictly below the q-th
    empirical-CDF quantile (no interpolation), or below a frozen threshold.

    Pass the threshold from a previous run to apply one calibrated cutoff
    across datasets or splits.
    """
    if not pairs:
        raise ValueError("cannot filter an empty pair list")
    missing = [p.pair_id for p in pairs if p.lev_dist is None]
    if missing:
        raise ValueError("pairs lack lev_dist (run annotate_distances first): "
                         + ", ".join(missing[:5]) + ("..." if len(missing) > 5 else ""))
    if threshold is None:
        threshold = empirical_quantile([float(p.lev_dist) for p in pairs], q)
        q_used: float | None = q
    else:
        q_used = None
    kept = tuple(p for p in pairs if p.lev_dist < threshold)
    dropped = tuple(p for p in pairs if not p.lev_dist < threshold)
    return FilterResult(kept=kept, dropped=dropped, threshold=float(threshold), q=q_used)


def annotate_distances(pairs: Sequence[PairRecord], use_embeddings: bool = True
                       ) -> tuple[list[PairRecord], int]:
    """Fill lev_dist (character Levenshtein over text) and, when embeddings are
    available on both members, cosine_dist. Returns the annotated pairs and
    the number of pairs missing embeddings (their cosine_dist stays None)."""
    out: list[PairRecord] = []
    n_missing = 0
    for p in pairs:
        lev = levenshtein(p.gram.text, p.ungram.text)
        cos = p.cosine_dist
        if use_embeddings:
            if p.gram.embedding is None or p.ungram.embedding is None:
                n_missing += 1
            else:
                try:
                    cos = cosine_distance(p.gram.embedding, p.ungram.embedding)
                except ValueError as e:
                    raise IngestError(f"pair {p.pair_id!r}: {e}") from None
        out.append(replace(p, lev_dist=lev, cosine_dist=cos))
    return out, n_missing
