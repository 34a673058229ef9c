"""Score sentences with a causal LM and emit the JSONL dump format.

One record per sentence:

    {"id": ..., "dataset": ..., "pair_id": ..., "condition": ...,
     "text": ..., "tokens": [...], "token_logprobs": [...],
     "embedding": [...] | null, "language": ...}

token_logprobs[i] is ln p(token_i | BOS, token_0..i-1) under the model, so
the list sums to the sequence log-likelihood given BOS. The convention is
fixed here and only here: every input gets the model's BOS token prepended,
nothing gets appended, and the BOS position itself is never scored. Scoring
refuses models without a BOS token rather than silently scoring the first
token unconditioned.

Every record is cross-checked on the way out: the per-token sum must match
the sequence log-likelihood computed a second time through the model's own
label-shifting loss path (within 1e-4). A mismatch means a tokenization or
alignment bug, so it raises instead of writing a poisoned dump.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import torch

CONDITIONS = ("grammatical", "ungrammatical")
CROSS_CHECK_TOL = 1e-4


class ExtractError(ValueError):
    """Bad sentence input, unusable model, or a failed output cross-check."""


@dataclass(frozen=True)
class SentenceSpec:
    """What to score: identity, pairing, and the raw text."""

    id: str
    dataset: str
    condition: str
    text: str
    pair_id: str | None = None
    language: str = "en"

    def __post_init__(self) -> None:
        if not self.id:
            raise ExtractError("sentence id must be non-empty")
        if not self.dataset:
            raise ExtractError(f"sentence {self.id!r}: dataset must be non-empty")
        if self.condition not in CONDITIONS:
            raise ExtractError(f"sentence {self.id!r}: condition must be one of "
                               f"{CONDITIONS}, got {self.condition!r}")
        if not self.text or not self.text.strip():
            raise ExtractError(f"sentence {self.id!r}: empty text")


def read_sentences_jsonl(path: str | Path) -> list[SentenceSpec]:
    specs = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(),
                                  start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as e:
            raise ExtractError(f"{path}:{lineno}: unparseable JSON: {e}") from None
        if not isinstance(obj, dict):
            raise ExtractError(f"{path}:{lineno}: expected an object")
        try:
            specs.append(SentenceSpec(
                id=obj["id"], dataset=obj["dataset"], condition=obj["condition"],
                text=obj["text"], pair_id=obj.get("pair_id"),
                language=obj.get("language", "en")))
        except KeyError as e:
            raise ExtractError(f"{path}:{lineno}: missing field {e}") from None
    return specs


def _bos_id(tokenizer) -> int:
    bos = tokenizer.bos_token_id
    if bos is None:
        raise ExtractError("tokenizer has no BOS token; the first word would be "
                           "scored against an empty context")
    return bos


def _encode(tokenizer, spec: SentenceSpec) -> tuple[list[str], list[int]]:
    ids = tokenizer(spec.text, add_special_tokens=False)["input_ids"]
    if not ids:
        raise ExtractError(f"sentence {spec.id!r}: tokenizer produced no tokens "
                           f"for {spec.text!r}")
    return tokenizer.convert_ids_to_tokens(ids), ids


def _sequence_loglik(model, ids: list[int], bos: int) -> float:
    """Second opinion on the total: the model's own shifted-label loss."""
    row = torch.tensor([[bos] + ids])
    with torch.no_grad():
        loss = model(row, labels=row).loss
    return -float(loss) * len(ids)


def score_sentences(model, tokenizer, sentences: Sequence[SentenceSpec], *,
                    batch_size: int = 32, with_embeddings: bool = False,
                    cross_check: bool = True) -> list[dict]:
    """Per-token log probabilities (and optional embeddings) for every spec."""
    if batch_size < 1:
        raise ExtractError(f"batch_size must be >= 1, got {batch_size}")
    seen = set()
    for s in sentences:
        key = (s.dataset, s.pair_id, s.condition) if s.pair_id else (s.dataset, s.id)
        if key in seen:
            raise ExtractError(f"duplicate sentence key {key}")
        seen.add(key)

    bos = _bos_id(tokenizer)
    pad = tokenizer.pad_token_id if tokenizer.pad_token_id is not None else bos
    model.eval()
    records: list[dict] = []
    for start in range(0, len(sentences), batch_size):
        chunk = sentences[start:start + batch_size]
        encoded = [_encode(tokenizer, s) for s in chunk]
        width = 1 + max(len(ids) for _, ids in encoded)
        input_ids = torch.full((len(chunk), width), pad, dtype=torch.long)
        mask = torch.zeros((len(chunk), width), dtype=torch.long)
        for i, (_, ids) in enumerate(encoded):
            input_ids[i, 0] = bos
            input_ids[i, 1:1 + len(ids)] = torch.tensor(ids)
            mask[i, :1 + len(ids)] = 1
        with torch.no_grad():
            out = model(input_ids, attention_mask=mask,
                        output_hidden_states=with_embeddings)
            logprobs = torch.log_softmax(out.logits[:, :-1].double(), dim=-1)

        for i, (spec, (tokens, ids)) in enumerate(zip(chunk, encoded)):
            lps = [float(logprobs[i, pos, tok]) for pos, tok in enumerate(ids)]
            if cross_check:
                total = sum(lps)
                other = _sequence_loglik(model, ids, bos)
                if abs(total - other) > CROSS_CHECK_TOL:
                    raise ExtractError(
                        f"sentence {spec.id!r}: per-token sum {total:.6f} disagrees "
                        f"with sequence log-likelihood {other:.6f}")
            embedding = None
            if with_embeddings:
                from .embed import mean_pool
                embedding = mean_pool(out.hidden_states[-1][i], mask[i],
                                      skip_first=True)
            records.append({
                "id": spec.id,
                "dataset": spec.dataset,
                "pair_id": spec.pair_id,
                "condition": spec.condition,
                "text": spec.text,
                "tokens": tokens,
                "token_logprobs": lps,
                "embedding": embedding,
                "language": spec.language,
            })
    return records


def write_dump(path: str | Path, records: Sequence[dict],
               header: dict | None = None) -> None:
    """Write the dump, optionally with a leading header record."""
    lines = []
    if header is not None:
        lines.append(json.dumps(dict(header, record_type="header"), sort_keys=True))
    lines += [json.dumps(r, sort_keys=True) for r in records]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def surprisal(record: dict) -> float:
    """Total surprisal (nats) of a dump record."""
    return -sum(record["token_logprobs"])
