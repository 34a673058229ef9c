"""Converters from common minimal-pair / acceptability formats to SentenceSpec.

Each reader is strict about its input schema and reports the offending line,
because silently guessing at drifted fields is how mislabeled conditions end
up in a dump.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

from .scores import ExtractError, SentenceSpec


class SchemaError(ExtractError):
    """Input file does not match the declared format."""


def _lines(path: str | Path):
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(),
                                  start=1):
        if line.strip():
            yield lineno, line


def _load_obj(path, lineno: int, line: str) -> dict:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as e:
        raise SchemaError(f"{path}:{lineno}: unparseable JSON: {e}") from None
    if not isinstance(obj, dict):
        raise SchemaError(f"{path}:{lineno}: expected an object, "
                          f"got {type(obj).__name__}")
    return obj


def read_good_bad_jsonl(path: str | Path, dataset: str) -> list[SentenceSpec]:
    """Paired JSONL with sentence_good / sentence_bad fields per line.

    An optional pair_id field names the pair; otherwise the line number does.
    """
    specs = []
    for lineno, line in _lines(path):
        obj = _load_obj(path, lineno, line)
        missing = [k for k in ("sentence_good", "sentence_bad") if k not in obj]
        if missing:
            raise SchemaError(f"{path}:{lineno}: missing field(s) {missing}; "
                              "is this really a good/bad paired file?")
        pair = str(obj.get("pair_id", lineno))
        specs.append(SentenceSpec(id=f"{pair}-good", dataset=dataset,
                                  condition="grammatical",
                                  text=obj["sentence_good"], pair_id=pair))
        specs.append(SentenceSpec(id=f"{pair}-bad", dataset=dataset,
                                  condition="ungrammatical",
                                  text=obj["sentence_bad"], pair_id=pair))
    return specs


def read_labeled_tsv(path: str | Path, dataset: str) -> list[SentenceSpec]:
    """Unpaired TSV: source, label (1 = acceptable), marking, sentence."""
    specs = []
    with Path(path).open(encoding="utf-8", newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh, delimiter="\t"), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 4:
                raise SchemaError(f"{path}:{lineno}: expected 4 tab-separated "
                                  f"columns, got {len(row)}")
            _, label, _, sentence = row
            if label not in ("0", "1"):
                raise SchemaError(f"{path}:{lineno}: label must be 0 or 1, "
                                  f"got {label!r}")
            condition = "grammatical" if label == "1" else "ungrammatical"
            specs.append(SentenceSpec(id=f"{dataset}-{lineno}", dataset=dataset,
                                      condition=condition, text=sentence))
    return specs


def read_paired_jsonl(path: str | Path) -> list[SentenceSpec]:
    """Already in the native sentence format; validate and pass through."""
    specs = []
    for lineno, line in _lines(path):
        obj = _load_obj(path, lineno, line)
        try:
            specs.append(SentenceSpec(
                id=obj["id"], dataset=obj["dataset"], condition=obj["condition"],
                text=obj["text"], pair_id=obj.get("pair_id"),
                language=obj.get("language", "en")))
        except KeyError as e:
            raise SchemaError(f"{path}:{lineno}: missing field {e}") from None
        except ExtractError as e:
            raise SchemaError(f"{path}:{lineno}: {e}") from None
    return specs


def write_sentences_jsonl(path: str | Path, specs) -> None:
    lines = [json.dumps({"id": s.id, "dataset": s.dataset, "pair_id": s.pair_id,
                         "condition": s.condition, "text": s.text,
                         "language": s.language}, sort_keys=True)
             for s in specs]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


READERS = {
    "good-bad-jsonl": read_good_bad_jsonl,
    "labeled-tsv": read_labeled_tsv,
}
