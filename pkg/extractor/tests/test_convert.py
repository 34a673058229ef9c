import pytest

from lmextract import (SchemaError, read_good_bad_jsonl, read_labeled_tsv,
                       read_paired_jsonl, write_sentences_jsonl)
from lmextract.scores import read_sentences_jsonl


def test_good_bad_reader(tmp_path):
    p = tmp_path / "pairs.jsonl"
    p.write_text(
        '{"sentence_good": "The moon emerges", "sentence_bad": "The moon emerge"}\n'
        '{"sentence_good": "A moon emerges", "sentence_bad": "A moon emerge", '
        '"pair_id": "named"}\n', encoding="utf-8")
    specs = read_good_bad_jsonl(p, dataset="bl")
    assert len(specs) == 4
    assert specs[0].pair_id == "1" and specs[0].condition == "grammatical"
    assert specs[1].pair_id == "1" and specs[1].condition == "ungrammatical"
    assert specs[2].pair_id == "named" and specs[2].id == "named-good"
    assert all(s.dataset == "bl" for s in specs)


def test_good_bad_schema_drift(tmp_path):
    p = tmp_path / "pairs.jsonl"
    p.write_text('{"sentence_good": "The moon emerges", "bad": "The moon emerge"}\n',
                 encoding="utf-8")
    with pytest.raises(SchemaError, match="pairs.jsonl:1.*sentence_bad"):
        read_good_bad_jsonl(p, dataset="bl")
    p.write_text("[1, 2]\n", encoding="utf-8")
    with pytest.raises(SchemaError, match="expected an object"):
        read_good_bad_jsonl(p, dataset="bl")


def test_labeled_tsv_reader(tmp_path):
    p = tmp_path / "acc.tsv"
    p.write_text("src\t1\t\tThe moon emerges\n"
                 "src\t0\t*\tThe moon emerge\n", encoding="utf-8")
    specs = read_labeled_tsv(p, dataset="acc")
    assert [s.condition for s in specs] == ["grammatical", "ungrammatical"]
    assert specs[0].pair_id is None
    assert specs[1].text == "The moon emerge"


def test_labeled_tsv_schema_drift(tmp_path):
    p = tmp_path / "acc.tsv"
    p.write_text("src\t1\tThe moon emerges\n", encoding="utf-8")
    with pytest.raises(SchemaError, match="4 tab-separated"):
        read_labeled_tsv(p, dataset="acc")
    p.write_text("src\tyes\t\tThe moon emerges\n", encoding="utf-8")
    with pytest.raises(SchemaError, match="label must be 0 or 1"):
        read_labeled_tsv(p, dataset="acc")


def test_paired_jsonl_validates(tmp_path):
    p = tmp_path / "native.jsonl"
    p.write_text('{"id": "x", "dataset": "d", "condition": "sideways", '
                 '"text": "The moon emerges"}\n', encoding="utf-8")
    with pytest.raises(SchemaError, match="native.jsonl:1.*condition"):
        read_paired_jsonl(p)


def test_write_read_roundtrip(tmp_path):
    p = tmp_path / "pairs.jsonl"
    p.write_text('{"sentence_good": "The moon emerges", '
                 '"sentence_bad": "The moon emerge"}\n', encoding="utf-8")
    specs = read_good_bad_jsonl(p, dataset="bl")
    out = tmp_path / "sentences.jsonl"
    write_sentences_jsonl(out, specs)
    assert read_paired_jsonl(out) == specs
    assert read_sentences_jsonl(out) == specs
