"""CLI behavior: outputs, exit codes, error reporting."""

import json

import pytest

from probgram.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_toy_output(capsys, tmp_path):
    out_file = tmp_path / "toy.txt"
    code, out, err = run(capsys, "toy", "--out", str(out_file))
    assert code == 0
    assert "8 strings, 3 grammatical, 5 ungrammatical" in out
    assert "meaning-matched pairs (delta=0.999): 15" in out
    assert "minimal pairs: 7" in out
    assert out_file.read_text(encoding="utf-8") == out


def test_toy_with_scores(capsys, tmp_path):
    dump = tmp_path / "scores.jsonl"
    rec = {"id": "x1", "dataset": "d", "pair_id": None, "condition": "grammatical",
           "text": "The moon emerges", "tokens": ["The", "moon", "emerges"],
           "token_logprobs": [-1.0, -2.0, -0.5], "embedding": None, "language": "en"}
    dump.write_text(json.dumps(rec) + "\n", encoding="utf-8")
    code, out, _ = run(capsys, "toy", "--scores", str(dump))
    assert code == 0
    assert "model_surprisal" in out
    assert "3.5" in out  # -(-3.5)
    assert "not matching any toy string: 0" in out


def test_toy_rejects_bad_epsilon(capsys):
    code, _, err = run(capsys, "toy", "--epsilon", "0.9")
    assert code == 1
    assert "epsilon" in err


def test_simulate_outputs(capsys, tmp_path):
    out = tmp_path / "sim"
    code, stdout, _ = run(capsys, "simulate", "--out", str(out),
                          "--messages", "4", "--slots", "3", "--symbols", "2",
                          "--epsilon", "0.05", "--seed", "1", "--bins", "2")
    assert code == 0
    d = out / "eps-0.05"
    for name in ("world.json", "pairs.csv", "pred1.csv", "pred1_scatter.svg",
                 "pred2.csv", "pred2_scatter.svg", "pred3.csv", "pred3_roc.svg",
                 "report.json"):
        assert (d / name).exists(), name
    rep = json.loads((d / "report.json").read_text(encoding="utf-8"))
    assert rep["world"]["n_messages"] == 4
    assert rep["world"]["n_nodes"] == 8
    assert rep["pred2"]["rows"][0]["noise_sd"] == 0.0
    assert rep["pred2"]["rows"][0]["r_matched"] == pytest.approx(1.0, abs=1e-9)
    assert set(rep["pred3"]["auc"]) == {"logprob", "bf_uniform", "mean_logprob"}


def test_simulate_multiple_epsilons(capsys, tmp_path):
    out = tmp_path / "sweep"
    code, _, _ = run(capsys, "simulate", "--out", str(out), "--messages", "4",
                     "--slots", "3", "--symbols", "2", "--epsilon", "0.02,0.1",
                     "--bins", "2")
    assert code == 0
    assert (out / "eps-0.02" / "report.json").exists()
    assert (out / "eps-0.1" / "report.json").exists()


def make_dump(tmp_path, n_pairs=8):
    """Pairs with character distances 1,1,2,2,3,3,4,9 and varied logprobs."""
    recs = []
    dists = [1, 1, 2, 2, 3, 3, 4, 9][:n_pairs]
    for i, d in enumerate(dists):
        gram_text = f"base{i} alpha beta"
        # Rewrite the tail of the last token so the char distance is exactly d
        # without disturbing the whitespace (token counts must stay at 3).
        ungram_text = f"base{i} alpha " + "beta"[:max(0, 4 - d)] + "z" * d
        lp = -(1.0 + 0.37 * i)
        recs.append({"id": f"g{i}", "dataset": "toydump", "pair_id": f"p{i}",
                     "condition": "grammatical", "text": gram_text,
                     "tokens": gram_text.split(),
                     "token_logprobs": [lp, lp * 0.9, lp * 1.1],
                     "embedding": None, "language": "en"})
        recs.append({"id": f"u{i}", "dataset": "toydump", "pair_id": f"p{i}",
                     "condition": "ungrammatical", "text": ungram_text,
                     "tokens": ungram_text.split(),
                     "token_logprobs": [lp * 1.3, lp * 1.2, lp * 1.4],
                     "embedding": None, "language": "en"})
    path = tmp_path / "dump.jsonl"
    path.write_text("\n".join(json.dumps(r) for r in recs) + "\n", encoding="utf-8")
    return path


def test_pairs_pipeline(capsys, tmp_path):
    dump = make_dump(tmp_path)
    out = tmp_path / "out"
    code, stdout, _ = run(capsys, "pairs", "--dump", str(dump), "--out", str(out),
                          "--bins", "0")
    assert code == 0
    rep = json.loads((out / "report.json").read_text(encoding="utf-8"))
    assert rep["input"]["n_pairs"] == 8
    # quantile 0.75 of distances [1,1,2,2,3,3,4,9] is 3; strict cut keeps 4
    assert rep["filter"]["per_dataset"]["toydump"]["threshold"] == 3.0
    assert rep["filter"]["n_kept"] == 4
    assert "pred1" in rep
    assert (out / "pred1_scatter.svg").exists()


def test_pairs_with_judgments(capsys, tmp_path):
    dump = make_dump(tmp_path)
    rows = ["participant,item,rating"]
    for part, bias in (("p1", 0.0), ("p2", 1.0)):
        for i in range(8):
            rows.append(f"{part},g{i},{min(7.0, 5.0 + bias - 0.2 * i)}")
            rows.append(f"{part},u{i},{max(1.0, 2.0 + bias - 0.1 * i)}")
    judg = tmp_path / "j.csv"
    judg.write_text("\n".join(rows) + "\n", encoding="utf-8")
    out = tmp_path / "out"
    code, _, _ = run(capsys, "pairs", "--dump", str(dump), "--out", str(out),
                     "--judgments", str(judg), "--bins", "0")
    assert code == 0
    rep = json.loads((out / "report.json").read_text(encoding="utf-8"))
    assert rep["judgments"]["n_ratings"] == 32
    assert "overall_r" in rep["pred2"]
    assert (out / "pred2.csv").exists()


def test_pairs_missing_dump(capsys, tmp_path):
    code, _, err = run(capsys, "pairs", "--dump", str(tmp_path / "nope.jsonl"),
                       "--out", str(tmp_path / "o"))
    assert code == 1
    assert "error" in err.lower()


def test_pairs_rejects_malformed_dump(capsys, tmp_path):
    bad = tmp_path / "bad.jsonl"
    bad.write_text("{broken\n", encoding="utf-8")
    code, _, err = run(capsys, "pairs", "--dump", str(bad), "--out",
                       str(tmp_path / "o"))
    assert code == 1
    assert "invalid line" in err


def test_separability_and_unigram(capsys, tmp_path):
    dump = make_dump(tmp_path)
    corpus = tmp_path / "corpus.txt"
    toks = []
    for i in range(8):
        toks += [f"base{i}", "alpha", "beta"]
    corpus.write_text("\n".join(toks) + "\n", encoding="utf-8")

    table_path = tmp_path / "uni.tsv"
    code, out, _ = run(capsys, "unigram", "--corpus", str(corpus),
                       "--out", str(table_path), "--alpha", "0.5",
                       "--vocab-size", "64")
    assert code == 0
    assert table_path.exists()

    sep_out = tmp_path / "sep"
    code, out, _ = run(capsys, "separability", "--dump", str(dump),
                       "--out", str(sep_out), "--unigram", str(table_path))
    assert code == 0
    sep = json.loads((sep_out / "report.json").read_text(encoding="utf-8"))
    assert "logprob" in sep["pred3"]["auc"]
    assert "slor" in sep["pred3"]["auc"]
    assert "logprob" in sep["minpair_accuracy"]
    assert (sep_out / "separability.csv").exists()
    assert (sep_out / "roc.svg").exists()


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert "probgram" in capsys.readouterr().out
