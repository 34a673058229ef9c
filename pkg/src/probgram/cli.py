"""Command line interface.

Subcommands:
  toy           inspect the 8-string demo world (probabilities, pairs)
  simulate      random-world simulation: all three predictions, CSV/SVG/JSON
  pairs         minimal-pair pipeline over a score dump (+ optional judgments)
  separability  pooled grammatical-vs-ungrammatical ROC over a score dump
  unigram       count a one-token-per-line corpus into a unigram table

All outputs are deterministic for fixed inputs: no timestamps, sorted keys,
fixed float formats.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .genmodel import (meaning_matched_pairs, simulate_minimal_pairs,
                       string_prob_approx, string_prob_table)
from .ingest import (IngestError, annotate_distances, build_pairs, build_unigram,
                     filter_levenshtein_quantile, read_judgments_csv, read_scored_jsonl)
from .plots import svg_roc, svg_scatter
from .predictions import (AcceptabilityParams, attach_acceptability, mismatched_pairs,
                          minpair_accuracy, pred1_run, pred2_run, pred3_run,
                          pred3_inequality_check, spearman_trend, with_modeled_logprobs)
from .records import PairRecord, ScoredSentence
from .scoring import MetricConfigError, MetricKind, UnigramTable
from .stats import ConstantInputError, zscore_within
from .worlds import (World, WorldConfig, WorldError, build_cube_world,
                     build_random_world, world_to_json)


def _fmt(v) -> str:
    """CSV cell: 6 significant digits for floats, plain text otherwise."""
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def _write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    lines = [",".join(header)]
    lines += [",".join(_fmt(c) for c in row) for row in rows]
    _write_text(path, "\n".join(lines) + "\n")


def _write_json(path: Path, doc) -> None:
    _write_text(path, json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _metric_list(text: str) -> list[MetricKind]:
    return [MetricKind.from_name(t.strip()) for t in text.split(",") if t.strip()]


# ---------------------------------------------------------------------------
# toy

def cmd_toy(args) -> int:
    world = build_cube_world(tuple(args.probs), epsilon=args.epsilon, k_branch=args.k)
    table = string_prob_table(world, args.max_depth)
    minimal = simulate_minimal_pairs(world, delta=args.delta)
    matched = meaning_matched_pairs(world, delta=args.delta)

    model_lp: dict[str, float] = {}
    unmatched_dump = 0
    if args.scores:
        report = read_scored_jsonl(args.scores)
        for rec in report.records:
            model_lp[" ".join(rec.text.split())] = rec.total_logprob
        unmatched_dump = len(model_lp)

    lines = []
    g = len(world.grammatical_strings())
    lines.append(f"toy world: {len(world.graph.nodes)} strings, {g} grammatical, "
                 f"{len(world.graph.nodes) - g} ungrammatical, {world.graph.n_edges} edges")
    lines.append(f"epsilon={world.epsilon:g} k_branch={world.k_branch} "
                 f"priors={','.join(f'{m.prob:g}' for m in world.messages)}")
    lines.append(f"meaning-matched pairs (delta={args.delta:g}): {len(matched)}")
    lines.append(f"minimal pairs: {len(minimal)}")
    lines.append("")
    header = f"{'string':<22} {'gram':<5} {'P_exact':>12} {'tail':>10} {'P_approx':>12}"
    if model_lp:
        header += f" {'model_surprisal':>16}"
    lines.append(header)
    for s in world.graph.nodes:
        pv = table[s]
        row = (f"{s.text:<22} {('yes' if s in world.grammatical else 'no'):<5} "
               f"{pv.value:>12.6g} {pv.tail_bound:>10.3g} {string_prob_approx(world, s):>12.6g}")
        if model_lp:
            lp = model_lp.pop(s.text, None)
            row += f" {(-lp):>16.6g}" if lp is not None else f" {'-':>16}"
        lines.append(row)
    lines.append("")
    lines.append("minimal pairs (pair_id, error_dist, msg_similarity):")
    for p in minimal:
        lines.append(f"  {p.pair_id}  d={p.error_dist}  sim={p.msg_similarity:g}")
    if args.scores:
        lines.append("")
        lines.append(f"dump sentences not matching any toy string: {len(model_lp)}")
    text = "\n".join(lines) + "\n"
    if args.out:
        _write_text(Path(args.out), text)
    sys.stdout.write(text)
    return 0


# ---------------------------------------------------------------------------
# simulate

def _scatter_csvs(outdir: Path, pairs: Sequence[PairRecord]) -> None:
    rows = [(p.pair_id, p.error_dist, p.msg_similarity,
             p.gram.total_logprob, p.ungram.total_logprob) for p in pairs]
    _write_csv(outdir / "pairs.csv",
               ("pair_id", "error_dist", "msg_similarity", "logprob_gram", "logprob_ungram"),
               rows)


def _simulate_one(world: World, args, outdir: Path) -> dict:
    outdir.mkdir(parents=True, exist_ok=True)
    _write_text(outdir / "world.json", world_to_json(world))

    minimal = simulate_minimal_pairs(world, delta=args.delta)
    # strict pairs: the ungram's own most plausible message, any depth up to
    # max_errors; this is the set on which the noiseless pred-2 identity holds
    strict = meaning_matched_pairs(world, delta=0.5, max_errors=args.max_errors)
    _scatter_csvs(outdir, minimal)

    # prediction 1: exact logprob correlation on minimal pairs, binned by
    # message similarity (how far the paired message is from the ungram's
    # most plausible source)
    rep1 = pred1_run(minimal, k_bins=args.bins, distance="msg")
    trend = spearman_trend([b.r for b in rep1.bins]) if rep1.bins else None
    _write_csv(outdir / "pred1.csv", ("bin", "n", "mean_distance", "r"),
               [(b.bin_index, b.n, b.mean_distance, b.r) for b in rep1.bins])
    _write_text(outdir / "pred1_scatter.svg", svg_scatter(
        [p.gram.total_logprob for p in minimal],
        [p.ungram.total_logprob for p in minimal],
        "log P(grammatical)", "log P(ungrammatical)",
        f"prediction 1: r={rep1.overall_r:.3f} (n={rep1.n})"))

    # prediction 2: modeled acceptability vs modeled logprob, noise sweep.
    # Matched pairs are the minimal set: every error distance is 1 there, so
    # the noiseless correlation is exactly 1 whatever the weights. The
    # mismatch control re-pairs the mixed-depth strict set with wrong
    # messages, which is what breaks the alignment.
    modeled = with_modeled_logprobs(world, minimal)
    mism = mismatched_pairs(world, strict, seed=args.seed + 1)
    rows2 = []
    noiseless_pairs = None
    for noise in args.noise:
        params = AcceptabilityParams(w_message=args.w_message, w_error=args.w_error,
                                     noise_sd=noise)
        acc_m = attach_acceptability(world, modeled, params, seed=args.seed)
        r_m = pred2_run(acc_m, k_bins=0).overall_r
        r_x = None
        if mism:
            acc_x = attach_acceptability(world, mism, params, seed=args.seed)
            r_x = pred2_run(acc_x, k_bins=0).overall_r
        if noiseless_pairs is None:
            noiseless_pairs = acc_m
        rows2.append((noise, r_m, r_x))
    _write_csv(outdir / "pred2.csv", ("noise_sd", "r_matched", "r_mismatched"), rows2)
    _write_text(outdir / "pred2_scatter.svg", svg_scatter(
        [p.delta_acceptability for p in noiseless_pairs],
        [p.delta_logprob for p in noiseless_pairs],
        "acceptability difference", "log probability difference",
        f"prediction 2: r={rows2[0][1]:.3f} at noise={args.noise[0]:g}",
        identity_line=False))

    # prediction 3: pooled separability on exact logprobs
    pool: dict[str, ScoredSentence] = {}
    for p in minimal:
        pool.setdefault(p.gram.id, p.gram)
        pool.setdefault(p.ungram.id, p.ungram)
    sentences = [pool[k] for k in sorted(pool)]
    metrics = [MetricKind.LOGPROB, MetricKind.BF_UNIFORM, MetricKind.MEAN_LOGPROB]
    rep3 = pred3_run(sentences, metrics, vocab_size=world.vocab.size)
    acc = minpair_accuracy(minimal, MetricKind.LOGPROB)
    ineq = pred3_inequality_check(world, minimal)
    _write_csv(outdir / "pred3.csv", ("metric", "auc", "minpair_accuracy"),
               [(m.value, rep3.auc[m.value], acc if m is MetricKind.LOGPROB else None)
                for m in metrics])
    _write_text(outdir / "pred3_roc.svg", svg_roc(
        [(f"{m.value} (auc={rep3.auc[m.value]:.3f})", rep3.roc[m.value].points)
         for m in metrics],
        f"prediction 3: {len(sentences)} pooled strings"))

    doc = {
        "world": {"n_nodes": len(world.graph.nodes), "n_messages": len(world.messages),
                  "epsilon": world.epsilon, "k_branch": world.k_branch,
                  "n_minimal_pairs": len(minimal), "n_strict_pairs": len(strict)},
        "pred1": rep1.to_json_dict(),
        "pred1_bin_trend": trend,
        "pred2": {"rows": [{"noise_sd": n, "r_matched": rm, "r_mismatched": rx}
                           for n, rm, rx in rows2],
                  "n_matched": len(modeled), "n_mismatched": len(mism)},
        "pred3": rep3.to_json_dict(),
        "pred3_minpair_accuracy": acc,
        "inequality": dataclasses.asdict(ineq),
    }
    _write_json(outdir / "report.json", doc)
    return doc


def cmd_simulate(args) -> int:
    out = Path(args.out)
    for eps in args.epsilon:
        cfg = WorldConfig(n_messages=args.messages, n_slots=args.slots,
                          symbols_per_slot=args.symbols, law=args.law,
                          law_param=args.law_param, epsilon=eps,
                          k_branch=args.k, seed=args.seed)
        world = build_random_world(cfg)
        subdir = out / f"eps-{eps:g}"
        doc = _simulate_one(world, args, subdir)
        r1 = doc["pred1"]["overall_r"]
        sys.stdout.write(f"eps={eps:g}: {doc['world']['n_minimal_pairs']} minimal pairs, "
                         f"pred1 r={r1:.4f}, wrote {subdir}\n")
    return 0


# ---------------------------------------------------------------------------
# pairs

def cmd_pairs(args) -> int:
    report = read_scored_jsonl(args.dump)
    pairs, unpaired = build_pairs(report.records)
    if not pairs:
        sys.stderr.write("error: the dump contains no complete pairs\n")
        return 1
    annotated, n_missing_emb = annotate_distances(pairs, use_embeddings=not args.no_embeddings)

    filters: dict[str, dict] = {}
    if args.pooled_quantile:
        res = filter_levenshtein_quantile(annotated, q=args.quantile)
        kept = list(res.kept)
        filters["(pooled)"] = {"threshold": res.threshold, "n_kept": len(res.kept),
                               "n_dropped": len(res.dropped)}
    else:
        kept = []
        by_ds: dict[str, list[PairRecord]] = {}
        for p in annotated:
            by_ds.setdefault(p.gram.dataset, []).append(p)
        for ds in sorted(by_ds):
            res = filter_levenshtein_quantile(by_ds[ds], q=args.quantile)
            kept.extend(res.kept)
            filters[ds] = {"threshold": res.threshold, "n_kept": len(res.kept),
                           "n_dropped": len(res.dropped)}
    if len(kept) < 3:
        sys.stderr.write(f"error: only {len(kept)} pairs survive the Levenshtein filter\n")
        return 1

    outdir = Path(args.out)
    rep1 = pred1_run(kept, k_bins=args.bins if len(kept) >= args.bins else 0)
    _write_csv(outdir / "pred1.csv", ("bin", "n", "mean_distance", "r"),
               [(b.bin_index, b.n, b.mean_distance, b.r) for b in rep1.bins])
    _write_text(outdir / "pred1_scatter.svg", svg_scatter(
        [p.gram.total_logprob for p in kept],
        [p.ungram.total_logprob for p in kept],
        "log P(grammatical)", "log P(ungrammatical)",
        f"pairs: r={rep1.overall_r:.3f} (n={rep1.n})"))

    doc = {
        "input": {"n_lines": report.n_lines, "n_records": report.n_kept,
                  "n_blank": report.n_blank, "header": report.header,
                  "n_pairs": len(pairs), "unpaired_keys": unpaired,
                  "n_missing_embeddings": n_missing_emb},
        "filter": {"quantile": args.quantile, "per_dataset": filters,
                   "n_kept": len(kept)},
        "pred1": rep1.to_json_dict(),
        "pred1_bin_trend": spearman_trend([b.r for b in rep1.bins]) if rep1.bins else None,
    }

    if args.judgments:
        ratings, flags = read_judgments_csv(args.judgments)
        zrecs, zero_var = zscore_within(ratings)
        by_item: dict[str, list[float]] = {}
        for r in zrecs:
            by_item.setdefault(r.item, []).append(r.rating)
        mean_z = {item: sum(v) / len(v) for item, v in by_item.items()}
        acc_pairs = []
        skipped = 0
        for p in kept:
            ag, au = mean_z.get(p.gram.id), mean_z.get(p.ungram.id)
            if ag is None or au is None:
                skipped += 1
                continue
            acc_pairs.append(dataclasses.replace(p, acc_gram=ag, acc_ungram=au))
        doc["judgments"] = {"n_ratings": len(ratings), "n_flagged": len(flags),
                            "flags": [str(f) for f in flags],
                            "zero_variance_participants": list(zero_var),
                            "n_pairs_without_ratings": skipped}
        if len(acc_pairs) >= 3:
            try:
                rep2 = pred2_run(acc_pairs, k_bins=0)
                doc["pred2"] = rep2.to_json_dict()
                _write_csv(outdir / "pred2.csv", ("pair_id", "delta_acceptability", "delta_logprob"),
                           [(p.pair_id, p.delta_acceptability, p.delta_logprob)
                            for p in acc_pairs])
                _write_text(outdir / "pred2_scatter.svg", svg_scatter(
                    [p.delta_acceptability for p in acc_pairs],
                    [p.delta_logprob for p in acc_pairs],
                    "mean z-scored judgment difference", "log probability difference",
                    f"judgments vs logprob: r={rep2.overall_r:.3f} (n={rep2.n})",
                    identity_line=False))
            except ConstantInputError as e:
                doc["pred2"] = {"error": str(e)}
        else:
            doc["pred2"] = {"error": f"only {len(acc_pairs)} pairs have ratings on both members"}

    _write_json(outdir / "report.json", doc)
    sys.stdout.write(f"{len(kept)} pairs after filtering, pred1 r={rep1.overall_r:.4f}, "
                     f"wrote {outdir}\n")
    return 0


# ---------------------------------------------------------------------------
# separability

def cmd_separability(args) -> int:
    report = read_scored_jsonl(args.dump)
    if not report.records:
        sys.stderr.write("error: the dump contains no records\n")
        return 1
    unigram = UnigramTable.from_tsv(args.unigram) if args.unigram else None
    vocab_size = args.vocab_size
    if vocab_size is None and unigram is not None:
        vocab_size = unigram.vocab_size
    if args.metrics is not None:
        metrics = args.metrics
    else:
        metrics = [MetricKind.LOGPROB, MetricKind.MEAN_LOGPROB]
        if vocab_size is not None:
            metrics.insert(1, MetricKind.BF_UNIFORM)
        if unigram is not None:
            metrics += [MetricKind.BF_UNIGRAM, MetricKind.SLOR]
    rep = pred3_run(report.records, metrics, unigram=unigram, vocab_size=vocab_size)

    pairs, _ = build_pairs(report.records)
    acc = {m.value: minpair_accuracy(pairs, m, unigram=unigram, vocab_size=vocab_size)
           for m in metrics} if pairs else {}

    outdir = Path(args.out)
    _write_csv(outdir / "separability.csv",
               ("metric", "auc", "minpair_accuracy", "mean_gram", "sd_gram",
                "mean_ungram", "sd_ungram"),
               [(m.value, rep.auc[m.value], acc.get(m.value),
                 rep.summary[m.value]["mean_gram"], rep.summary[m.value]["sd_gram"],
                 rep.summary[m.value]["mean_ungram"], rep.summary[m.value]["sd_ungram"])
                for m in metrics])
    _write_text(outdir / "roc.svg", svg_roc(
        [(f"{m.value} (auc={rep.auc[m.value]:.3f})", rep.roc[m.value].points)
         for m in metrics],
        f"separability: {rep.n} sentences"))
    doc = {"input": {"n_lines": report.n_lines, "n_records": report.n_kept,
                     "header": report.header, "n_pairs": len(pairs)},
           "pred3": rep.to_json_dict(), "minpair_accuracy": acc}
    _write_json(outdir / "report.json", doc)
    sys.stdout.write(f"{rep.n} sentences, AUC: " +
                     ", ".join(f"{m.value}={rep.auc[m.value]:.4f}" for m in metrics) + "\n")
    return 0


# ---------------------------------------------------------------------------
# unigram

def cmd_unigram(args) -> int:
    table = build_unigram(args.corpus, vocab_size=args.vocab_size, alpha=args.alpha)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    table.to_tsv(out)
    sys.stdout.write(f"{len(table.counts)} types, {table.total:g} tokens, wrote {out}\n")
    return 0


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="probgram",
                                     description="noisy-channel string probability "
                                                 "simulator and minimal-pair evaluation")
    parser.add_argument("--version", action="version", version=f"probgram {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("toy", help="inspect the 8-string demo world")
    p.add_argument("--probs", type=_floats, default=[0.6, 0.3, 0.1],
                   help="three message priors (default 0.6,0.3,0.1)")
    p.add_argument("--epsilon", type=float, default=0.05)
    p.add_argument("--k", type=int, default=3, help="error branching constant K")
    p.add_argument("--delta", type=float, default=0.999)
    p.add_argument("--max-depth", type=int, default=None)
    p.add_argument("--scores", default=None,
                   help="score dump whose surprisals are printed alongside")
    p.add_argument("--out", default=None, help="also write the table to this file")
    p.set_defaults(func=cmd_toy)

    p = sub.add_parser("simulate", help="random-world simulation of all predictions")
    p.add_argument("--out", required=True)
    p.add_argument("--messages", type=int, default=64)
    p.add_argument("--slots", type=int, default=5)
    p.add_argument("--symbols", type=int, default=4, help="symbols per slot")
    p.add_argument("--law", choices=("uniform", "zipf", "lognormal"), default="zipf")
    p.add_argument("--law-param", type=float, default=1.3)
    p.add_argument("--epsilon", type=_floats, default=[0.02],
                   help="comma-separated list; one output directory per value")
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bins", type=int, default=10)
    p.add_argument("--delta", type=float, default=0.999)
    p.add_argument("--max-errors", type=int, default=3,
                   help="distance cap for the strict pair set used by prediction 2")
    p.add_argument("--noise", type=_floats, default=[0.0, 0.3, 0.6],
                   help="acceptability noise sds for the prediction-2 sweep")
    p.add_argument("--w-message", type=float, default=1.0)
    p.add_argument("--w-error", type=float, default=0.15)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("pairs", help="minimal-pair pipeline over a score dump")
    p.add_argument("--dump", required=True)
    p.add_argument("--judgments", default=None, help="participant,item,rating CSV")
    p.add_argument("--bins", type=int, default=10)
    p.add_argument("--quantile", type=float, default=0.75,
                   help="Levenshtein cutoff quantile (strictly-below filter)")
    p.add_argument("--pooled-quantile", action="store_true",
                   help="compute one threshold over all datasets instead of per dataset")
    p.add_argument("--no-embeddings", action="store_true",
                   help="skip cosine distances even when embeddings are present")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_pairs)

    p = sub.add_parser("separability", help="pooled ROC/AUC over a score dump")
    p.add_argument("--dump", required=True)
    p.add_argument("--unigram", default=None, help="unigram table TSV (see 'unigram')")
    p.add_argument("--vocab-size", type=int, default=None)
    p.add_argument("--metrics", type=_metric_list, default=None,
                   help="comma-separated subset of: logprob,bf_uniform,bf_unigram,slor,mean_logprob")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_separability)

    p = sub.add_parser("unigram", help="build a unigram table from a corpus")
    p.add_argument("--corpus", required=True, help="one token per line")
    p.add_argument("--vocab-size", type=int, default=None)
    p.add_argument("--alpha", type=float, default=0.0, help="add-alpha smoothing")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_unigram)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (WorldError, IngestError, MetricConfigError, ConstantInputError) as e:
        sys.stderr.write(f"error: {e}\n")
        return 1
    except (ValueError, OSError) as e:
        sys.stderr.write(f"error: {e}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
