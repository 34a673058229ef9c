"""lmextract command line: train the demo model, convert inputs, score dumps."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .convert import READERS, read_paired_jsonl, write_sentences_jsonl
from .scores import (ExtractError, read_sentences_jsonl, score_sentences,
                     write_dump)
from .tinylm import train_demo_model


def _load_model(path: str):
    from transformers import AutoModelForCausalLM, AutoTokenizer
    model = AutoModelForCausalLM.from_pretrained(path)
    tokenizer = AutoTokenizer.from_pretrained(path)
    return model, tokenizer


def cmd_train_demo(args) -> int:
    out = train_demo_model(args.out, n_samples=args.samples, steps=args.steps,
                           seed=args.seed)
    sys.stdout.write(f"wrote demo model to {out}\n")
    return 0


def cmd_score(args) -> int:
    sentences = read_sentences_jsonl(args.sentences)
    if not sentences:
        sys.stderr.write("error: no sentences to score\n")
        return 1
    model, tokenizer = _load_model(args.model)
    records = score_sentences(model, tokenizer, sentences,
                              batch_size=args.batch_size,
                              with_embeddings=args.embeddings,
                              cross_check=not args.no_cross_check)
    header = {"model": Path(args.model).name, "tool": f"lmextract {__version__}",
              "bos": tokenizer.bos_token, "n_records": len(records)}
    write_dump(args.out, records, header=header)
    sys.stdout.write(f"scored {len(records)} sentences -> {args.out}\n")
    return 0


def cmd_convert(args) -> int:
    if args.format == "paired-jsonl":
        specs = read_paired_jsonl(args.input)
    else:
        specs = READERS[args.format](args.input, dataset=args.dataset)
    write_sentences_jsonl(args.out, specs)
    sys.stdout.write(f"converted {len(specs)} sentences -> {args.out}\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lmextract")
    parser.add_argument("--version", action="version",
                        version=f"lmextract {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train-demo", help="train and save the local demo model")
    p.add_argument("--out", required=True)
    p.add_argument("--samples", type=int, default=20_000)
    p.add_argument("--steps", type=int, default=400)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_train_demo)

    p = sub.add_parser("score", help="score sentences and write a JSONL dump")
    p.add_argument("--model", required=True, help="model directory")
    p.add_argument("--sentences", required=True, help="sentence JSONL")
    p.add_argument("--out", required=True)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--embeddings", action="store_true",
                   help="include mean-pooled embeddings")
    p.add_argument("--no-cross-check", action="store_true",
                   help="skip the per-record sequence log-likelihood check")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("convert", help="convert external formats to sentence JSONL")
    p.add_argument("--format", choices=sorted(READERS) + ["paired-jsonl"],
                   required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--dataset", default="converted",
                   help="dataset name for formats that do not carry one")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_convert)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    import transformers

    transformers.logging.set_verbosity_error()
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ExtractError, OSError, ValueError) as e:
        sys.stderr.write(f"error: {e}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
