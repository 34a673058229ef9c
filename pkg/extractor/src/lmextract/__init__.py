"""Extract per-token log probabilities from causal LMs into scored JSONL dumps."""

__version__ = "0.1.0"

from .convert import (SchemaError, read_good_bad_jsonl, read_labeled_tsv,
                      read_paired_jsonl, write_sentences_jsonl)
from .embed import mean_pool
from .scores import (ExtractError, SentenceSpec, read_sentences_jsonl,
                     score_sentences, surprisal, write_dump)
from .tinylm import (DEMO_EPSILON, DEMO_MESSAGES, DEMO_SLOTS, all_texts,
                     build_tokenizer, demo_vocab, grammatical_texts,
                     sample_corpus, train_demo_model)

__all__ = [
    "DEMO_EPSILON", "DEMO_MESSAGES", "DEMO_SLOTS", "ExtractError",
    "SchemaError", "SentenceSpec", "all_texts", "build_tokenizer",
    "demo_vocab", "grammatical_texts", "mean_pool", "read_good_bad_jsonl",
    "read_labeled_tsv", "read_paired_jsonl", "read_sentences_jsonl",
    "sample_corpus", "score_sentences", "surprisal", "train_demo_model",
    "write_dump", "write_sentences_jsonl",
]
