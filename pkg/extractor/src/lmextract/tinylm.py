"""A self-contained demo language model for tests and offline smoke runs.

Eight-sentence toy language (two determiners, two noun forms, two verb
forms), three grammatical sentences with a skewed prior, and a noisy
production channel that corrupts a sentence by substituting random slots.
The channel rate is deliberately high (0.35) so that frequent errors off the
most popular sentence end up more probable than the rarest grammatical
sentence; a language model fit to the resulting corpus then assigns

    surprisal("The moons emerge")  >  surprisal("The moon emerge")

even though only the first is grammatical. That inversion is the behavior
the extraction pipeline exists to measure, so the tests train this model and
check for it.

Everything here is local: word-level tokenizer, a few-thousand-parameter
GPT-2 config, a corpus sampled on the fly. No downloads.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np
import torch

DEMO_SLOTS = (("The", "A"), ("moon", "moons"), ("emerge", "emerges"))
DEMO_MESSAGES = (("The moon emerges", 0.70),
                 ("A moon emerges", 0.25),
                 ("The moons emerge", 0.05))
DEMO_EPSILON = 0.35

SPECIALS = ("<pad>", "<bos>", "<eos>", "<unk>")


def demo_vocab() -> dict[str, int]:
    words = [w for slot in DEMO_SLOTS for w in slot]
    return {tok: i for i, tok in enumerate(SPECIALS + tuple(words))}


def grammatical_texts() -> tuple[str, ...]:
    return tuple(t for t, _ in DEMO_MESSAGES)


def all_texts() -> tuple[str, ...]:
    import itertools
    return tuple(" ".join(ws) for ws in itertools.product(*DEMO_SLOTS))


def sample_corpus(n: int, seed: int) -> list[str]:
    """Draw n sentences: pick a message, then maybe walk the channel.

    With probability 1 - epsilon the realization survives; otherwise it
    takes a geometric number of single-slot substitutions (each slot has one
    alternative, so a step just flips a random slot).
    """
    rng = np.random.default_rng(seed)
    texts, probs = zip(*DEMO_MESSAGES)
    tokens = [t.split() for t in texts]
    out = []
    for _ in range(n):
        cur = list(tokens[rng.choice(len(texts), p=probs)])
        if rng.random() < DEMO_EPSILON:
            for _ in range(rng.geometric(1.0 - DEMO_EPSILON)):
                slot = int(rng.integers(len(DEMO_SLOTS)))
                alts = [s for s in DEMO_SLOTS[slot] if s != cur[slot]]
                cur[slot] = alts[int(rng.integers(len(alts)))]
        out.append(" ".join(cur))
    return out


def build_tokenizer():
    from tokenizers import Tokenizer, models, pre_tokenizers
    from transformers import PreTrainedTokenizerFast

    tok = Tokenizer(models.WordLevel(demo_vocab(), unk_token="<unk>"))
    tok.pre_tokenizer = pre_tokenizers.WhitespaceSplit()
    return PreTrainedTokenizerFast(tokenizer_object=tok, bos_token="<bos>",
                                   eos_token="<eos>", pad_token="<pad>",
                                   unk_token="<unk>")


def train_demo_model(out_dir: str | Path, *, n_samples: int = 20_000,
                     steps: int = 400, batch_size: int = 256, lr: float = 3e-3,
                     seed: int = 0) -> Path:
    """Train the demo model and save model + tokenizer under out_dir.

    Takes a few seconds on CPU. Fully deterministic for a fixed seed.
    """
    from transformers import GPT2Config, GPT2LMHeadModel

    tokenizer = build_tokenizer()
    vocab = demo_vocab()
    corpus = sample_corpus(n_samples, seed)
    bos, eos = vocab["<bos>"], vocab["<eos>"]
    rows = torch.tensor([[bos] + [vocab[w] for w in s.split()] + [eos]
                         for s in corpus])

    torch.manual_seed(seed)
    config = GPT2Config(vocab_size=len(vocab), n_positions=8, n_embd=32,
                        n_layer=2, n_head=2, bos_token_id=bos, eos_token_id=eos)
    model = GPT2LMHeadModel(config)
    opt = torch.optim.AdamW(model.parameters(), lr=lr)
    picker = torch.Generator().manual_seed(seed + 1)
    model.train()
    for _ in range(steps):
        batch = rows[torch.randint(0, len(rows), (batch_size,), generator=picker)]
        loss = model(batch, labels=batch).loss
        opt.zero_grad()
        loss.backward()
        opt.step()
    model.eval()

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    model.save_pretrained(out)
    tokenizer.save_pretrained(out)
    return out
