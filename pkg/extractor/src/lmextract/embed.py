"""Sentence embeddings by mean pooling hidden states."""
from __future__ import annotations

import torch


def mean_pool(hidden: torch.Tensor, mask: torch.Tensor,
              skip_first: bool = False) -> list[float]:
    """Average the rows of hidden where mask is 1.

    hidden is (seq, dim), mask is (seq,). skip_first drops position 0 from
    the average, which is where the scoring code puts BOS.
    """
    if hidden.dim() != 2 or mask.dim() != 1 or hidden.shape[0] != mask.shape[0]:
        raise ValueError(f"expected (seq, dim) hidden and (seq,) mask, got "
                         f"{tuple(hidden.shape)} and {tuple(mask.shape)}")
    keep = mask.bool().clone()
    if skip_first:
        keep[0] = False
    if not bool(keep.any()):
        raise ValueError("mask keeps no positions; nothing to pool")
    return [float(v) for v in hidden[keep].mean(dim=0)]
