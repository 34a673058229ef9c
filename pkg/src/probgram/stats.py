"""Statistics used by the prediction harness.

Everything here is deliberately small and hand-rolled so the test suite can
check it against independent brute-force oracles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .records import RatingRecord


class ConstantInputError(ValueError):
    """Correlation requested on an input with zero variance."""


def _as_float_array(x: Sequence[float], name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def pearson_r(x: Sequence[float], y: Sequence[float]) -> float:
    """Pearson correlation; raises ConstantInputError instead of returning NaN."""
    xa = _as_float_array(x, "x")
    ya = _as_float_array(y, "y")
    if len(xa) != len(ya):
        raise ValueError(f"length mismatch: {len(xa)} vs {len(ya)}")
    if len(xa) < 3:
        raise ValueError(f"need at least 3 points, got {len(xa)}")
    xc = xa - xa.mean()
    yc = ya - ya.mean()
    sxx = float(np.dot(xc, xc))
    syy = float(np.dot(yc, yc))
    constant = [name for name, s in (("x", sxx), ("y", syy)) if s == 0.0]
    if constant:
        raise ConstantInputError(f"constant input: {', '.join(constant)}")
    return float(np.dot(xc, yc) / math.sqrt(sxx * syy))


def rho_analytic(var_x: float, var_y: float, cov_xy: float) -> float:
    """Correlation of X with Z = X + Y + c from the variance decomposition:

        rho = (Var X + Cov(X, Y)) / sqrt(Var X * (Var X + Var Y + 2 Cov(X, Y)))
    """
    if var_x <= 0.0:
        raise ValueError(f"var_x must be positive, got {var_x}")
    if var_y < 0.0:
        raise ValueError(f"var_y must be >= 0, got {var_y}")
    var_z = var_x + var_y + 2.0 * cov_xy
    if var_z <= 0.0:
        raise ValueError(f"implied Var(Z) = {var_z} is not positive")
    return (var_x + cov_xy) / math.sqrt(var_x * var_z)


@dataclass(frozen=True)
class RocResult:
    """Threshold-sweep ROC curve plus the exact Mann-Whitney AUC."""

    auc: float
    points: tuple[tuple[float, float], ...]


def midranks(values: Sequence[float]) -> np.ndarray:
    """Ranks 1..n with ties assigned their average rank."""
    return _midranks(_as_float_array(values, "values"))


def _midranks(values: np.ndarray) -> np.ndarray:
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=float)
    i = 0
    sorted_vals = values[order]
    while i < len(values):
        j = i
        while j + 1 < len(values) and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i:j + 1]] = 0.5 * (i + j) + 1.0  # average of ranks i+1 .. j+1
        i = j + 1
    return ranks


def roc_auc(pos: Sequence[float], neg: Sequence[float]) -> RocResult:
    """AUC via the exact rank statistic; ties contribute half weight.

    The curve sweeps every distinct pooled score as a threshold (predict
    positive when score >= threshold), so its trapezoidal area equals the
    rank-statistic AUC.
    """
    pa = _as_float_array(pos, "pos")
    na = _as_float_array(neg, "neg")
    if len(pa) == 0 or len(na) == 0:
        raise ValueError("roc_auc needs at least one score in each class")
    pooled = np.concatenate([pa, na])
    ranks = _midranks(pooled)
    rank_sum_pos = float(ranks[: len(pa)].sum())
    u = rank_sum_pos - len(pa) * (len(pa) + 1) / 2.0
    auc = u / (len(pa) * len(na))

    points: list[tuple[float, float]] = [(0.0, 0.0)]
    tp = fp = 0
    for t in sorted(set(pooled.tolist()), reverse=True):
        tp += int(np.sum(pa == t))
        fp += int(np.sum(na == t))
        points.append((fp / len(na), tp / len(pa)))
    return RocResult(auc=float(auc), points=tuple(points))


def zscore_within(records: Sequence[RatingRecord]
                  ) -> tuple[list[RatingRecord], tuple[str, ...]]:
    """Z-score ratings within each participant (sample sd, n-1 denominator).

    Returns transformed records in input order plus the participants whose
    ratings had zero variance (their z-scores are set to 0). Participants
    with a single rating are an error, reported all at once.
    """
    by_part: dict[str, list[int]] = {}
    for i, r in enumerate(records):
        by_part.setdefault(r.participant, []).append(i)
    singletons = sorted(p for p, idxs in by_part.items() if len(idxs) < 2)
    if singletons:
        raise ValueError("participants with a single rating cannot be z-scored: "
                         + ", ".join(repr(p) for p in singletons))
    out: list[RatingRecord | None] = [None] * len(records)
    flagged: list[str] = []
    for part in sorted(by_part):
        idxs = by_part[part]
        vals = np.array([records[i].rating for i in idxs], dtype=float)
        sd = float(vals.std(ddof=1))
        if sd == 0.0:
            flagged.append(part)
            zs = np.zeros(len(vals))
        else:
            zs = (vals - vals.mean()) / sd
        for i, z in zip(idxs, zs):
            out[i] = RatingRecord(records[i].participant, records[i].item, float(z))
    return [r for r in out if r is not None], tuple(flagged)


def quantile_bins(values: Sequence[float], k: int) -> list[int]:
    """Equal-size rank bins; returns a bin index per value, in input order.

    Ties are broken by stable input order. Bin sizes differ by at most one
    (earlier bins take the remainder).
    """
    vals = _as_float_array(values, "values")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    n = len(vals)
    if n < k:
        raise ValueError(f"cannot cut {n} values into {k} bins")
    order = np.argsort(vals, kind="stable")
    base, rem = divmod(n, k)
    bins = [0] * n
    pos = 0
    for b in range(k):
        size = base + (1 if b < rem else 0)
        for i in order[pos:pos + size]:
            bins[int(i)] = b
        pos += size
    return bins


def empirical_quantile(values: Sequence[float], q: float) -> float:
    """Inverse empirical CDF quantile (no interpolation): the smallest value v
    with CDF(v) >= q."""
    vals = _as_float_array(values, "values")
    if len(vals) == 0:
        raise ValueError("empty input")
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must lie in [0, 1], got {q}")
    s = np.sort(vals, kind="stable")
    idx = max(1, math.ceil(q * len(s)))
    return float(s[idx - 1])


def levenshtein(a: Sequence, b: Sequence) -> int:
    """Edit distance (insert/delete/substitute, unit costs) over any sequences."""
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(min(prev[j] + 1,           # delete
                           cur[j - 1] + 1,        # insert
                           prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def cosine_distance(u: Sequence[float], v: Sequence[float]) -> float:
    ua = _as_float_array(u, "u")
    va = _as_float_array(v, "v")
    if len(ua) != len(va):
        raise ValueError(f"dimension mismatch: {len(ua)} vs {len(va)}")
    if len(ua) == 0:
        raise ValueError("empty vectors")
    nu = float(np.linalg.norm(ua))
    nv = float(np.linalg.norm(va))
    if nu == 0.0 or nv == 0.0:
        raise ValueError("cosine distance is undefined for zero vectors")
    return 1.0 - float(np.dot(ua, va) / (nu * nv))
