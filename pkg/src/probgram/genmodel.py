"""Noisy-channel generative model over a world.

Generation: draw a message m, realize it; with probability epsilon the
realization is corrupted by a uniform random walk on the edit graph whose
depth d follows the geometric law (1 - eps) * eps**(d-1), d >= 1.

String probabilities come in three flavours:
  * exact     - truncated dynamic program over (depth, node), with a tail bound
  * approx    - closed form keeping only the dominant error path
  * sampled   - Monte Carlo draws from the generative process

Slot-grid edit graphs are regular, so the walk kernel is symmetric; the DP
walks outward from the query string and reads off the mass at each
realization, which is what makes single-string queries and posteriors cheap.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass

import numpy as np

from .records import ScoredSentence, PairRecord
from .worlds import StringForm, World, WorldError, message_similarity


class UnknownStringError(WorldError):
    """Query string is not a node of the world's edit graph."""


@dataclass(frozen=True)
class ProbValue:
    """Truncated-sum probability plus the truncation tail bound eps**max_depth."""

    value: float
    tail_bound: float


@dataclass(frozen=True)
class GenerationOutcome:
    message_id: str
    grammatical: bool
    string: StringForm
    n_errors: int


@dataclass(frozen=True)
class PairCriteria:
    """Meaning-matched pair test: posterior > 1 - delta, distance <= max_errors.

    max_errors=None places no cap on the error distance; max_errors=1 selects
    strictly minimal pairs.
    """

    delta: float = 0.999
    max_errors: int | None = 1

    def __post_init__(self) -> None:
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")
        if self.max_errors is not None and self.max_errors < 1:
            raise ValueError(f"max_errors must be >= 1 or None, got {self.max_errors}")


def default_max_depth(world: World) -> int:
    # 4x diameter leaves the truncated mass at eps**(4*diameter + 1)
    return 4 * world.diameter


def _check_node(world: World, s: StringForm) -> int:
    try:
        return world.graph.index(s)
    except WorldError:
        raise UnknownStringError(f"string {s.text!r} is not a node of this world") from None


def _walk_error_mass(world: World, s: StringForm, max_depth: int) -> np.ndarray:
    """sum_d (1-eps) eps**(d-1) * P(walk of depth d from s hits each realization).

    Returns an array aligned with world.messages. Valid as the error-channel
    likelihood P(s | m, G=0) because the uniform walk kernel on a regular
    graph is symmetric.
    """
    start = _check_node(world, s)
    nbr = world.graph.neighbor_array
    deg = world.graph.degree_value
    eps = world.epsilon
    real_idx = world.realization_indices
    v = np.zeros(len(world.graph.nodes))
    v[start] = 1.0
    mass = np.zeros(len(world.messages))
    weight = 1.0 - eps
    for _ in range(max_depth):
        v = v[nbr].sum(axis=1) / deg
        mass += weight * v[real_idx]
        weight *= eps
    return mass


def string_prob_exact(world: World, s: StringForm, max_depth: int | None = None) -> ProbValue:
    """Exact (truncated) probability of s under the generative model."""
    if max_depth is None:
        max_depth = default_max_depth(world)
    if max_depth < 1:
        raise ValueError(f"max_depth must be >= 1, got {max_depth}")
    idx = _check_node(world, s)
    eps = world.epsilon
    mass = _walk_error_mass(world, s, max_depth)
    value = float(np.dot(world.prior_array, eps * mass))
    if idx in set(int(i) for i in world.realization_indices):
        m = world.message_of[s]
        value += (1.0 - eps) * m.prob
    return ProbValue(value=value, tail_bound=eps ** max_depth)


def string_prob_table(world: World, max_depth: int | None = None) -> dict[StringForm, ProbValue]:
    """Probability of every grid string, by one walk DP per message."""
    if max_depth is None:
        max_depth = default_max_depth(world)
    if max_depth < 1:
        raise ValueError(f"max_depth must be >= 1, got {max_depth}")
    nbr = world.graph.neighbor_array
    deg = world.graph.degree_value
    eps = world.epsilon
    total = np.zeros(len(world.graph.nodes))
    for m, start in zip(world.messages, world.realization_indices):
        v = np.zeros(len(world.graph.nodes))
        v[start] = 1.0
        err = np.zeros_like(v)
        weight = 1.0 - eps
        for _ in range(max_depth):
            v = v[nbr].sum(axis=1) / deg
            err += weight * v
            weight *= eps
        total[start] += m.prob * (1.0 - eps)
        total += m.prob * eps * err
    tail = eps ** max_depth
    return {node: ProbValue(float(total[i]), tail) for i, node in enumerate(world.graph.nodes)}


def string_prob_approx(world: World, s: StringForm) -> float:
    """Leading-order probability: (1-eps) P(m) for grammatical strings,
    (eps / K) * sum of priors over adjacent realizations otherwise."""
    _check_node(world, s)
    if s in world.grammatical:
        return (1.0 - world.epsilon) * world.message_of[s].prob
    neighbor_mass = sum(world.message_of[t].prob
                        for t in world.graph.neighbors(s) if t in world.grammatical)
    return (world.epsilon / world.k_branch) * neighbor_mass


def classify_grammatical(world: World, s: StringForm) -> bool:
    _check_node(world, s)
    return s in world.grammatical


def error_distance(world: World, a: StringForm, b: StringForm) -> int:
    """Shortest edit-graph path between two strings (BFS, message independent)."""
    ia, ib = _check_node(world, a), _check_node(world, b)
    if ia == ib:
        return 0
    nbrs = world.graph.neighbor_indices
    seen = {ia}
    frontier = [ia]
    dist = 0
    while frontier:
        dist += 1
        nxt = []
        for u in frontier:
            for v in nbrs[u]:
                if v == ib:
                    return dist
                if v not in seen:
                    seen.add(v)
                    nxt.append(v)
        frontier = nxt
    raise WorldError(f"no path between {a.text!r} and {b.text!r}")  # grids are connected


def _rng_from(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def sample_generation(world: World, rng) -> GenerationOutcome:
    """One draw from the generative process. rng is a seed or a numpy Generator.

    The grammatical flag records the channel's G variable, not the surface
    form: a walk that happens to end on some realization still counts as an
    error generation.
    """
    rng = _rng_from(rng)
    m_i = int(rng.choice(len(world.messages), p=world.prior_array))
    m = world.messages[m_i]
    if rng.random() >= world.epsilon:
        return GenerationOutcome(m.id, True, world.realization[m.id], 0)
    depth = int(rng.geometric(1.0 - world.epsilon))
    node = int(world.realization_indices[m_i])
    nbrs = world.graph.neighbor_indices
    for _ in range(depth):
        node = nbrs[node][int(rng.integers(len(nbrs[node])))]
    return GenerationOutcome(m.id, False, world.graph.nodes[node], depth)


def sample_strings(world: World, n: int, seed) -> dict[StringForm, int]:
    """Vectorized sampler: n independent generations, returned as counts."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    rng = _rng_from(seed)
    m_idx = rng.choice(len(world.messages), size=n, p=world.prior_array)
    positions = world.realization_indices[m_idx].copy()
    is_error = rng.random(n) < world.epsilon
    depths = np.zeros(n, dtype=np.int64)
    n_err = int(is_error.sum())
    if n_err:
        depths[is_error] = rng.geometric(1.0 - world.epsilon, size=n_err)
    nbr = world.graph.neighbor_array
    deg = world.graph.degree_value
    max_d = int(depths.max()) if n_err else 0
    for step in range(1, max_d + 1):
        active = depths >= step
        k = int(active.sum())
        choices = rng.integers(deg, size=k)
        positions[active] = nbr[positions[active], choices]
    counts = np.bincount(positions, minlength=len(world.graph.nodes))
    return {world.graph.nodes[i]: int(c) for i, c in enumerate(counts) if c > 0}


def message_posterior(world: World, s: StringForm, given_error: bool = False,
                      max_depth: int | None = None) -> dict[str, float]:
    """P(m | s), or P(m | s, G=0) when given_error is set.

    Returned dict preserves world message order and sums to 1.
    """
    if max_depth is None:
        max_depth = default_max_depth(world)
    idx = _check_node(world, s)
    eps = world.epsilon
    mass = _walk_error_mass(world, s, max_depth)
    if given_error:
        weights = world.prior_array * mass
    else:
        onehot = (world.realization_indices == idx).astype(float)
        weights = world.prior_array * ((1.0 - eps) * onehot + eps * mass)
    total = float(weights.sum())
    if total <= 0.0:
        raise WorldError(f"posterior for {s.text!r} has zero mass at max_depth={max_depth}")
    return {m.id: float(w / total) for m, w in zip(world.messages, weights)}


def top_message(world: World, posterior: dict[str, float]) -> str:
    """Argmax message id; ties broken by higher prior, then smaller id."""
    # max() keeps the first maximal element, so pre-sorting by id settles ties
    return max(sorted(posterior), key=lambda mid: (posterior[mid], world.prior(mid)))


def _uniform_split_logprob(logprob: float, n: int) -> tuple[float, ...]:
    return tuple(logprob / n for _ in range(n))


def _sim_sentence(world: World, s: StringForm, pair_id: str, condition: str,
                  logprob: float) -> ScoredSentence:
    return ScoredSentence(
        id=f"n{world.graph.index(s):04d}",
        dataset="sim",
        pair_id=pair_id,
        condition=condition,
        text=s.text,
        tokens=s.tokens,
        token_logprobs=_uniform_split_logprob(logprob, len(s.tokens)),
        embedding=None,
        language="toy",
    )


def pair_id_for(message_id: str, u: StringForm) -> str:
    return f"{message_id}~{'_'.join(u.tokens)}"


def enumerate_pairs(world: World, criteria: PairCriteria,
                    max_depth: int | None = None) -> list[PairRecord]:
    """All (grammatical, ungrammatical) pairs passing the matching criteria.

    A message m pairs with ungrammatical u when P(m | u, G=0) > 1 - delta and
    the edit distance between m's realization and u is within max_errors.
    Sentence records carry exact log probabilities split uniformly over
    tokens; msg_similarity compares m against the posterior-top message of u
    (the message of u's most plausible grammatical source).
    """
    if max_depth is None:
        max_depth = default_max_depth(world)
    table = string_prob_table(world, max_depth)
    pairs: list[PairRecord] = []
    for u in world.ungrammatical_strings():
        post = message_posterior(world, u, given_error=True, max_depth=max_depth)
        best = top_message(world, post)
        lp_u = math.log(table[u].value)
        for m in world.messages:
            if post[m.id] <= 1.0 - criteria.delta:
                continue
            g = world.realization[m.id]
            d = error_distance(world, g, u)
            if criteria.max_errors is not None and d > criteria.max_errors:
                continue
            pid = pair_id_for(m.id, u)
            pairs.append(PairRecord(
                pair_id=pid,
                gram=_sim_sentence(world, g, pid, "grammatical", math.log(table[g].value)),
                ungram=_sim_sentence(world, u, pid, "ungrammatical", lp_u),
                error_dist=d,
                msg_similarity=message_similarity(world, m.id, best),
            ))
    return pairs


def simulate_minimal_pairs(world: World, delta: float = 0.999,
                           max_depth: int | None = None) -> list[PairRecord]:
    return enumerate_pairs(world, PairCriteria(delta=delta, max_errors=1), max_depth)


def meaning_matched_pairs(world: World, delta: float = 0.999,
                          max_errors: int | None = None,
                          max_depth: int | None = None) -> list[PairRecord]:
    return enumerate_pairs(world, PairCriteria(delta=delta, max_errors=max_errors), max_depth)


def pair_noise_rng(seed: int, pair_id: str) -> np.random.Generator:
    """Per-pair noise stream, stable under pair reordering."""
    return np.random.default_rng((seed, zlib.crc32(pair_id.encode("utf-8"))))
