"""Slot-grid string worlds: messages, realizations, and the substitution-edit graph.

A world is a fixed-length slot grid (every string has one symbol per slot),
a set of messages with prior probabilities, a deterministic realization per
message, and the two channel constants (epsilon, k_branch). Strings are nodes
of the edit graph; edges connect strings differing in exactly one slot.
"""

from __future__ import annotations

import itertools
import json
import string as _string
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Mapping, Sequence

import numpy as np

PROB_SUM_TOL = 1e-9
MAX_GRID_NODES = 2_000_000
EPSILON_WARN = 0.2


class WorldError(ValueError):
    """Invalid world configuration, or a string that is not a grid node."""


@dataclass(frozen=True, order=True)
class StringForm:
    """One string of the world, as a tuple of slot tokens."""

    tokens: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.tokens:
            raise WorldError("a string form needs at least one token")

    @classmethod
    def from_text(cls, text: str) -> "StringForm":
        toks = tuple(text.split())
        if not toks:
            raise WorldError(f"cannot parse an empty string: {text!r}")
        return cls(toks)

    @property
    def text(self) -> str:
        return " ".join(self.tokens)

    def __str__(self) -> str:
        return self.text


@dataclass(frozen=True)
class Message:
    """A message with prior probability and its grid coordinates."""

    id: str
    prob: float
    coords: tuple[int, ...]


@dataclass(frozen=True)
class Vocab:
    """Union of slot symbols, sorted for stable iteration."""

    symbols: tuple[str, ...]

    @property
    def size(self) -> int:
        return len(self.symbols)


class EditGraph:
    """Undirected single-substitution graph over every slot-grid string.

    Nodes are enumerated in lexicographic slot order; neighbour lists are
    sorted index tuples so iteration order never depends on hashing. Slot
    grids are regular: every node has degree sum(len(slot) - 1).
    """

    def __init__(self, slots: Sequence[Sequence[str]]):
        self.slots = tuple(tuple(s) for s in slots)
        nodes = [StringForm(c) for c in itertools.product(*self.slots)]
        self.nodes: tuple[StringForm, ...] = tuple(nodes)
        self._index = {s: i for i, s in enumerate(nodes)}
        radices = [len(s) for s in self.slots]
        sym_pos = [{sym: j for j, sym in enumerate(slot)} for slot in self.slots]

        def node_index(tokens: tuple[str, ...]) -> int:
            idx = 0
            for i, tok in enumerate(tokens):
                idx = idx * radices[i] + sym_pos[i][tok]
            return idx

        nbrs = []
        for s in nodes:
            row = []
            for slot_i, cur in enumerate(s.tokens):
                for alt in self.slots[slot_i]:
                    if alt != cur:
                        t = s.tokens[:slot_i] + (alt,) + s.tokens[slot_i + 1 :]
                        row.append(node_index(t))
            nbrs.append(tuple(sorted(row)))
        self.neighbor_indices: tuple[tuple[int, ...], ...] = tuple(nbrs)
        self.degree_value = len(nbrs[0])

    def __len__(self) -> int:
        return len(self.nodes)

    def __contains__(self, s: StringForm) -> bool:
        return s in self._index

    def index(self, s: StringForm) -> int:
        try:
            return self._index[s]
        except KeyError:
            raise WorldError(f"string {s.text!r} is not a node of this world") from None

    def neighbors(self, s: StringForm) -> tuple[StringForm, ...]:
        return tuple(self.nodes[j] for j in self.neighbor_indices[self.index(s)])

    def degree(self, s: StringForm) -> int:
        self.index(s)  # membership check
        return self.degree_value

    def edge_label(self, a: StringForm, b: StringForm) -> tuple[int, str, str]:
        """(slot, original symbol, replacement) for an existing edge a -> b."""
        ia, ib = self.index(a), self.index(b)
        if ib not in self.neighbor_indices[ia]:
            raise WorldError(f"no edge between {a.text!r} and {b.text!r}")
        for i, (x, y) in enumerate(zip(a.tokens, b.tokens)):
            if x != y:
                return (i, x, y)
        raise WorldError("identical strings have no edge")  # unreachable for valid edges

    @property
    def n_edges(self) -> int:
        return len(self.nodes) * self.degree_value // 2

    @cached_property
    def neighbor_array(self) -> np.ndarray:
        """(n_nodes, degree) int array; valid because slot grids are regular."""
        return np.array(self.neighbor_indices, dtype=np.int64)


@dataclass(frozen=True)
class World:
    """Immutable world: slot grid, messages, channel constants, edit graph."""

    slots: tuple[tuple[str, ...], ...]
    messages: tuple[Message, ...]
    epsilon: float
    k_branch: int
    graph: EditGraph = field(compare=False, repr=False)

    @property
    def n_slots(self) -> int:
        return len(self.slots)

    @property
    def diameter(self) -> int:
        # single-substitution grid: worst case fixes every slot once
        return len(self.slots)

    @cached_property
    def vocab(self) -> Vocab:
        return Vocab(tuple(sorted(set(itertools.chain.from_iterable(self.slots)))))

    @cached_property
    def message_by_id(self) -> Mapping[str, Message]:
        return {m.id: m for m in self.messages}

    @cached_property
    def realization(self) -> Mapping[str, StringForm]:
        return {m.id: self.realize(m) for m in self.messages}

    @cached_property
    def message_of(self) -> Mapping[StringForm, Message]:
        return {self.realization[m.id]: m for m in self.messages}

    @cached_property
    def grammatical(self) -> frozenset[StringForm]:
        return frozenset(self.realization.values())

    def realize(self, m: Message) -> StringForm:
        return StringForm(tuple(self.slots[i][c] for i, c in enumerate(m.coords)))

    def grammatical_strings(self) -> tuple[StringForm, ...]:
        return tuple(sorted(self.grammatical))

    def ungrammatical_strings(self) -> tuple[StringForm, ...]:
        return tuple(s for s in self.graph.nodes if s not in self.grammatical)

    def prior(self, message_id: str) -> float:
        try:
            return self.message_by_id[message_id].prob
        except KeyError:
            raise WorldError(f"unknown message id {message_id!r}") from None

    @cached_property
    def prior_array(self) -> np.ndarray:
        return np.array([m.prob for m in self.messages], dtype=float)

    @cached_property
    def realization_indices(self) -> np.ndarray:
        return np.array([self.graph.index(self.realization[m.id]) for m in self.messages],
                        dtype=np.int64)


@dataclass(frozen=True)
class WorldConfig:
    """Config for build_random_world. law is one of uniform, zipf, lognormal."""

    n_messages: int
    n_slots: int
    symbols_per_slot: int
    law: str = "zipf"
    law_param: float = 1.3
    epsilon: float = 0.05
    k_branch: int = 3
    seed: int = 0


def _validate(slots, messages, epsilon, k_branch) -> None:
    if not slots:
        raise WorldError("world needs at least one slot")
    for i, slot in enumerate(slots):
        if len(slot) < 2:
            raise WorldError(f"slot {i} needs at least 2 symbols, got {len(slot)}")
        if len(set(slot)) != len(slot):
            raise WorldError(f"slot {i} has duplicate symbols")
        for sym in slot:
            if not sym or any(ch.isspace() for ch in sym):
                raise WorldError(f"slot {i} symbol {sym!r} is empty or contains whitespace")
    n_nodes = 1
    for slot in slots:
        n_nodes *= len(slot)
        if n_nodes > MAX_GRID_NODES:
            raise WorldError(f"slot grid exceeds {MAX_GRID_NODES} nodes")
    if not messages:
        raise WorldError("world needs at least one message")
    if len(messages) > n_nodes:
        raise WorldError(f"{len(messages)} messages cannot fit a {n_nodes}-node grid")
    ids = [m.id for m in messages]
    if len(set(ids)) != len(ids):
        raise WorldError("duplicate message ids")
    coords_seen = set()
    for m in messages:
        if len(m.coords) != len(slots):
            raise WorldError(f"message {m.id!r} has {len(m.coords)} coords for {len(slots)} slots")
        for i, c in enumerate(m.coords):
            if not 0 <= c < len(slots[i]):
                raise WorldError(f"message {m.id!r} coord {c} out of range for slot {i}")
        if m.coords in coords_seen:
            raise WorldError(f"message {m.id!r} shares its realization with another message")
        coords_seen.add(m.coords)
        if not 0.0 < m.prob <= 1.0:
            raise WorldError(f"message {m.id!r} has probability {m.prob} outside (0, 1]")
    total = sum(m.prob for m in messages)
    if abs(total - 1.0) > PROB_SUM_TOL:
        raise WorldError(f"message probabilities sum to {total!r}, not 1 within {PROB_SUM_TOL}")
    if not 0.0 < epsilon < 0.5:
        raise WorldError(f"epsilon must lie strictly in (0, 0.5), got {epsilon}")
    if epsilon > EPSILON_WARN:
        warnings.warn(f"epsilon={epsilon} is large; the error channel dominates", stacklevel=3)
    if not (isinstance(k_branch, (int, np.integer)) and k_branch >= 1):
        raise WorldError(f"k_branch must be an integer >= 1, got {k_branch!r}")


def _make_world(slots, messages, epsilon, k_branch) -> World:
    slots = tuple(tuple(s) for s in slots)
    messages = tuple(messages)
    _validate(slots, messages, epsilon, k_branch)
    return World(slots=slots, messages=messages, epsilon=float(epsilon),
                 k_branch=int(k_branch), graph=EditGraph(slots))


CUBE_SLOTS = (("The", "A"), ("moon", "moons"), ("emerge", "emerges"))
# m1 "The moon emerges", m2 "A moon emerges", m3 "The moons emerge"
CUBE_COORDS = {"m1": (0, 0, 1), "m2": (1, 0, 1), "m3": (0, 1, 0)}


def build_cube_world(message_probs: Sequence[float] = (0.6, 0.3, 0.1),
                     epsilon: float = 0.05, k_branch: int = 3) -> World:
    """The 8-node demo world: 3 grammatical strings on a 2x2x2 slot grid."""
    if len(message_probs) != 3:
        raise WorldError(f"cube world takes exactly 3 message probabilities, got {len(message_probs)}")
    messages = [Message(mid, float(p), CUBE_COORDS[mid])
                for mid, p in zip(("m1", "m2", "m3"), message_probs)]
    return _make_world(CUBE_SLOTS, messages, epsilon, k_branch)


def _slot_symbols(slot: int, count: int) -> tuple[str, ...]:
    letters = _string.ascii_lowercase
    if count > len(letters):
        raise WorldError(f"symbols_per_slot is capped at {len(letters)}, got {count}")
    return tuple(f"w{slot}{letters[j]}" for j in range(count))


def _decode_coords(index: int, n_slots: int, radix: int) -> tuple[int, ...]:
    coords = []
    for _ in range(n_slots):
        index, c = divmod(index, radix)
        coords.append(c)
    return tuple(reversed(coords))


def _law_weights(cfg: WorldConfig, rng: np.random.Generator) -> np.ndarray:
    if cfg.law == "uniform":
        return np.ones(cfg.n_messages)
    if cfg.law == "zipf":
        if cfg.law_param <= 0:
            raise WorldError(f"zipf exponent must be positive, got {cfg.law_param}")
        return (np.arange(cfg.n_messages) + 1.0) ** -cfg.law_param
    if cfg.law == "lognormal":
        if cfg.law_param <= 0:
            raise WorldError(f"lognormal sigma must be positive, got {cfg.law_param}")
        return rng.lognormal(mean=0.0, sigma=cfg.law_param, size=cfg.n_messages)
    raise WorldError(f"unknown message law {cfg.law!r}; expected uniform, zipf, or lognormal")


def build_random_world(cfg: WorldConfig) -> World:
    """Random world on an n_slots-dim grid with symbols_per_slot symbols each.

    Message realizations are distinct nodes drawn without replacement; prior
    weights follow cfg.law in draw order, then normalize. Deterministic for a
    fixed config (numpy default_rng on cfg.seed).
    """
    if cfg.n_messages < 1:
        raise WorldError("n_messages must be >= 1")
    if cfg.n_slots < 1:
        raise WorldError("n_slots must be >= 1")
    if cfg.symbols_per_slot < 2:
        raise WorldError("symbols_per_slot must be >= 2")
    n_nodes = cfg.symbols_per_slot ** cfg.n_slots
    if n_nodes > MAX_GRID_NODES:
        raise WorldError(f"slot grid exceeds {MAX_GRID_NODES} nodes")
    if cfg.n_messages > n_nodes:
        raise WorldError(f"{cfg.n_messages} messages cannot fit a {n_nodes}-node grid")
    slots = tuple(_slot_symbols(i, cfg.symbols_per_slot) for i in range(cfg.n_slots))
    rng = np.random.default_rng(cfg.seed)
    node_ids = rng.choice(n_nodes, size=cfg.n_messages, replace=False)
    weights = _law_weights(cfg, rng)
    probs = weights / weights.sum()
    messages = [Message(f"m{i}", float(p), _decode_coords(int(node), cfg.n_slots, cfg.symbols_per_slot))
                for i, (node, p) in enumerate(zip(node_ids, probs))]
    return _make_world(slots, messages, cfg.epsilon, cfg.k_branch)


def edit_neighbors(world: World, s: StringForm) -> tuple[StringForm, ...]:
    """All single-substitution neighbours of s, sorted. Unknown strings raise."""
    return world.graph.neighbors(s)


def message_similarity(world: World, id_a: str, id_b: str) -> float:
    """L1 distance between the two messages' grid coordinates."""
    a = world.message_by_id.get(id_a)
    b = world.message_by_id.get(id_b)
    if a is None or b is None:
        missing = [i for i, m in ((id_a, a), (id_b, b)) if m is None]
        raise WorldError(f"unknown message id(s): {', '.join(repr(i) for i in missing)}")
    return float(sum(abs(x - y) for x, y in zip(a.coords, b.coords)))


def world_to_json(world: World) -> str:
    """Serialize a world; the edit graph is implied by the slot structure."""
    doc = {
        "vocab": {"slots": [list(s) for s in world.slots]},
        "messages": [{"id": m.id, "prob": m.prob, "coords": list(m.coords)}
                     for m in world.messages],
        "realizations": {m.id: list(world.realization[m.id].tokens) for m in world.messages},
        "epsilon": world.epsilon,
        "k_branch": world.k_branch,
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def world_from_json(text: str) -> World:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise WorldError(f"world JSON is unparseable: {e}") from None
    try:
        slots = tuple(tuple(s) for s in doc["vocab"]["slots"])
        messages = tuple(Message(m["id"], float(m["prob"]), tuple(int(c) for c in m["coords"]))
                         for m in doc["messages"])
        realizations = doc["realizations"]
        epsilon = float(doc["epsilon"])
        k_branch = int(doc["k_branch"])
    except (KeyError, TypeError) as e:
        raise WorldError(f"world JSON is missing or mistypes a field: {e!r}") from None
    world = _make_world(slots, messages, epsilon, k_branch)
    for m in world.messages:
        stored = realizations.get(m.id)
        derived = list(world.realization[m.id].tokens)
        if stored != derived:
            raise WorldError(f"realization for {m.id!r} disagrees with its coords: "
                             f"{stored!r} vs {derived!r}")
    return world
