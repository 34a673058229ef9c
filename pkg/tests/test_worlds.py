"""World construction, the edit graph, and serialization."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import probgram as pg
from probgram import (Message, StringForm, WorldConfig, WorldError,
                      build_cube_world, build_random_world, edit_neighbors,
                      message_similarity, world_from_json, world_to_json)
from oracles import oracle_hamming


def test_cube_shape(cube):
    assert len(cube.graph.nodes) == 8
    assert cube.graph.degree_value == 3
    assert cube.graph.n_edges == 12
    assert len(cube.grammatical) == 3
    assert len(cube.ungrammatical_strings()) == 5
    assert cube.vocab.size == 6
    assert cube.diameter == 3


def test_cube_realizations(cube):
    assert cube.realization["m1"].text == "The moon emerges"
    assert cube.realization["m2"].text == "A moon emerges"
    assert cube.realization["m3"].text == "The moons emerge"
    for mid, m in cube.message_by_id.items():
        assert cube.message_of[cube.realization[mid]] is m


def test_stringform_roundtrip():
    s = StringForm.from_text("The moon emerges")
    assert s.tokens == ("The", "moon", "emerges")
    assert s.text == "The moon emerges"
    assert StringForm.from_text(s.text) == s
    with pytest.raises(WorldError):
        StringForm.from_text("   ")


def test_neighbors_differ_in_one_slot(cube):
    for node in cube.graph.nodes:
        nbrs = edit_neighbors(cube, node)
        assert len(nbrs) == cube.graph.degree_value
        for nb in nbrs:
            assert oracle_hamming(node, nb) == 1
        # sorted by node index, no duplicates
        idx = [cube.graph.index(nb) for nb in nbrs]
        assert idx == sorted(set(idx))


def test_edge_label(cube):
    a = StringForm.from_text("The moon emerges")
    b = StringForm.from_text("A moon emerges")
    assert cube.graph.edge_label(a, b) == (0, "The", "A")
    c = StringForm.from_text("A moons emerge")
    with pytest.raises(WorldError):
        cube.graph.edge_label(a, c)


def test_unknown_string_raises(cube):
    with pytest.raises(WorldError):
        cube.graph.index(StringForm.from_text("The sun emerges"))


def test_message_similarity(cube):
    assert message_similarity(cube, "m1", "m1") == 0.0
    assert message_similarity(cube, "m1", "m2") == 1.0
    # m1 (0,0,1) vs m3 (0,1,0)
    assert message_similarity(cube, "m1", "m3") == 2.0
    with pytest.raises(WorldError, match="m99"):
        message_similarity(cube, "m1", "m99")


def test_prob_validation():
    with pytest.raises(WorldError, match="sum"):
        build_cube_world(message_probs=(0.5, 0.3, 0.1))
    with pytest.raises(WorldError, match="epsilon"):
        build_cube_world(epsilon=0.0)
    with pytest.raises(WorldError, match="epsilon"):
        build_cube_world(epsilon=0.5)
    with pytest.raises(WorldError, match="k_branch"):
        build_cube_world(k_branch=0)
    with pytest.warns(UserWarning, match="large"):
        build_cube_world(epsilon=0.3)


def test_duplicate_realization_rejected():
    msgs = [Message("a", 0.5, (0, 0)), Message("b", 0.5, (0, 0))]
    with pytest.raises(WorldError, match="shares its realization"):
        pg.worlds._make_world((("x", "y"), ("u", "v")), msgs, 0.05, 2)


def test_random_world_laws():
    base = dict(n_messages=6, n_slots=3, symbols_per_slot=3, epsilon=0.05,
                k_branch=2, seed=5)
    uni = build_random_world(WorldConfig(law="uniform", law_param=1.0, **base))
    assert np.allclose(uni.prior_array, 1 / 6)
    zipf = build_random_world(WorldConfig(law="zipf", law_param=1.5, **base))
    probs = [m.prob for m in zipf.messages]
    assert probs == sorted(probs, reverse=True)
    assert probs[0] / probs[1] == pytest.approx(2 ** 1.5)
    logn = build_random_world(WorldConfig(law="lognormal", law_param=2.0, **base))
    assert all(m.prob > 0 for m in logn.messages)
    for w in (uni, zipf, logn):
        assert math.fsum(m.prob for m in w.messages) == pytest.approx(1.0, abs=1e-12)
        # distinct realizations, coords consistent with the realization text
        reals = list(w.realization.values())
        assert len(set(reals)) == len(reals)
        for m in w.messages:
            assert w.realize(m) == w.realization[m.id]
    with pytest.raises(WorldError, match="law"):
        build_random_world(WorldConfig(law="pareto", **base))


def test_random_world_is_deterministic():
    cfg = WorldConfig(n_messages=5, n_slots=3, symbols_per_slot=3, seed=9)
    a, b = build_random_world(cfg), build_random_world(cfg)
    assert a == b


def test_config_limits():
    with pytest.raises(WorldError, match="cannot fit"):
        build_random_world(WorldConfig(n_messages=100, n_slots=2, symbols_per_slot=2))
    with pytest.raises(WorldError, match="exceeds"):
        build_random_world(WorldConfig(n_messages=2, n_slots=30, symbols_per_slot=4))
    with pytest.raises(WorldError, match=">= 2"):
        build_random_world(WorldConfig(n_messages=2, n_slots=2, symbols_per_slot=1))


@settings(max_examples=25, deadline=None)
@given(n_slots=st.integers(1, 4), symbols=st.integers(2, 4),
       n_messages=st.integers(1, 6), seed=st.integers(0, 99))
def test_grid_is_regular(n_slots, symbols, n_messages, seed):
    n_nodes = symbols ** n_slots
    if n_messages > n_nodes:
        n_messages = n_nodes
    w = build_random_world(WorldConfig(n_messages=n_messages, n_slots=n_slots,
                                       symbols_per_slot=symbols, seed=seed))
    assert len(w.graph.nodes) == n_nodes
    expected_degree = sum(len(s) - 1 for s in w.slots)
    assert all(len(row) == expected_degree for row in w.graph.neighbor_indices)
    # undirected: neighbor relation is symmetric
    for i, row in enumerate(w.graph.neighbor_indices):
        assert all(i in w.graph.neighbor_indices[j] for j in row)


def test_json_roundtrip(cube):
    text = world_to_json(cube)
    back = world_from_json(text)
    assert back == cube
    assert back.realization == cube.realization


def test_json_roundtrip_random():
    w = build_random_world(WorldConfig(n_messages=7, n_slots=4, symbols_per_slot=3,
                                       law="lognormal", law_param=1.0, seed=2))
    assert world_from_json(world_to_json(w)) == w


def test_json_tamper_detection(cube):
    import json as _json

    doc = _json.loads(world_to_json(cube))
    doc["realizations"]["m1"] = ["A", "moon", "emerges"]  # contradicts coords
    with pytest.raises(WorldError, match="disagrees"):
        world_from_json(_json.dumps(doc))
    with pytest.raises(WorldError, match="unparseable"):
        world_from_json("{nope")
    del doc["epsilon"]
    with pytest.raises(WorldError, match="missing"):
        world_from_json(_json.dumps(doc))
