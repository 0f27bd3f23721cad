from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tomei.roots import parse_diagram
from tomei.signs import (
    InvalidMarking,
    MarkedDynkinDiagram,
    act_generator,
    act_word,
    all_sign_vectors,
    classification_table,
    classify_parity_matrices,
    enumerate_markings,
    parse_marking,
    standard_marking,
    trivial_marking,
    twisted_actions,
    validate_marking,
    verify_relations,
)

from conftest import group

P, M = 1, -1


def induced(delta):
    l = delta.rank
    return frozenset(
        (i, eps, act_generator(delta, i, eps)) for i in range(l) for eps in all_sign_vectors(l)
    )


def brute_maps(cls):
    """Generator maps of each action found by the parity-matrix oracle."""
    out = set()
    l = cls.diagram.rank
    for flips in cls.actions:
        maps = []
        for i in range(l):
            for eps in all_sign_vectors(l):
                img = tuple(-e if (eps[i] == -1 and k in flips[i]) else e for k, e in enumerate(eps))
                maps.append((i, eps, img))
        out.add(frozenset(maps))
    return out


def test_validate_examples():
    a2 = parse_diagram("A2")
    m = validate_marking(a2, [(M, M)])
    assert m.standard and not m.positively_marked
    with pytest.raises(InvalidMarking) as exc:
        validate_marking(parse_diagram("B2"), [(M, M)])
    assert exc.value.edge == (0, 1)
    assert validate_marking(parse_diagram("G2"), [(M, P)]).flip_sets == (frozenset({1}), frozenset())
    with pytest.raises(InvalidMarking):
        validate_marking(a2, [(M, P)])


def test_act_generator_examples():
    a2 = standard_marking(parse_diagram("A2"))
    assert act_generator(a2, 0, (M, M)) == (M, P)
    assert act_generator(a2, 0, (P, M)) == (P, M)
    b2 = validate_marking(parse_diagram("B2"), [(M, P)])
    chain = [(M, M)]
    for i in (0, 1, 0, 1):
        chain.append(act_generator(b2, i, chain[-1]))
    assert chain == [(M, M), (M, P), (M, P), (M, M), (M, M)]
    t = trivial_marking(parse_diagram("B3"))
    assert all(act_generator(t, i, e) == e for i in range(3) for e in all_sign_vectors(3))


def test_zeros_stay_zero():
    a3 = standard_marking(parse_diagram("A3"))
    assert act_generator(a3, 1, (0, M, P)) == (0, M, M)


def test_act_word_examples():
    d = standard_marking(parse_diagram("A2"))
    W = group("A2")
    # the word (2, 1) is s2 s1: s1 acts first
    assert act_word(d, (1, 0), (M, M)) == (M, P)
    assert act_word(d, W.element(0), (M, P)) == (M, P)
    assert act_word(d, (1, 1), (M, M)) == (M, M)


def test_verify_relations_examples():
    assert verify_relations(standard_marking(parse_diagram("A2")))
    assert verify_relations(validate_marking(parse_diagram("B2"), [(M, P)]))
    # bypass validation: B2 with both signs negative
    bad = MarkedDynkinDiagram(parse_diagram("B2"), ((M, M),))
    rep = verify_relations(bad)
    assert not rep and rep.witness is not None


@pytest.mark.parametrize(
    "label,count", [("A1", 1), ("A2", 2), ("B2", 3), ("C2", 3), ("G2", 4), ("A3", 4), ("B3", 6), ("C3", 6), ("D4", 8), ("A1xA2", 2)]
)
def test_enumerate_counts(label, count):
    assert len(enumerate_markings(parse_diagram(label))) == count


@pytest.mark.parametrize("label", ["A2", "B2", "C2", "G2"])
def test_oracle_agrees_rank_two_simple(label):
    d = parse_diagram(label)
    cls = classify_parity_matrices(d)
    assert brute_maps(cls) == {induced(m) for m in enumerate_markings(d)}
    assert cls.edge_supported()


def test_oracle_a1xa1_has_non_edge_actions():
    # s1 negates eps2 when eps1 = -1 and s2 is trivial: both involutions,
    # and s1 s2 = s1 so (s1 s2)^2 = 1 holds although the pair is not joined
    d = parse_diagram("A1xA1")
    cls = classify_parity_matrices(d)
    assert cls.count == 3
    assert not cls.edge_supported()
    assert len(enumerate_markings(d)) == 1


def test_a3_mixed_markings_are_not_actions():
    d = parse_diagram("A3")
    acts = twisted_actions(d)
    assert [m.to_text() for m in acts] == ["e1=+;e2=+", "e1=-;e2=-"]
    mixed = parse_marking(d, "e1=+;e2=-")
    rep = verify_relations(mixed)
    assert not rep
    # s1 acts trivially and s2 does not, so (s1 s2)^3 acts as s2
    eps = (P, M, P)
    x = eps
    for _ in range(3):
        x = act_generator(mixed, 0, act_generator(mixed, 1, x))
    assert x == (P, M, M)
    assert classify_parity_matrices(d).count == 2


def test_b3_and_d4_action_counts():
    assert len(twisted_actions(parse_diagram("B3"))) == 5
    assert len(twisted_actions(parse_diagram("D4"))) == 2


def test_standard_matches_cartan_action():
    for label in ["A3", "B3", "C3", "G2", "D4"]:
        d = parse_diagram(label)
        s = standard_marking(d)
        C = d.cartan
        for i in range(d.rank):
            for eps in all_sign_vectors(d.rank):
                want = tuple(e * eps[i] ** (int(-C[j, i]) % 2) if j != i else e for j, e in enumerate(eps))
                assert act_generator(s, i, eps) == want


@pytest.mark.parametrize("label", ["A2", "B2", "G2", "A3", "B3", "A1xA2"])
def test_action_properties(label):
    d = parse_diagram(label)
    W = group(label)
    vectors = all_sign_vectors(d.rank)
    for m in twisted_actions(d):
        for i in range(d.rank):
            for e in vectors:
                assert act_generator(m, i, act_generator(m, i, e)) == e
        for k in range(W.order):
            image = [act_word(m, W.words[k], e) for e in vectors]
            assert len(set(image)) == len(vectors)
            for u, v in product(vectors[:4], vectors):
                uv = tuple(a * b for a, b in zip(u, v))
                lhs = act_word(m, W.words[k], uv)
                rhs = tuple(a * b for a, b in zip(act_word(m, W.words[k], u), act_word(m, W.words[k], v)))
                assert lhs == rhs


def _reduced_words(W, k):
    """All reduced words of element k (small groups only)."""
    if k == 0:
        return [()]
    out = []
    for i in range(W.rank):
        j = W.right[i][k]
        if W.lengths[j] < W.lengths[k]:
            out.extend(w + (i,) for w in _reduced_words(W, j))
    return out


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 47), st.integers(0, 4), st.tuples(*[st.sampled_from([1, -1])] * 3))
def test_act_word_independent_of_reduced_word(k, which, eps):
    d = parse_diagram("B3")
    acts = twisted_actions(d)
    m = acts[which % len(acts)]
    W = group("B3")
    results = {act_word(m, w, eps) for w in _reduced_words(W, k)}
    assert len(results) == 1


def test_parse_marking_grammar():
    d = parse_diagram("B3")
    assert parse_marking(d, "e1=-;e2=+-").edge_signs == ((M, M), (P, M))
    assert parse_marking(d, "[-,+-]").edge_signs == ((M, M), (P, M))
    assert parse_marking(d, "standard") == standard_marking(d)
    assert parse_marking(d, None) == trivial_marking(d)
    for bad in ["e1=-", "e1=-;e2=--", "e3=+", "x", "e1=+;e2=+"]:
        with pytest.raises(InvalidMarking):
            parse_marking(d, bad)


def test_roundtrip_text():
    for label in ["A3", "B3", "G2", "D4"]:
        d = parse_diagram(label)
        for m in enumerate_markings(d):
            assert parse_marking(d, m.to_text()) == m


def test_classification_table():
    t = classification_table(parse_diagram("A3"))
    assert t["count"] == 4 and t["action_count"] == 2
    assert [r["is_action"] for r in t["markings"]] == [True, False, False, True]
