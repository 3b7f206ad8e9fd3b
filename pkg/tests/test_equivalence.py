import json

import pytest
from hypothesis import given, settings, strategies as st

from oracles import naive_bisimulation, naive_partition
from wirecalc import stdlib
from wirecalc.equivalence import (
    IncompleteLts,
    Partition,
    SortMismatch,
    _refine_rounds,
    bisimilar,
    check_witness,
    compare,
    refine,
    replay_counterexample,
    weak_closure,
    weak_equals_strong_check,
)
from wirecalc.lts import explore, export_json, import_json
from wirecalc.parser import parse_term
from wirecalc.sos import BudgetExceeded
from wirecalc.syntax import Seq, Ten, star


def _lts(transitions, n, sort=(0, 0)):
    doc = {
        "sort": {"left": sort[0], "right": sort[1], "directed": False},
        "alphabet": ["0", "1"],
        "states": [f"s{i}" for i in range(n)],
        "initial": 0,
        "transitions": transitions,
        "complete": True,
    }
    return import_json(json.dumps(doc))


def test_refine_splits_by_future():
    # 0 -> 1 -> 2 loops on 0/0 only at the end; 3 mirrors 0 through 4
    lts = _lts([[0, "_", "_", 1], [1, "0", "0", 2], [2, "0", "0", 2],
                [3, "_", "_", 4], [4, "1", "1", 2]], 5, (1, 1))
    part = refine(lts)
    assert set(part.blocks) == naive_partition(lts)
    assert not part.same(0, 3)
    # 1 and 2 both loop on 0/0 into 2
    assert part.same(1, 2) and len(part) == 4


def test_refine_merges_equal_cycles():
    lts = _lts([[0, "", "", 1], [1, "", "", 0], [2, "", "", 2], [3, "", "", 0]], 4)
    part = refine(lts)
    assert part.blocks == (frozenset({0, 1, 2, 3}),)


def test_refine_rejects_partial_graphs():
    big = Ten(Ten(stdlib.F0, stdlib.F0), Ten(stdlib.F0, stdlib.F0))
    with pytest.raises(IncompleteLts):
        refine(explore(big, 3))


@pytest.mark.parametrize("term", [
    stdlib.RING,
    Ten(stdlib.F0, stdlib.F1),
    Seq(stdlib.F0, stdlib.F1),
    Seq(Seq(stdlib.F0, stdlib.F0), stdlib.F1),
    parse_term(r"rec Y : (1,1) . (<0 / 0> . Y + <1 / 1> . rec Z : (1,1) . (<1 / 1> . Y + <0 / 0> . Z))"),
])
def test_refine_matches_the_naive_fixpoint(term):
    lts = explore(term)
    assert set(refine(lts).blocks) == naive_partition(lts)


def test_ring_is_bisimilar_to_zero():
    v = bisimilar(stdlib.RING, stdlib.ZERO)
    assert v.bisimilar
    assert v.witness == {(0, 0), (1, 0), (2, 0)}
    assert check_witness(v)


def test_flipflops_differ_on_their_first_observation():
    v = bisimilar(stdlib.F0, stdlib.F1)
    assert not v.bisimilar
    (step,) = v.counterexample
    assert str(step.label) == "0/0" and step.direction == "left"
    assert step.pair == (-1, -1)
    assert replay_counterexample(v)
    doc = json.loads(v.to_json())
    assert doc == {"bisimilar": False,
                   "counterexample": [{"label": "0/0", "direction": "left", "pair": [-1, -1]}]}


def test_longer_counterexample():
    # both accept 0/0 then differ on what follows
    a = parse_term(r"<0 / 0> . rec Y : (1,1) . <1 / 1> . Y")
    b = parse_term(r"<0 / 0> . rec Y : (1,1) . <0 / 0> . Y")
    v = bisimilar(a, b)
    assert not v.bisimilar
    assert len(v.counterexample) >= 2
    assert replay_counterexample(v)
    assert v.to_text().startswith("not bisimilar\n  1.")


@pytest.mark.parametrize("left, right", [
    (stdlib.I, Seq(stdlib.I, stdlib.I)),
    (stdlib.X, Seq(Seq(stdlib.X, stdlib.X), stdlib.X)),
    (stdlib.I, Seq(Ten(stdlib.I, stdlib.D), Ten(stdlib.E, stdlib.I))),
    (stdlib.F0, Seq(stdlib.I, stdlib.F0)),
    (star(stdlib.D), stdlib.E),
    (Seq(stdlib.D, stdlib.E), Seq(Seq(stdlib.D, stdlib.X), stdlib.E)),
])
def test_standard_equations(left, right):
    v = bisimilar(left, right)
    assert v.bisimilar
    assert check_witness(v)


def test_witness_agrees_with_naive_relation():
    v = bisimilar(Seq(stdlib.F0, stdlib.F1), Seq(stdlib.F1, stdlib.F0))
    rel = naive_bisimulation(v.left, v.right)
    assert v.bisimilar == ((v.left.initial, v.right.initial) in rel)
    if v.bisimilar:
        assert v.witness == rel


def test_sort_mismatch():
    with pytest.raises(SortMismatch):
        bisimilar(stdlib.F0, stdlib.RING)
    with pytest.raises(SortMismatch):
        compare(explore(stdlib.I), explore(stdlib.X))


def test_budget_refuses_rather_than_guesses():
    big = Ten(Ten(stdlib.F0, stdlib.F0), Ten(stdlib.F0, stdlib.F0))
    with pytest.raises(BudgetExceeded):
        bisimilar(big, big, budget=4)


@pytest.mark.parametrize("term", [
    stdlib.RING, stdlib.F0, Ten(stdlib.F0, stdlib.F1), Seq(stdlib.D, stdlib.E),
    parse_term(r"<\x / \x> . rec Y : (1,1) . <1 / 1> . Y + <0 / 0> . rec Y : (1,1) . Y"),
])
def test_weak_equals_strong(term):
    assert weak_equals_strong_check(term)


POOL = [stdlib.F0, stdlib.F1, Seq(stdlib.F0, stdlib.F1), Seq(stdlib.F1, stdlib.F0),
        Seq(stdlib.I, stdlib.F0), stdlib.I, Seq(stdlib.F1, stdlib.F1)]


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(POOL), st.sampled_from(POOL), st.sampled_from(POOL))
def test_bisimilarity_is_an_equivalence(a, b, c):
    assert bisimilar(a, a).bisimilar
    ab, bc = bisimilar(a, b).bisimilar, bisimilar(b, c).bisimilar
    assert ab == bisimilar(b, a).bisimilar
    if ab and bc:
        assert bisimilar(a, c).bisimilar


def test_verdicts_are_sound_on_generated_pairs():
    terms = [t for _, t in zip(range(12), stdlib.generate_terms((1, 1), 2, seed=5))]
    for a in terms[:6]:
        for b in terms[6:]:
            v = bisimilar(a, b)
            assert check_witness(v) if v.bisimilar else replay_counterexample(v)


def test_weak_closure_differs_on_unsaturated_graphs():
    # 0 -iota-> 1 -0/0-> 2 without the composite edge: strong splits 0 from 3,
    # which does 0/0 directly, while weak relates them
    lts = _lts([[0, "_", "_", 1], [1, "0", "0", 2], [3, "0", "0", 2]], 4, (1, 1))
    strong = Partition.from_ids(_refine_rounds([sorted(lts.successors()[s]) for s in range(4)])[-1])
    weak = Partition.from_ids(_refine_rounds([sorted(m) for m in weak_closure(lts)])[-1])
    assert not strong.same(0, 3)
    assert weak.same(0, 3)


def _union(a, b):
    # disjoint union as one graph, b's states shifted past a's
    n = len(a.states)
    doc = json.loads(export_json(a))
    other = json.loads(export_json(b))
    doc["states"] += other["states"]
    doc["transitions"] += [[s + n, u, v, t + n] for s, u, v, t in other["transitions"]]
    return import_json(json.dumps(doc))


def test_refine_reference_examples():
    assert len(refine(explore(stdlib.RING))) == 1
    assert len(refine(explore(stdlib.zero((1, 1))))) == 1
    union = _union(explore(stdlib.F0), explore(stdlib.F1))
    part = refine(union)
    assert set(part.blocks) == naive_partition(union)
    # F0 and the F0-like successor of F1 share a block, likewise for F1
    assert len(part) == 2
    assert part.same(0, 3) and part.same(1, 2)


def test_weak_equals_strong_on_open_feedback():
    assert weak_equals_strong_check(Seq(stdlib.D, Ten(stdlib.I, stdlib.F0)))
    assert weak_equals_strong_check(stdlib.zero((2, 2)))
