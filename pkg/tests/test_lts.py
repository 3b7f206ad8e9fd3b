import json
from pathlib import Path

import pytest

from oracles import naive_bisimulation
from wirecalc import stdlib
from wirecalc.lts import SchemaError, explore, export_dot, export_json, import_json
from wirecalc.parser import parse_term
from wirecalc.sorting import Sort
from wirecalc.sos import Label
from wirecalc.syntax import Seq, Ten

GOLDEN = Path(__file__).parent / "golden"
EMPTY = Label((), ())


def test_ring_has_three_silent_states():
    lts = explore(stdlib.RING, 100)
    assert lts.complete and len(lts.states) == 3
    assert lts.transitions == {(i, EMPTY, j) for i in range(3) for j in range(3)}


def test_zero_is_one_idle_state():
    lts = explore(stdlib.ZERO, 10)
    assert len(lts.states) == 1
    assert lts.transitions == {(0, EMPTY, 0)}


def test_flipflop_graph():
    lts = explore(stdlib.F0, 10)
    assert len(lts.states) == 2
    # stay, flip and idle in each state
    assert len(lts.transitions) == 6
    assert {str(lab) for _, lab, _ in lts.transitions} == {"0/0", "1/0", "1/1", "0/1", "_/_"}


def test_states_are_numbered_breadth_first():
    lts = explore(Ten(stdlib.F0, stdlib.F1), 100)
    assert lts.initial == 0
    depth = {0: 0}
    frontier = [0]
    succ = lts.successors()
    while frontier:
        nxt = []
        for s in frontier:
            for _, t in sorted(succ[s], key=lambda p: p[1]):
                if t not in depth:
                    depth[t] = depth[s] + 1
                    nxt.append(t)
        frontier = nxt
    assert [depth[s] for s in range(len(lts.states))] == sorted(depth.values())


@pytest.mark.parametrize("name, term", [("zero", stdlib.ZERO), ("identity", stdlib.I), ("ring", stdlib.RING)])
def test_golden_exports(name, term):
    lts = explore(term)
    assert export_dot(lts) == (GOLDEN / f"{name}.dot").read_text()
    assert export_json(lts) == (GOLDEN / f"{name}.json").read_text()


def test_alpha_variants_export_identically():
    a = parse_term(r"rec Y : (1,1) . (<0 / 0> . Y + <1 / 0> . rec Z : (1,1) . (<1 / 1> . Z + <0 / 1> . Y))")
    b = parse_term(r"rec P : (1,1) . (<0 / 0> . P + <1 / 0> . rec Q : (1,1) . (<1 / 1> . Q + <0 / 1> . P))")
    assert export_json(explore(a)) == export_json(explore(b))
    assert export_dot(explore(a)) == export_dot(explore(b))


@pytest.mark.parametrize("term", [stdlib.ZERO, stdlib.F0, stdlib.RING, Seq(stdlib.X, stdlib.X)])
def test_json_round_trip(term):
    lts = explore(term)
    back = import_json(export_json(lts))
    assert back.sort == lts.sort and back.initial == lts.initial
    assert back.transitions == lts.transitions
    assert [s.key for s in back.states] == [s.key for s in lts.states]
    assert export_json(back) == export_json(lts)


def test_import_checks_indices():
    doc = json.loads(export_json(explore(stdlib.F0)))
    doc["transitions"].append([0, "0", "0", 7])
    with pytest.raises(SchemaError, match="7"):
        import_json(json.dumps(doc))


def test_import_checks_label_shape():
    doc = json.loads(export_json(explore(stdlib.F0)))
    doc["transitions"].append([0, "0 0", "0", 0])
    with pytest.raises(SchemaError):
        import_json(json.dumps(doc))


def test_import_rejects_garbage():
    with pytest.raises(SchemaError):
        import_json("[1, 2]")
    with pytest.raises(SchemaError):
        import_json("{")


def test_directed_export_carries_markers():
    lts = explore(stdlib.I_L, directed=True)
    assert lts.sort == Sort.words("L", "L")
    doc = json.loads(export_json(lts))
    assert doc["sort"]["directed"] is True
    assert sorted(t[1] for t in doc["transitions"]) == ["<0", "<1", "<_"]
    assert import_json(export_json(lts)).transitions == lts.transitions


def test_budget_gives_a_partial_graph():
    big = Ten(Ten(stdlib.F0, stdlib.F0), Ten(stdlib.F0, stdlib.F0))
    lts = explore(big, 5)
    assert not lts.complete
    assert len(lts.states) <= 5
    assert any("budget" in w for w in lts.warnings)
    # every recorded edge stays within the discovered states
    assert all(s < len(lts.states) and t < len(lts.states) for s, _, t in lts.transitions)


def test_four_flipflops_in_parallel():
    big = Ten(Ten(stdlib.F0, stdlib.F0), Ten(stdlib.F0, stdlib.F0))
    lts = explore(big)
    assert len(lts.states) == 16
    assert len(lts.transitions) == 16 * 3 ** 4


def test_explored_graph_is_bisimilar_to_its_reimport():
    lts = explore(stdlib.RING)
    back = import_json(export_json(lts))
    rel = naive_bisimulation(lts, back)
    assert (lts.initial, back.initial) in rel
