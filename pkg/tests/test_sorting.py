import pytest

from wirecalc import stdlib
from wirecalc.parser import parse_term
from wirecalc.sorting import Sort, SortError, elaborate, infer
from wirecalc.syntax import Rec, Seq, Ten


def arity(k, l):
    return Sort.arity(k, l)


@pytest.mark.parametrize("term, sort", [
    (stdlib.I, arity(1, 1)),
    (stdlib.X, arity(2, 2)),
    (stdlib.D, arity(0, 2)),
    (stdlib.E, arity(2, 0)),
    (stdlib.F0, arity(1, 1)),
    (stdlib.RING, arity(0, 0)),
    (stdlib.identity(3), arity(3, 3)),
    (stdlib.twist(2, 1), arity(3, 3)),
    (stdlib.twist(0, 2), arity(2, 2)),
    (stdlib.dual_unit(3), arity(0, 6)),
    (stdlib.dual_counit(3), arity(6, 0)),
    (stdlib.ev(2, 1), arity(5, 1)),
    (stdlib.zero((2, 0)), arity(2, 0)),
])
def test_catalogue_sorts(term, sort):
    assert infer(term) == sort


def test_cur_sort():
    # P : (k+l, m) gives Cur(P) : (k, m+l)
    p = stdlib.zero((3, 2))
    assert infer(stdlib.cur(p, 1, 2)) == arity(1, 4)


@pytest.mark.parametrize("word, unit, counit", [
    ("L", "LR", "RL"), ("R", "RL", "LR"), ("LR", "LRLR", "LRLR"), ("RRL", "RRLRLL", "RLLRRL"),
])
def test_directed_dual_sorts(word, unit, counit):
    # d_w : (e, w.rev(overline w)) and e_w : (rev(overline w).w, e)
    assert infer(stdlib.dual_unit(word), directed=True) == Sort.words("", unit)
    assert infer(stdlib.dual_counit(word), directed=True) == Sort.words(counit, "")


def test_directed_catalogue():
    assert infer(stdlib.I_L, directed=True) == Sort.words("L", "L")
    assert infer(stdlib.I_R, directed=True) == Sort.words("R", "R")
    assert infer(stdlib.D_L, directed=True) == Sort.words("", "LR")
    assert infer(stdlib.E_L, directed=True) == Sort.words("RL", "")
    assert infer(stdlib.flipflop(0, True), directed=True) == Sort.words("R", "R")


def test_composition_needs_matching_boundaries():
    with pytest.raises(SortError, match=r"expected \(1,1\), found \(2,2\)|expected \(2,2\), found \(1,1\)|sort error"):
        infer(Seq(stdlib.I, stdlib.X))


def test_directed_composition_checks_directions():
    with pytest.raises(SortError):
        infer(Seq(stdlib.I_L, stdlib.I_R), directed=True)
    assert infer(Ten(stdlib.I_L, stdlib.I_R), directed=True) == Sort.words("LR", "LR")


def test_prefix_body_must_match_prefix_sort():
    with pytest.raises(SortError):
        infer(parse_term(r"<\x / \x> . rec Y : (2,2) . Y"))


def test_bound_and_free_must_be_disjoint():
    with pytest.raises(SortError):
        infer(parse_term(r"<\x / x> . rec Y : (1,1) . Y"))


def test_free_signal_variable_rejected():
    with pytest.raises(SortError):
        infer(parse_term(r"<x / 0> . rec Y : (1,1) . Y"))


def test_choice_branches_share_a_sort():
    with pytest.raises(SortError):
        infer(parse_term("I + X"))


def test_recursion_variable_sort_is_inferred():
    t = parse_term(r"rec Y . (<0 / 0> . Y + <1 / 1> . Y)")
    filled, sort = elaborate(t)
    assert sort == arity(1, 1)
    assert isinstance(filled, Rec) and filled.sort == arity(1, 1)


def test_unguarded_recursion_needs_annotation():
    with pytest.raises(SortError, match="annotate"):
        infer(parse_term("rec Y . Y"))
    assert infer(parse_term("rec Y : (2,1) . Y")) == arity(2, 1)


def test_annotation_mismatch():
    with pytest.raises(SortError):
        infer(parse_term(r"rec Y : (1,2) . <\x / \x> . Y"))


def test_sort_star_and_tensor():
    s = Sort.words("LR", "RRL")
    assert s.star() == Sort.words("RLL", "LR")
    assert s.star().star() == s
    assert arity(1, 2).tensor(arity(3, 0)) == arity(4, 2)
    assert str(Sort.words("", "LR")) == "(e,LR)"
