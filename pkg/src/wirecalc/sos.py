"""Structural operational semantics: transitions of closed, sorted terms.

The rules Cut, Ten, Pref, Rec, +iota, +L and +R form one inductive system
together with Refl, iota-L and iota-R; a premise of any rule ranges over the
full derivable relation.  The relation is computed per state as a least
fixpoint with a demand-driven solver, so unguarded recursion such as
``rec Y.Y`` gets exactly the transitions that have finite derivations.

A *state* is the canonical key of a term in head-unfolded normal form:
every prefix-guarded ``rec`` in a non-prefix position is replaced by its
unfolding.  A guarded recursion and its unfolding are bisimilar and the
operators are congruences, so this identification changes no behaviour up to
bisimilarity; without it a wire constant such as ``I`` would have two states
(``I`` and its unfolding) instead of one.
"""

from __future__ import annotations

import itertools
import sys
import threading
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, NamedTuple

from .directed import direction
from .sorting import Sort, elaborate, overline, prefix_sort
from .syntax import (
    IOTA,
    Alphabet,
    CanonicalTerm,
    Choice,
    Prefix,
    ProcVar,
    Rec,
    Seq,
    Ten,
    Term,
    WireError,
    canonicalize,
    subst_signals,
    unfold,
)

DEFAULT_BUDGET = 10000
MAX_DEPTH = 500

# The solver recurses along term structure; deep compositions need headroom.
if sys.getrecursionlimit() < 20000:
    sys.setrecursionlimit(20000)

_EMPTY: frozenset = frozenset()


class BudgetExceeded(WireError):
    def __init__(self, budget: int):
        self.budget = budget
        super().__init__(f"state budget of {budget} exceeded")


class DepthExceeded(BudgetExceeded):
    def __init__(self, depth: int):
        self.budget = depth
        WireError.__init__(self, f"derivation depth limit of {depth} exceeded")


class Label(NamedTuple):
    upper: tuple
    lower: tuple

    def __str__(self):
        return format_label(self)


class Transition(NamedTuple):
    source: CanonicalTerm
    label: Label
    target: CanonicalTerm


def format_word(word) -> str:
    """Render a label word; ``_`` is iota, directed atoms get ``<``/``>``."""
    parts = []
    for value, d in word:
        if d == "L":
            parts.append("<" + value)
        elif d == "R":
            parts.append(value + ">")
        else:
            parts.append(value)
    return " ".join(parts)


def format_label(label) -> str:
    return f"{format_word(label[0])}/{format_word(label[1])}"


def parse_word(text: str) -> tuple:
    out = []
    for part in text.split():
        if part.startswith("<"):
            out.append((part[1:], "L"))
        elif part.endswith(">"):
            out.append((part[:-1], "R"))
        else:
            out.append((part, ""))
    return tuple(out)


def is_silent(label) -> bool:
    return all(a[0] == IOTA for a in label[0]) and all(a[0] == IOTA for a in label[1])


def silent_label(sort: Sort) -> Label:
    if sort.directed:
        return Label(tuple((IOTA, d) for d in sort.left), tuple((IOTA, d) for d in sort.right))
    return Label(((IOTA, ""),) * sort.k, ((IOTA, ""),) * sort.l)


def _unguarded(t: Term) -> frozenset[str]:
    match t:
        case ProcVar(name):
            return frozenset((name,))
        case Seq(a, b) | Ten(a, b) | Choice(a, b):
            return _unguarded(a) | _unguarded(b)
        case Prefix():
            return _EMPTY
        case Rec(name, _, body):
            return _unguarded(body) - {name}
    raise TypeError(f"not a term: {t!r}")


def is_guarded(t: Rec) -> bool:
    """True when every free occurrence of the recursion variable sits under a prefix."""
    return t.name not in _unguarded(t.body)


def normalize(t: Term) -> Term:
    """Head-unfold guarded recursion everywhere outside prefixes."""
    match t:
        case Rec():
            if t.fpv or not is_guarded(t):
                return t
            return normalize(unfold(t))
        case Seq(a, b):
            na, nb = normalize(a), normalize(b)
            return t if (na is a and nb is b) else Seq(na, nb)
        case Ten(a, b):
            na, nb = normalize(a), normalize(b)
            return t if (na is a and nb is b) else Ten(na, nb)
        case Choice(a, b):
            na, nb = normalize(a), normalize(b)
            return t if (na is a and nb is b) else Choice(na, nb)
    return t


@dataclass(frozen=True)
class _Node:
    kind: str
    term: Term
    sort: Sort


class Engine:
    """Memoizing derivation engine for one alphabet and dialect.

    Moves are ``(label, target_key)`` pairs with plain-tuple labels.  Public
    methods are serialized by a lock, so one engine may be shared between
    threads.
    """

    def __init__(self, alphabet: Alphabet | Iterable[str], directed: bool = False,
                 budget: int = DEFAULT_BUDGET):
        if budget < 1:
            raise ValueError("budget must be positive")
        self.alphabet = alphabet if isinstance(alphabet, Alphabet) else Alphabet(tuple(alphabet))
        self.directed = directed
        self.budget = budget
        self._nodes: dict[str, _Node] = {}
        self._value: dict[tuple, frozenset] = {}
        self._stable: set[tuple] = set()
        self._infl: dict[tuple, set] = defaultdict(set)
        self._lock = threading.RLock()
        self._depth = 0
        self.max_depth_seen = 0

    # states

    def state(self, t: Term | CanonicalTerm) -> str:
        """Check and intern a closed term, returning its state key."""
        if isinstance(t, CanonicalTerm):
            t = t.term
        with self._lock:
            elab, _ = elaborate(t, None, self.directed)
            return self._intern(normalize(elab))

    def term(self, key: str) -> Term:
        return self._nodes[key].term

    def sort(self, key: str) -> Sort:
        return self._nodes[key].sort

    def canonical(self, key: str) -> CanonicalTerm:
        return CanonicalTerm(key, self._nodes[key].term)

    def __len__(self):
        return len(self._nodes)

    def _intern(self, t: Term) -> str:
        k = t.key
        if k not in self._nodes:
            if len(self._nodes) >= self.budget:
                raise BudgetExceeded(self.budget)
            self._nodes[k] = _Node(type(t).__name__, t, self._sort_of(t))
        return k

    def _sort_of(self, t: Term) -> Sort:
        match t:
            case Prefix():
                return prefix_sort(t, self.directed)
            case Rec(_, sort, _):
                return sort
            case Seq(a, b):
                return Sort(self._sort_of(a).left, self._sort_of(b).right, self.directed)
            case Ten(a, b):
                return self._sort_of(a).tensor(self._sort_of(b))
            case Choice(a, _):
                return self._sort_of(a)
        raise WireError(f"not a closed term: {t}")

    # public queries

    def base(self, key: str) -> frozenset:
        return self._ask(("b", key))

    def moves(self, key: str) -> frozenset:
        """Saturated moves of a state."""
        return self._ask(("s", key))

    def _ask(self, x) -> frozenset:
        with self._lock:
            try:
                self._depth = 0
                self._solve(x)
            except BudgetExceeded:
                self._value.clear()
                self._stable.clear()
                self._infl.clear()
                raise
            return self._value.get(x, _EMPTY)

    # demand-driven least-fixpoint solver over unknowns ("b"|"s", key)

    def _solve(self, x):
        if x in self._stable:
            return
        self._stable.add(x)
        # each level costs several Python frames; stop well before the C stack does
        self._depth += 1
        if self._depth > MAX_DEPTH:
            raise DepthExceeded(MAX_DEPTH)
        self.max_depth_seen = max(self.max_depth_seen, self._depth)
        try:
            if x[0] == "b":
                new = self._base_rhs(x)
            else:
                new = self._sat_rhs(x)
        finally:
            self._depth -= 1
        old = self._value.get(x, _EMPTY)
        if not new <= old:
            self._value[x] = old | new
            work = self._infl.pop(x, ())
            self._stable.difference_update(work)
            for z in work:
                self._solve(z)

    def _query(self, x, y) -> frozenset:
        self._solve(y)
        self._infl[y].add(x)
        return self._value.get(y, _EMPTY)

    def _sat_rhs(self, x) -> frozenset:
        key = x[1]
        reach_memo: dict[str, set] = {}

        def reach(k: str) -> set:
            if k in reach_memo:
                return reach_memo[k]
            seen = {k}
            todo = [k]
            while todo:
                cur = todo.pop()
                for lab, tgt in self._query(x, ("b", cur)):
                    if tgt not in seen and is_silent(lab):
                        seen.add(tgt)
                        todo.append(tgt)
            reach_memo[k] = seen
            return seen

        silent = silent_label(self._nodes[key].sort)
        start = reach(key)
        out = {(silent, k) for k in start}
        for k in start:
            for lab, tgt in self._query(x, ("b", k)):
                for t2 in reach(tgt):
                    out.add((lab, t2))
        return frozenset(out)

    def _base_rhs(self, x) -> frozenset:
        key = x[1]
        t = self._nodes[key].term
        match t:
            case Prefix():
                return self._prefix_moves(t)
            case Seq(a, b):
                left = self._query(x, ("s", self._intern(a)))
                right = self._query(x, ("s", self._intern(b)))
                by_upper = defaultdict(list)
                for (up, lo), tgt in right:
                    by_upper[up].append((lo, tgt))
                out = set()
                for (up, mid), q in left:
                    for lo, s in by_upper.get(mid, ()):
                        out.add(((up, lo), self._join(Seq, q, s, ";")))
                return frozenset(out)
            case Ten(a, b):
                left = self._query(x, ("s", self._intern(a)))
                right = self._query(x, ("s", self._intern(b)))
                out = set()
                for (u1, l1), q in left:
                    for (u2, l2), s in right:
                        out.add(((u1 + u2, l1 + l2), self._join(Ten, q, s, "*")))
                return frozenset(out)
            case Choice(a, b):
                left = self._query(x, ("s", self._intern(a)))
                right = self._query(x, ("s", self._intern(b)))
                out = set()
                lq = [q for lab, q in left if is_silent(lab)]
                rq = [s for lab, s in right if is_silent(lab)]
                if lq and rq:
                    silent = silent_label(self._nodes[key].sort)
                    for q in lq:
                        for s in rq:
                            out.add((silent, self._join(Choice, q, s, "+")))
                out.update(m for m in left if not is_silent(m[0]))
                out.update(m for m in right if not is_silent(m[0]))
                return frozenset(out)
            case Rec():
                return self._query(x, ("s", self._intern(normalize(unfold(t)))))
        return _EMPTY

    def _join(self, ctor, qk: str, sk: str, op: str) -> str:
        k = f"({qk}{op}{sk})"
        if k not in self._nodes:
            k2 = self._intern(ctor(self._nodes[qk].term, self._nodes[sk].term))
            assert k2 == k, (k2, k)
        return k

    def _prefix_moves(self, t: Prefix) -> frozenset:
        names = t.bound
        out = set()
        constant_body = not (t.body.fsv & set(names))
        fixed = self._intern(normalize(t.body)) if constant_body else None
        for values in itertools.product(self.alphabet.values, repeat=len(names)):
            sigma = dict(zip(names, values))
            label = self._fire_label(t, sigma)
            if constant_body:
                tgt = fixed
            else:
                tgt = self._intern(normalize(subst_signals(t.body, sigma)))
            out.add((label, tgt))
        return frozenset(out)

    def _fire_label(self, t: Prefix, sigma) -> tuple:
        def value(a) -> str:
            match a.kind:
                case "bind":
                    return sigma[a.name]
                case "sig":
                    return a.name
                case "iota":
                    return IOTA
            raise WireError(f"free signal variable {a.name} in a closed prefix")

        if self.directed:
            upper = tuple((value(a), overline(direction(a))) for a in t.upper)
            lower = tuple((value(a), direction(a)) for a in t.lower)
        else:
            upper = tuple((value(a), "") for a in t.upper)
            lower = tuple((value(a), "") for a in t.lower)
        return (upper, lower)


# Module-level operations on terms.

def _engine_for(engine, alphabet, directed, budget) -> Engine:
    if engine is not None:
        return engine
    if alphabet is None:
        raise ValueError("an alphabet or an engine is required")
    return Engine(alphabet, directed, budget)


def _transitions(engine: Engine, key: str, moves) -> set[Transition]:
    src = engine.canonical(key)
    return {Transition(src, Label(*lab), engine.canonical(tgt)) for lab, tgt in moves}


def base_transitions(t: Term | CanonicalTerm, alphabet=None, directed: bool = False,
                     budget: int = DEFAULT_BUDGET, engine: Engine | None = None) -> set[Transition]:
    """Transitions of ``t`` derived without a final Refl/iota-L/iota-R step at ``t`` itself."""
    eng = _engine_for(engine, alphabet, directed, budget)
    key = eng.state(t)
    return _transitions(eng, key, eng.base(key))


def saturated_transitions(t: Term | CanonicalTerm, alphabet=None, directed: bool = False,
                          budget: int = DEFAULT_BUDGET, engine: Engine | None = None) -> set[Transition]:
    eng = _engine_for(engine, alphabet, directed, budget)
    key = eng.state(t)
    return _transitions(eng, key, eng.moves(key))


def fire(t: Term | CanonicalTerm, label, alphabet=None, directed: bool = False,
         budget: int = DEFAULT_BUDGET, engine: Engine | None = None) -> set[CanonicalTerm]:
    """All targets of saturated transitions of ``t`` with the given label."""
    eng = _engine_for(engine, alphabet, directed, budget)
    key = eng.state(t)
    label = (tuple(label[0]), tuple(label[1]))
    sort = eng.sort(key)
    shape = silent_label(sort)
    if len(label[0]) != len(shape[0]) or len(label[1]) != len(shape[1]):
        raise WireError(f"label {format_label(label)} does not fit sort {sort}")
    if sort.directed and (tuple(d for _, d in label[0]) != tuple(sort.left)
                          or tuple(d for _, d in label[1]) != tuple(sort.right)):
        raise WireError(f"label {format_label(label)} does not fit sort {sort}")
    return {eng.canonical(tgt) for lab, tgt in eng.moves(key) if lab == label}


def state_of(t: Term) -> CanonicalTerm:
    """The canonical state a closed, annotated term denotes."""
    return canonicalize(normalize(t))
