"""Sort inference for closed terms, undirected and directed.

A sort is a pair of boundary words.  Undirected boundaries use the single
letter ``W`` so that a word is just a wire count; directed boundaries are
words over ``L`` and ``R``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .syntax import (
    BIND,
    FREE,
    INPUT,
    ProcVar,
    Choice,
    Prefix,
    Rec,
    Seq,
    Ten,
    Term,
    WireError,
    bd_fr,
)

WIRE = "W"
LEFT = "L"
RIGHT = "R"


class SortError(WireError):
    def __init__(self, message: str, pos: tuple[int, int] | None = None):
        self.pos = pos
        self.definition = None
        where = f"{pos[0]}:{pos[1]}" if pos else "?:?"
        super().__init__(f"sort error at {where}: {message}")


def overline(word: str) -> str:
    return word.translate(str.maketrans("LR", "RL"))


@dataclass(frozen=True)
class Sort:
    left: str
    right: str
    directed: bool = False

    @classmethod
    def arity(cls, k: int, l: int) -> Sort:
        if k < 0 or l < 0:
            raise ValueError(f"negative arity ({k},{l})")
        return cls(WIRE * k, WIRE * l)

    @classmethod
    def words(cls, left: str, right: str) -> Sort:
        if set(left + right) - {LEFT, RIGHT}:
            raise ValueError(f"direction words must be over L/R: {left!r}, {right!r}")
        return cls(left, right, True)

    @property
    def k(self) -> int:
        return len(self.left)

    @property
    def l(self) -> int:
        return len(self.right)

    def swap(self) -> Sort:
        return Sort(self.right, self.left, self.directed)

    def star(self) -> Sort:
        """Sort of the rotated term: boundaries swap, each word reverses and
        directions switch (a no-op on undirected words)."""
        return Sort(overline(self.right[::-1]), overline(self.left[::-1]), self.directed)

    def tensor(self, other: Sort) -> Sort:
        return Sort(self.left + other.left, self.right + other.right, self.directed)

    def __str__(self):
        if self.directed:
            return f"({self.left or 'e'},{self.right or 'e'})"
        return f"({self.k},{self.l})"


@dataclass
class _Slot:
    sort: Sort | None


@dataclass
class SortContext:
    processVars: dict[str, _Slot] = field(default_factory=dict)
    signalVars: frozenset[str] = frozenset()

    def with_proc(self, name: str, slot: _Slot) -> SortContext:
        return SortContext({**self.processVars, name: slot}, self.signalVars)

    def with_signals(self, names) -> SortContext:
        return SortContext(self.processVars, self.signalVars | frozenset(names))


def prefix_sort(t: Prefix, directed: bool) -> Sort:
    """Boundary sort determined by a prefix's pattern words alone."""
    if not directed:
        for a in t.upper + t.lower:
            if a.dir:
                raise SortError(f"direction marker on {a} in an undirected term", t.pos)
        return Sort.arity(len(t.upper), len(t.lower))
    for a in t.upper + t.lower:
        if not a.dir:
            raise SortError(f"missing direction marker on {a} in a directed term", t.pos)
    du = "".join(LEFT if a.dir == INPUT else RIGHT for a in t.upper)
    dv = "".join(LEFT if a.dir == INPUT else RIGHT for a in t.lower)
    return Sort.words(overline(du), dv)


def _mismatch(expected: Sort, found: Sort, pos) -> SortError:
    return SortError(f"expected {expected}, found {found}", pos)


def infer(t: Term, ctx: SortContext | None = None, directed: bool = False) -> Sort:
    """The unique sort of ``t`` in ``ctx`` (empty by default)."""
    s = _Inference(directed).run(t, ctx or SortContext(), None)
    if s is None:
        raise SortError("cannot determine the sort; annotate the recursion", t.pos)
    return s


def elaborate(t: Term, expected: Sort | None = None, directed: bool = False) -> tuple[Term, Sort]:
    """Infer the sort of closed ``t`` and fill in every missing recursion annotation."""
    inf = _Inference(directed)
    s = inf.run(t, SortContext(), expected)
    if s is None:
        raise SortError("cannot determine the sort; annotate the recursion", t.pos)
    if expected is not None and s != expected:
        raise _mismatch(expected, s, t.pos)
    return inf.fill(t), s


class _Inference:
    def __init__(self, directed: bool):
        self.directed = directed
        self.slots: dict[int, _Slot] = {}

    def run(self, t: Term, ctx: SortContext, expected: Sort | None) -> Sort | None:
        s = self._infer(t, ctx, expected)
        if s is not None and expected is not None and s != expected:
            raise _mismatch(expected, s, t.pos)
        return s

    def _check_mode(self, s: Sort, pos) -> Sort:
        if s.directed != self.directed:
            kind = "directed" if s.directed else "undirected"
            raise SortError(f"{kind} sort {s} in a {'directed' if self.directed else 'undirected'} term", pos)
        return s

    def _infer(self, t: Term, ctx: SortContext, expected: Sort | None) -> Sort | None:
        match t:
            case ProcVar(name):
                slot = ctx.processVars.get(name)
                if slot is None:
                    raise SortError(f"unbound process variable {name}", t.pos)
                if slot.sort is None:
                    slot.sort = expected
                elif expected is not None and slot.sort != expected:
                    raise _mismatch(expected, slot.sort, t.pos)
                return slot.sort

            case Seq(a, b):
                sa = self._require(a, ctx)
                sb = self._require(b, ctx)
                if sa.right != sb.left:
                    raise SortError(
                        f"expected {Sort(sa.right, sb.right, sa.directed)}, found {sb} "
                        f"(boundary mismatch in ';')", b.pos or t.pos)
                return Sort(sa.left, sb.right, sa.directed)

            case Ten(a, b):
                return self._require(a, ctx).tensor(self._require(b, ctx))

            case Prefix(u, v, body):
                s = prefix_sort(t, self.directed)
                if expected is not None and s != expected:
                    raise _mismatch(expected, s, t.pos)
                bound, free = bd_fr(u, v)
                if bound & free:
                    raise SortError(f"variables both bound and free in prefix: {sorted(bound & free)}", t.pos)
                missing = free - ctx.signalVars
                if missing:
                    raise SortError(f"free signal variable not in scope: {', '.join(sorted(missing))}", t.pos)
                sb = self._infer(body, ctx.with_signals(bound), s)
                if sb is not None and sb != s:
                    raise _mismatch(s, sb, body.pos or t.pos)
                return s

            case Choice(a, b):
                sa = self._infer(a, ctx, expected)
                sb = self._infer(b, ctx, expected or sa)
                if sa is None and sb is not None:
                    sa = self._infer(a, ctx, sb)
                if sa is not None and sb is not None and sa != sb:
                    raise SortError(f"expected {sa}, found {sb} (branches of '+')", b.pos or t.pos)
                return sa or sb

            case Rec(name, ann, body):
                if ann is not None:
                    self._check_mode(ann, t.pos)
                    if expected is not None and ann != expected:
                        raise _mismatch(expected, ann, t.pos)
                slot = _Slot(ann or expected)
                self.slots[id(t)] = slot
                s = self._infer(body, ctx.with_proc(name, slot), slot.sort)
                if s is None:
                    s = slot.sort
                if s is None:
                    return None
                if slot.sort is None:
                    slot.sort = s
                elif slot.sort != s:
                    raise SortError(f"expected {slot.sort}, found {s} (body of rec {name})", body.pos or t.pos)
                return s
        raise TypeError(f"not a term: {t!r}")

    def _require(self, t: Term, ctx: SortContext) -> Sort:
        s = self._infer(t, ctx, None)
        if s is None:
            raise SortError("cannot determine the sort; annotate the recursion", t.pos)
        return s

    def fill(self, t: Term) -> Term:
        match t:
            case ProcVar():
                return t
            case Seq(a, b):
                return Seq(self.fill(a), self.fill(b), t.pos)
            case Ten(a, b):
                return Ten(self.fill(a), self.fill(b), t.pos)
            case Choice(a, b):
                return Choice(self.fill(a), self.fill(b), t.pos)
            case Prefix(u, v, body):
                return Prefix(u, v, self.fill(body), t.pos)
            case Rec(name, ann, body):
                slot = self.slots.get(id(t))
                sort = ann if ann is not None else (slot.sort if slot else None)
                if sort is None:
                    raise SortError(f"cannot determine the sort of rec {name}", t.pos)
                return Rec(name, sort, self.fill(body), t.pos)
        raise TypeError(f"not a term: {t!r}")


def check_definitions(program):
    """Check every definition of a parsed program against its declared sort.

    Returns a new program whose terms carry full recursion annotations.
    Definitions were already inlined by the parser, so each term is closed.
    """
    checked = {}
    for name, (term, declared) in program.definitions.items():
        try:
            elab, _ = elaborate(term, declared, program.directed)
        except SortError as err:
            err.definition = name
            raise
        checked[name] = (elab, declared)
    return replace(program, definitions=checked)


__all__ = [
    "Sort", "SortContext", "SortError", "infer", "elaborate", "check_definitions",
    "overline", "prefix_sort", "WIRE", "LEFT", "RIGHT", "BIND", "FREE",
]
