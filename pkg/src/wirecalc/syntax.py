"""Abstract syntax of the wire calculus.

Process terms::

    P ::= Y | P;P | P*P | u/v.P | P+P | rec Y:(k,l).P

Prefix patterns are words of :class:`PatternAtom`.  A pattern atom is a
signal constant, the absence-of-signal marker (iota), a binding occurrence
``\\x`` or a free occurrence ``x`` of a signal variable.  In the directed
dialect every atom also carries an input (``?``) or output (``!``) marker.

Terms are immutable.  Bound-name identity is irrelevant: :func:`canonicalize`
computes a nameless key that is equal for exactly the alpha-equivalent terms.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import TYPE_CHECKING, Iterable, Mapping, Union

if TYPE_CHECKING:
    from .sorting import Sort

IOTA = "_"

SIG = "sig"
IOTA_KIND = "iota"
BIND = "bind"
FREE = "free"

INPUT = "?"
OUTPUT = "!"


class WireError(Exception):
    """Base class of every error raised by this package."""


@dataclass(frozen=True)
class Alphabet:
    """A finite, ordered set of signal names."""

    signals: tuple[str, ...]

    def __post_init__(self):
        if not self.signals:
            raise WireError("alphabet required: declare at least one signal")
        if len(set(self.signals)) != len(self.signals):
            raise WireError(f"duplicate signal in alphabet {self.signals}")
        if IOTA in self.signals:
            raise WireError(f"{IOTA!r} is reserved for the absence of signal")

    def __contains__(self, name) -> bool:
        return name in self.signals

    def __iter__(self):
        return iter(self.signals)

    def __len__(self):
        return len(self.signals)

    @property
    def values(self) -> tuple[str, ...]:
        """Signals plus iota, the range of a prefix substitution."""
        return self.signals + (IOTA,)


@dataclass(frozen=True)
class PatternAtom:
    kind: str
    name: str = ""
    dir: str = ""

    def __post_init__(self):
        if self.kind not in (SIG, IOTA_KIND, BIND, FREE):
            raise ValueError(f"unknown pattern atom kind {self.kind!r}")
        if self.dir not in ("", INPUT, OUTPUT):
            raise ValueError(f"unknown direction marker {self.dir!r}")

    def __str__(self):
        match self.kind:
            case "sig":
                core = self.name
            case "iota":
                core = IOTA
            case "bind":
                core = "\\" + self.name
            case _:
                core = self.name
        return core + self.dir


def sig(name: str, dir: str = "") -> PatternAtom:
    return PatternAtom(SIG, name, dir)


def iota(dir: str = "") -> PatternAtom:
    return PatternAtom(IOTA_KIND, "", dir)


def lam(name: str, dir: str = "") -> PatternAtom:
    return PatternAtom(BIND, name, dir)


def var(name: str, dir: str = "") -> PatternAtom:
    return PatternAtom(FREE, name, dir)


Pattern = tuple[PatternAtom, ...]


# Terms.  ``pos`` is the (line, column) the parser saw; it never takes part in
# equality.  Free-variable sets and the nameless key are cached per node.

class _TermBase:
    @cached_property
    def fpv(self) -> frozenset[str]:
        """Free process variables."""
        return _fpv(self)

    @cached_property
    def fsv(self) -> frozenset[str]:
        """Free signal variables."""
        return _fsv(self)

    @property
    def closed(self) -> bool:
        return not self.fpv and not self.fsv

    @cached_property
    def key(self) -> str:
        return _key_node(self, (), ())

    def __str__(self):
        return pretty(self)


@dataclass(frozen=True)
class ProcVar(_TermBase):
    name: str
    pos: tuple[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Seq(_TermBase):
    left: Term
    right: Term
    pos: tuple[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Ten(_TermBase):
    left: Term
    right: Term
    pos: tuple[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Prefix(_TermBase):
    upper: Pattern
    lower: Pattern
    body: Term
    pos: tuple[int, int] | None = field(default=None, compare=False, repr=False)

    @cached_property
    def bound(self) -> tuple[str, ...]:
        """Bound names in order of first binding occurrence."""
        return bound_names(self.upper, self.lower)


@dataclass(frozen=True)
class Choice(_TermBase):
    left: Term
    right: Term
    pos: tuple[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Rec(_TermBase):
    name: str
    sort: "Sort | None"
    body: Term
    pos: tuple[int, int] | None = field(default=None, compare=False, repr=False)


Term = Union[ProcVar, Seq, Ten, Prefix, Choice, Rec]


def seq(*terms: Term) -> Term:
    """Left-nested composition ``t1 ; t2 ; ...``."""
    out = terms[0]
    for t in terms[1:]:
        out = Seq(out, t)
    return out


def ten(*terms: Term) -> Term:
    out = terms[0]
    for t in terms[1:]:
        out = Ten(out, t)
    return out


def bound_names(u: Iterable[PatternAtom], v: Iterable[PatternAtom]) -> tuple[str, ...]:
    seen: dict[str, None] = {}
    for a in itertools.chain(u, v):
        if a.kind == BIND:
            seen.setdefault(a.name)
    return tuple(seen)


def bd_fr(u: Iterable[PatternAtom], v: Iterable[PatternAtom]) -> tuple[frozenset[str], frozenset[str]]:
    """Bound and free signal variables of the prefix ``u/v``."""
    u, v = tuple(u), tuple(v)
    bound = frozenset(a.name for a in u + v if a.kind == BIND)
    free = frozenset(a.name for a in u + v if a.kind == FREE)
    return bound, free


def _fpv(t: Term) -> frozenset[str]:
    match t:
        case ProcVar(name):
            return frozenset((name,))
        case Seq(l, r) | Ten(l, r) | Choice(l, r):
            return l.fpv | r.fpv
        case Prefix(_, _, body):
            return body.fpv
        case Rec(name, _, body):
            return body.fpv - {name}
    raise TypeError(f"not a term: {t!r}")


def _fsv(t: Term) -> frozenset[str]:
    match t:
        case ProcVar():
            return frozenset()
        case Seq(l, r) | Ten(l, r) | Choice(l, r):
            return l.fsv | r.fsv
        case Prefix(u, v, body):
            bound, free = bd_fr(u, v)
            return free | (body.fsv - bound)
        case Rec(_, _, body):
            return body.fsv
    raise TypeError(f"not a term: {t!r}")


# Nameless keys.  Process variables become de Bruijn indices ``#i``; a free
# signal occurrence becomes ``@j.i`` (the i-th name bound by the j-th enclosing
# prefix) and a binding occurrence ``\i``.  Keys of closed subterms do not
# depend on their context, so they are reused from the node cache.

def _key(t: Term, penv: tuple[str, ...], senv: tuple[tuple[str, ...], ...]) -> str:
    if not t.fpv and not t.fsv:
        return t.key
    return _key_node(t, penv, senv)


def _key_node(t: Term, penv: tuple[str, ...], senv: tuple[tuple[str, ...], ...]) -> str:
    match t:
        case ProcVar(name):
            try:
                return f"#{penv.index(name)}"
            except ValueError:
                return f"?{name}"
        case Seq(l, r):
            return f"({_key(l, penv, senv)};{_key(r, penv, senv)})"
        case Ten(l, r):
            return f"({_key(l, penv, senv)}*{_key(r, penv, senv)})"
        case Choice(l, r):
            return f"({_key(l, penv, senv)}+{_key(r, penv, senv)})"
        case Rec(name, sort, body):
            return f"rec{sort}.{_key(body, (name,) + penv, senv)}"
        case Prefix(u, v, body):
            names = t.bound
            up = " ".join(_atom_key(a, names, senv) for a in u)
            lo = " ".join(_atom_key(a, names, senv) for a in v)
            return f"<{up}/{lo}>.{_key(body, penv, (names,) + senv)}"
    raise TypeError(f"not a term: {t!r}")


def _atom_key(a: PatternAtom, names: tuple[str, ...], senv) -> str:
    match a.kind:
        case "sig":
            core = "'" + a.name
        case "iota":
            core = IOTA
        case "bind":
            core = "\\" + str(names.index(a.name))
        case _:
            for j, frame in enumerate(senv):
                if a.name in frame:
                    core = f"@{j}.{frame.index(a.name)}"
                    break
            else:
                core = "?" + a.name
    return core + a.dir


@dataclass(frozen=True)
class CanonicalTerm:
    """A term together with its nameless key; equality is key equality."""

    key: str
    term: Term = field(compare=False, repr=False)

    def __str__(self):
        return pretty(self.term)


def canonicalize(t: Term | CanonicalTerm) -> CanonicalTerm:
    """Rename every binder deterministically from its nesting depth."""
    if isinstance(t, CanonicalTerm):
        return t
    renamed = _rename(t, {}, {}, 0, 0)
    return CanonicalTerm(t.key, renamed)


def _rename(t: Term, pren: dict, sren: dict, pdepth: int, sdepth: int) -> Term:
    match t:
        case ProcVar(name):
            return ProcVar(pren.get(name, name))
        case Seq(l, r):
            return Seq(_rename(l, pren, sren, pdepth, sdepth), _rename(r, pren, sren, pdepth, sdepth))
        case Ten(l, r):
            return Ten(_rename(l, pren, sren, pdepth, sdepth), _rename(r, pren, sren, pdepth, sdepth))
        case Choice(l, r):
            return Choice(_rename(l, pren, sren, pdepth, sdepth), _rename(r, pren, sren, pdepth, sdepth))
        case Rec(name, sort, body):
            fresh = f"Y{pdepth}"
            return Rec(fresh, sort, _rename(body, {**pren, name: fresh}, sren, pdepth + 1, sdepth))
        case Prefix(u, v, body):
            inner = dict(sren)
            for i, name in enumerate(t.bound):
                inner[name] = f"x{sdepth}_{i}"

            def ren(a: PatternAtom) -> PatternAtom:
                if a.kind == BIND:
                    return PatternAtom(BIND, inner[a.name], a.dir)
                if a.kind == FREE:
                    return PatternAtom(FREE, sren.get(a.name, a.name), a.dir)
                return a

            return Prefix(tuple(map(ren, u)), tuple(map(ren, v)),
                          _rename(body, pren, inner, pdepth, sdepth + 1))
    raise TypeError(f"not a term: {t!r}")


def alpha_equal(a: Term, b: Term) -> bool:
    return a.key == b.key


def _fresh(base: str, avoid: set[str]) -> str:
    for i in itertools.count(1):
        cand = f"{base}{i}"
        if cand not in avoid:
            return cand
    raise AssertionError


def _all_pnames(t: Term) -> set[str]:
    match t:
        case ProcVar(name):
            return {name}
        case Seq(l, r) | Ten(l, r) | Choice(l, r):
            return _all_pnames(l) | _all_pnames(r)
        case Prefix(_, _, body):
            return _all_pnames(body)
        case Rec(name, _, body):
            return {name} | _all_pnames(body)
    raise TypeError(f"not a term: {t!r}")


def subst_process(t: Term, y: str, r: Term) -> Term:
    """Capture-avoiding ``t[r/y]``."""
    if y not in t.fpv:
        return t
    match t:
        case ProcVar():
            return r
        case Seq(a, b):
            return Seq(subst_process(a, y, r), subst_process(b, y, r), t.pos)
        case Ten(a, b):
            return Ten(subst_process(a, y, r), subst_process(b, y, r), t.pos)
        case Choice(a, b):
            return Choice(subst_process(a, y, r), subst_process(b, y, r), t.pos)
        case Prefix(u, v, body):
            clash = set(t.bound) & r.fsv
            if clash:
                avoid = set(t.bound) | r.fsv | body.fsv | _fr_names(u, v)
                mapping = {}
                for name in sorted(clash):
                    mapping[name] = _fresh(name, avoid)
                    avoid.add(mapping[name])
                t = _rename_prefix(t, mapping)
                u, v, body = t.upper, t.lower, t.body
            return Prefix(u, v, subst_process(body, y, r), t.pos)
        case Rec(name, sort, body):
            if name in r.fpv:
                fresh = _fresh(name, _all_pnames(body) | r.fpv | {y})
                body = subst_process(body, name, ProcVar(fresh))
                name = fresh
            return Rec(name, sort, subst_process(body, y, r), t.pos)
    raise TypeError(f"not a term: {t!r}")


def _fr_names(u, v) -> set[str]:
    return set(bd_fr(u, v)[1])


def _rename_prefix(p: Prefix, mapping: dict[str, str]) -> Prefix:
    def ren(a: PatternAtom) -> PatternAtom:
        if a.kind == BIND and a.name in mapping:
            return PatternAtom(BIND, mapping[a.name], a.dir)
        return a

    body = subst_signals(p.body, {k: var(n) for k, n in mapping.items()})
    return Prefix(tuple(map(ren, p.upper)), tuple(map(ren, p.lower)), body, p.pos)


def subst_signals(t: Term, sigma: Mapping[str, PatternAtom | str]) -> Term:
    """Replace free signal variables by the atoms in ``sigma``.

    Values may be pattern atoms or plain signal names (``IOTA`` for iota).
    The replacement keeps the direction marker of the replaced occurrence.
    """
    sigma = {k: _as_atom(v) for k, v in sigma.items()}
    return _subst_sig(t, sigma)


def _as_atom(v: PatternAtom | str) -> PatternAtom:
    if isinstance(v, PatternAtom):
        return v
    return iota() if v == IOTA else sig(v)


def _subst_sig(t: Term, sigma: dict[str, PatternAtom]) -> Term:
    if not sigma or not (t.fsv & sigma.keys()):
        return t
    match t:
        case Seq(a, b):
            return Seq(_subst_sig(a, sigma), _subst_sig(b, sigma), t.pos)
        case Ten(a, b):
            return Ten(_subst_sig(a, sigma), _subst_sig(b, sigma), t.pos)
        case Choice(a, b):
            return Choice(_subst_sig(a, sigma), _subst_sig(b, sigma), t.pos)
        case Rec(name, sort, body):
            return Rec(name, sort, _subst_sig(body, sigma), t.pos)
        case Prefix(u, v, body):
            bound = set(t.bound)
            # replacement atoms may themselves be variables (renaming)
            incoming = {a.name for a in sigma.values() if a.kind == FREE}
            if bound & incoming:
                avoid = bound | incoming | set(sigma) | body.fsv
                mapping = {}
                for name in sorted(bound & incoming):
                    mapping[name] = _fresh(name, avoid)
                    avoid.add(mapping[name])
                t = _rename_prefix(t, mapping)
                u, v, body = t.upper, t.lower, t.body
                bound = set(t.bound)

            def put(a: PatternAtom) -> PatternAtom:
                if a.kind == FREE and a.name in sigma:
                    rep = sigma[a.name]
                    return PatternAtom(rep.kind, rep.name, a.dir)
                return a

            inner = {k: x for k, x in sigma.items() if k not in bound}
            return Prefix(tuple(map(put, u)), tuple(map(put, v)), _subst_sig(body, inner), t.pos)
    return t


def unfold(t: Rec) -> Term:
    """One step of the recursion rule: ``P[rec Y.P / Y]``."""
    return subst_process(t.body, t.name, t)


def star(t: Term) -> Term:
    """The 180-degree rotation of a term.

    Composition order, tensor order and both pattern words are reversed and
    the two pattern words swap places.  Directed markers are kept: moving a
    word from the lower to the upper side already switches the directions
    it fires with, so star(I_L) is I_R.  Recursion annotations are rotated
    accordingly.
    """
    match t:
        case ProcVar():
            return t
        case Seq(a, b):
            return Seq(star(b), star(a))
        case Ten(a, b):
            return Ten(star(b), star(a))
        case Choice(a, b):
            return Choice(star(a), star(b))
        case Prefix(u, v, body):
            return Prefix(_star_word(v), _star_word(u), star(body))
        case Rec(name, sort, body):
            return Rec(name, sort.star() if sort is not None else None, star(body))
    raise TypeError(f"not a term: {t!r}")


def _star_word(w: Pattern) -> Pattern:
    return tuple(reversed(w))


# Printing.  Precedence: '+' loosest, then ';', then '*'; prefix and rec
# bodies are atoms.

_PREC = {Choice: 0, Seq: 1, Ten: 2}


def pretty(t: Term) -> str:
    return _pp(t, 0)


def _pp(t: Term, ctx: int) -> str:
    match t:
        case ProcVar(name):
            return name
        case Seq(a, b) | Ten(a, b) | Choice(a, b):
            prec = _PREC[type(t)]
            op = {0: " + ", 1: " ; ", 2: " * "}[prec]
            s = _pp(a, prec) + op + _pp(b, prec + 1)
            return f"({s})" if prec < ctx else s
        case Prefix(u, v, body):
            up = " ".join(map(str, u))
            lo = " ".join(map(str, v))
            return f"<{up} / {lo}> . {_pp(body, 3)}"
        case Rec(name, sort, body):
            ann = f" : {sort}" if sort is not None else ""
            return f"rec {name}{ann} . {_pp(body, 3)}"
    raise TypeError(f"not a term: {t!r}")
