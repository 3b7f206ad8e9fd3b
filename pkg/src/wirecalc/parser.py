"""Recursive-descent parser for wire calculus programs.

::

    program   := (decl)*
    decl      := "signals" NAME+ ";" | "mode" ("undirected"|"directed") ";"
               | "def" NAME ":" sort "=" term ";"

A ``;`` followed by a declaration keyword or the end of input terminates the
definition; any other ``;`` is sequential composition.
    sort      := "(" side "," side ")"
    term      := comp ("+" comp)*
    comp      := tens (";" tens)*
    tens      := atomt ("*" atomt)*
    atomt     := NAME | "(" term ")"
               | "<" lab* "/" lab* ">" "." atomt
               | "rec" NAME [":" sort] "." atomt
    lab       := ("_" | "\\" NAME | NAME) ("?" | "!")?

A name in term position is a recursion variable if one is in scope, else an
earlier definition (inlined), else a library constant such as ``I``, ``X_2_1``
or ``d_3``.  ``#`` starts a comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .sorting import Sort
from .syntax import (
    Alphabet,
    Choice,
    PatternAtom,
    Prefix,
    ProcVar,
    Rec,
    Seq,
    Ten,
    Term,
    WireError,
    iota,
    lam,
    sig,
    var,
)

KEYWORDS = {"signals", "mode", "def", "rec"}

_TOKEN = re.compile(r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<name>[A-Za-z0-9][A-Za-z0-9_']*)
  | (?P<sym>[;:=(),*+<>/.\\?!_])
""", re.VERBOSE)


class ParseError(WireError):
    def __init__(self, message: str, line: int, col: int):
        self.line, self.col = line, col
        super().__init__(f"syntax error at {line}:{col}: {message}")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    out = []
    line, start = 1, 0
    i = 0
    while i < len(text):
        m = _TOKEN.match(text, i)
        if m is None:
            raise ParseError(f"unexpected character {text[i]!r}", line, i - start + 1)
        kind = m.lastgroup
        if kind != "ws":
            out.append(Token(kind, m.group(), line, i - start + 1))
        for j, ch in enumerate(m.group()):
            if ch == "\n":
                line, start = line + 1, i + j + 1
        i = m.end()
    out.append(Token("eof", "", line, i - start + 1))
    return out


@dataclass
class Program:
    alphabet: Alphabet
    definitions: dict[str, tuple[Term, Sort]] = field(default_factory=dict)
    directed: bool = False

    def term(self, name: str) -> Term:
        try:
            return self.definitions[name][0]
        except KeyError:
            raise WireError(f"no definition named {name!r}") from None

    def sort(self, name: str) -> Sort:
        return self.definitions[name][1]


class _Parser:
    def __init__(self, text: str, force_directed: bool | None = None):
        self.toks = tokenize(text)
        self.i = 0
        self.signals: list[str] = []
        self.directed: bool | None = None
        self.forced = force_directed
        self.defs: dict[str, tuple[Term, Sort]] = {}

    # token helpers

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, msg: str, tok: Token | None = None) -> ParseError:
        tok = tok or self.tok
        return ParseError(msg, tok.line, tok.col)

    def accept(self, text: str) -> Token | None:
        if self.tok.text == text and self.tok.kind != "eof":
            tok = self.tok
            self.i += 1
            return tok
        return None

    def expect(self, text: str) -> Token:
        tok = self.accept(text)
        if tok is None:
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        return tok

    def name(self, what: str = "name") -> Token:
        tok = self.tok
        if tok.kind != "name" or tok.text in KEYWORDS:
            raise self.error(f"expected {what}, found {tok.text or 'end of input'!r}")
        self.i += 1
        return tok

    # declarations

    def program(self) -> Program:
        while self.tok.kind != "eof":
            if self.accept("signals"):
                if self.signals:
                    raise self.error("signals declared twice", self.toks[self.i - 1])
                while self.tok.kind == "name" and self.tok.text not in KEYWORDS:
                    self.signals.append(self.name().text)
                self.expect(";")
                try:
                    Alphabet(tuple(self.signals))
                except WireError as err:
                    raise self.error(str(err), self.toks[self.i - 1]) from None
            elif self.accept("mode"):
                tok = self.name("'undirected' or 'directed'")
                if tok.text not in ("undirected", "directed"):
                    raise self.error(f"unknown mode {tok.text!r}", tok)
                if self.directed is not None or self.defs:
                    raise self.error("mode must be declared once, before any definition", tok)
                self.directed = tok.text == "directed"
                if self.forced is not None:
                    self.directed = self.forced
                self.expect(";")
            elif self.tok.text == "def":
                if self.directed is None:
                    self.directed = bool(self.forced)
                self.definition()
            else:
                raise self.error(f"expected a declaration, found {self.tok.text!r}")
        if not self.signals:
            raise ParseError("alphabet required: declare 'signals ...;'", self.tok.line, self.tok.col)
        directed = self.forced if self.directed is None and self.forced is not None else self.directed
        return Program(Alphabet(tuple(self.signals)), self.defs, bool(directed))

    def definition(self):
        if not self.signals:
            raise self.error("declare signals before definitions")
        self.expect("def")
        tok = self.name("definition name")
        if tok.text in self.defs:
            raise self.error(f"duplicate definition {tok.text!r}", tok)
        self.expect(":")
        declared = self.sort()
        self.expect("=")
        term = self.term(frozenset(), frozenset())
        self.expect(";")
        self.defs[tok.text] = (term, declared)

    def sort(self) -> Sort:
        self.expect("(")
        left = self.side()
        self.expect(",")
        right = self.side()
        self.expect(")")
        return Sort.words(left, right) if self.directed else Sort.arity(int(left), int(right))

    def side(self) -> str:
        tok = self.tok
        if self.directed:
            if tok.text in (",", ")"):
                return ""
            self.name("direction word")
            if tok.text == "e":
                return ""
            if set(tok.text) - {"L", "R"}:
                raise self.error(f"direction word must be over L and R, found {tok.text!r}", tok)
            return tok.text
        self.name("arity")
        if not tok.text.isdigit():
            raise self.error(f"arity must be a natural number, found {tok.text!r}", tok)
        return tok.text

    # terms; ``pvars`` are recursion variables in scope, ``svars`` signal variables

    def term(self, pvars, svars) -> Term:
        t = self.comp(pvars, svars)
        while (tok := self.accept("+")):
            t = Choice(t, self.comp(pvars, svars), (tok.line, tok.col))
        return t

    def comp(self, pvars, svars) -> Term:
        t = self.tens(pvars, svars)
        while self._composes() and (tok := self.accept(";")):
            t = Seq(t, self.tens(pvars, svars), (tok.line, tok.col))
        return t

    def _composes(self) -> bool:
        # ';' also ends a definition: it does so when a declaration or the end follows
        nxt = self.toks[self.i + 1] if self.i + 1 < len(self.toks) else None
        return self.tok.text == ";" and nxt is not None and nxt.kind != "eof" and nxt.text not in KEYWORDS - {"rec"}

    def tens(self, pvars, svars) -> Term:
        t = self.atomt(pvars, svars)
        while (tok := self.accept("*")):
            t = Ten(t, self.atomt(pvars, svars), (tok.line, tok.col))
        return t

    def atomt(self, pvars, svars) -> Term:
        tok = self.tok
        pos = (tok.line, tok.col)
        if self.accept("("):
            t = self.term(pvars, svars)
            self.expect(")")
            return t
        if self.accept("<"):
            upper = self.pattern(svars, ("/",))
            self.expect("/")
            lower = self.pattern(svars, (">",))
            self.expect(">")
            self.expect(".")
            bound = {a.name for a in upper + lower if a.kind == "bind"}
            body = self.atomt(pvars, svars | bound)
            return Prefix(upper, lower, body, pos)
        if self.accept("rec"):
            name = self.name("recursion variable").text
            ann = None
            if self.accept(":"):
                ann = self.sort()
            self.expect(".")
            return Rec(name, ann, self.atomt(pvars | {name}, svars), pos)
        if tok.kind == "name" and tok.text not in KEYWORDS:
            self.i += 1
            return self.reference(tok, pvars)
        raise self.error(f"expected a term, found {tok.text or 'end of input'!r}")

    def reference(self, tok: Token, pvars) -> Term:
        name = tok.text
        if name in pvars:
            return ProcVar(name, (tok.line, tok.col))
        if name in self.defs:
            term, declared = self.defs[name]
            if isinstance(term, Rec) and term.sort is None:
                term = Rec(term.name, declared, term.body, term.pos)
            return term
        from .stdlib import lookup_builtin

        built = lookup_builtin(name, Alphabet(tuple(self.signals)), bool(self.directed))
        if built is not None:
            return built
        raise self.error(f"undeclared identifier {name!r}", tok)

    def pattern(self, svars, stop) -> tuple[PatternAtom, ...]:
        atoms = []
        while self.tok.text not in stop:
            atoms.append(self.label(svars))
        return tuple(atoms)

    def label(self, svars) -> PatternAtom:
        tok = self.tok
        if self.accept("_"):
            atom = iota()
        elif self.accept("\\"):
            ntok = self.name("variable name")
            if ntok.text in self.signals:
                raise self.error(f"cannot bind signal name {ntok.text!r}", ntok)
            atom = lam(ntok.text)
        elif tok.kind == "name" and tok.text not in KEYWORDS:
            self.i += 1
            atom = sig(tok.text) if tok.text in self.signals else var(tok.text)
        else:
            raise self.error(f"expected a pattern atom, found {tok.text or 'end of input'!r}")
        mark = self.accept("?") or self.accept("!")
        if mark and not self.directed:
            raise self.error("direction markers are only allowed in directed mode", mark)
        if self.directed and not mark:
            raise self.error("directed mode requires '?' or '!' on every pattern atom", tok)
        return PatternAtom(atom.kind, atom.name, mark.text if mark else "")


def parse_program(text: str, directed: bool | None = None) -> Program:
    """Parse a program; ``directed`` overrides the file's ``mode`` declaration."""
    return _Parser(text, directed).program()


def parse_term(text: str, alphabet: Alphabet | tuple[str, ...] = ("0", "1"),
               directed: bool = False, definitions: dict | None = None) -> Term:
    """Parse a single term against a given alphabet (convenience for tests and the API)."""
    signals = tuple(alphabet)
    p = _Parser(text)
    p.signals = list(signals)
    p.directed = directed
    p.defs = dict(definitions or {})
    t = p.term(frozenset(), frozenset())
    if p.tok.kind != "eof":
        raise p.error(f"unexpected {p.tok.text!r} after term")
    return t
