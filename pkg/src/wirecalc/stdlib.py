"""Named terms of the calculus, a random term generator and the law harness.

Builders return the literal recursive definitions, not behavioural
stand-ins: ``d_n(3)`` really is ``d ; I*d_2*I``.  Undirected builders take
arities; directed builders take direction words over ``L``/``R``.
"""

from __future__ import annotations

import json
import random
import re
from dataclasses import dataclass, field
from itertools import islice
from typing import Iterator

from .sorting import LEFT, RIGHT, WIRE, Sort, infer, overline
from .syntax import (
    INPUT,
    OUTPUT,
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


class BuildError(WireError):
    pass


def _need(cond: bool, msg: str):
    if not cond:
        raise BuildError(msg)


# Boundary letters: WIRE for undirected wires, LEFT/RIGHT for directed ones.
# A wire entering the left boundary is an input on the upper side when it
# points right, and the opposite on the lower side.

def _upper_mark(c: str) -> str:
    return "" if c == WIRE else (OUTPUT if c == LEFT else INPUT)


def _lower_mark(c: str) -> str:
    return "" if c == WIRE else (INPUT if c == LEFT else OUTPUT)


def _sort(left: str, right: str) -> Sort:
    directed = bool(set(left + right) - {WIRE})
    return Sort(left, right, directed)


def _loop(sort: Sort, upper, lower) -> Rec:
    return Rec("Y", sort, Prefix(tuple(upper), tuple(lower), ProcVar("Y")))


def zero(sort: Sort | tuple[int, int]) -> Rec:
    """``0_tau = rec Y.Y``: no behaviour beyond the reflexive loop."""
    if not isinstance(sort, Sort):
        sort = Sort.arity(*sort)
    return Rec("Y", sort, ProcVar("Y"))


def identity(word: str | int) -> Term:
    """``I_k`` (arity) or the directed identity on a direction word."""
    if isinstance(word, int):
        _need(word >= 0, f"I_k needs k >= 0, got {word}")
        word = WIRE * word
    if not word:
        return zero(_sort("", ""))
    xs = [f"x{i}" for i in range(1, len(word) + 1)]
    return _loop(_sort(word, word),
                 [lam(x, _upper_mark(c)) for x, c in zip(xs, word)],
                 [lam(x, _lower_mark(c)) for x, c in zip(xs, word)])


def twist(w1: str | int, w2: str | int) -> Rec:
    """``X_{k,l}``: swaps a bundle of k wires with a bundle of l wires."""
    if isinstance(w1, int):
        _need(w1 >= 0 and w2 >= 0, f"X_k_l needs k, l >= 0, got {w1}, {w2}")
        w1, w2 = WIRE * w1, WIRE * w2
    xs = [f"x{i}" for i in range(1, len(w1) + 1)]
    ys = [f"y{i}" for i in range(1, len(w2) + 1)]
    upper = [lam(x, _upper_mark(c)) for x, c in zip(xs, w1)] + [lam(y, _upper_mark(c)) for y, c in zip(ys, w2)]
    lower = [lam(y, _lower_mark(c)) for y, c in zip(ys, w2)] + [lam(x, _lower_mark(c)) for x, c in zip(xs, w1)]
    return _loop(_sort(w1 + w2, w2 + w1), upper, lower)


def _d1(c: str) -> Rec:
    # lower word c.overline(c), both occurrences bound to one variable
    return _loop(_sort("", c + overline(c)), [], [lam("x", _lower_mark(c)), lam("x", _lower_mark(overline(c)))])


def _e1(c: str) -> Rec:
    # upper word overline(c).c
    return _loop(_sort(overline(c) + c, ""), [lam("x", _upper_mark(overline(c))), lam("x", _upper_mark(c))], [])


def dual_unit(word: str | int) -> Term:
    """``d_n`` by ``d_0 = 0``, ``d_1 = d``, ``d_{n+1} = d ; I*d_n*I``.

    On a direction word ``a.w`` the same scheme reads
    ``d_a ; I_a * d_w * I_overline(a)``.
    """
    if isinstance(word, int):
        _need(word >= 0, f"d_n needs n >= 0, got {word}")
        word = WIRE * word
    if not word:
        return zero(_sort("", ""))
    a, rest = word[0], word[1:]
    if not rest:
        return _d1(a)
    return Seq(_d1(a), Ten(Ten(identity(a), dual_unit(rest)), identity(overline(a))))


def dual_counit(word: str | int) -> Term:
    """``e_n`` by ``e_0 = 0``, ``e_1 = e``, ``e_{n+1} = I_n*e*I_n ; e_n``.

    On a direction word ``a.w``: ``I_rev(overline(w)) * e_a * I_w ; e_w``.
    """
    if isinstance(word, int):
        _need(word >= 0, f"e_n needs n >= 0, got {word}")
        word = WIRE * word
    if not word:
        return zero(_sort("", ""))
    a, rest = word[0], word[1:]
    if not rest:
        return _e1(a)
    return Seq(Ten(Ten(identity(overline(rest)[::-1]), _e1(a)), identity(rest)), dual_counit(rest))


def _flipflop(i: int, directed: bool) -> Rec:
    up, lo = (INPUT, OUTPUT) if directed else ("", "")
    j = str(1 - i)
    i = str(i)
    sort = Sort.words(RIGHT, RIGHT) if directed else Sort.arity(1, 1)

    def pre(a, b, body):
        return Prefix((sig(a, up),), (sig(b, lo),), body)

    inner = Rec("Z", sort, Choice(pre(j, j, ProcVar("Z")), pre(i, j, ProcVar("Y"))))
    return Rec("Y", sort, Choice(pre(i, i, ProcVar("Y")), pre(j, i, inner)))


def flipflop(i: int, directed: bool = False) -> Rec:
    """``F_0`` / ``F_1``: a toggle showing ``i`` on its lower wire.

    The directed variant reads its upper wire (``?``) and writes its lower
    wire (``!``), giving sort ``(R,R)``.  Needs the signals ``0`` and ``1``.
    """
    _need(i in (0, 1), f"flip-flop index must be 0 or 1, got {i}")
    return _flipflop(i, directed)


def ev(l: int, m: int) -> Term:
    """``ev_{l,m} = I_m * e_l : (m+2l, m)``."""
    return Ten(identity(m), dual_counit(l))


def cur(p: Term, k: int, l: int) -> Term:
    """``Cur(P) = I_k*d_l ; P*I_l`` for ``P : (k+l, m)``."""
    return Seq(Ten(identity(k), dual_unit(l)), Ten(p, identity(l)))


I = identity(1)
X = twist(1, 1)
D = dual_unit(1)
E = dual_counit(1)
F0 = flipflop(0)
F1 = flipflop(1)
ZERO = zero((0, 0))
RING = Seq(Seq(D, Ten(I, Seq(Seq(F0, F1), F0))), E)
I_L, I_R = identity(LEFT), identity(RIGHT)
D_L, E_L = dual_unit(LEFT), dual_counit(LEFT)
D_R, E_R = dual_unit(RIGHT), dual_counit(RIGHT)


def build(name: str, *params) -> Term:
    """Programmatic access by catalogue name, e.g. ``build("d_n", 2)``."""
    match name, params:
        case "I", ():
            return I
        case "X", ():
            return X
        case "d", ():
            return D
        case "e", ():
            return E
        case "F0", ():
            return F0
        case "F1", ():
            return F1
        case "A", ():
            return RING
        case "I_k", (k,):
            return identity(k)
        case "X_k_l", (k, l):
            return twist(k, l)
        case "d_n", (n,):
            return dual_unit(n)
        case "e_n", (n,):
            return dual_counit(n)
        case "zero", (k, l):
            return zero((k, l))
        case "ev", (l, m):
            return ev(l, m)
        case "cur", (p, k, l):
            return cur(p, k, l)
        case "I_L" | "I_R" | "d_L" | "e_L" | "d_R" | "e_R", ():
            return lookup_builtin(name, Alphabet(("0", "1")), True)
        case "F0_dir" | "F1_dir", ():
            return flipflop(int(name[1]), True)
    raise BuildError(f"unknown constant {name} with parameters {params}")


_UNDIRECTED = [
    (re.compile(r"I_(\d+)"), lambda m: identity(int(m[1]))),
    (re.compile(r"X_(\d+)_(\d+)"), lambda m: twist(int(m[1]), int(m[2]))),
    (re.compile(r"d_(\d+)"), lambda m: dual_unit(int(m[1]))),
    (re.compile(r"e_(\d+)"), lambda m: dual_counit(int(m[1]))),
    (re.compile(r"ev_(\d+)_(\d+)"), lambda m: ev(int(m[1]), int(m[2]))),
    (re.compile(r"zero_(\d+)_(\d+)"), lambda m: zero((int(m[1]), int(m[2])))),
]

_DIRECTED = [
    (re.compile(r"I_([LR]+)"), lambda m: identity(m[1])),
    (re.compile(r"X_([LR]+)_([LR]+)"), lambda m: twist(m[1], m[2])),
    (re.compile(r"d_([LR]+)"), lambda m: dual_unit(m[1])),
    (re.compile(r"e_([LR]+)"), lambda m: dual_counit(m[1])),
    (re.compile(r"zero_([LRe]+)_([LRe]+)"),
     lambda m: zero(Sort.words(m[1].replace("e", ""), m[2].replace("e", "")))),
]


def lookup_builtin(name: str, alphabet: Alphabet, directed: bool) -> Term | None:
    """Resolve a library constant name used in a program, or ``None``."""
    if name in ("F0", "F1"):
        _need("0" in alphabet and "1" in alphabet, f"{name} needs the signals 0 and 1")
        return flipflop(int(name[1]), directed)
    table = _DIRECTED if directed else _UNDIRECTED
    if not directed:
        simple = {"I": I, "X": X, "d": D, "e": E}
        if name in simple:
            return simple[name]
    for pattern, make in table:
        if m := pattern.fullmatch(name):
            return make(m)
    return None


# Random terms.

@dataclass
class _GenState:
    rng: random.Random
    alphabet: Alphabet
    directed: bool
    counter: int = 0

    def fresh(self, base: str) -> str:
        self.counter += 1
        return f"{base}{self.counter}"


def _constants(sort: Sort) -> list[Term]:
    out: list[Term] = [zero(sort)]
    # I on the empty word is 0 again, and would lose the directed flag
    if sort.left == sort.right and sort.left:
        out.append(identity(sort.left))
    w = sort.left
    for i in range(1, len(w)):
        if sort.right == w[i:] + w[:i]:
            out.append(twist(w[:i], w[i:]))
    if not sort.left and len(sort.right) % 2 == 0 and sort.right:
        h = len(sort.right) // 2
        if sort.right[h:] == overline(sort.right[:h])[::-1]:
            out.append(dual_unit(sort.right[:h]))
    if not sort.right and len(sort.left) % 2 == 0 and sort.left:
        h = len(sort.left) // 2
        if sort.left[:h] == overline(sort.left[h:])[::-1]:
            out.append(dual_counit(sort.left[h:]))
    return out


def _word(sort_dir: bool, n: int, rng: random.Random) -> str:
    if sort_dir:
        return "".join(rng.choice((LEFT, RIGHT)) for _ in range(n))
    return WIRE * n


def _gen_prefix(g: _GenState, sort: Sort, depth: int, recvars, svars, solid: bool = False) -> Prefix:
    """A random prefix; ``solid`` ones carry a signal and so cannot fire silently."""
    rng = g.rng
    bound: list[str] = []

    def atom(mark: str) -> PatternAtom:
        r = rng.random()
        if r < 0.3:
            return iota(mark)
        if r < 0.55:
            return sig(rng.choice(g.alphabet.signals), mark)
        if r < 0.65 and svars:
            choices = [x for x in svars if x not in bound]
            if choices:
                return var(rng.choice(choices), mark)
        if bound and rng.random() < 0.3:
            return lam(rng.choice(bound), mark)
        x = g.fresh("x")
        bound.append(x)
        return lam(x, mark)

    upper = tuple(atom(_upper_mark(c)) for c in sort.left)
    lower = tuple(atom(_lower_mark(c)) for c in sort.right)
    if solid and not any(a.kind == "sig" for a in upper + lower):
        i = rng.randrange(len(upper) + len(lower))
        s = rng.choice(g.alphabet.signals)
        if i < len(upper):
            upper = upper[:i] + (sig(s, upper[i].dir),) + upper[i + 1:]
        else:
            i -= len(upper)
            lower = lower[:i] + (sig(s, lower[i].dir),) + lower[i + 1:]
    # a free reference must not also be bound in the same prefix
    names = {a.name for a in upper + lower if a.kind == "bind"}
    if any(a.kind == "free" and a.name in names for a in upper + lower):
        upper = tuple(iota(a.dir) if a.kind == "free" and a.name in names else a for a in upper)
        lower = tuple(iota(a.dir) if a.kind == "free" and a.name in names else a for a in lower)
    body = _gen(g, sort, depth - 1, recvars, svars | names, guarded=True)
    return Prefix(upper, lower, body)


def _gen(g: _GenState, sort: Sort, depth: int, recvars: tuple, svars: frozenset, guarded: bool) -> Term:
    rng = g.rng
    usable = [y for y, s in recvars if s == sort] if guarded else []
    if depth <= 0:
        r = rng.random()
        if usable and r < 0.5:
            return ProcVar(rng.choice(usable))
        return rng.choice(_constants(sort))
    options = ["prefix", "prefix", "const", "choice", "seq", "ten", "rec"]
    if usable:
        options += ["var", "var"]
    match rng.choice(options):
        case "var":
            return ProcVar(rng.choice(usable))
        case "const":
            return rng.choice(_constants(sort))
        case "prefix":
            return _gen_prefix(g, sort, depth, recvars, svars)
        case "choice" if recvars:
            return _gen_choice(g, sort, depth, recvars, svars)
        case "choice":
            return Choice(_gen(g, sort, depth - 1, recvars, svars, guarded),
                          _gen(g, sort, depth - 1, recvars, svars, guarded))
        case "seq":
            mid = _word(sort.directed, rng.randint(0, 2), rng)
            # recursion variables stay out of ; and * to keep state spaces finite
            return Seq(_gen(g, Sort(sort.left, mid, sort.directed), depth - 1, (), svars, False),
                       _gen(g, Sort(mid, sort.right, sort.directed), depth - 1, (), svars, False))
        case "ten":
            i = rng.randint(0, len(sort.left))
            j = rng.randint(0, len(sort.right))
            return Ten(_gen(g, Sort(sort.left[:i], sort.right[:j], sort.directed), depth - 1, (), svars, False),
                       _gen(g, Sort(sort.left[i:], sort.right[j:], sort.directed), depth - 1, (), svars, False))
        case "rec":
            y = g.fresh("Y")
            inner = recvars + ((y, sort),)
            if rng.random() < 0.5:
                return Rec(y, sort, _gen_choice(g, sort, depth, inner, svars))
            return Rec(y, sort, _gen_prefix(g, sort, depth, inner, svars))
    raise AssertionError("unreachable")


def _gen_choice(g: _GenState, sort: Sort, depth: int, recvars, svars) -> Term:
    # Inside a recursion body a branch that can move silently would keep the
    # choice open on every unfolding (P+R -> P'+(P+R) -> ...), so branches
    # there are prefixes that need a signal to fire.
    if not sort.left and not sort.right:
        return _gen_prefix(g, sort, depth, recvars, svars)
    return Choice(_gen_prefix(g, sort, depth, recvars, svars, solid=True),
                  _gen_prefix(g, sort, depth, recvars, svars, solid=True))


def generate_terms(sort: Sort | tuple[int, int], depth: int, seed: int,
                   alphabet=("0", "1"), directed: bool = False) -> Iterator[Term]:
    """Endless deterministic stream of closed terms of the given sort.

    Recursion variables occur only under a prefix and never below ``;`` or
    ``*`` inside their own body, so every sample has a finite state space.
    """
    if not isinstance(sort, Sort):
        sort = Sort.arity(*sort)
    alphabet = alphabet if isinstance(alphabet, Alphabet) else Alphabet(tuple(alphabet))
    g = _GenState(random.Random(seed), alphabet, directed or sort.directed)
    while True:
        t = _gen(g, sort, depth, (), frozenset(), False)
        assert infer(t, directed=g.directed) == sort
        yield t


# The law harness.

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"


@dataclass
class LawResult:
    law: str
    instance: str
    verdict: str
    counterexample: list | None = None
    detail: str = ""

    def to_dict(self) -> dict:
        d = {"law": self.law, "instance": self.instance, "verdict": self.verdict}
        if self.counterexample is not None:
            d["counterexample"] = self.counterexample
        return d


@dataclass
class LawReport:
    results: list[LawResult] = field(default_factory=list)
    envelope: str = ""

    @property
    def passed(self) -> bool:
        return all(r.verdict == PASS for r in self.results)

    def sorted(self) -> list[LawResult]:
        return sorted(self.results, key=lambda r: (r.law, _natural(r.instance)))

    def to_text(self) -> str:
        lines = [f"# {self.envelope}"] if self.envelope else []
        for r in self.sorted():
            line = f"{r.verdict.upper():<12} {r.law:<20} {r.instance}"
            if r.detail:
                line += f"  ({r.detail})"
            lines.append(line)
        counts = {v: sum(r.verdict == v for r in self.results) for v in (PASS, FAIL, INCONCLUSIVE)}
        lines.append(f"{counts[PASS]} passed, {counts[FAIL]} failed, {counts[INCONCLUSIVE]} inconclusive")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps([r.to_dict() for r in self.sorted()], indent=1) + "\n"


def _natural(s: str):
    return [int(p) if p.isdigit() else p for p in re.split(r"(\d+)", s)]


def _small_sort(rng: random.Random, hi: int = 2) -> tuple[int, int]:
    return rng.randint(0, hi), rng.randint(0, hi)


def _sample(sort: tuple[int, int], depth: int, rng: random.Random) -> Term:
    return next(generate_terms(sort, depth, rng.randrange(2**32)))


class _Checker:
    """Runs bisimilarity queries for the law suites and records results."""

    def __init__(self, budget: int, alphabet):
        self.budget = budget
        self.alphabet = alphabet
        self.report = LawReport()
        # every (term, directed) handed to a check, for reuse by later checks
        self.terms: list[tuple[Term, bool]] = []

    def equiv(self, law: str, instance: str, lhs: Term, rhs: Term, directed: bool = False):
        from .equivalence import bisimilar
        from .sos import BudgetExceeded

        self.terms += [(lhs, directed), (rhs, directed)]
        try:
            v = bisimilar(lhs, rhs, self.budget, self.alphabet, directed)
        except BudgetExceeded as err:
            self.report.results.append(LawResult(law, instance, INCONCLUSIVE, detail=str(err)))
            return
        if v.bisimilar:
            self.report.results.append(LawResult(law, instance, PASS))
        else:
            self.report.results.append(LawResult(law, instance, FAIL, v.counterexample_json()))

    def holds(self, law: str, instance: str, ok: bool, detail: str = ""):
        self.report.results.append(LawResult(law, instance, PASS if ok else FAIL, detail="" if ok else detail))


def category_laws(chk: _Checker, rng: random.Random, per_law: int, depth: int = 3):
    """Associativity, units, functoriality of * and the symmetry laws on samples."""
    s = lambda k, l: _sample((k, l), depth, rng)  # noqa: E731
    for i in range(per_law):
        k, l, m, n = (rng.randint(0, 2) for _ in range(4))
        p, q, r = s(k, l), s(l, m), s(m, n)
        chk.equiv("assoc", f"#{i} ({k},{l},{m},{n})", Seq(Seq(p, q), r), Seq(p, Seq(q, r)))
    for i in range(per_law):
        k, l = _small_sort(rng)
        p = s(k, l)
        if i % 2:
            chk.equiv("unit", f"#{i} right ({k},{l})", Seq(p, identity(l)), p)
        else:
            chk.equiv("unit", f"#{i} left ({k},{l})", Seq(identity(k), p), p)
    for i in range(per_law):
        sorts = [_small_sort(rng, 1) for _ in range(3)]
        p, r, t = (s(*x) for x in sorts)
        chk.equiv("tensor-assoc", f"#{i} {sorts}", Ten(Ten(p, r), t), Ten(p, Ten(r, t)))
    for i in range(per_law):
        k, l, m, u, v = (rng.randint(0, 1) for _ in range(5))
        n = rng.randint(0, 1)
        p, q, s_, t = s(k, l), s(l, m), s(n, u), s(u, v)
        chk.equiv("interchange", f"#{i} ({k},{l},{m})x({n},{u},{v})",
                  Seq(Ten(p, s_), Ten(q, t)), Ten(Seq(p, q), Seq(s_, t)))
    for i in range(per_law):
        (k, l), (m, n) = _small_sort(rng, 1), _small_sort(rng, 1)
        p, r = s(k, l), s(m, n)
        chk.equiv("twist-natural", f"#{i} ({k},{l}) ({m},{n})",
                  Seq(Ten(p, r), twist(l, n)), Seq(twist(k, m), Ten(r, p)))
    pairs = [(k, l) for k in range(3) for l in range(3)]
    for i in range(per_law):
        k, l = pairs[i % len(pairs)]
        chk.equiv("twist-involutive", f"#{i} ({k},{l})", Seq(twist(k, l), twist(l, k)), identity(k + l))


def snake_laws(chk: _Checker, n_max: int):
    chk.equiv("snake-1", "left", Seq(Ten(D, I), Ten(I, E)), I)
    chk.equiv("snake-1", "right", Seq(Ten(I, D), Ten(E, I)), I)
    for n in range(n_max + 1):
        dn, en, idn = dual_unit(n), dual_counit(n), identity(n)
        chk.equiv("snake-n", f"n={n} left", Seq(Ten(dn, idn), Ten(idn, en)), idn)
        chk.equiv("snake-n", f"n={n} right", Seq(Ten(idn, dn), Ten(en, idn)), idn)


def directed_snake_laws(chk: _Checker):
    for w in ("L", "R", "LR"):
        dw, ew, iw = dual_unit(w), dual_counit(w), identity(w)
        ibar = identity(overline(w)[::-1])
        chk.equiv("snake-directed", f"{w} left", Seq(Ten(dw, iw), Ten(iw, ew)), iw, directed=True)
        chk.equiv("snake-directed", f"{w} right", Seq(Ten(ibar, dw), Ten(ew, ibar)), ibar, directed=True)


def star_laws(chk: _Checker, rng: random.Random, n_terms: int, n_lts: int, depth: int = 3):
    from .lts import explore
    from .syntax import alpha_equal, star

    for i in range(n_terms):
        k, l = _small_sort(rng)
        p = _sample((k, l), depth, rng)
        chk.holds("star-involution", f"#{i} ({k},{l})", alpha_equal(star(star(p)), p), str(p))
    for i in range(n_lts):
        k, l = _small_sort(rng)
        p = _sample((k, l), min(depth, 2), rng)
        chk.terms.append((p, False))
        ok, detail = star_correspondence(p, chk.budget, chk.alphabet)
        chk.holds("star-lts", f"#{i} ({k},{l})", ok, detail)
    for i in range(max(1, n_lts // 4)):
        sort = Sort.words(_word(True, rng.randint(0, 2), rng), _word(True, rng.randint(0, 2), rng))
        p = next(generate_terms(sort, 2, rng.randrange(2**32)))
        chk.terms.append((p, True))
        ok, detail = star_correspondence(p, chk.budget, chk.alphabet, directed=True)
        chk.holds("star-lts-directed", f"#{i} {sort}", ok, detail)


def star_correspondence(p: Term, budget: int, alphabet, directed: bool = False) -> tuple[bool, str]:
    """Check that the LTS of star(P) is the label-reversed LTS of P under state-wise star."""
    from .lts import engine_limit, explore
    from .sos import Engine, normalize
    from .syntax import star

    eng = Engine(alphabet, directed, engine_limit(budget))
    a = explore(p, budget, alphabet, directed, engine=eng)
    b = explore(star(p), budget, alphabet, directed, engine=eng)
    if not (a.complete and b.complete):
        return False, "exploration incomplete"
    # map each state of P to the state of star(P) it should correspond to
    image = {}
    index_b = {st.key: j for j, st in enumerate(b.states)}
    for i, st in enumerate(a.states):
        key = eng.state(normalize(star(st.term)))
        if key not in index_b:
            return False, f"star of state {i} is not a state of star(P)"
        image[i] = index_b[key]
    if len(set(image.values())) != len(b.states):
        return False, "state counts differ"
    expect = {(image[s], _rev_label(lab), image[t]) for s, lab, t in a.transitions}
    got = set(b.transitions)
    if expect != got:
        return False, f"{len(expect ^ got)} transitions differ"
    return True, ""


def _rev_label(lab):
    from .sos import Label

    def rev(w):
        flip = {LEFT: RIGHT, RIGHT: LEFT}
        return tuple((v, flip.get(d, d)) for v, d in reversed(w))

    return Label(rev(lab[1]), rev(lab[0]))


def universality_laws(chk: _Checker, rng: random.Random, n: int, depth: int = 2):
    for i in range(n):
        k, l, m = (rng.randint(0, 2) for _ in range(3))
        while k + l + m > 4:
            k, l, m = (rng.randint(0, 2) for _ in range(3))
        p = _sample((k + l, m), depth, rng)
        chk.equiv("cur-eval", f"#{i} k={k} l={l} m={m}", Seq(Ten(cur(p, k, l), identity(l)), ev(l, m)), p)
        # Q satisfying the premise by construction: P' := Q*I_l ; ev
        q = _sample((k, m + l), depth, rng)
        p2 = Seq(Ten(q, identity(l)), ev(l, m))
        chk.equiv("cur-unique", f"#{i} k={k} l={l} m={m}", cur(p2, k, l), q)


def dualizer_laws(chk: _Checker, rng: random.Random, n: int, depth: int = 2):
    from .syntax import star

    for i in range(n):
        k, l = _small_sort(rng, 1)
        p = _sample((k, l), depth, rng)
        ps = star(p)
        chk.equiv("dualizer-unit", f"#{i} ({k},{l})",
                  Seq(dual_unit(k), Ten(p, identity(k))), Seq(dual_unit(l), Ten(identity(l), ps)))
        chk.equiv("dualizer-counit", f"#{i} ({k},{l})",
                  Seq(Ten(p, identity(l)), dual_counit(l)), Seq(Ten(identity(k), ps), dual_counit(k)))


def weak_strong_laws(chk: _Checker, rng: random.Random, n: int, depth: int = 3):
    from .equivalence import weak_equals_strong_check
    from .sos import BudgetExceeded

    for i in range(n):
        k, l = _small_sort(rng)
        p = _sample((k, l), depth, rng)
        try:
            ok = weak_equals_strong_check(p, chk.budget, chk.alphabet)
        except BudgetExceeded as err:
            chk.report.results.append(LawResult("weak-strong", f"#{i} ({k},{l})", INCONCLUSIVE, detail=str(err)))
            continue
        chk.holds("weak-strong", f"#{i} ({k},{l})", ok, str(p))


def congruence_laws(chk: _Checker, rng: random.Random, n: int, depth: int = 2):
    """Closure of bisimilarity under every operator, on pairs known to be bisimilar."""
    for i in range(n):
        k, l = _small_sort(rng, 1)
        p, q = bisimilar_pair((k, l), depth, rng)
        m = rng.randint(0, 1)
        s_ = _sample((l, m), depth, rng)
        t = _sample((m, k), depth, rng)
        r = _sample(_small_sort(rng, 1), depth, rng)
        alt = _sample((k, l), depth, rng)
        u, v = _random_closed_prefix(k, l, rng)
        tag = f"#{i} ({k},{l})"
        chk.equiv("congruence-seq-right", tag, Seq(p, s_), Seq(q, s_))
        chk.equiv("congruence-seq-left", tag, Seq(t, p), Seq(t, q))
        chk.equiv("congruence-ten", tag, Ten(p, r), Ten(q, r))
        chk.equiv("congruence-prefix", tag, Prefix(u, v, p), Prefix(u, v, q))
        chk.equiv("congruence-choice", tag, Choice(p, alt), Choice(q, alt))


def _random_closed_prefix(k: int, l: int, rng: random.Random):
    def atom():
        return rng.choice([iota(), sig("0"), sig("1")])

    return tuple(atom() for _ in range(k)), tuple(atom() for _ in range(l))


def bisimilar_pair(sort: tuple[int, int], depth: int, rng: random.Random) -> tuple[Term, Term]:
    """A pair ``P ~ Q``: an alpha-variant or a law-rewritten variant of a sample."""
    from .syntax import canonicalize

    k, l = sort
    p = _sample(sort, depth, rng)
    match rng.randrange(4):
        case 0:
            return p, canonicalize(p).term
        case 1:
            return p, Seq(identity(k), p)
        case 2:
            return p, Seq(p, identity(l))
        case _:
            return p, Seq(Ten(dual_unit(0), p), identity(l))


def law_suite(n_max: int = 3, budget: int = 10000, seed: int = 0, alphabet=("0", "1"),
              per_law: int = 10, samples: int = 10) -> LawReport:
    """Run every law family; each failing instance carries its counterexample."""
    rng = random.Random(seed)
    chk = _Checker(budget, alphabet)
    category_laws(chk, rng, per_law)
    snake_laws(chk, n_max)
    directed_snake_laws(chk)
    star_laws(chk, rng, samples, samples)
    universality_laws(chk, rng, samples)
    dualizer_laws(chk, rng, samples)
    weak_strong_laws(chk, rng, samples)
    congruence_laws(chk, rng, samples)
    chk.report.envelope = (f"seed={seed} budget={budget} n_max={n_max} sorts<=(2,2) "
                           f"per_law={per_law} samples={samples}")
    return chk.report


def take(it, n: int) -> list:
    return list(islice(it, n))
