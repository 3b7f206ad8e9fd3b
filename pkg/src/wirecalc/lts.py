"""Bounded exploration of a term's saturated transition system, plus export."""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field

from .sorting import Sort
from .sos import DEFAULT_BUDGET, BudgetExceeded, Engine, Label, format_word, parse_word
from .syntax import Alphabet, CanonicalTerm, Term, WireError


class SchemaError(WireError):
    pass


@dataclass(frozen=True)
class Lts:
    states: tuple[CanonicalTerm, ...]
    initial: int
    transitions: frozenset[tuple[int, Label, int]]
    sort: Sort
    alphabet: Alphabet
    complete: bool = True
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def __len__(self):
        return len(self.states)

    def successors(self) -> dict[int, set[tuple[Label, int]]]:
        out: dict[int, set] = {i: set() for i in range(len(self.states))}
        for src, lab, dst in self.transitions:
            out[src].add((lab, dst))
        return out

    def sorted_transitions(self) -> list[tuple[int, Label, int]]:
        return sorted(self.transitions, key=lambda tr: (tr[0], format_word(tr[1][0]), format_word(tr[1][1]), tr[2]))


def engine_limit(budget: int) -> int:
    """Cap on states interned while deriving moves, subterm states included."""
    return max(10 * budget, 10 * DEFAULT_BUDGET)


def explore(t: Term | CanonicalTerm, budget: int = DEFAULT_BUDGET, alphabet=("0", "1"),
            directed: bool = False, engine: Engine | None = None) -> Lts:
    """Breadth-first closure of saturated transitions from ``t``.

    States are numbered in discovery order, visiting each state's moves
    sorted by label and then target key so numbering never depends on
    hash seeds.  If more than ``budget`` states
    would be needed the partial graph is returned with ``complete=False``.
    The engine's own limit on interned component states is looser (see
    :func:`engine_limit`) unless an engine is passed in.
    """
    if budget < 1:
        raise ValueError("budget must be positive")
    eng = engine if engine is not None else Engine(alphabet, directed, engine_limit(budget))
    keys: list[str] = []
    index: dict[str, int] = {}
    transitions: set = set()
    warnings: list[str] = []
    complete = True

    root = eng.state(t)
    index[root] = 0
    keys.append(root)
    queue = deque([root])
    try:
        while queue:
            key = queue.popleft()
            src = index[key]
            for lab, tgt in sorted(eng.moves(key)):
                if tgt not in index:
                    if len(keys) >= budget:
                        raise BudgetExceeded(budget)
                    index[tgt] = len(keys)
                    keys.append(tgt)
                    queue.append(tgt)
                transitions.add((src, Label(*lab), index[tgt]))
    except BudgetExceeded as err:
        complete = False
        warnings.append(str(err))
        # keep only the edges between listed states
        transitions = {tr for tr in transitions if tr[2] < len(keys)}

    states = tuple(eng.canonical(k) for k in keys)
    return Lts(states, 0, frozenset(transitions), eng.sort(root), eng.alphabet, complete, tuple(warnings))


def export_dot(lts: Lts) -> str:
    lines = ["digraph lts {", "  rankdir=LR;", f'  label="sort {lts.sort}";']
    for i, st in enumerate(lts.states):
        shape = "doublecircle" if i == lts.initial else "circle"
        tip = st.key.replace("\\", "\\\\").replace('"', '\\"')
        lines.append(f'  s{i} [label="{i}", shape={shape}, tooltip="{tip}"];')
    for src, lab, dst in lts.sorted_transitions():
        text = f"{format_word(lab[0])}/{format_word(lab[1])}".replace('"', '\\"')
        lines.append(f'  s{src} -> s{dst} [label="{text}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _sort_json(sort: Sort):
    if sort.directed:
        return {"left": sort.left, "right": sort.right, "directed": True}
    return {"left": sort.k, "right": sort.l, "directed": False}


def export_json(lts: Lts) -> str:
    """JSON with one state or transition per line, so goldens diff well."""
    def block(items) -> str:
        if not items:
            return "[]"
        return "[\n" + ",\n".join("  " + json.dumps(x, ensure_ascii=False) for x in items) + "\n ]"

    rows = [[src, format_word(lab[0]), format_word(lab[1]), dst] for src, lab, dst in lts.sorted_transitions()]
    fields = [
        ("sort", json.dumps(_sort_json(lts.sort))),
        ("alphabet", json.dumps(list(lts.alphabet.signals))),
        ("states", block([s.key for s in lts.states])),
        ("initial", json.dumps(lts.initial)),
        ("transitions", block(rows)),
        ("complete", json.dumps(lts.complete)),
    ]
    return "{\n" + ",\n".join(f' "{k}": {v}' for k, v in fields) + "\n}\n"


def import_json(text: str) -> Lts:
    """Rebuild an :class:`Lts` from :func:`export_json` output.

    Only state keys survive the round trip, so imported states carry no term.
    """
    try:
        doc = json.loads(text)
        raw_sort = doc["sort"]
        if raw_sort.get("directed"):
            sort = Sort.words(raw_sort["left"], raw_sort["right"])
        else:
            sort = Sort.arity(int(raw_sort["left"]), int(raw_sort["right"]))
        alphabet = Alphabet(tuple(doc["alphabet"]))
        keys = list(doc["states"])
        initial = int(doc["initial"])
        rows = doc["transitions"]
        complete = bool(doc["complete"])
    except (KeyError, TypeError, ValueError, WireError) as err:
        raise SchemaError(f"malformed LTS document: {err}") from None
    n = len(keys)
    if not 0 <= initial < n:
        raise SchemaError(f"initial state {initial} out of range")
    if len(set(keys)) != n:
        raise SchemaError("duplicate state keys")
    transitions = set()
    for row in rows:
        if not (isinstance(row, list) and len(row) == 4):
            raise SchemaError(f"transition must be [src, upper, lower, dst]: {row!r}")
        src, up, lo, dst = row
        if not (isinstance(src, int) and isinstance(dst, int) and 0 <= src < n and 0 <= dst < n):
            raise SchemaError(f"dangling state index in transition {row!r}")
        lab = Label(parse_word(up), parse_word(lo))
        if len(lab.upper) != sort.k or len(lab.lower) != sort.l:
            raise SchemaError(f"label {up}/{lo} does not fit sort {sort}")
        transitions.add((src, lab, dst))
    states = tuple(CanonicalTerm(k, None) for k in keys)
    return Lts(states, initial, frozenset(transitions), sort, alphabet, complete)
