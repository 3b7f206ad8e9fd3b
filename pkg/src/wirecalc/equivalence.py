"""Strong bisimilarity of explored components by partition refinement."""

from __future__ import annotations

import json
from dataclasses import dataclass

from .lts import Lts, engine_limit, explore
from .sos import DEFAULT_BUDGET, BudgetExceeded, Engine, Label, format_label, is_silent
from .syntax import Term, WireError


class SortMismatch(WireError):
    pass


class IncompleteLts(WireError):
    pass


@dataclass(frozen=True)
class Partition:
    blocks: tuple[frozenset[int], ...]
    block_of: tuple[int, ...]

    @classmethod
    def from_ids(cls, ids) -> Partition:
        groups: dict[int, set] = {}
        for s, b in enumerate(ids):
            groups.setdefault(b, set()).add(s)
        # renumber blocks by smallest member so equal partitions compare equal
        ordered = sorted(groups.values(), key=min)
        block_of = [0] * len(ids)
        for i, members in enumerate(ordered):
            for s in members:
                block_of[s] = i
        return cls(tuple(frozenset(m) for m in ordered), tuple(block_of))

    def __len__(self):
        return len(self.blocks)

    def same(self, a: int, b: int) -> bool:
        return self.block_of[a] == self.block_of[b]


def _refine_rounds(succ: list[list[tuple]]) -> list[list[int]]:
    """Signature refinement; returns the block ids after each round.

    Round 0 is the trivial partition.  Round r separates states that some
    label distinguishes in r steps.
    """
    n = len(succ)
    ids = [0] * n
    history = [ids]
    count = 1 if n else 0
    while True:
        table: dict = {}
        new = []
        for s in range(n):
            sig = (ids[s], frozenset((lab, ids[t]) for lab, t in succ[s]))
            new.append(table.setdefault(sig, len(table)))
        history.append(new)
        if len(table) == count:
            return history
        ids, count = new, len(table)


def _succ_lists(lts: Lts) -> list[list[tuple]]:
    out: list[list] = [[] for _ in lts.states]
    for src, lab, dst in lts.transitions:
        out[src].append((lab, dst))
    return out


def refine(lts: Lts) -> Partition:
    """Coarsest partition of ``lts`` stable under every label."""
    if not lts.complete:
        raise IncompleteLts("refusing to refine an incomplete exploration")
    return Partition.from_ids(_refine_rounds(_succ_lists(lts))[-1])


@dataclass(frozen=True)
class Step:
    label: Label
    direction: str      # side that moves first: "left" or "right"
    pair: tuple[int, int]

    def to_dict(self) -> dict:
        return {"label": format_label(self.label), "direction": self.direction, "pair": list(self.pair)}


@dataclass(frozen=True)
class Verdict:
    bisimilar: bool
    left: Lts
    right: Lts
    witness: frozenset[tuple[int, int]] | None = None
    counterexample: tuple[Step, ...] | None = None

    def counterexample_json(self) -> list | None:
        if self.counterexample is None:
            return None
        return [s.to_dict() for s in self.counterexample]

    def to_json(self) -> str:
        doc: dict = {"bisimilar": self.bisimilar}
        if self.bisimilar:
            doc["witness"] = [list(p) for p in sorted(self.witness)]
        else:
            doc["counterexample"] = self.counterexample_json()
        return json.dumps(doc) + "\n"

    def to_text(self) -> str:
        if self.bisimilar:
            return f"bisimilar (witness relates {len(self.witness)} state pairs)\n"
        lines = ["not bisimilar"]
        for i, st in enumerate(self.counterexample):
            lines.append(f"  {i + 1}. {st.direction} plays {format_label(st.label)}"
                         + (f" -> states {st.pair[0]}, {st.pair[1]}" if st.pair[0] >= 0 and st.pair[1] >= 0
                            else " and the other side cannot answer"))
        return "\n".join(lines) + "\n"


def _label_order(lab: Label) -> str:
    # signals before iota, so the attacker prefers observable moves
    return format_label(lab).replace("_", "~")


def _distinguish(history, succ, a: int, b: int, n_left: int) -> list[Step]:
    """A trace on which ``a`` and ``b`` (union indices) part company."""
    steps: list[Step] = []
    while True:
        r = next(i for i in range(1, len(history)) if history[i][a] != history[i][b])
        prev = history[r - 1]
        moves_a = {(lab, prev[t]) for lab, t in succ[a]}
        moves_b = {(lab, prev[t]) for lab, t in succ[b]}
        only_a = moves_a - moves_b
        if only_a:
            attacker, defender, pick = a, b, only_a
        else:
            attacker, defender, pick = b, a, moves_b - moves_a
        lab, blk = min(pick, key=lambda m: (_label_order(m[0]), m[1]))
        side = "left" if attacker < n_left else "right"
        nxt_a = next(t for l2, t in sorted(succ[attacker], key=lambda m: m[1]) if l2 == lab and prev[t] == blk)
        answers = [t for l2, t in succ[defender] if l2 == lab]
        if not answers:
            steps.append(Step(lab, side, (-1, -1)))
            return steps
        # follow the answer that is separated soonest
        nxt_d = min(answers, key=lambda t: (next(i for i in range(len(history)) if history[i][t] != history[i][nxt_a]), t))
        left_state, right_state = (nxt_a, nxt_d) if attacker < n_left else (nxt_d, nxt_a)
        steps.append(Step(lab, side, (left_state, right_state - n_left)))
        a, b = nxt_a, nxt_d


def compare(left: Lts, right: Lts) -> Verdict:
    """Bisimilarity of the initial states of two complete explorations."""
    if left.sort != right.sort:
        raise SortMismatch(f"cannot compare components of sorts {left.sort} and {right.sort}")
    if not (left.complete and right.complete):
        raise IncompleteLts("refusing to answer on an incomplete exploration")
    n = len(left.states)
    succ = _succ_lists(left) + [[(lab, t + n) for lab, t in row] for row in _succ_lists(right)]
    history = _refine_rounds(succ)
    final = history[-1]
    a, b = left.initial, right.initial + n
    if final[a] == final[b]:
        witness = frozenset((i, j) for i in range(n) for j in range(len(right.states)) if final[i] == final[j + n])
        return Verdict(True, left, right, witness=witness)
    steps = _distinguish(history, succ, a, b, n)
    return Verdict(False, left, right, counterexample=tuple(steps))


def bisimilar(t1: Term, t2: Term, budget: int = DEFAULT_BUDGET, alphabet=("0", "1"),
              directed: bool = False) -> Verdict:
    """Decide ``t1 ~ t2``.  Raises :class:`BudgetExceeded` rather than guess."""
    from .sorting import infer

    s1, s2 = infer(t1, directed=directed), infer(t2, directed=directed)
    if s1 != s2:
        raise SortMismatch(f"cannot compare terms of sorts {s1} and {s2}")
    eng = Engine(alphabet, directed, engine_limit(budget))
    left = explore(t1, budget, alphabet, directed, engine=eng)
    if not left.complete:
        raise BudgetExceeded(budget)
    right = explore(t2, budget, alphabet, directed, engine=eng)
    if not right.complete:
        raise BudgetExceeded(budget)
    return compare(left, right)


def check_witness(v: Verdict) -> bool:
    """Transfer property of the witness, checked directly on both LTSs."""
    if not v.bisimilar:
        return False
    rel = v.witness
    if (v.left.initial, v.right.initial) not in rel:
        return False
    ls, rs = v.left.successors(), v.right.successors()
    for i, j in rel:
        for lab, i2 in ls[i]:
            if not any(l2 == lab and (i2, j2) in rel for l2, j2 in rs[j]):
                return False
        for lab, j2 in rs[j]:
            if not any(l2 == lab and (i2, j2) in rel for l2, i2 in ls[i]):
                return False
    return True


def replay_counterexample(v: Verdict) -> bool:
    """Follow the trace; True iff it ends where the attacker's label has no answer."""
    if v.bisimilar or not v.counterexample:
        return False
    ls, rs = v.left.successors(), v.right.successors()
    i, j = v.left.initial, v.right.initial
    for step in v.counterexample:
        att, dfn = (ls[i], rs[j]) if step.direction == "left" else (rs[j], ls[i])
        if not any(lab == step.label for lab, _ in att):
            return False
        if step is v.counterexample[-1]:
            return not any(lab == step.label for lab, _ in dfn)
        i2, j2 = step.pair
        if (step.label, i2) not in ls[i] or (step.label, j2) not in rs[j]:
            return False
        i, j = i2, j2
    return False


def weak_closure(lts: Lts) -> list[set]:
    """Successor sets of the weak relation: iota* a/b iota*, with iota* for silent labels."""
    succ = lts.successors()
    n = len(lts.states)
    silent = [{t for lab, t in succ[s] if is_silent(lab)} | {s} for s in range(n)]
    reach = []
    for s in range(n):
        seen, todo = {s}, [s]
        while todo:
            for t in silent[todo.pop()]:
                if t not in seen:
                    seen.add(t)
                    todo.append(t)
        reach.append(seen)
    from .sos import silent_label

    tau = silent_label(lts.sort)
    out = []
    for s in range(n):
        moves = {(tau, t) for t in reach[s]}
        for x in reach[s]:
            for lab, y in succ[x]:
                if not is_silent(lab):
                    moves.update((lab, z) for z in reach[y])
        out.append(moves)
    return out


def weak_equals_strong_check(t: Term, budget: int = DEFAULT_BUDGET, alphabet=("0", "1"),
                             directed: bool = False) -> bool:
    """True iff weak and strong bisimilarity induce the same partition of t's LTS."""
    lts = explore(t, budget, alphabet, directed)
    if not lts.complete:
        raise BudgetExceeded(budget)
    strong = Partition.from_ids(_refine_rounds(_succ_lists(lts))[-1])
    weak = Partition.from_ids(_refine_rounds([sorted(m) for m in weak_closure(lts)])[-1])
    return strong == weak
