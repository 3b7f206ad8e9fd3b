"""Independent reference computations used to cross-check the engine.

Nothing here calls the refinement code; rule sets are enumerated straight
from the displayed SOS rules of each constant.
"""

from itertools import product

from wirecalc.sos import format_label

VALUES = ("0", "1", "_")


def w(*atoms, d=""):
    return tuple((a, d) for a in atoms)


def rule_set(name):
    """Labels the constant's rules produce, as ``"upper/lower"`` strings."""
    match name:
        case "I":
            return {f"{a}/{a}" for a in VALUES}
        case "X":
            return {f"{a} {b}/{b} {a}" for a, b in product(VALUES, VALUES)}
        case "d":
            return {f"/{a} {a}" for a in VALUES}
        case "e":
            return {f"{a} {a}/" for a in VALUES}
        case "I_L":
            return {f"<{a}/<{a}" for a in VALUES}
        case "I_R":
            return {f"{a}>/{a}>" for a in VALUES}
        case "d_L":
            return {f"/<{a} {a}>" for a in VALUES}
        case "e_L":
            return {f"{a}> <{a}/" for a in VALUES}
    raise KeyError(name)


def flipflop_rules(i):
    """(label, stays) pairs: i/i stays, (1-i)/i flips, iota/iota stays."""
    j = 1 - i
    return {(f"{i}/{i}", True), (f"{j}/{i}", False), ("_/_", True)}


def labels(transitions):
    return {format_label(t.label) for t in transitions}


def naive_bisimulation(lts1, lts2):
    """Greatest bisimulation between two LTSs by deleting bad pairs until stable."""
    s1, s2 = lts1.successors(), lts2.successors()
    rel = {(i, j) for i in range(len(lts1.states)) for j in range(len(lts2.states))}
    changed = True
    while changed:
        changed = False
        for i, j in sorted(rel):
            fwd = all(any(l2 == lab and (i2, j2) in rel for l2, j2 in s2[j]) for lab, i2 in s1[i])
            bwd = all(any(l2 == lab and (i2, j2) in rel for l2, i2 in s1[i]) for lab, j2 in s2[j])
            if not (fwd and bwd):
                rel.discard((i, j))
                changed = True
    return rel


def naive_partition(lts):
    rel = naive_bisimulation(lts, lts)
    n = len(lts.states)
    return {frozenset(j for j in range(n) if (i, j) in rel) for i in range(n)}
