"""Directed wires: direction maps and the directed prefix rule.

A directed label atom is a pair ``(value, 'L' | 'R')``.  Pattern atoms carry
``?`` (input, direction ``L``) or ``!`` (output, direction ``R``).  A prefix
``u/v.P`` fires with upper label ``overline(e_s(u))`` and lower label
``e_s(v)``: the left boundary sees every atom with its direction switched.
"""

from __future__ import annotations

from typing import Mapping

from .sorting import LEFT, RIGHT, overline
from .syntax import INPUT, IOTA, OUTPUT, PatternAtom, Term, subst_signals

__all__ = [
    "direction", "direction_word", "overline", "overline_label", "evaluate",
    "directed_prefix_fire", "erase_directions",
]


def direction(a: PatternAtom) -> str:
    if a.dir == INPUT:
        return LEFT
    if a.dir == OUTPUT:
        return RIGHT
    raise ValueError(f"pattern atom {a} has no direction marker")


def direction_word(word) -> str:
    return "".join(direction(a) for a in word)


def overline_label(word: tuple) -> tuple:
    """Switch the direction of every directed label atom."""
    return tuple((value, RIGHT if d == LEFT else LEFT) for value, d in word)


def evaluate(word, sigma: Mapping[str, str]) -> tuple:
    """``e_sigma``: a closed directed pattern word to a word of directed label atoms."""
    out = []
    for a in word:
        match a.kind:
            case "bind":
                value = sigma[a.name]
            case "sig":
                value = a.name
            case "iota":
                value = IOTA
            case _:
                raise ValueError(f"free signal variable {a.name} in a fired prefix")
        out.append((value, direction(a)))
    return tuple(out)


def directed_prefix_fire(u, v, body: Term, sigma: Mapping[str, str]):
    """One instance of the directed prefix rule: ``(upper, lower, continuation)``."""
    upper = overline_label(evaluate(u, sigma))
    lower = evaluate(v, sigma)
    return upper, lower, subst_signals(body, sigma)


def erase_directions(label) -> tuple:
    """Drop directions from a directed label, giving an undirected one."""
    upper, lower = label
    return tuple((value, "") for value, _ in upper), tuple((value, "") for value, _ in lower)

