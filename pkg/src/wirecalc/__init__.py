"""An interpreter and equivalence checker for the wire calculus."""

from .equivalence import Partition, Verdict, bisimilar, refine, weak_equals_strong_check
from .lts import Lts, explore, export_dot, export_json, import_json
from .parser import ParseError, Program, parse_program, parse_term
from .sorting import Sort, SortError, infer
from .sos import BudgetExceeded, Engine, Label, base_transitions, fire, saturated_transitions
from .stdlib import build, cur, ev, generate_terms, law_suite, zero
from .syntax import Alphabet, CanonicalTerm, WireError, alpha_equal, canonicalize, star

__all__ = [
    "Alphabet", "BudgetExceeded", "CanonicalTerm", "Engine", "Label", "Lts", "ParseError",
    "Partition", "Program", "Sort", "SortError", "Verdict", "WireError", "alpha_equal",
    "base_transitions", "bisimilar", "build", "canonicalize", "cur", "ev", "explore",
    "export_dot", "export_json", "fire", "generate_terms", "import_json", "infer", "law_suite",
    "parse_program", "parse_term", "refine", "saturated_transitions", "star",
    "weak_equals_strong_check", "zero",
]
