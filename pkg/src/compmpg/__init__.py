"""Compositional solving of open mean payoff games given as string diagrams."""

from __future__ import annotations

from .diagram import load, parse, print_term
from .errors import CompMPGError
from .game import Arity, Entrance, Exit, OpenGame, Role, make_game, validate_game
from .oracle import brute_force_solve, progress_measure_solve
from .semantics import Denotation, Status, classify_all, classify_entrance, evaluate
from .syntax import flatten
from .tvalue import WIN_A, WIN_E, Weighted

__all__ = [
    "Arity", "CompMPGError", "Denotation", "Entrance", "Exit", "OpenGame", "Role", "Status",
    "WIN_A", "WIN_E", "Weighted", "brute_force_solve", "classify_all", "classify_entrance",
    "evaluate", "flatten", "load", "make_game", "parse", "print_term", "progress_measure_solve",
    "validate_game",
]
