"""Meager semantics: the dominance order on play arrows and antichain pruning.

``f <= g`` means ``f`` is at least as good for ∃ as ``g`` at every entrance:
W∃ is the bottom, W∀ the top, and between them only weighted outcomes at the
same exit are comparable (more weight is better for ∃, hence smaller). Inner
sets keep ∀'s undominated responses (maximal elements), outer sets keep ∃'s
undominated strategies (minimal elements under the lifted order).
"""

from __future__ import annotations

from typing import Callable, Iterable

from .errors import ArityMismatch, EmptyInput
from .game import OpenGame
from .play import PlayArrow
from .semantics import (
    DEFAULT_LEAF_LIMIT,
    Denotation,
    compose_int,
    leaf_sets,
    seq_fat,
    sum_fat,
    sum_int,
    trace_fat,
)
from .diagram import InferredArity
from .tvalue import WIN_A, WIN_E, Weighted


def leq_value(a, b) -> bool:
    if a == b or a == WIN_E or b == WIN_A:
        return True
    return (isinstance(a, Weighted) and isinstance(b, Weighted)
            and a.exit == b.exit and a.weight >= b.weight)


def leq_play(f: PlayArrow, g: PlayArrow) -> bool:
    if f.dom != g.dom or f.cod != g.cod:
        raise ArityMismatch((f.dom, f.cod), (g.dom, g.cod))
    if f is g:
        return True
    for a, b in zip(f.values, g.values):
        if a == b or a == WIN_E or b == WIN_A:
            continue
        if (type(a) is Weighted and type(b) is Weighted
                and a.exit == b.exit and a.weight >= b.weight):
            continue
        return False
    return True


def leq_lifted(S: Iterable[PlayArrow], T: Iterable[PlayArrow]) -> bool:
    """Hoare order on antichains: every element of ``S`` lies below some element of ``T``."""
    T = list(T)
    return all(any(leq_play(s, t) for t in T) for s in S)


def _select_top(items: Iterable, leq: Callable) -> list:
    """Elements of ``items`` not strictly below another element."""
    kept: list = []
    for x in items:
        if any(leq(x, y) for y in kept):
            continue  # x is below (or equal to) a kept element
        kept = [y for y in kept if not leq(y, x)]
        kept.append(x)
    return kept


def maximal(S: Iterable[PlayArrow]) -> frozenset:
    S = set(S)
    if not S:
        raise EmptyInput("maximal of an empty set")
    return frozenset(_select_top(S, leq_play))


def minimal(S: Iterable[frozenset]) -> frozenset:
    S = set(S)
    if not S:
        raise EmptyInput("minimal of an empty set")
    return frozenset(_select_top(S, lambda x, y: leq_lifted(y, x)))


def minimal_arrows(S: Iterable[PlayArrow]) -> frozenset:
    S = set(S)
    if not S:
        raise EmptyInput("minimal of an empty set")
    return frozenset(_select_top(S, lambda x, y: leq_play(y, x)))


def is_antichain(S: Iterable, leq: Callable = leq_play) -> bool:
    S = list(S)
    return all(not leq(x, y) for i, x in enumerate(S) for j, y in enumerate(S) if i != j)


def prune_sets(sets: Iterable[frozenset]) -> frozenset:
    return minimal(maximal(s) for s in sets)


def fat_to_meager(F: Denotation) -> Denotation:
    return Denotation(F.arity, prune_sets(F.sets), True)


def _as_meager(F: Denotation) -> Denotation:
    return F if F.meager else fat_to_meager(F)


def denote_leaf_meager(game: OpenGame, leaf_limit: int = DEFAULT_LEAF_LIMIT) -> Denotation:
    """Leaf denotation pruned while it is enumerated."""
    sets = minimal(leaf_sets(game, leaf_limit, inner_prune=maximal))
    return Denotation(InferredArity(game.left, game.right), sets, True)


def seq_meager(F: Denotation, G: Denotation) -> Denotation:
    return seq_fat(_as_meager(F), _as_meager(G))


def sum_meager(F: Denotation, G: Denotation) -> Denotation:
    return sum_fat(_as_meager(F), _as_meager(G))


def trace_meager(l: int, F: Denotation) -> Denotation:
    return trace_fat(l, _as_meager(F))


def compose_int_meager(F: Denotation, G: Denotation) -> Denotation:
    return compose_int(_as_meager(F), _as_meager(G))


def sum_int_meager(F: Denotation, G: Denotation) -> Denotation:
    return sum_int(_as_meager(F), _as_meager(G))
