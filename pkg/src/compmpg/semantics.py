"""Strategy-level semantics: sets of sets of play arrows and the winning-position functor.

A denotation of an arrow ``(m_r, m_l) -> (n_r, n_l)`` is stored through its
underlying rightward interface ``m_r + n_l -> n_r + m_l``. The outer set is
indexed by ∃-strategies and each inner set by ∀-responses.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable

from .diagram import CONST_ARITY, InferredArity, SharedDag
from .errors import ArityMismatch, LeafTooLarge
from .game import Arity, Entrance, Exit, OpenGame, Role
from .play import (
    PlayArrow,
    int_seq_play,
    int_sum_play,
    seq_play,
    sum_play,
    trace_play,
)
from .syntax import CONST_WIRING
from .tvalue import WIN_A, WIN_E, Weighted, sort_key, tvalue_to_json

DEFAULT_LEAF_LIMIT = 20

ArrowSet = frozenset  # frozenset[PlayArrow]


class Status(str, Enum):
    WINNING = "winning"
    LOSING = "losing"
    PENDING = "pending"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Denotation:
    arity: InferredArity
    sets: frozenset  # frozenset[frozenset[PlayArrow]]
    meager: bool = False

    @property
    def dom(self) -> int:
        return self.arity.left.right + self.arity.right.left

    @property
    def cod(self) -> int:
        return self.arity.right.right + self.arity.left.left

    def outer_size(self) -> int:
        return len(self.sets)

    def max_inner_size(self) -> int:
        return max((len(s) for s in self.sets), default=0)

    def with_sets(self, sets: Iterable, meager: bool | None = None) -> "Denotation":
        return Denotation(self.arity, frozenset(sets), self.meager if meager is None else meager)

    def projection(self, i: int) -> list[list]:
        """The per-entrance double set ``⟦i⟧`` in canonical order."""
        proj = {frozenset(f.values[i] for f in s) for s in self.sets}
        return sorted((sorted(p, key=sort_key) for p in proj), key=lambda p: [sort_key(v) for v in p])

    def canonical(self) -> list[list[PlayArrow]]:
        def key(f):
            return [sort_key(v) for v in f.values]

        inner = [sorted(s, key=key) for s in self.sets]
        return sorted(inner, key=lambda s: [key(f) for f in s])


def arrow_sort_key(f: PlayArrow):
    return [sort_key(v) for v in f.values]


# ---------------------------------------------------------------- leaves

def choice_points(game: OpenGame, owner: Role) -> list:
    return [p for p, r in game.role.items() if r == owner and len(game.succ[p]) > 1]


def _leaf_arrow(game: OpenGame, choice: dict) -> PlayArrow:
    """Play arrow of the roPG induced by a joint choice map (fast path)."""
    succ, weight, role = game.succ, game.weight, game.role
    out = []
    for i in range(game.n_entrances):
        t = succ[Entrance(i)][0]
        if isinstance(t, Exit):
            out.append(t.index)
            continue
        acc = 0
        seen: dict = {}
        path: list = []
        while True:
            if isinstance(t, Exit):
                out.append(Weighted(acc, t.index))
                break
            k = seen.get(t)
            if k is not None:
                cyc = sum(weight[q] for q in path[k:])
                out.append(WIN_E if cyc >= 0 else WIN_A)
                break
            seen[t] = len(path)
            path.append(t)
            acc += weight[t]
            ts = succ[t]
            if len(ts) == 1:
                t = ts[0]
            elif ts:
                t = choice[t]
            else:
                out.append(WIN_E if role[t] == Role.FORALL else WIN_A)
                break
    return PlayArrow(game.n_exits, out)


def leaf_sets(game: OpenGame, leaf_limit: int = DEFAULT_LEAF_LIMIT,
              inner_prune: Callable | None = None) -> Iterable[frozenset]:
    """One inner set per ∃-strategy (strategies with equal effect may repeat)."""
    ex = choice_points(game, Role.EXISTS)
    fa = choice_points(game, Role.FORALL)
    if len(ex) + len(fa) > leaf_limit:
        raise LeafTooLarge(
            f"leaf has {len(ex) + len(fa)} choice positions (limit {leaf_limit}); "
            f"split it into smaller components or raise --leaf-limit")
    fa_choices = [dict(zip(fa, picks)) for picks in itertools.product(*(game.succ[p] for p in fa))]
    for picks in itertools.product(*(game.succ[p] for p in ex)):
        base = dict(zip(ex, picks))
        inner = set()
        for fc in fa_choices:
            choice = dict(base)
            choice.update(fc)
            inner.add(_leaf_arrow(game, choice))
        inner = frozenset(inner)
        yield inner_prune(inner) if inner_prune else inner


def denote_leaf(game: OpenGame, leaf_limit: int = DEFAULT_LEAF_LIMIT) -> Denotation:
    """``{{W(A|τ∃,τ∀) | τ∀} | τ∃}`` with set semantics."""
    return Denotation(InferredArity(game.left, game.right), frozenset(leaf_sets(game, leaf_limit)))


def constant_arrow(kind: str) -> PlayArrow:
    wiring = CONST_WIRING[kind]
    return PlayArrow(len(wiring), wiring)


def denote_constant(kind: str, meager: bool = False) -> Denotation:
    return Denotation(CONST_ARITY[kind], frozenset({frozenset({constant_arrow(kind)})}), meager)


def identity_denotation(a: Arity, meager: bool = False) -> Denotation:
    n = a.right + a.left
    return Denotation(InferredArity(a, a), frozenset({frozenset({PlayArrow(n, range(n))})}), meager)


# ------------------------------------------------------- elementwise lifting

def lift2(F: frozenset, G: frozenset, op: Callable, inner_prune=None, outer_prune=None) -> frozenset:
    cache: dict = {}
    outer = set()
    for Fp in F:
        for Gp in G:
            inner = set()
            for f in Fp:
                for g in Gp:
                    key = (f, g)
                    r = cache.get(key)
                    if r is None:
                        r = cache[key] = op(f, g)
                    inner.add(r)
            inner = frozenset(inner)
            outer.add(inner_prune(inner) if inner_prune else inner)
    return outer_prune(outer) if outer_prune else frozenset(outer)


def lift1(F: frozenset, op: Callable, inner_prune=None, outer_prune=None) -> frozenset:
    cache: dict = {}
    outer = set()
    for Fp in F:
        inner = set()
        for f in Fp:
            r = cache.get(f)
            if r is None:
                r = cache[f] = op(f)
            inner.add(r)
        inner = frozenset(inner)
        outer.add(inner_prune(inner) if inner_prune else inner)
    return outer_prune(outer) if outer_prune else frozenset(outer)


def _pruners(meager: bool):
    if not meager:
        return None, None
    from .meager import maximal, minimal
    return maximal, minimal


def seq_fat(F: Denotation, G: Denotation) -> Denotation:
    """Rightward ``F ; G`` elementwise."""
    if F.arity.right != G.arity.left:
        raise ArityMismatch(str(F.arity.right), str(G.arity.left))
    ip, op = _pruners(F.meager)
    sets = lift2(F.sets, G.sets, seq_play, ip, op)
    return Denotation(InferredArity(F.arity.left, G.arity.right), sets, F.meager)


def sum_fat(F: Denotation, G: Denotation) -> Denotation:
    """Rightward ``F ⊕ G`` elementwise."""
    ip, op = _pruners(F.meager)
    sets = lift2(F.sets, G.sets, sum_play, ip, op)
    ar = InferredArity(Arity(F.arity.left.right + G.arity.left.right),
                       Arity(F.arity.right.right + G.arity.right.right))
    return Denotation(ar, sets, F.meager)


def trace_fat(l: int, F: Denotation) -> Denotation:
    if l == 0:
        return F
    ar = F.arity
    if ar.left.right < l or ar.right.right < l:
        raise ArityMismatch(f">= {l}", str(ar))
    ip, op = _pruners(F.meager)
    sets = lift1(F.sets, lambda f: trace_play(l, f), ip, op)
    return Denotation(InferredArity(Arity(ar.left.right - l), Arity(ar.right.right - l)), sets, F.meager)


def compose_int(F: Denotation, G: Denotation) -> Denotation:
    """Bidirectional ``F ; G`` (the Int composite, computed arrow by arrow)."""
    if F.arity.right != G.arity.left:
        raise ArityMismatch(str(F.arity.right), str(G.arity.left))
    m_r = F.arity.left.right
    l_r, l_l = F.arity.right.right, F.arity.right.left
    n_r = G.arity.right.right
    ip, op = _pruners(F.meager)

    def comp(f, g):
        return int_seq_play(f, g, m_r, l_r, l_l, n_r)

    sets = lift2(F.sets, G.sets, comp, ip, op)
    return Denotation(InferredArity(F.arity.left, G.arity.right), sets, F.meager)


def sum_int(F: Denotation, G: Denotation) -> Denotation:
    """Bidirectional ``F ⊕ G``."""
    m_r, n_r = F.arity.left.right, F.arity.right.right
    k_r, l_r = G.arity.left.right, G.arity.right.right
    ip, op = _pruners(F.meager)

    def comp(f, g):
        return int_sum_play(f, g, m_r, n_r, k_r, l_r)

    sets = lift2(F.sets, G.sets, comp, ip, op)
    from .diagram import sum_arity
    return Denotation(sum_arity(F.arity, G.arity), sets, F.meager)


# ------------------------------------------------------------ classification

def classify_projection(proj: Iterable[Iterable]) -> Status:
    proj = [set(p) for p in proj]
    if any(p == {WIN_E} for p in proj):
        return Status.WINNING
    if all(WIN_A in p for p in proj):
        return Status.LOSING
    return Status.PENDING


def classify_entrance(F: Denotation, i: int) -> Status:
    """Winning iff some ∃-strategy forces W∃ against every response; losing iff
    every ∃-strategy admits a response reaching W∀; pending otherwise."""
    if not 0 <= i < F.dom:
        raise IndexError(f"entrance {i + 1} outside 1..{F.dom}")
    return classify_projection({f.values[i] for f in s} for s in F.sets)


def classify_all(F: Denotation) -> list[Status]:
    return [classify_entrance(F, i) for i in range(F.dom)]


# ----------------------------------------------------------------- evaluate

@dataclass
class EvalStats:
    leaf_evaluations: int = 0
    node_evaluations: int = 0
    max_outer: int = 0
    max_inner: int = 0
    wall_ms: float = 0.0
    per_node: dict = field(default_factory=dict)

    def record(self, k: int, d: Denotation) -> None:
        self.node_evaluations += 1
        self.max_outer = max(self.max_outer, d.outer_size())
        self.max_inner = max(self.max_inner, d.max_inner_size())
        self.per_node[k] = (d.outer_size(), d.max_inner_size())

    def to_json(self) -> dict:
        return {
            "wall_ms": round(self.wall_ms, 3),
            "leaf_evaluations": self.leaf_evaluations,
            "node_evaluations": self.node_evaluations,
            "max_outer_size": self.max_outer,
            "max_inner_size": self.max_inner,
        }


def evaluate(dag: SharedDag, mode: str = "meager", leaf_limit: int = DEFAULT_LEAF_LIMIT,
             stats: EvalStats | None = None) -> Denotation:
    """Bottom-up fold of the DAG; every node is evaluated once."""
    if mode not in ("fat", "meager"):
        raise ValueError(f"unknown semantics {mode!r}")
    meager = mode == "meager"
    if meager:
        from .meager import denote_leaf_meager
    stats = stats if stats is not None else EvalStats()
    t0 = time.perf_counter()
    memo: dict[int, Denotation] = {}
    for k in dag.reachable():
        nd = dag.nodes[k]
        if nd.kind == "leaf":
            stats.leaf_evaluations += 1
            d = denote_leaf_meager(nd.game, leaf_limit) if meager else denote_leaf(nd.game, leaf_limit)
        elif nd.kind == "const":
            d = denote_constant(nd.const, meager)
        elif nd.kind == "seq":
            d = compose_int(memo[nd.children[0]], memo[nd.children[1]])
        elif nd.kind == "sum":
            d = sum_int(memo[nd.children[0]], memo[nd.children[1]])
        else:
            d = trace_fat(nd.loops, memo[nd.children[0]])
        memo[k] = d
        stats.record(k, d)
    stats.wall_ms = (time.perf_counter() - t0) * 1000
    return memo[dag.root]


def result_json(F: Denotation, winners_only: bool = False) -> list[dict]:
    out = []
    for i in range(F.dom):
        entry = {"entrance": i + 1, "status": classify_entrance(F, i).value}
        if not winners_only:
            entry["denotation"] = [[tvalue_to_json(v) for v in p] for p in F.projection(i)]
        out.append(entry)
    return out
