"""Monolithic baseline solvers for closed games (no exits).

``brute_force_solve`` enumerates memoryless strategy pairs directly.
``progress_measure_solve`` is the classic energy-game value iteration: for a
position ``v`` it computes the least initial credit with which ∃ can keep the
running weight sum non-negative forever, or ⊤ when no credit suffices. ∃ wins
the mean payoff objective from ``v`` exactly when that credit is finite.
"""

from __future__ import annotations

import itertools
import math
import time
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import CompMPGError, GameTooLargeForBruteForce
from .game import Entrance, Exit, OpenGame, Role
from .semantics import Status

DEFAULT_BRUTE_LIMIT = 14


def _require_closed(g: OpenGame) -> None:
    if g.n_exits:
        raise CompMPGError(f"oracle needs a closed game, this one has {g.n_exits} exits")


def _reachable(g: OpenGame, start) -> list:
    seen = {start}
    order = [start]
    stack = [start]
    while stack:
        p = stack.pop()
        for t in g.succ[p]:
            if t not in seen:
                seen.add(t)
                order.append(t)
                stack.append(t)
    return order


def _winner_of_walk(g: OpenGame, start, choice: dict) -> bool:
    """True iff the play from ``start`` under ``choice`` is won by ∃."""
    seen: dict = {}
    path: list = []
    t = start
    while True:
        k = seen.get(t)
        if k is not None:
            return sum(g.weight[q] for q in path[k:]) >= 0
        seen[t] = len(path)
        path.append(t)
        ts = g.succ[t]
        if not ts:
            return g.role[t] == Role.FORALL
        t = ts[0] if len(ts) == 1 else choice[t]


def brute_force_solve(g: OpenGame, i: int = 0, limit: int = DEFAULT_BRUTE_LIMIT) -> Status:
    """Winning iff some ∃-strategy wins against every ∀-strategy."""
    _require_closed(g)
    if len(g.role) > limit:
        raise GameTooLargeForBruteForce(f"{len(g.role)} positions exceed the brute-force limit {limit}")
    start = g.succ[Entrance(i)][0]
    reach = _reachable(g, start)
    ex = [p for p in reach if g.role[p] == Role.EXISTS and len(g.succ[p]) > 1]
    fa = [p for p in reach if g.role[p] == Role.FORALL and len(g.succ[p]) > 1]
    fa_options = [g.succ[p] for p in fa]
    for picks in itertools.product(*(g.succ[p] for p in ex)):
        choice = dict(zip(ex, picks))
        ok = True
        for fpicks in itertools.product(*fa_options):
            choice.update(zip(fa, fpicks))
            if not _winner_of_walk(g, start, choice):
                ok = False
                break
        if ok:
            return Status.WINNING
    return Status.LOSING


@dataclass
class PMResult:
    status: dict  # entrance index -> Status
    scale: int = 1
    lifts: int = 0
    wall_ms: float = 0.0
    completed: bool = True
    measure: list = field(default_factory=list, repr=False)


class BudgetExceeded(Exception):
    pass


def progress_measure_solve(g: OpenGame, budget_s: float | None = None) -> PMResult:
    """Energy progress measure by worklist lifting.

    Rational weights are multiplied by the least common denominator first.
    With ``budget_s`` the computation stops early and ``completed`` is False.
    """
    _require_closed(g)
    t0 = time.perf_counter()
    pos = list(g.role)
    idx = {p: k for k, p in enumerate(pos)}
    n = len(pos)
    scale = 1
    for p in pos:
        w = g.weight[p]
        if isinstance(w, Fraction):
            scale = math.lcm(scale, w.denominator)
    weight = [int(g.weight[p] * scale) for p in pos]
    is_e = [g.role[p] == Role.EXISTS for p in pos]
    succ = [[idx[t] for t in g.succ[p] if not isinstance(t, Exit)] for p in pos]
    preds: list[list[int]] = [[] for _ in range(n)]
    for v in range(n):
        for u in succ[v]:
            preds[u].append(v)
    top = sum(-w for w in weight if w < 0)
    TOP = top + 1  # any value above ``top`` stands for ⊤

    f = [0] * n
    for v in range(n):
        if not succ[v] and is_e[v]:
            f[v] = TOP

    def value(v: int) -> int:
        ss = succ[v]
        if not ss:
            return f[v]
        w = weight[v]
        best = None
        for u in ss:
            fu = f[u]
            c = TOP if fu >= TOP else max(0, fu - w)
            if c > top:
                c = TOP
            if best is None or (c < best if is_e[v] else c > best):
                best = c
        return best

    queue = deque(range(n))
    queued = [True] * n
    lifts = 0
    completed = True
    while queue:
        v = queue.popleft()
        queued[v] = False
        nv = value(v)
        if nv > f[v]:
            f[v] = nv
            lifts += 1
            for u in preds[v]:
                if not queued[u] and f[u] < TOP:
                    queued[u] = True
                    queue.append(u)
            if budget_s is not None and lifts % 4096 == 0 and time.perf_counter() - t0 > budget_s:
                completed = False
                break
    status = {}
    if completed:
        for i in range(g.n_entrances):
            t = g.succ[Entrance(i)][0]
            status[i] = Status.WINNING if f[idx[t]] < TOP else Status.LOSING
    return PMResult(status, scale, lifts, (time.perf_counter() - t0) * 1000, completed, f)
