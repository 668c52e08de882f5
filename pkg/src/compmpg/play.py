"""The play semantic category: arrows ``[m] -> T([n])`` and their operations.

An arrow fixes both players' strategies, so each entrance has exactly one
outcome. Sequential composition is Kleisli composition for the play monad,
sum is coproduct, and trace follows loop wires until the play leaves or
settles into a cycle whose weight decides the winner.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import ArityMismatch, NonProductiveCycle, RealizabilityViolation
from .game import RoPG, play_denotation
from .tvalue import WIN_A, WIN_E, TValue, Weighted, bind, exit_of, format_tvalue, is_winner


class PlayArrow:
    """An arrow ``m -> n``: ``values[i]`` is the outcome from entrance ``i``."""

    __slots__ = ("cod", "values", "_hash")

    def __init__(self, cod: int, values: Sequence[TValue]):
        self.cod = cod
        self.values = tuple(values)
        self._hash = hash((cod, self.values))

    @property
    def dom(self) -> int:
        return len(self.values)

    def __call__(self, i: int) -> TValue:
        return self.values[i]

    def __eq__(self, other) -> bool:
        if not isinstance(other, PlayArrow):
            return NotImplemented
        return self._hash == other._hash and self.cod == other.cod and self.values == other.values

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        body = ", ".join(format_tvalue(v) for v in self.values)
        return f"PlayArrow({self.dom}->{self.cod}: [{body}])"


def is_realizable(f: PlayArrow) -> bool:
    """No plainly reached exit is reached from any other entrance."""
    plain = set()
    hits: dict[int, int] = {}
    for v in f.values:
        j = exit_of(v)
        if j is None:
            continue
        if isinstance(v, int):
            if j in plain:
                return False
            plain.add(j)
        hits[j] = hits.get(j, 0) + 1
    return all(hits[j] == 1 for j in plain)


def check_realizable(f: PlayArrow) -> PlayArrow:
    if not is_realizable(f):
        raise RealizabilityViolation(f"arrow violates realizability: {f!r}")
    return f


def check_range(f: PlayArrow) -> None:
    for v in f.values:
        j = exit_of(v)
        if j is not None and not 0 <= j < f.cod:
            raise ValueError(f"exit {j} outside codomain {f.cod}")


def identity_arrow(n: int) -> PlayArrow:
    return PlayArrow(n, range(n))


def swap_arrow(a: int, b: int) -> PlayArrow:
    """The symmetry ``a + b -> b + a``."""
    return PlayArrow(a + b, [b + i for i in range(a)] + list(range(b)))


def empty_arrow() -> PlayArrow:
    return PlayArrow(0, ())


def shift(v: TValue, k: int) -> TValue:
    if isinstance(v, Weighted):
        return Weighted(v.weight, v.exit + k)
    if isinstance(v, int):
        return v + k
    return v


def remap(v: TValue, table: Sequence[int]) -> TValue:
    if isinstance(v, Weighted):
        return Weighted(v.weight, table[v.exit])
    if isinstance(v, int):
        return table[v]
    return v


def seq_play(f: PlayArrow, g: PlayArrow, check: bool = False) -> PlayArrow:
    if f.cod != g.dom:
        raise ArityMismatch(f.cod, g.dom)
    gv = g.values.__getitem__
    out = PlayArrow(g.cod, [bind(v, gv) for v in f.values])
    return check_realizable(out) if check else out


def sum_play(f: PlayArrow, g: PlayArrow) -> PlayArrow:
    n = f.cod
    return PlayArrow(n + g.cod, f.values + tuple(shift(v, n) for v in g.values))


def sum_plays(arrows: Iterable[PlayArrow]) -> PlayArrow:
    out = empty_arrow()
    for a in arrows:
        out = sum_play(out, a)
    return out


# --------------------------------------------------------------------- trace

@dataclass(frozen=True)
class TDP:
    """A semantic traced denotation of plays.

    ``steps[0]`` is the entrance index in ``[m]``; later elements are raw
    values of the traced arrow over ``[l + n]``. When ``cycle`` is set the
    sequence continues with ``cycle`` repeated forever.
    """

    loops: int
    steps: tuple
    cycle: tuple | None = None


def semantic_tdp(f: PlayArrow, l: int, i: int) -> TDP:
    steps: list = [i]
    seen: dict[int, int] = {}
    v = f.values[l + i]
    while True:
        steps.append(v)
        j = exit_of(v)
        if j is None or j >= l:
            return TDP(l, tuple(steps))
        k = seen.get(j)
        if k is not None:
            prefix, cycle = steps[:k + 1], steps[k + 1:]
            # rotate to the shortest lasso describing the same sequence
            while len(prefix) > 1 and prefix[-1] == cycle[-1]:
                cycle = [prefix.pop()] + cycle[:-1]
            if not any(isinstance(x, Weighted) for x in cycle):
                raise NonProductiveCycle(f"loop wires {sorted(seen)} form a cycle without weights")
            return TDP(l, tuple(prefix), tuple(cycle))
        seen[j] = len(steps) - 1
        v = f.values[j]


def _wt(v) -> object:
    return v.weight if isinstance(v, Weighted) else 0


def tdp_denotation(t: TDP) -> TValue:
    if t.cycle is not None:
        return WIN_E if sum(_wt(v) for v in t.cycle) >= 0 else WIN_A
    last = t.steps[-1]
    if is_winner(last):
        return last
    body = t.steps[1:]
    j = exit_of(last) - t.loops
    if not any(isinstance(v, Weighted) for v in body):
        return j
    return Weighted(sum(_wt(v) for v in body), j)


def trace_play(l: int, f: PlayArrow, check: bool = False) -> PlayArrow:
    """``tr^l(f)`` for ``f : l + m -> l + n``."""
    m, n = f.dom - l, f.cod - l
    if m < 0 or n < 0:
        raise ArityMismatch(l, (f.dom, f.cod), f"cannot trace {l} wires of a {f.dom}->{f.cod} arrow")
    if l == 0:
        return f
    vals = f.values
    out = []
    for i in range(m):
        v = vals[l + i]
        acc = 0
        weighted = 0  # number of weighted steps so far
        seen: dict[int, tuple] = {}
        while True:
            if isinstance(v, Weighted):
                acc += v.weight
                weighted += 1
                j = v.exit
            elif isinstance(v, int):
                j = v
            else:
                out.append(v)
                break
            if j >= l:
                out.append(Weighted(acc, j - l) if weighted else j - l)
                break
            prev = seen.get(j)
            if prev is not None:
                if prev[1] == weighted:
                    raise NonProductiveCycle(f"loop wire {j + 1} closes a cycle without weights")
                out.append(WIN_E if acc - prev[0] >= 0 else WIN_A)
                break
            seen[j] = (acc, weighted)
            v = vals[j]
    res = PlayArrow(n, out)
    return check_realizable(res) if check else res


def trace_play_via_tdp(l: int, f: PlayArrow) -> PlayArrow:
    """Reference implementation going through explicit TDP sequences."""
    return PlayArrow(f.cod - l, [tdp_denotation(semantic_tdp(f, l, i)) for i in range(f.dom - l)])


# ------------------------------------------------------ denotation of roPGs

def ropg_denotation(pg: RoPG) -> PlayArrow:
    return PlayArrow(pg.n_exits, [play_denotation(pg, i) for i in range(pg.n_entrances)])


# ------------------------------------------------ bidirectional (Int) level

def int_seq_play(f: PlayArrow, g: PlayArrow, m_r: int, l_r: int, l_l: int, n_r: int) -> PlayArrow:
    """Compose Int arrows ``f : (m_r,m_l) -> (l_r,l_l)`` and ``g : (l_r,l_l) -> (n_r,n_l)``.

    Both are given through their underlying arrows ``m_r+l_l -> l_r+m_l`` and
    ``l_r+n_l -> n_r+l_l``. The middle wires are joined into one arrow on
    ``l_l + m_r + n_l`` whose first ``l_l`` wires are then traced.
    """
    m_l = f.cod - l_r
    n_l = g.dom - l_r
    # targets of the joined arrow: [l_l loops | n_r | m_l]
    f_tab = [None] * f.cod
    for k in range(m_l):
        f_tab[l_r + k] = l_l + n_r + k
    g_tab = [l_l + y for y in range(n_r)] + list(range(l_l))
    gv = g.values

    def through_g(y):
        return remap(gv[y], g_tab)

    def cont_f(y):
        return through_g(y) if y < l_r else f_tab[y]

    fv = f.values
    vals = [bind(fv[m_r + k], cont_f) for k in range(l_l)]
    vals += [bind(fv[i], cont_f) for i in range(m_r)]
    vals += [through_g(l_r + j) for j in range(n_l)]
    return trace_play(l_l, PlayArrow(l_l + n_r + m_l, vals))


def int_sum_play(f: PlayArrow, g: PlayArrow, m_r: int, n_r: int, k_r: int, l_r: int) -> PlayArrow:
    """Sum of Int arrows ``f : (m_r,m_l) -> (n_r,n_l)`` and ``g : (k_r,k_l) -> (l_r,l_l)``."""
    n_l = f.dom - m_r
    m_l = f.cod - n_r
    l_l = g.dom - k_r
    k_l = g.cod - l_r
    f_tab = list(range(n_r)) + [n_r + l_r + k_l + k for k in range(m_l)]
    g_tab = [n_r + y for y in range(l_r)] + [n_r + l_r + k for k in range(k_l)]
    fv, gv = f.values, g.values
    vals = [remap(fv[i], f_tab) for i in range(m_r)]
    vals += [remap(gv[i], g_tab) for i in range(k_r)]
    vals += [remap(gv[k_r + j], g_tab) for j in range(l_l)]
    vals += [remap(fv[m_r + j], f_tab) for j in range(n_l)]
    return PlayArrow(n_r + l_r + k_l + m_l, vals)


def int_seq_play_literal(f: PlayArrow, g: PlayArrow, m_r: int, l_r: int, l_l: int, n_r: int) -> PlayArrow:
    """The same composite spelled out with swaps, identities, sums and trace."""
    m_l = f.cod - l_r
    n_l = g.dom - l_r
    ident = identity_arrow
    h = sum_play(swap_arrow(l_l, m_r), ident(n_l))
    h = seq_play(h, sum_play(f, ident(n_l)))
    h = seq_play(h, sum_play(ident(l_r), swap_arrow(m_l, n_l)))
    h = seq_play(h, sum_play(g, ident(m_l)))
    h = seq_play(h, sum_play(swap_arrow(n_r, l_l), ident(m_l)))
    return trace_play(l_l, h)


def int_sum_play_literal(f: PlayArrow, g: PlayArrow, m_r: int, n_r: int, k_r: int, l_r: int) -> PlayArrow:
    n_l = f.dom - m_r
    m_l = f.cod - n_r
    l_l = g.dom - k_r
    ident = identity_arrow
    h = sum_play(swap_arrow(m_r, k_r), swap_arrow(l_l, n_l))
    h = seq_play(h, sum_plays([ident(k_r), f, ident(l_l)]))
    h = seq_play(h, sum_play(swap_arrow(k_r, n_r), swap_arrow(m_l, l_l)))
    h = seq_play(h, sum_plays([ident(n_r), g, ident(m_l)]))
    return h
