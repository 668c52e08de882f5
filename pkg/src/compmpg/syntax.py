"""Game-level operations: composing open games into bigger open games.

The per-operation functions (:func:`seq_rightward`, :func:`sum_games`,
:func:`trace_game` and the bidirectional composites built from them) tag
positions as ``(0, q)`` / ``(1, q)`` so that the disjoint union is explicit.

:func:`flatten` folds a whole :class:`SharedDag` into one game. It uses its
own wiring pass with integer position ids so that it stays linear in the size
of the output; tests check it against the per-operation route.
"""

from __future__ import annotations

from .diagram import CONST_ARITY, InferredArity, SharedDag
from .errors import ArityMismatch
from .game import Arity, Entrance, Exit, OpenGame


def _game(left: Arity, right: Arity, role: dict, weight: dict, succ: dict) -> OpenGame:
    return OpenGame(left, right, role, weight, succ)


def identity_game(n: int) -> OpenGame:
    return _game(Arity(n), Arity(n), {}, {}, {Entrance(i): (Exit(i),) for i in range(n)})


def swap_game(a: int, b: int) -> OpenGame:
    """Crossing wires ``a + b -> b + a``."""
    succ = {Entrance(i): (Exit(b + i),) for i in range(a)}
    succ.update({Entrance(a + j): (Exit(j),) for j in range(b)})
    return _game(Arity(a + b), Arity(a + b), {}, {}, succ)


def _require_rightward(*games: OpenGame) -> None:
    for g in games:
        if not g.is_rightward:
            raise ArityMismatch("rightward game", f"{g.left}->{g.right}")


def _tag(k: int, q):
    return (k, q)


def seq_rightward(a: OpenGame, b: OpenGame) -> OpenGame:
    """``A ; B``: exits of ``A`` are plugged into the matching entrances of ``B``."""
    _require_rightward(a, b)
    if a.right.right != b.left.right:
        raise ArityMismatch(a.right.right, b.left.right)

    def through_a(t):
        if isinstance(t, Exit):
            return through_b(b.succ[Entrance(t.index)][0])
        return _tag(0, t)

    def through_b(t):
        return t if isinstance(t, Exit) else _tag(1, t)

    role = {_tag(0, q): r for q, r in a.role.items()}
    role.update({_tag(1, q): r for q, r in b.role.items()})
    weight = {_tag(0, q): w for q, w in a.weight.items()}
    weight.update({_tag(1, q): w for q, w in b.weight.items()})
    succ = {}
    for s, ts in a.succ.items():
        key = s if isinstance(s, Entrance) else _tag(0, s)
        succ[key] = tuple(through_a(t) for t in ts)
    for s, ts in b.succ.items():
        if not isinstance(s, Entrance):
            succ[_tag(1, s)] = tuple(through_b(t) for t in ts)
    return _game(a.left, b.right, role, weight, succ)


def sum_games(a: OpenGame, b: OpenGame) -> OpenGame:
    """``A ⊕ B`` placed side by side; ``B``'s open ends are shifted past ``A``'s."""
    _require_rightward(a, b)
    m, n = a.left.right, a.right.right

    def shift_b(x):
        if isinstance(x, Entrance):
            return Entrance(x.index + m)
        if isinstance(x, Exit):
            return Exit(x.index + n)
        return _tag(1, x)

    def keep_a(x):
        return x if isinstance(x, (Entrance, Exit)) else _tag(0, x)

    role = {_tag(0, q): r for q, r in a.role.items()}
    role.update({_tag(1, q): r for q, r in b.role.items()})
    weight = {_tag(0, q): w for q, w in a.weight.items()}
    weight.update({_tag(1, q): w for q, w in b.weight.items()})
    succ = {}
    for s, ts in a.succ.items():
        succ[keep_a(s)] = tuple(keep_a(t) for t in ts)
    for s, ts in b.succ.items():
        succ[shift_b(s)] = tuple(shift_b(t) for t in ts)
    # entrances first, in index order
    ents = sorted((s for s in succ if isinstance(s, Entrance)), key=lambda e: e.index)
    ordered = {e: succ[e] for e in ents}
    ordered.update({s: ts for s, ts in succ.items() if not isinstance(s, Entrance)})
    return _game(Arity(m + b.left.right), Arity(n + b.right.right), role, weight, ordered)


def trace_game(l: int, a: OpenGame) -> OpenGame:
    """``tr^l(A)``: the first ``l`` exits are fed back into the first ``l`` entrances.

    An edge into a loop exit is extended through the chain of loop wires it
    enters; chains that close up without meeting a position are dropped.
    """
    _require_rightward(a)
    if a.left.right < l or a.right.right < l:
        raise ArityMismatch(f">= {l}", f"{a.left}->{a.right}")

    def resolve(t):
        seen = set()
        while isinstance(t, Exit) and t.index < l:
            if t.index in seen:
                return None
            seen.add(t.index)
            t = a.succ[Entrance(t.index)][0]
        if isinstance(t, Exit):
            return Exit(t.index - l)
        return t

    succ = {}
    for s, ts in a.succ.items():
        if isinstance(s, Entrance):
            if s.index < l:
                continue
            s = Entrance(s.index - l)
        out = []
        for t in ts:
            r = resolve(t)
            if r is not None and r not in out:
                out.append(r)
        succ[s] = tuple(out)
    return _game(Arity(a.left.right - l), Arity(a.right.right - l), dict(a.role), dict(a.weight), succ)


def _present(g: OpenGame, left: Arity, right: Arity) -> OpenGame:
    return _game(left, right, g.role, g.weight, g.succ)


def seq_bidirectional(a: OpenGame, b: OpenGame) -> OpenGame:
    """``A ; B`` for bidirectional games, via the Int composite of rightward operations."""
    if a.right != b.left:
        raise ArityMismatch(str(a.right), str(b.left))
    m_r, m_l = a.left.right, a.left.left
    l_r, l_l = a.right.right, a.right.left
    n_r, n_l = b.right.right, b.right.left
    A, B = a.as_rightward(), b.as_rightward()
    ident = identity_game
    h = sum_games(swap_game(l_l, m_r), ident(n_l))
    h = seq_rightward(h, sum_games(A, ident(n_l)))
    h = seq_rightward(h, sum_games(ident(l_r), swap_game(m_l, n_l)))
    h = seq_rightward(h, sum_games(B, ident(m_l)))
    h = seq_rightward(h, sum_games(swap_game(n_r, l_l), ident(m_l)))
    return _present(trace_game(l_l, h), a.left, b.right)


def sum_bidirectional(a: OpenGame, b: OpenGame) -> OpenGame:
    """``A ⊕ B`` for bidirectional games, via the Int composite of rightward operations."""
    m_r, m_l = a.left.right, a.left.left
    n_r, n_l = a.right.right, a.right.left
    k_r, k_l = b.left.right, b.left.left
    l_r, l_l = b.right.right, b.right.left
    A, B = a.as_rightward(), b.as_rightward()
    ident = identity_game
    h = sum_games(swap_game(m_r, k_r), swap_game(l_l, n_l))
    h = seq_rightward(h, sum_games(sum_games(ident(k_r), A), ident(l_l)))
    h = seq_rightward(h, sum_games(swap_game(k_r, n_r), swap_game(m_l, l_l)))
    h = seq_rightward(h, sum_games(sum_games(ident(n_r), B), ident(m_l)))
    return _present(h, Arity(m_r + k_r, k_l + m_l), Arity(n_r + l_r, l_l + n_l))


# Underlying rightward wiring of each constant: entrance i goes to exit CONST_WIRING[kind][i].
CONST_WIRING = {
    "id_r": (0,),
    "id_l": (0,),
    "swap_rr": (1, 0),
    "swap_ll": (1, 0),
    "swap_rl": (0, 1),
    "swap_lr": (0, 1),
    "cup": (0,),
    "cap": (0,),
}


def constant_game(kind: str) -> OpenGame:
    ar = CONST_ARITY[kind]
    succ = {Entrance(i): (Exit(j),) for i, j in enumerate(CONST_WIRING[kind])}
    return _game(ar.left, ar.right, {}, {}, succ)


def seq_game(a: OpenGame, b: OpenGame) -> OpenGame:
    if a.is_rightward and b.is_rightward:
        return seq_rightward(a, b)
    return seq_bidirectional(a, b)


def sum_game(a: OpenGame, b: OpenGame) -> OpenGame:
    if a.is_rightward and b.is_rightward:
        return sum_games(a, b)
    return sum_bidirectional(a, b)


def flatten_by_operations(dag: SharedDag) -> OpenGame:
    """Fold the DAG with the per-operation functions (tagged positions)."""
    memo: dict[int, OpenGame] = {}
    for k in dag.reachable():
        nd = dag.nodes[k]
        if nd.kind == "leaf":
            memo[k] = nd.game
        elif nd.kind == "const":
            memo[k] = constant_game(nd.const)
        elif nd.kind == "seq":
            memo[k] = seq_game(memo[nd.children[0]], memo[nd.children[1]])
        elif nd.kind == "sum":
            memo[k] = sum_game(memo[nd.children[0]], memo[nd.children[1]])
        else:
            memo[k] = trace_game(nd.loops, memo[nd.children[0]])
    return memo[dag.root]


# ----------------------------------------------------------------- flatten

class _Wiring:
    """Global position table plus wire nodes joining the open ends of instances.

    Targets are encoded as ints: ``p >= 0`` is position ``p``, ``-1 - w`` is
    wire ``w``. A wire is an exit of some instance; plugging it into the
    entrance of another instance records where it leads.
    """

    def __init__(self):
        self.role: list = []
        self.weight: list = []
        self.succ: list = []
        self.wire_next: list = []

    def new_wire(self) -> int:
        self.wire_next.append(None)
        return -1 - (len(self.wire_next) - 1)

    def link(self, wire: int, target: int) -> None:
        self.wire_next[-1 - wire] = target

    def instantiate(self, g: OpenGame) -> tuple[list, list]:
        exits = [self.new_wire() for _ in range(g.n_exits)]
        base = len(self.role)
        ids = {}
        for k, q in enumerate(g.role):
            ids[q] = base + k
            self.role.append(g.role[q])
            self.weight.append(g.weight[q])
            self.succ.append(())

        def enc(t):
            return exits[t.index] if isinstance(t, Exit) else ids[t]

        entr = [None] * g.n_entrances
        for s, ts in g.succ.items():
            if isinstance(s, Entrance):
                entr[s.index] = enc(ts[0])
            else:
                self.succ[ids[s]] = tuple(enc(t) for t in ts)
        return entr, exits

    def constant(self, kind: str) -> tuple[list, list]:
        wiring = CONST_WIRING[kind]
        exits = [self.new_wire() for _ in wiring]
        return [exits[j] for j in wiring], exits


def flatten(dag: SharedDag, names: bool = False) -> OpenGame:
    """One monolithic game equivalent to the whole diagram.

    Shared nodes are instantiated once per use. Positions are numbered
    ``0..N-1`` in instantiation order (or named ``q0..`` with ``names``).
    """
    w = _Wiring()
    memo_count: dict = {}

    def build(k: int):
        nd = dag.nodes[k]
        memo_count[k] = memo_count.get(k, 0) + 1
        if nd.kind == "leaf":
            return w.instantiate(nd.game)
        if nd.kind == "const":
            return w.constant(nd.const)
        if nd.kind == "trace":
            entr, exits = build(nd.children[0])
            l = nd.loops
            for j in range(l):
                w.link(exits[j], entr[j])
            return entr[l:], exits[l:]
        a_ar, b_ar = dag.nodes[nd.children[0]].arity, dag.nodes[nd.children[1]].arity
        ae, ax = build(nd.children[0])
        be, bx = build(nd.children[1])
        if nd.kind == "seq":
            m_r, l_r, n_r = a_ar.left.right, a_ar.right.right, b_ar.right.right
            for j in range(l_r):
                w.link(ax[j], be[j])
            for k2 in range(a_ar.right.left):
                w.link(bx[n_r + k2], ae[m_r + k2])
            return ae[:m_r] + be[l_r:], bx[:n_r] + ax[l_r:]
        # sum
        m_r, n_r = a_ar.left.right, a_ar.right.right
        k_r, l_r = b_ar.left.right, b_ar.right.right
        return (ae[:m_r] + be[:k_r] + be[k_r:] + ae[m_r:],
                ax[:n_r] + bx[:l_r] + bx[l_r:] + ax[n_r:])

    entr, exits = build(dag.root)
    exit_of_wire = {-1 - x: j for j, x in enumerate(exits)}
    resolved: dict[int, object] = {}

    def resolve(t: int):
        if t >= 0:
            return t
        start = -1 - t
        if start in resolved:
            return resolved[start]
        path = []
        cur = start
        visiting = set()
        while True:
            if cur in resolved:
                res = resolved[cur]
                break
            if cur in visiting:
                res = None  # a closed loop of bare wires
                break
            visiting.add(cur)
            path.append(cur)
            nxt = w.wire_next[cur]
            if nxt is None:
                res = Exit(exit_of_wire[cur])
                break
            if nxt >= 0:
                res = nxt
                break
            cur = -1 - nxt
        for c in path:
            resolved[c] = res
        return res

    name = (lambda p: f"q{p}") if names else (lambda p: p)

    def out(t):
        r = resolve(t)
        if r is None or isinstance(r, Exit):
            return r
        return name(r)

    ar = dag.arity
    succ: dict = {}
    for i, t in enumerate(entr):
        succ[Entrance(i)] = (out(t),)
    role, weight = {}, {}
    for p in range(len(w.role)):
        q = name(p)
        role[q] = w.role[p]
        weight[q] = w.weight[p]
        succ[q] = tuple(x for x in (out(t) for t in w.succ[p]) if x is not None)
    return OpenGame(ar.left, ar.right, role, weight, succ)


def arity_of(g: OpenGame) -> InferredArity:
    return InferredArity(g.left, g.right)
