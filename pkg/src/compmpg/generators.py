"""Seeded generators for random games, random diagrams and the benchmark families.

Every generator is a deterministic function of its ``random.Random`` state or
seed and its parameters.

Leaf games are sampled Erdős-Rényi style: each position gets one random
successor plus extra successors with a fixed probability, roles and weights
are uniform, and exits receive at most one predecessor.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .diagram import (
    CONST_ARITY,
    CONSTANTS,
    Const,
    InferredArity,
    Leaf,
    Let,
    Seq,
    Sum,
    Term,
    Trace,
    Var,
    print_term,
    resolve_sharing,
    sum_arity,
)
from .game import Arity, Entrance, Exit, OpenGame, RawGame, Role, validate_game

SMALL_WEIGHTS = (-5, 5)
BENCH_WEIGHTS = (-100000, 100000)


def random_open_game(
    rng: random.Random,
    left: Arity,
    right: Arity,
    n_positions: int,
    weight_range: tuple[int, int] = SMALL_WEIGHTS,
    extra_edge_prob: float = 0.35,
    max_choices: int | None = None,
    stuck_prob: float = 0.0,
    connect_exits: float = 0.8,
    passthrough_prob: float = 0.1,
    prefix: str = "q",
) -> OpenGame:
    """A random valid open game with the given interface.

    ``connect_exits`` is the probability that an exit gets a predecessor.
    ``max_choices`` caps the number of positions with two or more successors.
    """
    n_ent = left.right + right.left
    n_exit = right.right + left.left
    pos = [f"{prefix}{k}" for k in range(n_positions)]
    if not pos and n_ent > n_exit:
        raise ValueError("a game without positions needs at least as many exits as entrances")
    role = {p: rng.choice((Role.EXISTS, Role.FORALL)) for p in pos}
    lo, hi = weight_range
    weight = {p: rng.randint(lo, hi) for p in pos}
    succ: dict = {p: [] for p in pos}
    ent_target: dict[int, object] = {}

    exits = list(range(n_exit))
    rng.shuffle(exits)
    free_ents = list(range(n_ent))
    rng.shuffle(free_ents)
    for j in exits:
        if not pos:
            if free_ents:
                ent_target[free_ents.pop()] = Exit(j)
            continue
        if rng.random() >= connect_exits:
            continue
        if free_ents and rng.random() < passthrough_prob:
            ent_target[free_ents.pop()] = Exit(j)
        else:
            succ[rng.choice(pos)].append(Exit(j))
    for i in range(n_ent):
        if i not in ent_target:
            ent_target[i] = rng.choice(pos)

    choices = 0
    for p in pos:
        if not succ[p] and rng.random() < stuck_prob:
            continue
        if not succ[p]:
            succ[p].append(rng.choice(pos))
        want_more = rng.random() < extra_edge_prob
        if want_more and (max_choices is None or choices < max_choices):
            q = rng.choice(pos)
            if q not in succ[p]:
                succ[p].append(q)
        if len(succ[p]) > 1:
            choices += 1
    # a position may have received an exit edge and a position edge already;
    # enforce the cap on those too by dropping extra position successors
    if max_choices is not None:
        over = [p for p in pos if len(succ[p]) > 1][max_choices:]
        for p in over:
            keep = [t for t in succ[p] if isinstance(t, Exit)] or succ[p][:1]
            succ[p] = keep[:1] if len(keep) == 1 else keep
    edges = [(Entrance(i), ent_target[i]) for i in range(n_ent)]
    edges += [(p, t) for p in pos for t in succ[p]]
    return validate_game(RawGame(left, right, pos, role, weight, edges))


def random_ropg(rng: random.Random, m: int, n: int, n_positions: int,
                weight_range: tuple[int, int] = SMALL_WEIGHTS, stuck_prob: float = 0.1,
                passthrough_prob: float = 0.15) -> OpenGame:
    """A random rightward open play graph (at most one successor everywhere)."""
    pos = [f"q{k}" for k in range(n_positions)]
    lo, hi = weight_range
    role = {p: rng.choice((Role.EXISTS, Role.FORALL)) for p in pos}
    weight = {p: rng.randint(lo, hi) for p in pos}
    succ: dict = {}
    ent: dict = {}
    free = pos[:]
    rng.shuffle(free)
    ents = list(range(m))
    rng.shuffle(ents)
    for j in rng.sample(range(n), n):
        if ents and (not pos or rng.random() < passthrough_prob):
            ent[ents.pop()] = Exit(j)
        elif free and rng.random() < 0.8:
            succ[free.pop()] = Exit(j)
    if not pos and ents:
        raise ValueError("a play graph without positions needs an exit for every entrance")
    for p in pos:
        if p not in succ and rng.random() >= stuck_prob:
            succ[p] = rng.choice(pos)
    for i in ents:
        ent[i] = rng.choice(pos)
    edges = [(Entrance(i), ent[i]) for i in range(m)] + list(succ.items())
    return validate_game(RawGame(Arity(m), Arity(n), pos, role, weight, edges))


def random_strategy_pair(rng: random.Random, game: OpenGame):
    from .game import Strategy
    ex, fa = {}, {}
    for p, r in game.role.items():
        if game.succ[p]:
            (ex if r == Role.EXISTS else fa)[p] = rng.choice(game.succ[p])
    return Strategy(Role.EXISTS, ex), Strategy(Role.FORALL, fa)


# ------------------------------------------------------------ random diagrams

@dataclass
class DiagramGen:
    """Random well-typed diagram terms of a requested arity.

    ``budget`` bounds the positions in each leaf and roughly the whole term;
    callers that need a hard bound check the flattened size afterwards.
    """

    rng: random.Random
    weight_range: tuple[int, int] = SMALL_WEIGHTS
    max_wires: int = 2
    stuck_prob: float = 0.05
    share_prob: float = 0.25
    _fresh: int = 0

    def fresh(self) -> str:
        self._fresh += 1
        return f"t{self._fresh}"

    def leaf(self, ar: InferredArity, budget: int) -> Term:
        n_ent = ar.left.right + ar.right.left
        n_exit = ar.right.right + ar.left.left
        lo = 0 if n_ent <= n_exit and self.rng.random() < 0.15 else 1
        n = self.rng.randint(lo, max(lo, min(budget, 4)))
        g = random_open_game(self.rng, ar.left, ar.right, n, self.weight_range,
                             stuck_prob=self.stuck_prob)
        return Leaf(g)

    def arity(self) -> Arity:
        return Arity(self.rng.randint(0, self.max_wires), self.rng.randint(0, self.max_wires))

    def term(self, ar: InferredArity, budget: int, depth: int = 0) -> Term:
        rng = self.rng
        consts = [k for k, a in CONST_ARITY.items() if a == ar]
        if consts and rng.random() < 0.2:
            return Const(rng.choice(consts))
        n_ent = ar.left.right + ar.right.left
        n_exit = ar.right.right + ar.left.left
        if budget <= 1 or depth >= 4 or rng.random() < 0.3:
            if budget <= 0 and n_ent <= n_exit:
                return self.leaf(ar, 0)
            return self.leaf(ar, max(1, budget))
        kind = rng.choice(("seq", "seq", "sum", "trace", "share", "const"))
        if kind == "const":
            # route the wires through a randomly chosen constant
            c = rng.choice(CONSTANTS)
            ca = CONST_ARITY[c]
            k = rng.randint(0, budget)
            pre = self.term(InferredArity(ar.left, ca.left), k, depth + 1)
            post = self.term(InferredArity(ca.right, ar.right), budget - k, depth + 1)
            return Seq(pre, Seq(Const(c), post))
        if kind == "trace" and ar.is_rightward:
            l = rng.randint(1, 2)
            body = InferredArity(Arity(ar.left.right + l), Arity(ar.right.right + l))
            return Trace(l, self.term(body, budget, depth + 1))
        if kind == "sum" and (n_ent + n_exit) > 0:
            a, b = self._split(ar)
            k = rng.randint(0, budget)
            return Sum(self.term(a, k, depth + 1), self.term(b, budget - k, depth + 1))
        if kind == "share" and budget >= 2:
            mid = InferredArity(ar.left, ar.left)
            name = self.fresh()
            shared = self.term(mid, max(1, budget // 4), depth + 1)
            rest = self.term(InferredArity(ar.left, ar.right), budget // 2, depth + 1)
            return Let(name, shared, Seq(Var(name), Seq(Var(name), rest) if rng.random() < 0.3 else rest))
        mid = self.arity()
        k = rng.randint(0, budget)
        return Seq(self.term(InferredArity(ar.left, mid), k, depth + 1),
                   self.term(InferredArity(mid, ar.right), budget - k, depth + 1))

    def _split(self, ar: InferredArity) -> tuple[InferredArity, InferredArity]:
        rng = self.rng
        m_r = rng.randint(0, ar.left.right)
        k_l = rng.randint(0, ar.left.left)
        n_r = rng.randint(0, ar.right.right)
        l_l = rng.randint(0, ar.right.left)
        a = InferredArity(Arity(m_r, ar.left.left - k_l), Arity(n_r, ar.right.left - l_l))
        b = InferredArity(Arity(ar.left.right - m_r, k_l), Arity(ar.right.right - n_r, l_l))
        assert sum_arity(a, b) == ar
        return a, b


CLOSED = InferredArity(Arity(1, 0), Arity(0, 0))


def random_closed_diagram(rng: random.Random, max_positions: int = 12,
                          weight_range: tuple[int, int] = SMALL_WEIGHTS,
                          arity: InferredArity = CLOSED) -> Term:
    """A random diagram of the given arity with at most ``max_positions`` positions once flattened."""
    while True:
        gen = DiagramGen(rng, weight_range)
        t = gen.term(arity, rng.randint(max(1, max_positions // 2), max_positions))
        n_pos, _ = resolve_sharing(t).flat_size()
        if 1 <= n_pos <= max_positions:
            return t


# ------------------------------------------------------- benchmark families

def _leaf_text(g: OpenGame) -> str:
    return print_term(Leaf(g))


def mining_floor(rng: random.Random, k: int, n_positions: int, weight_range, max_choices: int) -> OpenGame:
    """One floor ``(k,k) -> (k,k)`` of the mining cave.

    The floor has ``k`` downward shafts (from the floor above to the floor
    below) and ``k`` upward shafts, each a chain of positions, plus small
    pockets: cycles without exits. Choice positions are sprinkled on the
    shafts; each offers one extra move: into a pocket, back up the shaft
    (closing a cycle), or, on a downward shaft, across to an upward one.
    Roles and weights are uniform.
    """
    lo, hi = weight_range
    n = max(n_positions, 4 * k)
    shaft_total = max(4 * k, (n * 3) // 5)
    shaft_len = max(2, shaft_total // (2 * k))
    pos: list[str] = []
    succ: dict = {}

    def new_pos() -> str:
        p = f"v{len(pos)}"
        pos.append(p)
        succ[p] = []
        return p

    down = [[new_pos() for _ in range(shaft_len)] for _ in range(k)]
    up = [[new_pos() for _ in range(shaft_len)] for _ in range(k)]
    for j, shaft in enumerate(down):
        for a, b in zip(shaft, shaft[1:]):
            succ[a].append(b)
        succ[shaft[-1]].append(Exit(j))          # rhs.r(j+1)
    for j, shaft in enumerate(up):
        for a, b in zip(shaft, shaft[1:]):
            succ[a].append(b)
        succ[shaft[-1]].append(Exit(k + j))      # lhs.l(j+1)
    pockets = []
    while len(pos) < n:
        size = min(rng.randint(2, 4), n - len(pos))
        cyc = [new_pos() for _ in range(size)]
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            succ[a].append(b)
        pockets.append(cyc)
    shaft_positions = [(p, "down", j, i) for j, s in enumerate(down) for i, p in enumerate(s)]
    shaft_positions += [(p, "up", j, i) for j, s in enumerate(up) for i, p in enumerate(s)]
    for p, kind, j, i in rng.sample(shaft_positions, min(max_choices, len(shaft_positions))):
        options = ["back"] if i > 0 else []
        if pockets:
            options.append("pocket")
        if kind == "down":
            options.append("across")
        if not options:
            continue
        move = rng.choice(options)
        if move == "back":
            q = (down if kind == "down" else up)[j][rng.randrange(0, i)]
        elif move == "pocket":
            q = rng.choice(rng.choice(pockets))
        else:
            q = rng.choice(rng.choice(up))
        if q not in succ[p]:
            succ[p].append(q)
    role = {p: rng.choice((Role.EXISTS, Role.FORALL)) for p in pos}
    weight = {p: rng.randint(lo, hi) for p in pos}
    edges = [(Entrance(j), down[j][0]) for j in range(k)]
    edges += [(Entrance(k + j), up[j][0]) for j in range(k)]
    edges += [(p, t) for p in pos for t in succ[p]]
    return validate_game(RawGame(Arity(k, k), Arity(k, k), pos, role, weight, edges))


def mining_top(k: int) -> OpenGame:
    edges = [(Entrance(0), "entry")]
    edges += [("entry", Exit(j)) for j in range(k)]
    edges += [(Entrance(1 + j), "entry") for j in range(k)]
    return validate_game(RawGame(Arity(1, 0), Arity(k, k), ["entry"],
                                 {"entry": Role.EXISTS}, {"entry": 0}, edges))


def mining_bottom(k: int) -> OpenGame:
    return validate_game(RawGame(Arity(k, k), Arity(0, 0), [], {}, {},
                                 [(Entrance(j), Exit(j)) for j in range(k)]))


def _power_chain(base: str, count: int, lines: list[str]) -> str:
    """Emit ``let`` doublings of ``base`` and return an expression for ``count`` copies."""
    powers = {1: base}
    p = 1
    while p * 2 <= count:
        name = f"{base}_x{p * 2}"
        lines.append(f"let {name} = {powers[p]} ; {powers[p]} in")
        powers[p * 2] = name
        p *= 2
    parts = []
    rest = count
    for q in sorted(powers, reverse=True):
        if rest >= q:
            parts.append(powers[q])
            rest -= q
    return " ; ".join(parts)


def gen_mining(seed: int, floors: int, floor_positions: int = 40, loop_arity: int = 1,
               weight_range: tuple[int, int] = BENCH_WEIGHTS, max_choices: int = 6) -> str:
    """The mining family: identical floors stacked under an ∃ entry position.

    The floor is bound once; repeated floors are built by ``let`` doubling so
    that the term graph has one floor leaf and O(log floors) combinators.
    """
    if floors < 1:
        raise ValueError("floors must be >= 1")
    rng = random.Random(seed)
    k = loop_arity
    floor = mining_floor(rng, k, floor_positions, weight_range, max_choices)
    lines = [
        f"# mining: seed={seed} floors={floors} floor_positions={floor_positions} "
        f"loop_arity={k} weights={weight_range[0]}..{weight_range[1]}",
        f"let floor = {_leaf_text(floor)} in",
        f"let top = {_leaf_text(mining_top(k))} in",
        f"let bottom = {_leaf_text(mining_bottom(k))} in",
    ]
    body = _power_chain("floor", floors, lines)
    lines.append(f"top ; {body} ; bottom")
    return "\n".join(lines) + "\n"


LAYER_SHAPES = ("stack", "fork", "bypass", "loop", "swap")


def gen_layered(seed: int, layers: int, leaf_positions: int = 6,
                weight_range: tuple[int, int] = BENCH_WEIGHTS, max_choices: int = 4,
                max_flat_positions: int = 10 ** 6) -> str:
    """The layered family, built bottom-up over a sink ``D : (1,1) -> (0,0)``.

    Each layer wraps the current sink ``D`` in one of five shapes, using fresh
    random leaves ``L1 : (1,1)->(1,1)``, ``L2 : (1,1)->(2,2)``,
    ``B : (1,1)->(0,0)`` and ``R : (2,0)->(2,0)``:

    * stack:  ``L1 ; D``
    * fork:   ``L2 ; (D (+) D)`` (``D`` is shared)
    * bypass: ``L2 ; (D (+) B)``
    * loop:   ``(tr[1](R) (+) id_l) ; D``
    * swap:   ``L2 ; (swap_rr (+) swap_ll) ; (D (+) B)``

    A top leaf ``(1,0)->(1,1)`` closes the diagram. Shapes that would push the
    flattened size past ``max_flat_positions`` are skipped.
    """
    if layers < 1:
        raise ValueError("layers must be >= 1")
    rng = random.Random(seed)

    def leaf(left, right):
        n = rng.randint(max(1, leaf_positions // 2), leaf_positions)
        return random_open_game(rng, left, right, n, weight_range, max_choices=max_choices,
                                prefix="v")

    a11, a10, a22, a20, a00 = Arity(1, 1), Arity(1, 0), Arity(2, 2), Arity(2, 0), Arity(0, 0)
    lines = [f"# layered: seed={seed} layers={layers} leaf_positions={leaf_positions} "
             f"weights={weight_range[0]}..{weight_range[1]}"]
    base = leaf(a11, a00)
    lines.append(f"let d0 = {_leaf_text(base)} in")
    size = len(base.role)
    for i in range(1, layers):
        d = f"d{i - 1}"
        shapes = list(LAYER_SHAPES)
        rng.shuffle(shapes)
        for shape in shapes:
            if shape == "fork" and 2 * size + leaf_positions > max_flat_positions:
                continue
            break
        if shape == "stack":
            g = leaf(a11, a11)
            expr, size = f"{_leaf_text(g)} ; {d}", size + len(g.role)
        elif shape == "fork":
            g = leaf(a11, a22)
            expr, size = f"{_leaf_text(g)} ; ({d} (+) {d})", 2 * size + len(g.role)
        elif shape == "bypass":
            g, b = leaf(a11, a22), leaf(a11, a00)
            expr = f"{_leaf_text(g)} ; ({d} (+) {_leaf_text(b)})"
            size += len(g.role) + len(b.role)
        elif shape == "loop":
            r = leaf(a20, a20)
            expr, size = f"(tr[1]({_leaf_text(r)}) (+) id_l) ; {d}", size + len(r.role)
        else:
            g, b = leaf(a11, a22), leaf(a11, a00)
            expr = f"{_leaf_text(g)} ; (swap_rr (+) swap_ll) ; ({d} (+) {_leaf_text(b)})"
            size += len(g.role) + len(b.role)
        lines.append(f"# layer {i}: {shape}")
        lines.append(f"let d{i} = {expr} in")
    top = leaf(a10, a11)
    lines.append(f"{_leaf_text(top)} ; d{layers - 1}")
    return "\n".join(lines) + "\n"


def _chain_diagram(rng: random.Random, k: int, blocks: list[str], distinct: list[OpenGame], header: str) -> str:
    lines = [header]
    for j, g in enumerate(distinct):
        lines.append(f"let a{j} = {_leaf_text(g)} in")
    lines.append(f"let top = {_leaf_text(mining_top(k))} in")
    lines.append(f"let bottom = {_leaf_text(mining_bottom(k))} in")
    lines.append("top ; " + " ; ".join(blocks) + " ; bottom")
    return "\n".join(lines) + "\n"


def gen_dr_instance(seed: int, dr: int, blocks: int = 16, leaf_positions: int = 10, width: int = 1,
                    weight_range: tuple[int, int] = BENCH_WEIGHTS, max_choices: int = 4) -> str:
    """A chain of ``blocks`` components using ``blocks // dr`` distinct leaves."""
    if dr < 1:
        raise ValueError("dr must be >= 1")
    rng = random.Random(seed)
    n_distinct = max(1, blocks // dr)
    a = Arity(width, width)
    distinct = [random_open_game(rng, a, a, leaf_positions, weight_range, extra_edge_prob=0.3,
                                 max_choices=max_choices, connect_exits=1.0, passthrough_prob=0.0,
                                 prefix="v") for _ in range(n_distinct)]
    # a fixed structure t(A_1, ..., A_n): block j uses leaf j mod n_distinct
    names = [f"a{j % n_distinct}" for j in range(blocks)]
    header = f"# dr: seed={seed} dr={dr} blocks={blocks} distinct={n_distinct} width={width}"
    return _chain_diagram(rng, width, names, distinct, header)


def gen_arity_instance(seed: int, arity: int, blocks: int = 8, leaf_positions: int = 10,
                       weight_range: tuple[int, int] = BENCH_WEIGHTS, max_choices: int = 4) -> str:
    """A chain of ``blocks`` distinct components whose interfaces are ``arity`` wires wide."""
    if arity < 1:
        raise ValueError("arity must be >= 1")
    rng = random.Random(seed)
    a = Arity(arity, arity)
    distinct = [random_open_game(rng, a, a, leaf_positions, weight_range, extra_edge_prob=0.3,
                                 max_choices=max_choices, connect_exits=1.0, passthrough_prob=0.0,
                                 prefix="v") for _ in range(blocks)]
    names = [f"a{j}" for j in range(blocks)]
    header = f"# arity: seed={seed} arity={arity} blocks={blocks}"
    return _chain_diagram(rng, arity, names, distinct, header)


def gen_dr_experiment(seed: int, dr_values=(1, 2, 4, 8, 16), count: int = 400, **kw) -> list[tuple[str, str]]:
    """``count`` instances spread evenly over the DR values: (name, source) pairs."""
    out = []
    for k in range(count):
        dr = dr_values[k % len(dr_values)]
        out.append((f"dr{dr}-{k:03d}", gen_dr_instance(seed + k, dr, **kw)))
    return out


def gen_arity_experiment(seed: int, arity_values=(1, 2, 3, 4), count: int = 400, **kw) -> list[tuple[str, str]]:
    out = []
    for k in range(count):
        ar = arity_values[k % len(arity_values)]
        out.append((f"arity{ar}-{k:03d}", gen_arity_instance(seed + k, ar, **kw)))
    return out
