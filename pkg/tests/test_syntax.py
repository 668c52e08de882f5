from __future__ import annotations

import random

from compmpg.diagram import InferredArity, Leaf, Seq, Sum, load, resolve_sharing
from compmpg.game import Arity, Entrance, Exit, Role, make_game, validate_game
from compmpg.generators import DiagramGen, random_open_game
from compmpg.oracle import brute_force_solve
from compmpg.play import PlayArrow
from compmpg.semantics import denote_leaf
from compmpg.syntax import (
    constant_game,
    flatten,
    flatten_by_operations,
    identity_game,
    seq_game,
    seq_rightward,
    sum_game,
    sum_games,
    swap_game,
    trace_game,
)

E, A = Role.EXISTS, Role.FORALL
CLOSED = InferredArity(Arity(1, 0), Arity(0, 0))


def same_denotation(g, h):
    return denote_leaf(g, 40) == denote_leaf(h, 40)


def rgame(rng, left, right, n=None):
    return random_open_game(rng, left, right, rng.randint(1, 4) if n is None else n)


def test_identity_composition():
    g = seq_rightward(identity_game(1), identity_game(1))
    assert g.role == {} and g.succ == {Entrance(0): (Exit(0),)}
    assert constant_game("id_r") == identity_game(1)


def test_exit_bound_edge_is_plugged():
    a = make_game(1, 1, {"q": (E, 1)}, [(Entrance(0), "q"), ("q", Exit(0))])
    b = make_game(1, 1, {"q2": (A, 2)}, [(Entrance(0), "q2"), ("q2", Exit(0))])
    g = seq_rightward(a, b)
    assert g.succ[(0, "q")] == ((1, "q2"),)
    assert g.succ[(1, "q2")] == (Exit(0),)


def test_counts_add():
    rng = random.Random(31)
    for _ in range(100):
        m, l, n, k = (rng.randint(0, 2) for _ in range(4))
        a, b, c = rgame(rng, Arity(m), Arity(l)), rgame(rng, Arity(l), Arity(n)), rgame(rng, Arity(k), Arity(n))
        s = seq_rightward(a, b)
        assert len(s.role) == len(a.role) + len(b.role)
        assert validate_game(s) == s
        t = sum_games(a, c)
        assert len(t.role) == len(a.role) + len(c.role)
        assert t.n_edges() == a.n_edges() + c.n_edges()
        assert validate_game(t) == t


def test_sum_shifts_second_component():
    a = make_game(1, 1, {"p": (E, 1)}, [(Entrance(0), "p"), ("p", Exit(0))])
    b = make_game(1, 1, {"p": (A, 3)}, [(Entrance(0), Exit(0)), ("p", "p")])
    g = sum_games(a, b)
    assert g.succ[Entrance(1)] == (Exit(1),)
    assert g.succ[Entrance(0)] == ((0, "p"),)


def test_trace_chain_closure():
    # entrance 2 -> loop exit 1, loop entrance 1 -> exit 2
    g = make_game(2, 2, {"p": (E, 0)}, [(Entrance(0), Exit(1)), (Entrance(1), Exit(0)), ("p", "p")])
    t = trace_game(1, g)
    assert t.succ[Entrance(0)] == (Exit(0),)
    assert trace_game(1, swap_game(1, 1)) == identity_game(1)
    # a pure loop among loop wires contributes nothing
    loop = make_game(2, 2, {}, [(Entrance(0), Exit(0)), (Entrance(1), Exit(1))])
    assert trace_game(1, loop) == identity_game(1)


def test_constants_underlying_games():
    cup = constant_game("cup")
    assert cup.left == Arity(0, 0) and cup.right == Arity(1, 1)
    assert cup.as_rightward().succ == {Entrance(0): (Exit(0),)}
    for k in ("swap_rr", "swap_ll"):
        assert constant_game(k).succ[Entrance(0)] == (Exit(1),)


def test_snake_is_identity():
    g = flatten(load("(id_r (+) cup) ; (cap (+) id_r)"))
    assert g.left == Arity(1, 0) and g.right == Arity(1, 0)
    assert denote_leaf(g).sets == frozenset({frozenset({PlayArrow(1, [0])})})
    g2 = flatten(load("(cup (+) id_l) ; (id_l (+) cap)"))
    assert g2.left == Arity(0, 1) and g2.right == Arity(0, 1)
    assert denote_leaf(g2).sets == frozenset({frozenset({PlayArrow(1, [0])})})


def test_flatten_routes_agree():
    rng = random.Random(32)
    for _ in range(150):
        gen = DiagramGen(rng)
        ar = InferredArity(gen.arity(), gen.arity())
        dag = resolve_sharing(gen.term(ar, rng.randint(1, 8)))
        fast, slow = flatten(dag), flatten_by_operations(dag)
        assert validate_game(fast) == fast
        assert (fast.left, fast.right) == (slow.left, slow.right) == (ar.left, ar.right)
        assert len(fast.role) == len(slow.role) == dag.flat_size()[0]
        assert same_denotation(fast, slow)


def _closed_pairs(rng, op):
    gen = DiagramGen(rng)
    if op == "seq":
        mid = gen.arity()
        return Seq(gen.term(InferredArity(Arity(1, 0), mid), 3), gen.term(InferredArity(mid, Arity(0, 0)), 3))
    return Sum(gen.term(CLOSED, 3), gen.term(CLOSED, 3))


def test_flattened_composites_match_oracle_on_every_entrance():
    rng = random.Random(33)
    for op in ("seq", "sum"):
        for _ in range(100):
            dag = resolve_sharing(_closed_pairs(rng, op))
            a, b = (flatten(c) for c in _children(dag))
            whole = flatten(dag)
            composed = seq_game(a, b) if op == "seq" else sum_game(a, b)
            for i in range(whole.n_entrances):
                assert brute_force_solve(whole, i, 40) == brute_force_solve(composed, i, 40)


def _children(dag):
    from compmpg.diagram import SharedDag
    root = dag.nodes[dag.root]
    return [SharedDag(dag.nodes, c) for c in root.children]


def test_axiom_instances_at_denotation_level():
    rng = random.Random(34)
    for _ in range(50):
        a1, a2, a3, a4 = (Arity(rng.randint(0, 1), rng.randint(0, 1)) for _ in range(4))
        f, g, h = rgame(rng, a1, a2, 2), rgame(rng, a2, a3, 2), rgame(rng, a3, a4, 2)
        assert same_denotation(seq_game(seq_game(f, g), h), seq_game(f, seq_game(g, h)))
        k = rgame(rng, a4, a1, 2)
        # functoriality of the sum: (f (+) k) ; (g (+) f) = (f ; g) (+) (k ; f)
        lhs = seq_game(sum_game(f, k), sum_game(g, f))
        rhs = sum_game(seq_game(f, g), seq_game(k, f))
        assert same_denotation(lhs, rhs)
        # sliding: tr(e ; (x (+) id)) = tr((x (+) id) ; e)
        e = rgame(rng, Arity(2), Arity(2), 3)
        x = rgame(rng, Arity(1), Arity(1), 1)
        slide = sum_games(x, identity_game(1))
        assert same_denotation(trace_game(1, seq_rightward(e, slide)), trace_game(1, seq_rightward(slide, e)))
