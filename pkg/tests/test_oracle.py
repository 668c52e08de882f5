from __future__ import annotations

import random
from fractions import Fraction

import pytest

from compmpg.errors import CompMPGError, GameTooLargeForBruteForce
from compmpg.game import Arity, Entrance, Role, make_game
from compmpg.diagram import load
from compmpg.generators import gen_mining, random_open_game
from compmpg.oracle import brute_force_solve, progress_measure_solve
from compmpg.semantics import Status
from compmpg.syntax import flatten

E, A = Role.EXISTS, Role.FORALL
W, L = Status.WINNING, Status.LOSING


def loop(role, w):
    return make_game(1, 0, {"p": (role, w)}, [(Entrance(0), "p"), ("p", "p")])


def test_self_loops():
    assert brute_force_solve(loop(E, 1)) == W
    assert brute_force_solve(loop(A, -1)) == L
    assert progress_measure_solve(loop(E, 1)).status == {0: W}
    assert progress_measure_solve(loop(A, -1)).status == {0: L}
    assert brute_force_solve(loop(A, 0)) == W  # mean exactly 0 is won by ∃


def test_sample_closed_into_losing_sink():
    # every exit of the sample game routed into a -1 self-loop sink;
    # ∀ at a2 can always leave for the sink, so no entrance is winning
    g = make_game(4, 0, {"e1": (E, "3.1"), "a1": (A, "-4.5"), "a2": (A, 2), "s": (A, -1)},
                  [(Entrance(0), "s"), (Entrance(1), "a1"), (Entrance(2), "e1"), (Entrance(3), "a2"),
                   ("e1", "s"), ("e1", "a1"), ("a1", "a2"), ("a2", "e1"), ("a2", "s"), ("s", "s")])
    assert [brute_force_solve(g, i) for i in range(4)] == [L, L, L, L]
    res = progress_measure_solve(g)
    assert res.status == {0: L, 1: L, 2: L, 3: L}
    assert res.scale == 10


def test_sample_closed_with_exists_at_the_branch():
    # the same shape with a2 owned by ∃: entrance 2 can settle in the 0.6 cycle
    g = make_game(2, 0, {"e1": (E, "3.1"), "a1": (A, "-4.5"), "a2": (E, 2), "s": (A, -1)},
                  [(Entrance(0), "a1"), (Entrance(1), "s"),
                   ("e1", "s"), ("e1", "a1"), ("a1", "a2"), ("a2", "e1"), ("a2", "s"), ("s", "s")])
    assert brute_force_solve(g, 0) == W
    assert progress_measure_solve(g).status[0] == W


def test_uniform_sign_games():
    rng = random.Random(61)
    for _ in range(20):
        g = random_open_game(rng, Arity(2), Arity(0), 6, (1, 5), stuck_prob=0.0)
        assert progress_measure_solve(g).status == {0: W, 1: W}
        h = random_open_game(rng, Arity(1), Arity(0), 6, (-5, -1), stuck_prob=0.0)
        h = make_game(1, 0, {p: (A, h.weight[p]) for p in h.role}, list(h.edges()))
        assert progress_measure_solve(h).status == {0: L}


def test_oracles_agree_on_random_closed_games():
    rng = random.Random(62)
    for _ in range(500):
        n = rng.randint(1, 12)
        g = random_open_game(rng, Arity(rng.randint(1, 2)), Arity(0), n, stuck_prob=0.1)
        pm = progress_measure_solve(g).status
        for i in range(g.n_entrances):
            assert brute_force_solve(g, i) == pm[i]


def test_rational_weights_are_scaled():
    g = make_game(1, 0, {"p": (E, Fraction(1, 3)), "q": (A, Fraction(-1, 2))},
                  [(Entrance(0), "p"), ("p", "q"), ("q", "p")])
    res = progress_measure_solve(g)
    assert res.scale == 6 and res.status == {0: L}
    assert brute_force_solve(g) == L


def test_preconditions():
    with pytest.raises(CompMPGError):
        brute_force_solve(make_game(1, 1, {"p": (E, 0)}, [(Entrance(0), "p"), ("p", "p")]))
    big = random_open_game(random.Random(63), Arity(1), Arity(0), 20)
    with pytest.raises(GameTooLargeForBruteForce):
        brute_force_solve(big)


def test_budget_stops_early():
    g = flatten(load(gen_mining(3, 64)))
    res = progress_measure_solve(g, budget_s=0.05)
    assert not res.completed and res.status == {}
