"""One test per acceptance criterion; each prints a PASS/FAIL line."""

from __future__ import annotations

import json
import random
import time
from fractions import Fraction

from compmpg.cli import main
from compmpg.diagram import InferredArity, load, parse, print_term, resolve_sharing
from compmpg.errors import CompMPGError
from compmpg.game import Arity, mp_check_liminf, running_average, unique_play
from compmpg.generators import DiagramGen, gen_mining, random_closed_diagram, random_open_game, random_ropg
from compmpg.meager import (
    compose_int_meager,
    fat_to_meager,
    leq_lifted,
    leq_play,
    leq_value,
    maximal,
    seq_meager,
    sum_int_meager,
    sum_meager,
    trace_meager,
)
from compmpg.oracle import brute_force_solve, progress_measure_solve
from compmpg.play import (
    PlayArrow,
    identity_arrow,
    ropg_denotation,
    seq_play,
    sum_play,
    swap_arrow,
    trace_play,
    trace_play_via_tdp,
)
from compmpg.semantics import (
    classify_entrance,
    compose_int,
    denote_leaf,
    evaluate,
    seq_fat,
    sum_fat,
    sum_int,
    trace_fat,
)
from compmpg.syntax import flatten, seq_game, seq_rightward, sum_game, sum_games, trace_game
from compmpg.tvalue import WIN_A, WIN_E, Weighted, bind, eta, fmap, monad_mult

from conftest import SAMPLE_PATH, report


def _ropg(rng, m, n):
    return random_ropg(rng, m, n, rng.randint(0 if m <= n else 1, 5))


def _arrow(rng, m, n):
    return ropg_denotation(_ropg(rng, m, n))


def _game(rng, left, right, hi=3):
    return random_open_game(rng, left, right, rng.randint(1, hi))


def _ar(rng, k=2):
    return Arity(rng.randint(0, k), rng.randint(0, k))


def test_criterion_1_sample_game(capsys):
    t0 = time.perf_counter()
    code = main(["solve", str(SAMPLE_PATH), "--semantics", "fat"])
    elapsed = time.perf_counter() - t0
    res = json.loads(capsys.readouterr().out)
    den = {e["entrance"]: e["denotation"] for e in res["results"]}
    ok = (
        code == 0
        and den[1] == [[{"exit": 1}]]
        and den[2] == [[{"wexit": [-5, 2, 2]}, {"wexit": [3, 5, 3]}], [{"wexit": [-5, 2, 2]}, "winE"]]
        and [e["status"] for e in res["results"]] == ["pending"] * 4
        and elapsed < 1.0
    )
    with capsys.disabled():
        report(1, ok, f"sample projections exact, 4x pending, {elapsed * 1000:.1f} ms")
    assert ok


def test_criterion_2_oracle_equivalence(capsys):
    rng = random.Random(2026)
    t0 = time.perf_counter()
    agree = total = 0
    for _ in range(500):
        dag = resolve_sharing(random_closed_diagram(rng, max_positions=12))
        game = flatten(dag)
        assert len(game.role) <= 12
        comp = classify_entrance(evaluate(dag, "meager"), 0)
        agree += comp == brute_force_solve(game, 0)
        total += 1
    elapsed = time.perf_counter() - t0
    ok = agree == total == 500 and elapsed < 60
    with capsys.disabled():
        report(2, ok, f"{agree}/{total} agree with brute force in {elapsed:.1f} s")
    assert ok


def test_criterion_3_functoriality(capsys):
    rng = random.Random(3)
    failures = {}

    def check(name, ok):
        failures[name] = failures.get(name, 0) + (not ok)

    for _ in range(150):
        x, y, z = _ar(rng), _ar(rng), _ar(rng)
        a, b, c = _game(rng, x, y, 2), _game(rng, y, z, 2), _game(rng, z, x, 2)
        check("oMPG ;", denote_leaf(seq_game(a, b)) == compose_int(denote_leaf(a), denote_leaf(b)))
        check("oMPG (+)", denote_leaf(sum_game(a, c)) == sum_int(denote_leaf(a), denote_leaf(c)))

        m, l, n, k = (rng.randint(0, 2) for _ in range(4))
        ra, rb, rc = _game(rng, Arity(m), Arity(l)), _game(rng, Arity(l), Arity(n)), _game(rng, Arity(k), Arity(n))
        check("roMPG ;", denote_leaf(seq_rightward(ra, rb)) == seq_fat(denote_leaf(ra), denote_leaf(rb)))
        check("roMPG (+)", denote_leaf(sum_games(ra, rc)) == sum_fat(denote_leaf(ra), denote_leaf(rc)))
        t = rng.randint(1, 2)
        re = _game(rng, Arity(t + m), Arity(t + n))
        check("roMPG tr", denote_leaf(trace_game(t, re)) == trace_fat(t, denote_leaf(re)))

        pa, pb, pc = _ropg(rng, m, l), _ropg(rng, l, n), _ropg(rng, k, n)
        check("roPG ;", ropg_denotation(seq_rightward(pa, pb)) == seq_play(ropg_denotation(pa), ropg_denotation(pb)))
        check("roPG (+)", ropg_denotation(sum_games(pa, pc)) == sum_play(ropg_denotation(pa), ropg_denotation(pc)))
        pe = _ropg(rng, t + m, t + n)
        check("roPG tr", ropg_denotation(trace_game(t, pe)) == trace_play(t, ropg_denotation(pe)))
    bad = sum(failures.values())
    ok = bad == 0 and len(failures) == 8
    with capsys.disabled():
        report(3, ok, f"8 operations x 150 instances, {bad} failures")
    assert ok


def test_criterion_4_decomposition(capsys):
    rng = random.Random(4)
    bad = checked = 0
    for _ in range(200):
        m, l, n = (rng.randint(0, 3) for _ in range(3))
        c, d = _ropg(rng, m, l), _ropg(rng, l, n)
        composite = ropg_denotation(seq_rightward(c, d))
        split = seq_play(ropg_denotation(c), ropg_denotation(d))
        for i in range(m):
            checked += 1
            bad += composite.values[i] != split.values[i]
    for _ in range(200):
        t = rng.randint(1, 3)
        e = _ropg(rng, t + rng.randint(0, 2), t + rng.randint(0, 2))
        traced = ropg_denotation(trace_game(t, e))
        via_tdp = trace_play_via_tdp(t, ropg_denotation(e))
        for i in range(traced.dom):
            checked += 1
            bad += traced.values[i] != via_tdp.values[i]
    ok = bad == 0
    with capsys.disabled():
        report(4, ok, f"; and tr on 200 play graphs each, {checked} entrance values, {bad} mismatches")
    assert ok


def test_criterion_5_meager_soundness(capsys):
    rng = random.Random(5)
    class_bad = 0
    for _ in range(200):
        dag = resolve_sharing(random_closed_diagram(rng))
        class_bad += classify_entrance(evaluate(dag, "fat"), 0) != classify_entrance(evaluate(dag, "meager"), 0)
    prune = fat_to_meager
    op_bad = 0
    for _ in range(200):
        m, l, n, k = (rng.randint(0, 2) for _ in range(4))
        F, G = denote_leaf(_game(rng, Arity(m), Arity(l))), denote_leaf(_game(rng, Arity(l), Arity(n)))
        H = denote_leaf(_game(rng, Arity(k), Arity(n)))
        t = rng.randint(1, 2)
        T = denote_leaf(_game(rng, Arity(t + m), Arity(t + n)))
        x, y, z = _ar(rng, 1), _ar(rng, 1), _ar(rng, 1)
        P, Q = denote_leaf(_game(rng, x, y, 2)), denote_leaf(_game(rng, y, z, 2))
        R = denote_leaf(_game(rng, z, x, 2))
        op_bad += prune(seq_fat(F, G)) != seq_meager(prune(F), prune(G))
        op_bad += prune(sum_fat(F, H)) != sum_meager(prune(F), prune(H))
        op_bad += prune(trace_fat(t, T)) != trace_meager(t, prune(T))
        op_bad += prune(compose_int(P, Q)) != compose_int_meager(prune(P), prune(Q))
        op_bad += prune(sum_int(P, R)) != sum_int_meager(prune(P), prune(R))
    ok = class_bad == 0 and op_bad == 0
    with capsys.disabled():
        report(5, ok, f"fat/meager classification mismatches {class_bad}/200, "
                      f"prune commutation failures {op_bad}/1000")
    assert ok


def _random_value(rng, cod):
    r = rng.random()
    if r < 0.15 or not cod:
        return WIN_E if r < 0.5 else WIN_A
    if r < 0.4:
        return rng.randrange(cod)
    return Weighted(Fraction(rng.randint(-6, 6), rng.randint(1, 3)), rng.randrange(cod))


def test_criterion_6_algebraic_laws(capsys):
    rng = random.Random(6)
    counts = {}

    def check(name, ok):
        good, total = counts.get(name, (0, 0))
        counts[name] = (good + bool(ok), total + 1)

    for _ in range(1000):
        v = _random_value(rng, 3)
        ks = [_random_value(rng, 3) for _ in range(3)]
        hs = [_random_value(rng, 3) for _ in range(3)]
        k, h = ks.__getitem__, hs.__getitem__
        j = rng.randrange(3)
        check("monad left unit", bind(eta(j), k) == k(j))
        check("monad right unit", bind(v, eta) == v)
        check("monad associativity", bind(bind(v, k), h) == bind(v, lambda x: bind(k(x), h)))
        check("monad mult/fmap", bind(v, k) == monad_mult(fmap(k, v)))
        f, g, e = (PlayArrow(2, [_random_value(rng, 2) for _ in range(2)]) for _ in range(3))
        check("order reflexive", leq_play(f, f) and leq_value(v, v))
        check("order antisymmetric", not (leq_play(f, g) and leq_play(g, f)) or f == g)
        check("order transitive", not (leq_play(f, g) and leq_play(g, e)) or leq_play(f, e))
    for _ in range(300):
        S, T, U = (maximal(PlayArrow(2, [_random_value(rng, 2)]) for _ in range(rng.randint(1, 3)))
                   for _ in range(3))
        check("lifted reflexive", leq_lifted(S, S))
        check("lifted antisymmetric", not (leq_lifted(S, T) and leq_lifted(T, S)) or S == T)
        check("lifted transitive", not (leq_lifted(S, T) and leq_lifted(T, U)) or leq_lifted(S, U))
    for _ in range(300):
        l, m, n, p = rng.randint(1, 2), rng.randint(0, 2), rng.randint(0, 2), rng.randint(0, 2)
        f = _arrow(rng, l + m, l + n)
        g = _arrow(rng, n, p)
        hh = _arrow(rng, p, m)
        check("trace naturality (right)",
              trace_play(l, seq_play(f, sum_play(identity_arrow(l), g))) == seq_play(trace_play(l, f), g))
        check("trace naturality (left)",
              trace_play(l, seq_play(sum_play(identity_arrow(l), hh), f)) == seq_play(hh, trace_play(l, f)))
        l2 = rng.randint(1, 2)
        f2 = _arrow(rng, l + m, l2 + n)
        d = _arrow(rng, l2, l)
        check("trace dinaturality",
              trace_play(l2, seq_play(sum_play(d, identity_arrow(m)), f2))
              == trace_play(l, seq_play(f2, sum_play(d, identity_arrow(n)))))
        a, b = rng.randint(0, 2), rng.randint(0, 2)
        f3 = _arrow(rng, a + b + m, a + b + n)
        check("trace vanishing", trace_play(0, f3) == f3
              and trace_play(a + b, f3) == trace_play(b, trace_play(a, f3)))
        q = _arrow(rng, rng.randint(0, 2), rng.randint(0, 2))
        check("trace superposing", trace_play(l, sum_play(f, q)) == sum_play(trace_play(l, f), q))
        w = rng.randint(1, 3)
        check("trace yanking", trace_play(w, swap_arrow(w, w)) == identity_arrow(w))
    failed = {name: total - good for name, (good, total) in counts.items() if good != total}
    sizes = sorted({total for _, total in counts.values()})
    ok = not failed and all(100 <= s <= 1000 for s in sizes)
    with capsys.disabled():
        report(6, ok, f"{len(counts)} laws, {sizes[0]}-{sizes[-1]} cases each, failures {failed or 0}")
    assert ok


def test_criterion_7_cycle_periodicity(capsys):
    rng = random.Random(7)
    plays = []
    while len(plays) < 250:
        g = random_ropg(rng, 1, 0, rng.randint(1, 10), stuck_prob=0.0)
        play = unique_play(g, 0)
        plays.append(([g.weight[q] for q in play.prefix[1:]], [g.weight[q] for q in play.cycle]))
    while len(plays) < 300:
        cyc = [Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(rng.randint(1, 5))]
        cyc.append(-sum(cyc))  # mean exactly 0
        plays.append(([rng.randint(-50, 50) for _ in range(rng.randint(0, 4))], cyc))
    bad = decisive = boundary = 0
    for prefix, cycle in plays:
        mean = Fraction(sum(cycle), len(cycle))
        if mean == 0:
            boundary += 1
            bad += not mp_check_liminf(prefix, cycle)
        elif abs(mean) >= Fraction(1, 100):
            decisive += 1
            bad += (running_average(prefix, cycle, 10 ** 5) >= 0) != mp_check_liminf(prefix, cycle)
    ok = bad == 0 and boundary > 0
    with capsys.disabled():
        report(7, ok, f"{decisive} decisive plays and {boundary} zero-mean plays, {bad} disagreements")
    assert ok


def _best_of(fn, reps=5):
    best = float("inf")
    for _ in range(reps):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def _solve(src):
    return classify_entrance(evaluate(load(src), "meager"), 0)


def test_criterion_8_sharing_performance(capsys):
    src4, src256 = gen_mining(0, 4, 40), gen_mining(0, 256, 40)
    t4, _ = _best_of(lambda: _solve(src4))
    t256, _ = _best_of(lambda: _solve(src256))
    trend_ok = t256 <= 4 * t4

    faster = total = 0
    slowest = 0.0
    positions = None
    agree = True
    for seed in range(20):
        small = gen_mining(seed, 4, 40)
        agree &= _solve(small) == progress_measure_solve(flatten(load(small))).status[0]
        src = gen_mining(seed, 2560, 40)
        t0 = time.perf_counter()
        status = _solve(src)
        comp = time.perf_counter() - t0
        slowest = max(slowest, comp)
        game = flatten(load(src))
        positions = len(game.role)
        pm = progress_measure_solve(game, budget_s=0.5)
        if pm.completed:
            agree &= pm.status[0] == status
        faster += comp < pm.wall_ms / 1000
        total += 1
    ok = trend_ok and positions >= 10 ** 5 and slowest < 30 and faster >= 0.8 * total and agree
    with capsys.disabled():
        report(8, ok, f"t(256)/t(4) = {t256 / t4:.2f}; {positions} positions solved in <= {slowest * 1000:.1f} ms; "
                      f"faster than progress measure on {faster}/{total}")
    assert ok


def test_criterion_9_round_trip_and_locations(capsys):
    rng = random.Random(9)
    bad = 0
    for _ in range(1000):
        gen = DiagramGen(rng)
        t = gen.term(InferredArity(gen.arity(), gen.arity()), rng.randint(1, 12))
        text = print_term(t)
        bad += parse(text) != t or print_term(parse(text)) != text
    broken = [
        "id_r ;", "id_r (+)\n ;", "tr[x](id_r)", "let t = id_r in", "game (1,0)->(1,0) { pos p : Q 1; }",
        "game (1,0)->(1,0) { edge lhs.r1 -> rhs.r2; }", "id_r ;\n id_l", "tr[1](id_l)", "tr[2](id_r)",
        "(id_r", "id_r ; t", "game (1,0)->(0,0) { pos p : E 1/0; edge lhs.r1 -> p; }",
        "game (1,0)->(1,0) {\n  pos p : E 1;\n  edge lhs.r1 -> p;\n  edge lhs.r1 -> rhs.r1;\n}",
    ]
    unlocated = []
    for src in broken:
        try:
            load(src)
            unlocated.append(src)
        except CompMPGError as e:
            if e.line is None or e.column is None:
                unlocated.append(src)
    ok = bad == 0 and not unlocated
    with capsys.disabled():
        report(9, ok, f"1000 terms, {bad} round-trip failures; {len(broken) - len(unlocated)}/{len(broken)} "
                      f"errors located")
    assert ok
