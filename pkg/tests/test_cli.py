from __future__ import annotations

import csv
import io
import json

import pytest

from compmpg.cli import compare_source, main
from compmpg.diagram import load
from compmpg.errors import DisagreementDetected
from compmpg.generators import gen_mining
from compmpg.oracle import progress_measure_solve
from compmpg.syntax import flatten

from conftest import SAMPLE_PATH


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_solve_sample_fat(capsys):
    code, out, _ = run(capsys, "solve", str(SAMPLE_PATH), "--semantics", "fat")
    assert code == 0
    res = json.loads(out)
    assert [e["status"] for e in res["results"]] == ["pending"] * 4
    assert res["results"][0]["denotation"] == [[{"exit": 1}]]


def test_solve_mining_matches_oracle(tmp_path, capsys):
    src = gen_mining(4, 16)
    path = tmp_path / "mining.mpg"
    path.write_text(src)
    code, out, _ = run(capsys, "solve", str(path), "--winners-only")
    res = json.loads(out)
    expected = progress_measure_solve(flatten(load(src))).status[0].value
    assert res["results"] == [{"entrance": 1, "status": expected}]
    assert res["stats"]["leaf_evaluations"] == 3


def test_emit_flat_round_trip(tmp_path, capsys):
    flat = tmp_path / "flat.mpg"
    code, out, _ = run(capsys, "solve", str(SAMPLE_PATH), "--emit-flat", str(flat))
    assert code == 0
    code, out2, _ = run(capsys, "solve", str(flat))
    assert json.loads(out2)["results"] == json.loads(out)["results"]


def test_stats_csv(capsys):
    code, out, err = run(capsys, "solve", str(SAMPLE_PATH), "--stats", "csv")
    assert code == 0 and "stats" not in json.loads(out)
    row = next(csv.DictReader(io.StringIO(err)))
    assert row["leaf_evaluations"] == "1"


def test_errors_are_json(tmp_path, capsys):
    bad = tmp_path / "bad.mpg"
    bad.write_text("id_r ;\n  id_l")
    code, out, _ = run(capsys, "solve", str(bad))
    err = json.loads(out)
    assert code != 0 and err["error"] == "ArityMismatch" and err["line"] == 1
    code, out, _ = run(capsys, "solve", str(tmp_path / "missing.mpg"))
    assert code != 0 and "error" in json.loads(out)


def test_compare_and_corruption(tmp_path, capsys):
    path = tmp_path / "m.mpg"
    path.write_text(gen_mining(2, 8, 10))
    code, out, _ = run(capsys, "compare", str(path), "--oracle", "pm")
    res = json.loads(out)
    assert code == 0 and res["agree"] and res["compositional_ms"] > 0 and res["oracle_ms"] > 0
    code, out, _ = run(capsys, "compare", str(path), "--corrupt")
    assert code == 3 and json.loads(out)["error"] == "DisagreementDetected"
    with pytest.raises(DisagreementDetected):
        compare_source(path.read_text(), "pm", corrupt=lambda sts: sts[::-1] + sts)


def test_gen_and_bench(tmp_path, capsys):
    code, out, _ = run(capsys, "gen", "mining", "--floors", "4", "--seed", "3", "--weight-range=-5,5")
    assert code == 0 and out == gen_mining(3, 4, weight_range=(-5, 5))
    code, out, _ = run(capsys, "gen", "dr", "--count", "10", "--out", str(tmp_path / "dr"))
    assert json.loads(out)["written"] == 10 and len(list((tmp_path / "dr").glob("*.mpg"))) == 10
    code, out, _ = run(capsys, "bench", "run", "--floors", "2,4", "--modes", "meager,fat,pm")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0]) == ["instance", "positions", "edges", "mode", "wall-ms", "status"]
    assert len(rows) == 6
    by_inst = {}
    for r in rows:
        by_inst.setdefault(r["instance"], set()).add(r["status"])
    assert all(len(s) == 1 for s in by_inst.values())
