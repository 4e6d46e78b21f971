"""Command-line surface: exact outputs and exit codes."""

from __future__ import annotations

import json
import random
import subprocess
import sys

import pytest

from pin2floer.cli import main
from pin2floer.complexes import (
    filtered_to_json,
    random_admissible_triple,
    random_filtered_complex,
    triangle_bundle_to_json,
)

CSV_TEXT = """name,signature,alexander,arf,surgery
trefoil,-2,-1;1,1,+1
figure-eight,0,3;-1,,+1
mirror-trefoil,2,-1;1,1,-1
"""


def test_blowup_plain(capsys):
    assert main(["blowup", "-k", "3"]) == 0
    assert capsys.readouterr().out == "Q^2 V^1\n"


def test_blowup_zero(capsys):
    assert main(["blowup", "-k", "4"]) == 0
    assert capsys.readouterr().out == "0\n"


def test_blowup_json(capsys):
    assert main(["blowup", "-k", "2", "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data == {"k": 2, "coefficient": "Q^2", "zero": False}


def test_knot_correction_line(capsys):
    rc = main(
        ["knot", "correction", "--alexander", "-1;1", "--signature", "-2",
         "--surgery", "+1"]
    )
    assert rc == 0
    assert capsys.readouterr().out == "alpha=-1 beta=-1 gamma=-1\n"


def test_knot_correction_json(capsys):
    rc = main(
        ["knot", "correction", "--alexander", "3;-1", "--signature", "0",
         "--surgery", "+1", "--name", "fig8", "--json"]
    )
    assert rc == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["name"] == "fig8"
    assert rep["arf"] == 1
    assert rep["agree"] is True
    assert rep["hs_towers"] == {"alpha": 1, "beta": -1, "gamma": -1}
    assert rep["table"] == rep["hs_towers"]
    assert rep["obstructed"] is False
    assert rep["mirrored"] is False
    assert "towers" in rep["hm_plus_one"]


def test_knot_correction_validation_error(capsys):
    rc = main(
        ["knot", "correction", "--alexander", "1;1", "--signature", "-2",
         "--surgery", "+1"]
    )
    assert rc == 2
    assert "error: validation:" in capsys.readouterr().err


def test_knot_correction_usage_error(capsys):
    rc = main(["knot", "correction", "--signature", "-2", "--surgery", "+1"])
    assert rc == 1
    assert "required" in capsys.readouterr().err


def test_knot_batch(tmp_path, capsys):
    p = tmp_path / "knots.csv"
    p.write_text(CSV_TEXT)
    assert main(["knot", "batch", "--csv", str(p)]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == (
        "trefoil: sigma=-2 arf=1 surgery=+1 -> alpha=-1 beta=-1 gamma=-1"
    )
    assert out[2].endswith("(mirrored)")


def test_knot_batch_jobs_deterministic(tmp_path, capsys):
    p = tmp_path / "knots.csv"
    p.write_text(CSV_TEXT)
    assert main(["knot", "batch", "--csv", str(p), "--json"]) == 0
    serial = capsys.readouterr().out
    assert main(["knot", "batch", "--csv", str(p), "--json", "--jobs", "3"]) == 0
    assert capsys.readouterr().out == serial
    assert [k["name"] for k in json.loads(serial)["knots"]] == [
        "trefoil", "figure-eight", "mirror-trefoil",
    ]


def test_knot_batch_bad_row(tmp_path, capsys):
    p = tmp_path / "knots.csv"
    p.write_text("name,signature,alexander,arf,surgery\nbad,-3,-1;1,,+1\n")
    assert main(["knot", "batch", "--csv", str(p)]) == 2
    assert "bad" in capsys.readouterr().err


def test_knot_batch_missing_file(capsys):
    assert main(["knot", "batch", "--csv", "/does/not/exist.csv"]) == 2
    assert "error: io:" in capsys.readouterr().err


def test_gysin_solve_unique(capsys):
    rc = main(["gysin", "solve", "--tower", "0", "--box", "-1:2"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "S(0, 0, 0) + F^1<-1>" in out
    assert "unique: yes" in out


def test_gysin_solve_two_candidates(capsys):
    rc = main(
        ["gysin", "solve", "--tower", "-4", "--box", "-4:3", "--box", "-3:1"]
    )
    assert rc == 0
    out = capsys.readouterr().out
    assert "unique: no" in out
    assert out.count("S(") == 2


def test_gysin_solve_json(capsys):
    rc = main(["gysin", "solve", "--tower", "-2", "--json"])
    assert rc == 0
    data = json.loads(capsys.readouterr().out)
    assert data["unique"] is True
    assert data["candidates"][0]["towers"] == {"alpha": -1, "beta": -1, "gamma": -1}


def test_gysin_bad_box_spec(capsys):
    assert main(["gysin", "solve", "--tower", "0", "--box", "nope"]) == 2
    assert "DEG:DIM" in capsys.readouterr().err


def test_homalg_triangle_acyclic(tmp_path, capsys):
    rng = random.Random(0)
    f1, f2, h1 = random_admissible_triple(rng, (0, 1, 2, 3), method="cone")
    p = tmp_path / "tri.json"
    p.write_text(json.dumps(triangle_bundle_to_json(f1, f2, h1)))
    assert main(["homalg", "triangle", "--file", str(p)]) == 0
    out = capsys.readouterr().out
    assert "acyclic: yes" in out
    assert "triangle exact: yes" in out


def test_homalg_triangle_not_acyclic_json(tmp_path, capsys):
    rng = random.Random(7)
    f1, f2, h1 = random_admissible_triple(rng, (0, 1, 2, 3), method="formula")
    p = tmp_path / "tri.json"
    p.write_text(json.dumps(triangle_bundle_to_json(f1, f2, h1)))
    assert main(["homalg", "triangle", "--file", str(p), "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    if not data["acyclic"]:
        assert data["cone_homology"]
    else:
        assert data["exact"] is True


def test_homalg_ss(tmp_path, capsys):
    rng = random.Random(4)
    fc = random_filtered_complex(rng, (0, 1, 2))
    p = tmp_path / "filt.json"
    p.write_text(json.dumps(filtered_to_json(fc)))
    assert main(["homalg", "ss", "--file", str(p)]) == 0
    out = capsys.readouterr().out
    assert out.startswith("E^0:")
    assert "E^inf:" in out


def test_catalog_entry(capsys):
    assert main(["catalog", "Poincare"]) == 0
    out = capsys.readouterr().out
    assert "name: Poincare" in out
    assert "alpha=-1 beta=-1 gamma=-1" in out


def test_catalog_list(capsys):
    assert main(["catalog", "--list"]) == 0
    names = capsys.readouterr().out.splitlines()
    assert len(names) == 54
    assert "S3" in names


def test_catalog_json(capsys):
    assert main(["catalog", "S3", "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["ct"] == {"alpha": 0, "beta": 0, "gamma": 0}


def test_catalog_unknown(capsys):
    assert main(["catalog", "wat"]) == 2
    assert "unknown catalog name" in capsys.readouterr().err


def test_verify_paper(capsys):
    assert main(["verify", "paper"]) == 0
    out = capsys.readouterr().out
    assert "FAIL: 0" in out
    assert "verdict: PASS" in out


def test_verify_paper_json(capsys):
    assert main(["verify", "paper", "--json", "--jobs", "2"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["counts"]["FAIL"] == 0
    warn_anchors = {
        r["anchor"] for r in data["rows"] if r["status"] == "WARN"
    }
    assert warn_anchors == {"case-labels", "finite-multiplicity"}


def test_no_command_is_usage_error(capsys):
    assert main([]) == 1


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "pin2floer", "blowup", "-k", "7"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout == "Q^2 V^10\n"
