"""Golden-file tests for every subcommand (text and JSON).

Set ``PCF_REGEN=1`` to rewrite the files under ``tests/golden`` after an
intentional output change; review the diff before committing it.
"""

from __future__ import annotations

import io
import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from pcf.cli import main

GOLDEN = Path(__file__).parent / "golden"
REGEN = os.environ.get("PCF_REGEN") == "1"

# name -> (argv, exit status)
CASES = {
    "expand_sqrt": (["expand", "sqrt:t+1", "--max-terms", "5"], 2),
    "expand_exact": (["expand", "(t^(2)+1)/(t)"], 0),
    "expand_fp5": (["expand", "(t^(2)+3)/(2*t)", "--field", "fp:5"], 0),
    "expand_periodic": (["expand", "[0; t, (t, t^(2))]", "--max-terms", "6"], 2),
    "expand_precision": (["expand", "rat:(1)/(t-1)", "--cutoff", "-2", "--max-terms", "4"], 2),
    "eval_cf": (["eval", "[t; t, t]"], 0),
    "eval_stream": (["eval", "sqrt:t+1", "--cutoff", "-3"], 0),
    "approx": (["approx", "sqrt:t+1", "--n", "3"], 0),
    "error": (["error", "sqrt:t+1", "2"], 0),
    "best_yes": (["best", "sqrt:t+1", "4*t^(3/2) + 3*t^(1/2)", "4*t + 1"], 0),
    "best_no": (["best", "sqrt:t+1", "t^(1/2) + 1", "1"], 0),
    "period_sqrt": (["period", "sqrt:t+1", "--cutoff", "-40"], 0),
    "period_two": (["period", "[t; (t, t^(2))]", "--cutoff", "-40"], 0),
    "period_none": (["period", "[t; t, t^(2), t^(3), t^(4)]"], 0),
    "berk_dist": (["berk-dist", "eta(0,1)", "eta(t,1)"], 0),
    "berk_join": (["berk-join", "eta(0,1)", "eta(t,1)"], 0),
    "berk_act": (["berk-act", "i", "eta(t,0)"], 0),
    "reduce": (["reduce", "eta(t^(1/2), 1/4)"], 0),
    "reduce_sqrt": (["reduce", "eta(sqrt:t+1, 3/2)"], 0),
    "promenade": (["promenade", "(t^(2)+1)/(t)"], 0),
    "promenade_sqrt": (["promenade", "sqrt:t+1", "--max-terms", "5"], 2),
    "promenade_iva": (["promenade", "iva:2^-i:1", "--max-terms", "5"], 0),
    "ball": (["ball", "[0; t]"], 0),
    "prefix_rep": (["prefix-rep", "ballc(t + t^(-1), 2)"], 0),
    "prefix_rep_zero": (["prefix-rep", "ballc(t^(-1), 1)"], 0),
    "typeiv_e69": (["typeiv", "e69", "--n", "4", "--exclude", "t + t^(1/2)"], 0),
    "typeiv_iva": (["typeiv", "iva:2^-i:1", "--n", "4"], 0),
}

ERRORS = {
    "bad_syntax": (["expand", "t^"], 1),
    "zero_den": (["expand", "(1)/(0)"], 1),
    "bad_field": (["expand", "t", "--field", "fp:4"], 1),
    "no_sqrt": (["expand", "sqrt:2*t"], 1),
    "no_certified_f0": (["expand", "sqrt:t+1", "--cutoff", "1"], 2),
    "error_past_end": (["error", "(t^(2)+1)/(t)", "1"], 1),
}


def run(argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(argv, out, err)
    return code, out.getvalue(), err.getvalue()


def check_golden(path: Path, text: str):
    if REGEN:
        path.write_text(text)
    assert path.exists(), f"missing golden file {path.name}; run with PCF_REGEN=1"
    assert text == path.read_text()


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden_text(name):
    argv, status = CASES[name]
    code, out, _ = run(argv)
    assert code == status
    check_golden(GOLDEN / f"{name}.txt", out)


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden_json(name):
    argv, status = CASES[name]
    code, out, _ = run([*argv, "--format", "json"])
    assert code == status
    json.loads(out)
    check_golden(GOLDEN / f"{name}.json", out)


@pytest.mark.parametrize("name", sorted(ERRORS))
def test_error_exits(name):
    argv, status = ERRORS[name]
    code, out, err = run(argv)
    assert code == status
    assert out == "" and err


def test_spec_lines():
    assert run(["expand", "sqrt:t+1", "--max-terms", "5"])[1] == (
        "[t^(1/2); 2*t^(1/2), 2*t^(1/2), 2*t^(1/2), 2*t^(1/2), ...] (budget-exhausted)\n"
    )
    assert run(["berk-dist", "eta(0,1)", "eta(t,1)"])[1] == "4\n"
    assert run(["expand", "(t^(2)+1)/(t)"])[1] == "[t; t] (ended)\n"


def test_tsv_and_svg(tmp_path):
    svg = tmp_path / "w.svg"
    code, out, _ = run(["promenade", "(t^(2)+1)/(t)", "--format", "tsv", "--svg", str(svg)])
    assert code == 0 and out == "t\tv\n0\t0\n1\t1\n2\t0\n"
    assert svg.read_text().startswith("<svg")


def test_option_domains():
    assert run(["expand", "t", "--max-terms", "0"])[0] == 1
    assert run(["expand", "t", "--cutoff", "x"])[0] == 1
    assert run(["expand", "t", "--format", "xml"])[0] == 1
    # negative option values may follow the flag directly
    assert run(["eval", "sqrt:t+1", "--cutoff", "-1"])[1] == "t^(1/2) + 1/2*t^(-1/2) + O(t^(-1))\n"


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "pcf", "berk-dist", "eta(0,0)", "eta(0,-2)"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout == "2\n"
