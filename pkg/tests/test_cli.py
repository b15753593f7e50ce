import json
import math
import subprocess
import sys

import jsonschema
import pytest

from gaugequad.cli import load_output_schema, main

SCHEMA = load_output_schema()


def run_cli(*argv, env=None):
    """Invoke the CLI in-process, capturing exit code and streams."""
    import contextlib
    import io
    import os

    out, err = io.StringIO(), io.StringIO()
    old_env = {}
    if env:
        for k, v in env.items():
            old_env[k] = os.environ.get(k)
            os.environ[k] = v
    try:
        with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
            try:
                code = main(list(argv))
            except SystemExit as exc:  # argparse usage failures
                code = int(exc.code or 0)
    finally:
        for k, v in old_env.items():
            if v is None:
                os.environ.pop(k, None)
            else:
                os.environ[k] = v
    return code, out.getvalue(), err.getvalue()


def run_json(*argv, env=None):
    code, out, err = run_cli(*argv, "--json", env=env)
    payload = json.loads(out)
    jsonschema.validate(payload, SCHEMA)
    return code, payload, err


# -- exit codes ----------------------------------------------------------------

def test_integrate_polynomial_exit_zero():
    code, out, err = run_cli("integrate", "x^2", "x", "0", "1")
    assert code == 0
    assert "0.333333" in out
    assert err == ""


def test_divergent_integral_exit_two():
    code, out, _ = run_cli("improper", "x*sin(x^2)*sin(x)", "x", "0", "inf", "--tol", "1e-4")
    assert code == 2
    assert "DIVERGED" in out


def test_parse_error_exit_one_with_offset_message():
    code, out, err = run_cli("integrate", "2**x", "x", "0", "1")
    assert code == 1
    assert out == ""
    assert "unexpected '*' at offset 2 (expected number or name or '(' or '-')" in err


def test_unbound_variable_exit_one():
    code, _, err = run_cli("integrate", "x + y", "x", "0", "1")
    assert code == 1
    assert "y" in err


def test_cell_budget_exit_three():
    code, _, err = run_cli("partition", "0", "1", "--gauge", "uniform:1e-9")
    assert code == 3
    assert "cells" in err


def test_usage_error_exit_one():
    code, _, err = run_cli("integrate", "x", "x", "zero", "1")
    assert code == 1
    code, _, err = run_cli("integrate", "x", "x", "5", "1")
    assert code == 1
    code, _, err = run_cli("nonsense")
    assert code == 1


def test_unknown_corpus_case_exit_one():
    code, _, err = run_cli("corpus", "run", "no-such-case")
    assert code == 1
    assert "no-such-case" in err


# -- JSON output and schema -----------------------------------------------------

def test_integrate_json_schema_and_content():
    code, payload, _ = run_json("integrate", "x^2", "x", "0", "1")
    assert code == 0
    assert payload["command"] == "integrate"
    assert payload["result"]["status"] == "CONVERGED"
    assert abs(payload["result"]["value"] - 1.0 / 3.0) < 1e-7


def test_integrate_handles_infinite_endpoint():
    code, payload, _ = run_json("integrate", "sin(x)/x", "x", "0", "inf", "--tol", "1e-5")
    assert code == 0
    assert abs(payload["result"]["value"] - math.pi / 2.0) < 1e-4
    assert payload["inputs"]["hi"] == "inf"


def test_improper_json():
    code, payload, _ = run_json(
        "improper", "1/sqrt(x)", "x", "0", "1", "--singular", "0", "--tol", "1e-6"
    )
    assert code == 0
    assert abs(payload["result"]["value"] - 2.0) < 1e-5


def test_ftc_json_with_symbolic_derivative():
    code, payload, _ = run_json("ftc", "x^2", "x", "0", "1")
    assert code == 0
    assert payload["result"]["passed"] is True
    assert payload["result"]["max_residual"] <= 1e-6


def test_ftc_synthesizes_when_not_differentiable():
    # abs has no symbolic derivative; numeric synthesis plus the kink
    # guard must still verify the identity.  Negative positional args
    # must not be mistaken for flags.
    code, payload, _ = run_json("ftc", "abs(x)", "x", "-1", "1", "--singular", "0")
    assert code == 0
    assert payload["result"]["passed"] is True


def test_ftc_explicit_fprime():
    code, payload, _ = run_json(
        "ftc", "abs(x)", "x", "-1", "1",
        "--fprime", "piecewise(x < 0 -> -1, 0 < x -> 1, else -> 0)",
    )
    assert code == 0
    assert payload["result"]["passed"] is True


def test_dui_json_holds():
    code, payload, _ = run_json("dui", "x^2*y", "x", "y", "0", "1", "0", "1")
    assert code == 0
    assert payload["result"]["overall"] == "HOLDS_ON_SAMPLES"
    assert all(w["gap"] <= 1e-6 for w in payload["result"]["windows"])


def test_series_json():
    code, payload, _ = run_json(
        "series", "x^n", "x", "n", "0", "0.5", "--n-max", "48", "--tol", "1e-6"
    )
    assert code == 0
    assert payload["result"]["overall"] == "HOLDS_ON_SAMPLES"


def test_partition_json_valid_and_fine():
    code, payload, _ = run_json("partition", "0", "1", "--gauge", "uniform:0.125")
    assert code == 0
    assert payload["result"]["fine"] is True
    assert payload["result"]["violations"] == []
    cells = payload["result"]["cells"]
    assert cells[0]["lo"] == 0.0 and cells[-1]["hi"] == 1.0


def test_partition_json_infinite_target():
    code, payload, _ = run_json(
        "partition", "0", "inf", "--gauge", "uniform:0.5,8"
    )
    assert code == 0
    assert payload["result"]["cells"][-1]["hi"] == "inf"


def test_corpus_list_json():
    code, payload, _ = run_json("corpus", "list")
    assert code == 0
    names = [c["name"] for c in payload["cases"]]
    assert "pathological-derivative" in names
    assert "fubini-counterexample" in names


def test_corpus_run_json_pass():
    code, payload, _ = run_json("corpus", "run", "polynomial-smoke")
    assert code == 0
    assert payload["report"]["passed"] is True


def test_corpus_run_json_fail_exit_two():
    # Engine override loosens the computation; the frozen expectation
    # judges it and the run honestly fails.
    code, payload, _ = run_json("corpus", "run", "polynomial-smoke", "--tol", "1e-4")
    assert code == 2
    assert payload["report"]["passed"] is False


def test_json_output_is_byte_identical_across_runs():
    _, a, _ = run_cli("integrate", "sin(x)", "x", "0", "pi", "--json")
    _, b, _ = run_cli("integrate", "sin(x)", "x", "0", "pi", "--json")
    assert a == b


def test_trace_flag_adds_trace():
    code, payload, _ = run_json("integrate", "x^2", "x", "0", "1", "--trace")
    assert code == 0
    assert isinstance(payload["trace"][0], list)
    no_trace = run_json("integrate", "x^2", "x", "0", "1")[1]
    assert "trace" not in no_trace


# -- seeding ---------------------------------------------------------------------

def test_seed_env_fallback_and_flag_override():
    _, a, _ = run_cli("partition", "0", "1", "--gauge", "uniform:0.25", "--json",
                      env={"GAUGEQUAD_SEED": "7"})
    _, b, _ = run_cli("partition", "0", "1", "--gauge", "uniform:0.25", "--seed", "7",
                      "--json")
    assert json.loads(a)["inputs"]["options"]["seed"] == 7
    assert a == b


# -- process-level smoke -----------------------------------------------------------

def test_console_entry_point_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "gaugequad", "integrate", "x^2", "x", "0", "1"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "0.333333" in proc.stdout
