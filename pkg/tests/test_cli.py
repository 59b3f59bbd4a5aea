import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from flagkit import cli
from flagkit import serialize as ser
from flagkit.corpus import F2, NEGATIVE_TABLES, get_spec
from flagkit.linalg import LinearMap, Matrix
from flagkit.stdext import STRICT, StdExtSpec

SCEN = Path(__file__).resolve().parent.parent / "scenarios"


def run(tmp_path, command, scenario, *extra):
    if isinstance(scenario, dict):
        path = tmp_path / "scenario.json"
        path.write_text(json.dumps(scenario))
    else:
        path = SCEN / scenario
    out = tmp_path / f"{command}.json"
    code = cli.main([command, "--scenario", str(path), "--out", str(out), *extra])
    return code, json.loads(out.read_text()), out.read_bytes()


def test_enumerate_count(tmp_path):
    code, rep, _ = run(tmp_path, "enumerate", "g1_f2_3.json")
    assert code == 0 and rep["status"] == "ok" and rep["result"]["count"] == 7
    assert rep["schema_version"] == 1


def test_isotropic_enumerate(tmp_path):
    code, rep, _ = run(tmp_path, "enumerate", "gs1_f2_4.json")
    assert code == 0 and rep["result"]["count"] == 15


def test_classify_negative_example(tmp_path):
    code, rep, _ = run(tmp_path, "classify", "ex3_3_iii.json")
    assert code == 0 and rep["result"]["classification"] == "not_standard"


def test_classify_strict(tmp_path):
    code, rep, _ = run(tmp_path, "classify", "classify_strict.json")
    assert code == 0 and rep["result"]["classification"] == "strict_standard"


def test_admissible_mixing_step(tmp_path):
    code, rep, _ = run(tmp_path, "admissible", "mixing_step.json")
    assert code == 0 and rep["result"]["admissible"] is False


def test_limit_classes(tmp_path):
    code, rep, _ = run(tmp_path, "limit", "two_stage.json")
    assert code == 0
    assert rep["result"]["presentation"]["classes"] == [["e1"], ["e3"], ["e4"], ["e2"]]


def test_truncate(tmp_path):
    code, rep, _ = run(tmp_path, "truncate", "truncate_two_stage.json")
    assert code == 0 and rep["result"]["type"] == [1, 2]


def test_compose_and_dualize(tmp_path):
    code, rep, _ = run(tmp_path, "compose", "compose_chain.json")
    assert code == 0 and rep["result"]["pointwise_equal"] and rep["result"]["variant"] == "strict"
    code, rep, _ = run(tmp_path, "dualize", "dualize.json")
    assert code == 0 and rep["result"]["variant"] == "modified"


def test_validate_reports_violation_without_failing(tmp_path):
    code, rep, _ = run(tmp_path, "validate", "validate_bad_pbar.json")
    assert code == 0 and rep["result"]["ok"] is False and rep["result"]["violations"]


def test_apply_sample_respects_seed(tmp_path):
    _, a, _ = run(tmp_path, "apply", "apply_sampled.json", "--seed", "3")
    _, b, _ = run(tmp_path, "apply", "apply_sampled.json", "--seed", "3")
    assert a == b and len(a["result"]["pairs"]) == 5


def test_budget_exit_code(tmp_path):
    code, rep, _ = run(tmp_path, "enumerate", "budget_small.json")
    assert code == 2 and rep["errors"][0]["type"] == "budget_exceeded"


def test_budget_flag_overrides_scenario(tmp_path):
    code, _, _ = run(tmp_path, "enumerate", "g1_f2_3.json", "--budget-points", "3")
    assert code == 2


def test_invalid_scenarios_exit_1(tmp_path):
    assert run(tmp_path, "enumerate", {"schema_version": 9, "variety": {}})[0] == 1
    assert run(tmp_path, "classify", {"schema_version": 1})[0] == 1
    assert run(tmp_path, "limit", {"system": {"corpus": "missing"}})[0] == 1
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli.main(["enumerate", "--scenario", str(bad)]) == 1


def test_invariant_violation_exit_3(tmp_path, monkeypatch):
    real = cli.compose_all

    def skewed(specs):
        c = real(specs)
        swap = LinearMap(Matrix.from_rows(F2, [[0, 1, 0], [1, 0, 0], [0, 0, 1]]))
        return StdExtSpec(STRICT, c.source, c.target, c.u_chain, (swap.compose(c.eps[0]),), c.pbar)

    monkeypatch.setattr(cli, "compose_all", skewed)
    code, rep, _ = run(tmp_path, "compose", {"specs": [{"corpus": "g1_f2_3__g2_f2_4"},
                                                       {"corpus": "g2_f2_4__g3_f2_5"}]})
    assert code == 3 and rep["errors"][0]["type"] == "invariant_violation"


@pytest.mark.parametrize("command,scenario", [
    ("enumerate", "fl12_f2_3.json"), ("classify", "plucker.json"),
    ("limit", "symplectic_limit.json"), ("apply", "apply_sampled.json"),
])
def test_reports_are_byte_identical(tmp_path, command, scenario):
    _, _, a = run(tmp_path, command, scenario)
    _, _, b = run(tmp_path, command, scenario)
    assert a == b


def test_jobs_do_not_change_output(tmp_path):
    _, _, a = run(tmp_path, "apply", {"spec": {"corpus": "fl12_f2_3__fl12_f2_4_fix"}})
    _, _, b = run(tmp_path, "apply", {"spec": {"corpus": "fl12_f2_3__fl12_f2_4_fix"}}, "--jobs", "2")
    assert a == b


def test_explicit_spec_round_trip(tmp_path):
    spec = get_spec("fl12_f2_3__fl12_f2_4_fix")
    _, a, _ = run(tmp_path, "apply", {"spec": {"corpus": "fl12_f2_3__fl12_f2_4_fix"}})
    _, b, _ = run(tmp_path, "apply", {"spec": ser.spec_to_json(spec)})
    assert a["result"] == b["result"]


def test_explicit_table_round_trip(tmp_path):
    table = ser.table_to_json(NEGATIVE_TABLES["constant_middle"]())
    _, a, _ = run(tmp_path, "classify", "ex3_3_iii.json")
    _, b, _ = run(tmp_path, "classify", {"table": table})
    assert a["result"] == b["result"]


def test_explicit_system_matches_corpus(tmp_path):
    _, rep, _ = run(tmp_path, "limit", "one_stage_explicit.json")
    assert rep["result"]["presentation"]["classes"] == [["e1"], ["e3"], ["e2"]]


def test_console_script_and_hash_seed(tmp_path):
    outs = []
    for seed in ("0", "12345"):
        out = tmp_path / f"r{seed}.json"
        env = {**os.environ, "PYTHONHASHSEED": seed}
        subprocess.run([sys.executable, "-m", "flagkit.cli", "limit", "--scenario", str(SCEN / "two_stage.json"),
                        "--out", str(out)], check=True, env=env, capture_output=True)
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def _explicit(scenario):
    """Replace corpus references by their serialized payloads."""
    out = dict(scenario)
    f = ser.field_from_json(out["field"]) if "field" in out else None
    if "spec" in out:
        out["spec"] = ser.spec_to_json(ser.spec_from_json(out["spec"], f, check=False))
    if "specs" in out:
        out["specs"] = [ser.spec_to_json(ser.spec_from_json(s, f)) for s in out["specs"]]
    if "table" in out:
        out["table"] = ser.table_to_json(ser.table_from_json(out["table"], f))
    if "system" in out:
        out["system"] = ser.system_to_json(ser.system_from_json(out["system"], f))
    return json.loads(ser.dumps(out))


COMMAND_FOR = {"variety": "enumerate", "specs": "compose", "table": "classify", "system": "limit", "spec": "apply"}


@pytest.mark.parametrize("path", sorted(p.name for p in SCEN.glob("*.json")))
def test_every_scenario_round_trips(tmp_path, path):
    scenario = json.loads((SCEN / path).read_text())
    if path.startswith("validate"):
        command = "validate"
    elif path.startswith("dualize"):
        command = "dualize"
    elif "n" in scenario:
        command = "truncate"
    else:
        command = next(c for k, c in COMMAND_FOR.items() if k in scenario)
    code_a, a, _ = run(tmp_path, command, path)
    code_b, b, _ = run(tmp_path, command, _explicit(scenario))
    assert code_a == code_b and a == b
