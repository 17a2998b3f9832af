import json
from pathlib import Path

import httpx
import jsonschema
import pytest
from fastapi.testclient import TestClient

from scjl2 import cli
from scjl2.api import app
from scjl2.models import json_schemas

SCHEMA_DIR = Path(cli.__file__).parent / "schemas"
SCHEMAS = json_schemas()
client = TestClient(app)


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_shipped_schemas_match_models():
    shipped = {p.stem: json.loads(p.read_text()) for p in SCHEMA_DIR.glob("*.json")}
    assert shipped == SCHEMAS


def test_check_builtin(capsys):
    code, out, _ = run(capsys, "check", "--topology", "two-thread-buffer", "--protocol", "proposed")
    report = json.loads(out)
    jsonschema.validate(report, SCHEMAS["exploration-report"])
    assert code == 0
    assert report["states"] == 1328 and report["divergences"] == [] and report["deadlocks"] == []


def test_check_model_file(tmp_path, capsys):
    f = tmp_path / "m.cmodel"
    f.write_text("cmodel 1\nchannel a\nmain M = a -> Stop\n")
    code, out, _ = run(capsys, "check", "--model", str(f))
    assert code == 1 and json.loads(out)["deadlocks"] == [["a"]]


def test_compare(capsys):
    code, out, _ = run(capsys, "compare", "--topology", "two-thread-buffer")
    report = json.loads(out)
    jsonschema.validate(report, SCHEMAS["comparison-report"])
    assert code == 0
    assert set(report) == {"current", "proposed", "reduction", "inconclusive"}
    assert report["reduction"] >= 0.5


def test_state_limit_exits_2(monkeypatch, capsys):
    monkeypatch.setenv("MK_MAX_STATES", "100")
    code, out, _ = run(capsys, "check", "--topology", "two-thread-buffer")
    assert code == 2 and json.loads(out)["truncated"]


def test_order_forall_precedes(capsys):
    code, out, _ = run(capsys, "order", "--topology", "two-thread-buffer",
                       "--first", "start_mission.m1", "--second", "initializeCall.m1")
    report = json.loads(out)
    jsonschema.validate(report, SCHEMAS["order-report"])
    assert code == 0 and report["verdict"] == "holds"


def test_order_expect_fail(capsys):
    code, out, _ = run(capsys, "order", "--topology", "two-thread-buffer",
                       "--first", "initializeCall.m1", "--second", "start_mission.m1", "--expect", "fail")
    assert code == 0 and json.loads(out)["verdict"] == "fails"
    code, _, _ = run(capsys, "order", "--topology", "two-thread-buffer",
                     "--first", "initializeCall.m1", "--second", "start_mission.m1")
    assert code == 1


def test_sim_table_scenario(capsys):
    code, out, _ = run(capsys, "sim", "--scenario", "table-servers.json", "--horizon", "1000")
    report = json.loads(out)
    jsonschema.validate(report, SCHEMAS["sim-trace"])
    assert code == 0 and len(report["perTick"]) == 1000


def test_sim_text_output_is_a_chart(tmp_path, capsys):
    dest = tmp_path / "g.txt"
    code, _, _ = run(capsys, "sim", "--scenario", "table-servers", "--format", "text", "--output", str(dest))
    assert code == 0 and "S1" in dest.read_text()


def test_emit_model_parses_back(capsys):
    from scjl2.dsl import parse
    code, out, _ = run(capsys, "emit-model", "--topology", "nested-pair", "--protocol", "proposed")
    assert code == 0 and parse(out).main


@pytest.mark.parametrize("argv", [
    ["check"],
    ["check", "--topology", "no-such-topology"],
    ["check", "--topology", "two-thread-buffer", "--hide", "nonexistent"],
    ["order", "--topology", "two-thread-buffer", "--first", "a"],
    ["order", "--topology", "two-thread-buffer", "--first", "nope.x", "--second", "start_mission"],
    ["sim", "--scenario", "missing.json"],
    ["frobnicate"],
])
def test_input_errors_exit_3(argv, capsys):
    with pytest.raises(SystemExit) as e:
        raise SystemExit(cli.main(argv))
    assert e.value.code == 3


def test_ill_formed_model_is_an_input_error(tmp_path, capsys):
    f = tmp_path / "m.cmodel"
    f.write_text("cmodel 1\nchannel a\nvar x : BOOL = FALSE\nmain M = (x := TRUE) ||| a -> Skip\n")
    code, _, err = run(capsys, "check", "--model", str(f))
    assert code == 3 and "name set" in err


def test_syntax_error_reports_position(tmp_path, capsys):
    f = tmp_path / "bad.cmodel"
    f.write_text("cmodel 1\nchannel a\nmain M = a -> $\n")
    code, _, err = run(capsys, "check", "--model", str(f))
    assert code == 3 and f"{f}:3:15:" in err


# -- service ---------------------------------------------------------------------

def test_health_and_builtins():
    assert client.get("/health").json()["status"] == "ok"
    b = client.get("/builtins").json()
    assert "nested-pair" in b["topologies"] and "table-servers" in b["scenarios"]
    assert client.get("/schemas").json() == SCHEMAS


def test_api_check():
    r = client.post("/check", json={"topology": {"builtin": "two-thread-buffer"}, "protocol": "proposed"})
    assert r.status_code == 200
    body = r.json()
    assert body["exitCode"] == 0 and body["report"]["states"] == 1328


def test_api_input_error_is_422():
    r = client.post("/check", json={"topology": {"builtin": "nope"}})
    assert r.status_code == 422 and isinstance(r.json()["detail"], str)
    r = client.post("/sim", json={"scenario": {"builtin": "table-servers", "text": "{}"}})
    assert r.status_code == 422


def test_cli_server_mode_matches_local(monkeypatch, capsys):
    def post(url, json, timeout):
        path = "/" + url.split("/", 3)[3]
        return client.post(path, json=json)

    monkeypatch.setattr(httpx, "post", post)
    argv = ["sim", "--scenario", "table-servers", "--horizon", "300"]
    local = run(capsys, *argv)
    remote = run(capsys, "--server", "http://svc", *argv)
    assert local == remote and local[0] == 0
    code, _, err = run(capsys, "--server", "http://svc", "check", "--topology", "nope")
    assert code == 3 and "nope" in err
