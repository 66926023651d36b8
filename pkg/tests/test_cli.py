import json

import pytest

from ddqsim.cli import main
from ddqsim.qasm import parse_qasm


def test_run_smoke_with_report(tmp_path, capsys):
    report = tmp_path / "r.json"
    rc = main([
        "run", "--circuit", "qcbm:q=4,layers=1", "--ranks", "2",
        "--comm", "ring", "--swap", "v2", "--report", str(report),
    ])
    assert rc == 0
    body = json.loads(report.read_text())
    assert body["schema_version"] == 1
    assert body["config"]["ranks"] == 2
    assert "ok" in capsys.readouterr().out


def test_run_rejects_rank_three(capsys):
    rc = main(["run", "--circuit", "qcbm:q=4,layers=1", "--ranks", "3"])
    assert rc == 2
    assert "power of two" in capsys.readouterr().err


def test_run_needs_exactly_one_source(capsys):
    assert main(["run"]) == 2
    assert main(["run", "--circuit", "qcbm:q=3,layers=1", "--qasm", "nope.qasm"]) == 2


def test_missing_qasm_file(capsys):
    assert main(["run", "--qasm", "/definitely/not/here.qasm"]) == 2


def test_unknown_flag_is_usage_error(capsys):
    assert main(["run", "--circuit", "qcbm:q=3,layers=1", "--warp", "9"]) == 2


def test_unknown_subcommand(capsys):
    assert main(["frobnicate"]) == 2


def test_gen_writes_parseable_qasm(tmp_path, capsys):
    out = tmp_path / "c.qasm"
    rc = main(["gen", "--circuit", "qcbm:q=3,layers=2", "--seed", "5", "--out", str(out)])
    assert rc == 0
    circuit = parse_qasm(out.read_text())
    assert circuit.n_qubits == 3 and len(circuit) == 24


def test_gen_to_stdout(capsys):
    rc = main(["gen", "--circuit", "qcbm:q=2,layers=1"])
    assert rc == 0
    assert capsys.readouterr().out.startswith("OPENQASM 2.0;")


def test_gen_shor_circuit(tmp_path):
    out = tmp_path / "shor.qasm"
    assert main(["gen", "--circuit", "shor:n=15,a=7", "--out", str(out)]) == 0
    assert parse_qasm(out.read_text()).n_qubits == 18


def test_run_from_qasm_file(tmp_path):
    out = tmp_path / "c.qasm"
    main(["gen", "--circuit", "qcbm:q=3,layers=1", "--out", str(out)])
    rc = main(["run", "--qasm", str(out), "--ranks", "2", "--swap", "v1", "--shots", "32"])
    assert rc == 0


def test_verify_small_qcbm(capsys):
    rc = main(["verify", "--circuit", "qcbm:q=4,layers=2", "--ranks", "2", "--swap", "v2"])
    assert rc == 0
    assert "fidelity" in capsys.readouterr().out


def test_bench_report(tmp_path, capsys):
    report = tmp_path / "bench.json"
    rc = main(["bench", "--circuit", "qcbm:q=3,layers=1", "--ranks", "2",
               "--report", str(report)])
    assert rc == 0
    body = json.loads(report.read_text())
    assert len(body["entries"]) == 12


def test_socket_transport_flag():
    rc = main(["run", "--circuit", "qcbm:q=3,layers=1", "--ranks", "2",
               "--transport", "socket"])
    assert rc == 0


def test_sequential_flag():
    rc = main(["run", "--circuit", "qcbm:q=3,layers=1", "--ranks", "2", "--sequential"])
    assert rc == 0


def test_unreachable_server_is_run_failure(capsys):
    rc = main(["--server", "http://127.0.0.1:1", "run",
               "--circuit", "qcbm:q=3,layers=1"])
    assert rc == 1
    assert "transport error" in capsys.readouterr().err


def test_verify_oracle_guard_is_usage_error(capsys):
    # 28 qubits exceed the dense-oracle guard; verify must refuse cleanly
    rc = main(["verify", "--circuit", "qcbm:q=28,layers=1", "--ranks", "2"])
    assert rc == 2
    assert "guard" in capsys.readouterr().err


@pytest.mark.parametrize(
    "spec",
    [
        "shor:n=0",            # regression: used to loop hunting for a base
        "shor:n=-15",
        "shor:n=2",
        "shor:n=15,a=20",
        "qcbm:q=-3,layers=1",
        "qcbm:q=3",
        "shor:n=abc",
        "ghz:q=3",
        "",
    ],
)
def test_malformed_circuit_specs_are_usage_errors(spec, capsys):
    assert main(["gen", "--circuit", spec]) == 2
