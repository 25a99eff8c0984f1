import json

import pytest

import main
from symbolic import NonConvergenceError


def run(capsys, *argv):
    code = main.main(list(argv))
    return code, capsys.readouterr()


def test_parse_ks():
    assert main.parse_ks("0..4") == [0, 1, 2, 3, 4]
    assert main.parse_ks("1,3") == [1, 3]
    assert main.parse_ks("2") == [2]


def test_beta_writes_a_self_describing_report(capsys):
    code, out = run(capsys, "beta", "--model", "sm", "--g", "0.1", "0.5")
    assert code == main.EXIT_OK
    report = json.loads(out.out)
    assert report["command"] == ["beta", "--model", "sm", "--g", "0.1", "0.5"]
    assert report["numbers"]["beta"]["0.5"] > 0
    assert "checks passed" in out.err


def test_report_to_file_then_revalidate(capsys, tmp_path):
    path = tmp_path / "omega.json"
    code, _ = run(capsys, "omega", "--k", "0..2", "--output", str(path))
    assert code == main.EXIT_OK
    data = json.loads(path.read_text(encoding="utf-8"))
    assert set(data["numbers"]["estimates"]) == {"0", "1", "2"}
    code, out = run(capsys, "report", str(path), "--format", "text")
    assert code == main.EXIT_OK
    assert "omega-golden-1" in out.out


def test_unknown_suite_is_a_usage_error(capsys):
    code, out = run(capsys, "verify", "nosuch")
    assert code == main.EXIT_USAGE
    assert "invalid choice" in out.err


def test_invalid_override_is_a_usage_error(capsys):
    code, out = run(capsys, "omega", "--k", "1", "--tol", "0")
    assert code == main.EXIT_USAGE
    assert "Invalid configuration" in out.err


def test_missing_report_file(capsys, tmp_path):
    code, _ = run(capsys, "report", str(tmp_path / "missing.json"))
    assert code == main.EXIT_USAGE


def test_invalid_report_file(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"schema_version": 1}), encoding="utf-8")
    code, out = run(capsys, "report", str(path))
    assert code == main.EXIT_USAGE
    assert "Invalid report" in out.err


def test_non_convergence_exit_code(capsys, monkeypatch):
    import regulator

    def diverging(*args, **kwargs):
        raise NonConvergenceError("Ω_1 missed relative tolerance", 5.6e-6, 1e-3)

    monkeypatch.setattr(regulator, "omega_table", diverging)
    code, out = run(capsys, "omega", "--k", "1")
    assert code == main.EXIT_NON_CONVERGENCE
    assert "did not converge" in out.err


def test_config_from_file(capsys, config_file, tmp_path):
    code, _ = run(capsys, "beta", "--config", str(config_file))
    assert code == main.EXIT_OK
    # the fixture config routes reports to a file
    report = json.loads((tmp_path / "out").read_text(encoding="utf-8"))
    assert report["suite"] == "beta"


def test_failed_check_exit_code(capsys):
    code, out = run(capsys, "omega", "--k", "7")
    assert code == main.EXIT_CHECK_FAILED
    assert "omega-golden-7" in out.err


@pytest.mark.slow
def test_verify_brst(capsys):
    code, out = run(capsys, "verify", "brst")
    assert code == main.EXIT_OK
    assert all(v["status"] == "pass" for v in json.loads(out.out)["verdicts"])
