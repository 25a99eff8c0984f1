import io
import json
from pathlib import Path

import jsonschema
import pytest

from config.config_loader import WorkbenchConfig
from feynman import DanglingIndexError
from regulator import load_golden, omega_exact
from reports import (
    ReportError, UnknownSuiteError, basis_report, beta_report, bless_omega, emit_report, feynman_report,
    inputs_digest, load_report, omega_report, render, run_check_suite, validate_report,
)
from reports.models import Report, Verdict
from symbolic import to_text
from symbolic.verdicts import verdict

DIAGRAMS = Path(__file__).resolve().parent.parent / "diagrams"


@pytest.fixture(scope="module")
def beta_suite_report():
    return run_check_suite("beta")


def test_suite_report_passes(beta_suite_report):
    report = beta_suite_report
    assert report.suite == "beta"
    assert report.command == ["verify", "beta"]
    assert report.passed and report.exit_code == 0
    assert all(v.reference for v in report.verdicts)
    assert report.seed is None
    assert report.timing is None
    assert report.numbers["beta"]["omega1"] > 0


def test_same_run_gives_byte_identical_json(beta_suite_report):
    assert render(run_check_suite("beta")) == render(beta_suite_report)


def test_report_validates_against_schema(beta_suite_report):
    validate_report(json.loads(render(beta_suite_report)))


def test_schema_rejects_unknown_status(beta_suite_report):
    data = json.loads(render(beta_suite_report))
    data["verdicts"][0]["status"] = "maybe"
    with pytest.raises(jsonschema.ValidationError):
        validate_report(data)


def test_unknown_suite():
    with pytest.raises(UnknownSuiteError):
        run_check_suite("nonexistent")


def test_timing_only_when_enabled():
    report = run_check_suite("beta", WorkbenchConfig(report={"timing": True}))
    assert set(report.timing) == {"beta"}


def test_digest_tracks_command_and_config():
    a = inputs_digest(["verify", "beta"], {"seed": 1})
    assert len(a) == 64
    assert a == inputs_digest(["verify", "beta"], {"seed": 1})
    assert a != inputs_digest(["verify", "beta"], {"seed": 2})
    assert a != inputs_digest(["verify", "omega"], {"seed": 1})


def test_emit_to_file_and_load_back(tmp_path, beta_suite_report):
    path = tmp_path / "nested" / "beta.json"
    text = emit_report(beta_suite_report, path=path)
    assert path.read_text(encoding="utf-8") == text
    assert load_report(path) == beta_suite_report


def test_emit_to_unwritable_path(tmp_path, beta_suite_report):
    blocker = tmp_path / "blocker"
    blocker.write_text("", encoding="utf-8")
    with pytest.raises(ReportError):
        emit_report(beta_suite_report, path=blocker / "report.json")


def test_unknown_format(beta_suite_report):
    with pytest.raises(ReportError):
        render(beta_suite_report, "xml")


def test_truncated_canonical_search_is_inconclusive(p, monkeypatch):
    from symbolic import canonical

    tied = p("h[.al]*h[al]")
    untied = p("h[.al]*d[mu](A[.mu,al])")
    assert canonical.ordering_count(tied.terms[0]) == 2
    monkeypatch.setattr(canonical, "MAX_ORDERINGS", 1)
    result = verdict("demo-truncated", "tied factors past the ordering limit", tied)
    assert result.status == "inconclusive"
    assert "ordering limit" in result.detail
    assert verdict("demo-untied", "no ties", untied).status == "fail"
    assert verdict("demo-zero", "zero residual", p("0")).status == "pass"


def test_text_mode_renders_residuals(p):
    residual = p("1/2*h[.al]*h[al]")
    report = Report(command=["demo"], suite="demo", inputs_digest="0" * 64,
                    verdicts=[Verdict.from_check(verdict("demo-residual", "residual rendering", residual))])
    stream = io.StringIO()
    emit_report(report, "text", stream=stream)
    text = stream.getvalue()
    assert "FAIL" in text
    assert to_text(residual) in text
    assert report.exit_code == 1


def test_omega_report_checks_golden_values():
    report = omega_report(WorkbenchConfig(), [0, 1])
    assert report.passed
    assert {v.check_id for v in report.verdicts} == {"omega-golden-0", "omega-golden-1"}
    assert report.numbers["reconciliation"]["factor"] == "8"
    assert report.numbers["estimates"]["1"]["method"] == "closed"


def test_omega_report_without_golden_value_is_inconclusive():
    report = omega_report(WorkbenchConfig(regulator={"k_max": 6}), [6])
    assert [v.status for v in report.verdicts] == ["inconclusive"]
    assert report.exit_code == 1


def test_bless_writes_exact_values(tmp_path):
    path = tmp_path / "omega.json"
    bless_omega([0, 1], path=path)
    golden = load_golden(path)
    assert golden[1].value == pytest.approx(float(omega_exact(1)), rel=1e-12)
    assert golden[0].method == "exact"


def test_beta_report_signs():
    pure = beta_report(WorkbenchConfig(), "pure", [0.1, 0.5])
    sm = beta_report(WorkbenchConfig(), "sm", [0.5])
    assert pure.passed and sm.passed
    assert pure.numbers["beta"]["0.5"] < 0 < sm.numbers["beta"]["0.5"]
    with pytest.raises(ValueError):
        beta_report(WorkbenchConfig(), "qed", [0.1])


def test_basis_enumerate_report():
    report = basis_report(WorkbenchConfig(), "enumerate", "ghost")
    assert report.passed
    assert len(report.numbers["operators"]) == 2
    assert [v.check_id for v in report.verdicts] == ["basis-ghost-admissible", "basis-ghost-count"]
    assert report.numbers["scanned"] > 2 and report.numbers["rejected"]["ghost_neutral"] > 0


def test_feynman_vertex_and_propagator_reports():
    v = feynman_report(WorkbenchConfig(), "vertex", kind="AAA")
    assert v.numbers["kind"] == "AAA" and v.numbers["expression"]
    prop = feynman_report(WorkbenchConfig(), "propagator", species="ghost")
    assert prop.numbers["denominator"] == "D_p"


def test_feynman_contract_report():
    report = feynman_report(WorkbenchConfig(), "contract", diagram=str(DIAGRAMS / "ghost_loop.json"))
    assert report.passed
    assert report.numbers["loops"] == 1


def test_printed_ghost_vertex_fails_contraction():
    with pytest.raises(DanglingIndexError):
        feynman_report(WorkbenchConfig(), "contract", diagram=str(DIAGRAMS / "ghost_loop.json"), variant="printed")
