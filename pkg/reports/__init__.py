"""Check suites, report documents and golden files"""
from reports.emit import FORMATS, ReportError, emit_report, load_report, render, validate_report
from reports.commands import basis_report, beta_report, build_report, feynman_report, omega_report
from reports.golden import bless_omega, golden_deviations
from reports.models import SCHEMA_VERSION, TOOL_VERSION, Report, Verdict, inputs_digest
from reports.suites import SUITE_NAMES, SUITES, UnknownSuiteError, run_check_suite
