"""JSON and text rendering of reports"""
import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional, TextIO, Union

import jsonschema

from reports.models import Report
from symbolic import WorkbenchError

logger = logging.getLogger(__name__)

SCHEMA_PATH = Path(__file__).resolve().parent.parent / "schema" / "report.schema.json"
FORMATS = ("json", "text")


class ReportError(WorkbenchError):
    pass


def to_json(report: Report) -> str:
    return json.dumps(report.model_dump(mode="json"), indent=2, ensure_ascii=False) + "\n"


def to_text(report: Report) -> str:
    lines = [f"{report.tool} {report.version} :: {report.suite} ({' '.join(report.command)})"]
    for v in report.verdicts:
        lines.append(f"[{v.status.upper():>12}] {v.check_id}: {v.reference}")
        if v.detail:
            lines.append(f"{'':15}{v.detail}")
        if v.residual:
            lines.append(f"{'':15}residual: {v.residual}")
    passed = sum(1 for v in report.verdicts if v.passed)
    lines.append(f"{passed}/{len(report.verdicts)} checks passed")
    return "\n".join(lines) + "\n"


def render(report: Report, fmt: str = "json") -> str:
    if fmt not in FORMATS:
        raise ReportError(f"Unknown report format '{fmt}'; choose from {', '.join(FORMATS)}")
    return to_json(report) if fmt == "json" else to_text(report)


def emit_report(report: Report, fmt: str = "json", path: Union[str, Path, None] = None,
                stream: Optional[TextIO] = None) -> str:
    """Write the rendered report to path, or to stream when no path is given"""
    text = render(report, fmt)
    if path is not None:
        path = Path(path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, "w", encoding="utf-8") as f:
                f.write(text)
        except OSError as e:
            raise ReportError(f"Cannot write report to {path}: {e}") from e
        logger.info("Report written to %s", path)
    elif stream is not None:
        stream.write(text)
    return text


def load_schema() -> Dict[str, Any]:
    with open(SCHEMA_PATH, "r", encoding="utf-8") as f:
        return json.load(f)


def validate_report(data: Dict[str, Any]) -> None:
    """Raise jsonschema.ValidationError when data is not a valid report document"""
    jsonschema.validate(instance=data, schema=load_schema())


def load_report(path: Union[str, Path]) -> Report:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Report not found: {path}")
    with open(path, "r", encoding="utf-8") as f:
        data = json.load(f)
    validate_report(data)
    return Report.model_validate(data)
