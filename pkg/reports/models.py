"""Report documents emitted by the CLI and the report API"""
import hashlib
import json
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, Field

from symbolic import to_text
from symbolic.verdicts import CheckResult

SCHEMA_VERSION = 1
TOOL = "vpd-workbench"
TOOL_VERSION = "0.1.0"

Status = Literal["pass", "fail", "inconclusive"]


class Verdict(BaseModel):
    check_id: str
    reference: str
    status: Status
    residual: str = ""
    detail: str = ""
    numbers: Dict[str, Any] = Field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    @classmethod
    def from_check(cls, result: CheckResult) -> "Verdict":
        residual = "" if result.residual.is_zero else to_text(result.residual)
        numbers = {key: plain(result.numbers[key]) for key in sorted(result.numbers)}
        return cls(check_id=result.check_id, reference=result.reference, status=result.status,
                   residual=residual, detail=result.detail, numbers=numbers)


class Report(BaseModel):
    schema_version: int = SCHEMA_VERSION
    tool: str = TOOL
    version: str = TOOL_VERSION
    command: List[str]
    suite: str
    inputs_digest: str
    seed: Optional[int] = None
    verdicts: List[Verdict] = Field(default_factory=list)
    numbers: Dict[str, Any] = Field(default_factory=dict)
    timing: Optional[Dict[str, float]] = None

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)

    @property
    def failures(self) -> List[Verdict]:
        return [v for v in self.verdicts if not v.passed]

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1


def plain(value):
    """JSON-ready copy of a number, sympy value or nested container"""
    if isinstance(value, bool) or value is None or isinstance(value, (int, float, str)):
        return value
    if isinstance(value, dict):
        return {str(k): plain(value[k]) for k in sorted(value, key=str)}
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    return str(value)


def inputs_digest(command: List[str], settings: Dict[str, Any]) -> str:
    """SHA-256 over the canonical JSON of the command line and effective config"""
    payload = json.dumps({"command": list(command), "config": settings}, sort_keys=True,
                         separators=(",", ":"))
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()
