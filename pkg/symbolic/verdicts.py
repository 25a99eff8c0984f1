"""Pass/fail verdicts produced by the identity checks"""
from dataclasses import dataclass, field
from typing import Dict, Tuple

from symbolic.canonical import canonical_is_exact
from symbolic.expression import Expression

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class CheckResult:
    check_id: str
    reference: str
    status: str
    residual: Expression = field(default_factory=Expression)
    detail: str = ""
    witness: Tuple = ()
    numbers: Dict[str, object] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == PASS


def verdict(check_id: str, reference: str, residual: Expression, detail: str = "") -> CheckResult:
    """Pass iff the residual expression is identically zero

    A nonzero residual holding a monomial whose canonical search was truncated
    may still cancel, so it is inconclusive rather than a failure.
    """
    if residual.is_zero:
        return CheckResult(check_id, reference, PASS, residual, detail)
    truncated = sum(1 for t in residual.terms if not canonical_is_exact(t))
    if truncated:
        note = f"{truncated} residual monomials exceed the canonical ordering limit"
        return CheckResult(check_id, reference, INCONCLUSIVE, residual, "; ".join(filter(None, (detail, note))))
    return CheckResult(check_id, reference, FAIL, residual, detail)


def flag(check_id: str, reference: str, ok: bool, detail: str = "", **numbers) -> CheckResult:
    return CheckResult(check_id, reference, PASS if ok else FAIL, detail=detail, numbers=numbers)
