"""Regularized inner shell integrals Ω_k from the one-dimensional closed form"""
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Dict, Iterable, Optional, Union

import sympy
from scipy import integrate

from symbolic.errors import NonConvergenceError

logger = logging.getLogger(__name__)

GOLDEN_PATH = Path(__file__).resolve().parent.parent / "golden" / "omega.json"
GOLDEN_DIGITS = 12

CLOSED = "closed"
ORACLE = "oracle2d"
MONTE_CARLO = "montecarlo"
METHODS = (CLOSED, ORACLE, MONTE_CARLO)

# the value quoted for Ω₁ in the literature
LITERATURE_OMEGA1 = sympy.Rational(1, 720) / (4 * sympy.pi) ** 3


def shell_prefactor(k: int) -> float:
    """1 / ((2π)³ 4^{k+2}); collects the measure (2π)⁻⁴, the solid angle 4π,
    the two light cones and the δ-function Jacobian 1/2"""
    return 1.0 / ((2.0 * math.pi) ** 3 * 4.0 ** (k + 2))


def shell_integrand(x: float, k: int) -> float:
    """x^k (√(1−x) − x ln((√(1−x) + 1)/√x)) on 0 < x ≤ 1"""
    if x <= 0.0:
        return 0.0
    root = math.sqrt(max(1.0 - x, 0.0))
    return x ** k * (root - x * math.log((root + 1.0) / math.sqrt(x)))


@dataclass(frozen=True)
class OmegaEstimate:
    k: int
    value: float
    error: float
    method: str = CLOSED
    evaluations: int = 0
    samples: Optional[int] = None

    @property
    def relative_error(self) -> float:
        return self.error / abs(self.value) if self.value else math.inf

    def rounded(self, digits: int = GOLDEN_DIGITS) -> "OmegaEstimate":
        return OmegaEstimate(self.k, float(f"{self.value:.{digits}g}"), float(f"{self.error:.3g}"),
                             self.method, self.evaluations, self.samples)


def _quad(func, a: float, b: float, tol: float, depth: int, what: str):
    value, error, info, *problem = integrate.quad(func, a, b, epsabs=0.0, epsrel=tol,
                                                  limit=depth, full_output=1)
    if problem:
        raise NonConvergenceError(f"{what}: {problem[0].strip()}", value, error)
    return value, error, info["neval"]


def omega_closed(k: int, tol: float = 1e-10, depth: int = 200) -> OmegaEstimate:
    """Ω_k by adaptive quadrature of the one-dimensional closed form

    [0, 1/2] is mapped by x = t² and [1/2, 1] by x = 1 − s², which turns the
    x ln x and √(1−x) endpoints into smooth integrands.
    """
    if k < 0:
        raise ValueError(f"k must be non-negative, got {k}")
    if tol <= 0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    half = math.sqrt(0.5)
    low = _quad(lambda t: 2.0 * t * shell_integrand(t * t, k), 0.0, half, tol, depth, f"Ω_{k} near x=0")
    high = _quad(lambda s: 2.0 * s * shell_integrand(1.0 - s * s, k), 0.0, half, tol, depth,
                 f"Ω_{k} near x=1")
    prefactor = shell_prefactor(k)
    value = prefactor * math.fsum((low[0], high[0]))
    error = prefactor * math.fsum((low[1], high[1]))
    if error > tol * abs(value):
        raise NonConvergenceError(f"Ω_{k} missed relative tolerance {tol}", value, error)
    evaluations = low[2] + high[2]
    logger.debug("Ω_%d closed form: %.15g ± %.3g (%d evaluations)", k, value, error, evaluations)
    return OmegaEstimate(k, value, error, CLOSED, evaluations)


@lru_cache(maxsize=None)
def omega_exact(k: int) -> sympy.Expr:
    """Exact Ω_k as a rational multiple of π⁻³

    Undoing the momentum integral and taking the shell integral first turns the
    one-dimensional integral into 2/(k+2) ∫₀¹ s²(1 − s²)^k ds, which has a
    polynomial antiderivative.
    """
    if k < 0:
        raise ValueError(f"k must be non-negative, got {k}")
    s = sympy.Symbol("s")
    moment = sympy.integrate(s ** 2 * (1 - s ** 2) ** k, (s, 0, 1))
    integral = sympy.Rational(2, k + 2) * moment
    return integral / ((2 * sympy.pi) ** 3 * 4 ** (k + 2))


def exact_estimate(k: int) -> OmegaEstimate:
    return OmegaEstimate(k, float(omega_exact(k)), 0.0, "exact", 0)


@dataclass
class OmegaTable:
    """Ω_k values keyed by k, all from one method"""
    entries: Dict[int, OmegaEstimate] = field(default_factory=dict)

    def __post_init__(self):
        for k, entry in self.entries.items():
            if not (math.isfinite(entry.value) and entry.value > 0):
                raise ValueError(f"Ω_{k} must be positive and finite, got {entry.value}")

    def __getitem__(self, k: int) -> OmegaEstimate:
        return self.entries[k]

    def __iter__(self):
        return iter(sorted(self.entries))

    @property
    def values(self) -> Dict[int, float]:
        return {k: self.entries[k].value for k in sorted(self.entries)}

    @property
    def is_decreasing(self) -> bool:
        ks = sorted(self.entries)
        return all(self.entries[a].value > self.entries[b].value for a, b in zip(ks, ks[1:]))

    def to_dict(self, digits: int = GOLDEN_DIGITS) -> Dict:
        rows = []
        for k in sorted(self.entries):
            row = asdict(self.entries[k].rounded(digits))
            row["exact"] = str(omega_exact(k))
            rows.append(row)
        return {"schema_version": 1, "digits": digits, "entries": rows}

    @classmethod
    def from_dict(cls, data: Dict) -> "OmegaTable":
        entries = {}
        for row in data.get("entries", []):
            row = {key: value for key, value in row.items() if key != "exact"}
            entries[int(row["k"])] = OmegaEstimate(**row)
        return cls(entries)


def omega_table(ks: Iterable[int], method: str = CLOSED, workers: Optional[int] = None,
                **options) -> OmegaTable:
    """Evaluate Ω_k for every k concurrently with one method"""
    from regulator.oracle import omega_monte_carlo, omega_oracle
    compute = {CLOSED: omega_closed, ORACLE: omega_oracle, MONTE_CARLO: omega_monte_carlo}.get(method)
    if compute is None:
        raise ValueError(f"unknown method '{method}', expected one of {METHODS}")
    ks = sorted(set(ks))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(lambda k: compute(k, **options), ks))
    logger.info("Computed Ω_k for k=%s with %s", ks, method)
    return OmegaTable({r.k: r for r in results})


def write_golden(table: OmegaTable, path: Union[str, Path] = GOLDEN_PATH) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(table.to_dict(), f, indent=2)
        f.write("\n")
    logger.info("Blessed %d golden Ω values into %s", len(table.entries), path)
    return path


def load_golden(path: Union[str, Path] = GOLDEN_PATH) -> OmegaTable:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Golden file not found: {path}")
    with open(path, "r", encoding="utf-8") as f:
        return OmegaTable.from_dict(json.load(f))


@dataclass(frozen=True)
class Reconciliation:
    """Computed Ω_k set against the literature value"""
    k: int
    exact: sympy.Expr
    closed: float
    oracle: Optional[float]
    literature: sympy.Expr
    factor: sympy.Rational

    def to_dict(self) -> Dict:
        return {
            "k": self.k,
            "exact": str(self.exact),
            "closed": self.closed,
            "oracle": self.oracle,
            "literature": str(self.literature),
            "literature_value": float(self.literature),
            "factor": str(self.factor),
        }


def reconcile(closed: OmegaEstimate, oracle: Optional[OmegaEstimate] = None) -> Reconciliation:
    """Exact rational factor between the computed Ω₁ and the literature value"""
    if closed.k != 1:
        raise ValueError("the literature quotes Ω₁ only")
    exact = omega_exact(1)
    factor = sympy.nsimplify(exact / LITERATURE_OMEGA1)
    if not factor.is_Rational:
        logger.warning("Ω₁ differs from the literature by a non-rational factor %s", factor)
    return Reconciliation(1, exact, closed.value, None if oracle is None else oracle.value,
                          LITERATURE_OMEGA1, factor)
