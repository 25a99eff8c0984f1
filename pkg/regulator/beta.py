"""One-loop beta functions in units of the regularized Ω₁"""
import logging
import math
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from regulator.omega import omega_closed

logger = logging.getLogger(__name__)

PURE = "pure"
STANDARD_MODEL = "sm"

# β(g) = coefficient · g³/(2π)² · Ω₁
BETA_COEFFICIENTS = {
    PURE: Fraction(-11, 3),
    STANDARD_MODEL: Fraction(2),
}


@lru_cache(maxsize=1)
def default_omega1() -> float:
    return omega_closed(1).value


def beta(g: float, model: str = PURE, omega1: Optional[float] = None) -> float:
    if model not in BETA_COEFFICIENTS:
        raise ValueError(f"unknown model '{model}', expected one of {sorted(BETA_COEFFICIENTS)}")
    if omega1 is None:
        omega1 = default_omega1()
    value = float(BETA_COEFFICIENTS[model]) * g ** 3 / (2.0 * math.pi) ** 2 * omega1
    logger.debug("β_%s(%g) = %.6g with Ω₁ = %.6g", model, g, value, omega1)
    return value


def beta_pure(g: float, omega1: Optional[float] = None) -> float:
    """Pure gauge theory; negative for g > 0"""
    return beta(g, PURE, omega1)


def beta_sm(g: float, omega1: Optional[float] = None) -> float:
    """Gauge field coupled to all Standard Model fields; positive for g > 0"""
    return beta(g, STANDARD_MODEL, omega1)
