"""Pair a solved Lagrangian with the tree-level terms it renormalizes"""
import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import sympy

from symbolic import Expression, canonicalize, coefficient_map, monomial_key, parse
from symbolic.calculus import apply_divergence_constraint
from symbolic.expression import Monomial
from transform.lagrangians import gauge_lagrangian, matter_lagrangian

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TermMatch:
    name: str
    constant: Optional[sympy.Expr]

    @property
    def matched(self) -> bool:
        return self.constant is not None


@dataclass(frozen=True)
class RenormalizationMap:
    matches: Tuple[TermMatch, ...]
    unmatched: Expression

    @property
    def complete(self) -> bool:
        return self.unmatched.is_zero and all(m.matched for m in self.matches)

    def constant(self, name: str) -> Optional[sympy.Expr]:
        return next((m.constant for m in self.matches if m.name == name), None)


def bare_terms(rescaled: bool = True) -> List[Tuple[str, Expression]]:
    """Tree-level term blocks with unit normalization; ∇ carries 1/N when rescaled"""
    k = "N^-1*" if rescaled else ""
    return [
        ("gauge-kinetic", gauge_lagrangian(rescaled=rescaled)),
        ("ghost-kinetic", parse("-d[mu](ws[.al])*d[.mu](w[al])")),
        ("ghost-gauge", parse(f"-{k}d[mu](ws[.al])*A[.mu,be]*nab[.be](w[al])"
                              f" + {k}d[mu](ws[.al])*w[be]*nab[.be](A[.mu,al])")),
        ("nl-gauge", parse("h[.al]*d[mu](A[.mu,al])")),
        ("nl-mass", parse("1/2*h[.al]*h[al]")),
        ("matter-kinetic", matter_lagrangian(rescaled, wave="1", mass="0")),
        ("matter-mass", parse("-psibar*psi")),
    ]


def match_to_bare(solved: Expression, rescaled: bool = True) -> RenormalizationMap:
    """One multiplicative constant per tree-level block; leftovers are reported unmatched"""
    solved = apply_divergence_constraint(canonicalize(solved))
    remaining = coefficient_map(solved)
    factors = {monomial_key(t): t.factors for t in solved.terms}
    matches = []
    for name, block in bare_terms(rescaled):
        reference = coefficient_map(block)
        first = next(iter(reference))
        if first not in remaining:
            matches.append(TermMatch(name, None))
            continue
        constant = sympy.factor(remaining[first] / reference[first])
        if all(key in remaining and sympy.simplify(remaining[key] - constant * value) == 0
               for key, value in reference.items()):
            for key in reference:
                del remaining[key]
            matches.append(TermMatch(name, constant))
            logger.debug("%s matched with constant %s", name, constant)
        else:
            matches.append(TermMatch(name, None))
    unmatched = Expression(tuple(Monomial(c, factors[key]) for key, c in remaining.items()))
    return RenormalizationMap(tuple(matches), canonicalize(unmatched))


def renormalized_lagrangian(counterterms: Expression) -> Expression:
    """Solved ghost and NL sector plus the gauge-invariant gauge and matter sector"""
    gauge = gauge_lagrangian(rescaled=True, coefficient="-1/4*Z_A")
    return canonicalize(counterterms + gauge + matter_lagrangian(rescaled=True))
