"""Counterterm coefficients from invariance under the renormalized BRST rules"""
import logging
from dataclasses import dataclass
from typing import Dict, Tuple

import sympy

from basis.ansatz import C, D_COMPONENTS, E_COMPONENTS, Ansatz, build_ansatz, expand_tensors
from symbolic import Expression, Monomial, coefficient_map, contract_metric, ibp_reduce
from symbolic.ibp import DEFAULT_DEPTH
from symbolic.verdicts import CheckResult
from transform.checks import check_action_invariance
from transform.general import ConstraintSystemError, substitute_coefficients
from transform.rules import RuleSet, rule_set
from transform.variation import vary

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CountertermSolution:
    equations: Tuple[sympy.Expr, ...]
    solution: Dict[sympy.Symbol, sympy.Expr]
    free_parameters: Tuple[sympy.Symbol, ...]
    # unknowns whose terms are total derivatives; fixed to zero
    redundant: Tuple[sympy.Symbol, ...]
    lagrangian: Expression
    check: CheckResult


def _free_symbols(expr: Expression):
    symbols = set()
    for term in expr.terms:
        symbols |= term.coeff.free_symbols
    return tuple(sorted(symbols, key=lambda s: s.name))


def solve_counterterm_constraints(ansatz: Ansatz = None, rules: RuleSet = None,
                                  depth: int = DEFAULT_DEPTH) -> CountertermSolution:
    """Linear solve for c, d and e such that the ansatz is invariant up to total derivatives"""
    ansatz = ansatz or build_ansatz()
    rules = rules or rule_set("reduced-brst")
    expanded = expand_tensors(ansatz.lagrangian)
    unknowns = [C, *D_COMPONENTS, *E_COMPONENTS]

    reduced = ibp_reduce(contract_metric(vary(expanded, rules)), depth)
    logger.info("varied ansatz reduces to %d monomials (%s)", len(reduced.residual), reduced.status)
    equations = sorted({sympy.factor(c) for c in coefficient_map(reduced.residual).values()} - {0}, key=str)
    solutions = sympy.solve(equations, unknowns, dict=True)
    if not solutions:
        raise ConstraintSystemError("counterterm constraints are inconsistent", equations)
    solution = solutions[0]
    partial = substitute_coefficients(expanded, solution)
    redundant = tuple(u for u in unknowns if u not in solution and _is_total_derivative(partial, u, depth))
    zeros = dict.fromkeys(redundant, 0)
    solution = {k: sympy.factor(sympy.sympify(v).subs(zeros)) for k, v in solution.items()}
    solution.update(zeros)
    undetermined = [u for u in unknowns if u not in solution]
    if undetermined:
        logger.warning("constraints leave %s undetermined", ", ".join(map(str, undetermined)))

    solved = substitute_coefficients(expanded, solution)
    check = check_action_invariance(solved, rules, depth=depth, check_id="counterterm-invariance",
                                    reference="solved counterterm Lagrangian is invariant under the renormalized BRST rules")
    return CountertermSolution(tuple(equations), solution, _free_symbols(solved), redundant, solved, check)


def _is_total_derivative(expr: Expression, unknown: sympy.Symbol, depth: int) -> bool:
    terms = tuple(Monomial(sympy.diff(t.coeff, unknown), t.factors) for t in expr.terms)
    part = Expression(tuple(t for t in terms if t.coeff != 0))
    return ibp_reduce(part, depth).equivalent
