"""Constraint solving for the most general local BRST ansatz"""
import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import sympy

from symbolic import (
    Expression, Monomial, WorkbenchError, apply_divergence_constraint, canonicalize, coefficient_map,
    contract_metric, derive, make_atom, substitute,
)
from symbolic.atoms import FieldAtom
from symbolic.indices import Index
from transform.checks import check_nilpotent
from transform.rules import RuleSet, rule_set

logger = logging.getLogger(__name__)

E_SYM, E_ANTI, D_SYM, D_ANTI, B_TRACE, B_REST = sympy.symbols("E_sym E_anti D_sym D_anti B_trace B_rest")
K_B, K_C, K_D, K_E = sympy.symbols("k_B k_C k_D k_E")
B, C, Z, G, N = sympy.symbols("B C Z G N")
_NONTRIVIAL = {C, G, Z}

# inner metric in components and a general rank-2 tensor T^α_β
INNER_METRIC = sympy.diag(-1, 1, 1, 1)
RANK2 = sympy.Matrix(4, 4, sympy.symbols("t0:16"))


class ConstraintSystemError(WorkbenchError):
    def __init__(self, message: str, equations: Sequence[sympy.Expr]):
        self.equations = list(equations)
        super().__init__(f"{message}: " + "; ".join(f"{e} = 0" for e in self.equations))


@dataclass(frozen=True)
class ConstraintStep:
    name: str
    reference: str
    equations: Tuple[sympy.Expr, ...]
    solution: Dict[sympy.Symbol, sympy.Expr]


@dataclass(frozen=True)
class RuleConstraintSolution:
    steps: Tuple[ConstraintStep, ...]
    identification: Dict[sympy.Symbol, sympy.Expr]
    solved: RuleSet
    residuals: Dict[str, Expression] = field(default_factory=dict)

    @property
    def nilpotent(self) -> bool:
        return all(r.is_zero for r in self.residuals.values())


def _normal(expr: Expression) -> Expression:
    return apply_divergence_constraint(canonicalize(expr))


def _equations(expr: Expression) -> List[sympy.Expr]:
    """Every monomial coefficient of expr must vanish"""
    return [sympy.factor(c) for c in coefficient_map(_normal(expr)).values() if c != 0]


def solve_equations(equations: Sequence[sympy.Expr], unknowns: Sequence[sympy.Symbol], message: str) -> Dict:
    if not equations:
        return {}
    solutions = sympy.solve(list(equations), list(unknowns), dict=True)
    # a transformation must not collapse to the identity
    solutions = [s for s in solutions if all(v != 0 for k, v in s.items() if k in _NONTRIVIAL)]
    if not solutions:
        raise ConstraintSystemError(message, equations)
    return solutions[0]


def eta_pairings(indices: Sequence[Index]) -> List[Expression]:
    """Products of η over every perfect matching of indices"""
    indices = list(indices)
    if not indices:
        return [Expression.scalar(1)]
    first, rest = indices[0], indices[1:]
    out = []
    for k, partner in enumerate(rest):
        eta = Expression.of(make_atom("eta", (first, partner)))
        for tail in eta_pairings(rest[:k] + rest[k + 1:]):
            out.append(eta * tail)
    return out


def _split(name: str, parts: Sequence[Tuple[sympy.Symbol, str]]):
    def build(atom: FieldAtom) -> Expression:
        return Expression.sum(Expression.of(make_atom(part, atom.indices), coeff=symbol) for symbol, part in parts)
    return name, build


def _replace(template: Expression, replacements) -> Expression:
    for name, build in replacements:
        template = substitute(template, name, build)
    return template


def _divergence_step(general: RuleSet) -> ConstraintStep:
    """∇_α δω^α = 0 and ∇_α δA_μ^α = 0 with the tensors split by exchange symmetry"""
    split = [
        _split("TE", [(E_SYM, "TEs"), (E_ANTI, "TEa")]),
        _split("TD", [(D_SYM, "TDs"), (D_ANTI, "TDa")]),
        ("TB", lambda atom: Expression.of(make_atom("eta", atom.indices), coeff=B_TRACE)
         + Expression.of(make_atom("TBt", atom.indices), coeff=B_REST)),
    ]
    equations = []
    for name in ("w", "A"):
        rule = general.rule_for(name)
        own = rule.pattern.own_inner_index
        template = _replace(rule.template, split)
        equations += _equations(contract_metric(derive(template, Index(own.kind, own.label, True))))
    equations = sorted(set(equations), key=str)
    solution = solve_equations(equations, [E_SYM, D_SYM, B_REST], "divergence conditions are inconsistent")
    logger.info("divergence step: %s", solution)
    return ConstraintStep("divergence", "divergence-free variations of the ghost and gauge fields",
                          tuple(equations), solution)


def _rank2_step() -> ConstraintStep:
    """A constant T^α_β commuting with every inner Lorentz generator"""
    equations = []
    for a, b in itertools.combinations(range(4), 2):
        omega = sympy.zeros(4)
        omega[a, b], omega[b, a] = 1, -1
        generator = INNER_METRIC.inv() * omega
        equations += [e for e in generator * RANK2 - RANK2 * generator if e != 0]
    equations = sorted(set(equations), key=str)
    solution = solve_equations(equations, list(RANK2), "no invariant rank-2 tensor")
    return ConstraintStep("lorentz-rank2", "inner Lorentz invariance of the rank-2 tensors B and C",
                          tuple(equations), solution)


def rank2_invariant(step: ConstraintStep) -> sympy.Matrix:
    return RANK2.subs(step.solution)


def is_eta_multiple(tensor: sympy.Matrix) -> bool:
    """T^α_β = k η^α_β with k not forced to zero"""
    k = tensor[0, 0]
    return k != 0 and (tensor - k * sympy.eye(4)).is_zero_matrix


def _lorentz_step() -> ConstraintStep:
    """Invariant rank-4 tensors antisymmetric in their first pair reduce to one η structure"""
    labels = [Index.inner(x) for x in ("al", "be", "ga", "de")]
    xs = sympy.symbols("x1:4")
    general = Expression.sum(p.scaled(x) for p, x in zip(eta_pairings(labels), xs))
    swapped = Expression.sum(p.scaled(x) for p, x in
                             zip(eta_pairings([labels[1], labels[0]] + labels[2:]), xs))
    equations = _equations(general + swapped)
    solution = solve_equations(equations, list(xs), "no antisymmetric invariant tensor")
    return ConstraintStep("lorentz", "inner Lorentz invariance and parity of the constant tensors",
                          tuple(equations), solution)


def _antisymmetric_pair(atom: FieldAtom, scale: sympy.Expr) -> Expression:
    a, b, c, d = atom.indices
    return (Expression.of(make_atom("eta", (a, c)), make_atom("eta", (b, d)))
            - Expression.of(make_atom("eta", (a, d)), make_atom("eta", (b, c)))).scaled(scale)


def eta_reduced(general: RuleSet) -> RuleSet:
    """The general ansatz with every tensor replaced by its η form"""
    replacements = [
        ("TB", lambda atom: Expression.of(make_atom("eta", atom.indices), coeff=K_B)),
        ("TC", lambda atom: Expression.of(make_atom("eta", atom.indices), coeff=K_C)),
        ("TD", lambda atom: _antisymmetric_pair(atom, K_D)),
        ("TE", lambda atom: _antisymmetric_pair(atom, K_E)),
    ]
    return general.map_templates(lambda t: _normal(contract_metric(_replace(t, replacements))), "eta-reduced")


def _identification_step(reduced: RuleSet, eta: RuleSet) -> ConstraintStep:
    """Read off the scalars of the η ansatz from the reduced tensors"""
    equations = []
    for name in eta.fields:
        equations += _equations(reduced.rule_for(name).template - eta.rule_for(name).template)
    solution = sympy.solve(equations, [B, C, Z, G], dict=True)
    if not solution:
        raise ConstraintSystemError("reduced tensors do not match the scalar ansatz", equations)
    return ConstraintStep("identification", "scalar form of the reduced transformation",
                          tuple(equations), solution[0])


def _nilpotency_step(eta: RuleSet) -> ConstraintStep:
    equations = []
    for residual in check_nilpotent(eta).values():
        equations += _equations(residual)
    equations = sorted(set(equations), key=str)
    solution = solve_equations(equations, [C, G], "nilpotency conditions are inconsistent")
    return ConstraintStep("nilpotency", "nilpotency of the scalar transformation", tuple(equations), solution)


def _normalization_step(nilpotency: ConstraintStep) -> ConstraintStep:
    """Write B as Z·N, N being the rescaling of the inner derivatives"""
    equations = (B - Z * N,)
    solution = solve_equations(equations, [B], "B cannot be normalized by Z")
    solution.update(nilpotency.solution)
    return ConstraintStep("normalization", "the ∂ω coefficient in units of Z", equations, solution)


def substitute_coefficients(expr: Expression, values: Dict) -> Expression:
    terms = tuple(Monomial(sympy.cancel(t.coeff.subs(values)), t.factors) for t in expr.terms)
    return canonicalize(Expression(tuple(t for t in terms if t.coeff != 0)))


def solve_rule_constraints(general: RuleSet = None) -> RuleConstraintSolution:
    """Reduce the general ansatz to the renormalized transformation with scalars Z and N"""
    general = general or rule_set("general-brst")
    eta = rule_set("eta-brst")
    steps = [_divergence_step(general), _rank2_step(), _lorentz_step()]
    identification = _identification_step(eta_reduced(general), eta)
    nilpotency = _nilpotency_step(eta)
    normalization = _normalization_step(nilpotency)
    steps += [identification, nilpotency, normalization]
    solved = eta.map_templates(lambda t: substitute_coefficients(t, normalization.solution), "solved-brst")
    return RuleConstraintSolution(tuple(steps), identification.solution, solved, check_nilpotent(solved))
