"""First-order variation of expressions under a rule set"""
import logging
from typing import Iterable

import sympy

from symbolic import Expression, Monomial, WorkbenchError, apply_divergence_constraint, canonicalize, derive, make_atom
from symbolic.atoms import FieldAtom, Species
from symbolic.expression import normalize_coefficient
from symbolic.indices import Index, IndexKind
from transform.rules import RuleSet, TransformationRule

logger = logging.getLogger(__name__)

PARAMETER_SPECIES = frozenset({Species.GAUGE_PARAM, Species.THETA_PARAM})


class MissingRuleError(WorkbenchError):
    pass


def instantiate(rule: TransformationRule, atom: FieldAtom, avoid: Iterable[str]) -> Expression:
    """Template of rule in the labels of atom, with the atom's derivatives applied"""
    placeholders = [i.label for i in rule.pattern.indices]
    actual = [i.label for i in atom.indices]
    taken = set(avoid) | set(placeholders) | set(actual)
    for d in atom.sderivs + atom.iderivs:
        taken.add(d.label)
    terms = tuple(t.freshened(taken) for t in rule.template.terms)
    mapping = dict(zip(placeholders, actual))
    result = Expression(tuple(t.relabel(mapping) for t in terms))
    for d in atom.sderivs + atom.iderivs:
        result = derive(result, d)
    return result


def vary(expr: Expression, rules: RuleSet) -> Expression:
    """δX under rules; BRST-type sets give θ·sX with θ leftmost"""
    expr = canonicalize(expr)
    parameter = Expression.of(make_atom(rules.parameter)) if rules.prepend else None
    out = []
    for term in expr.terms:
        labels = term.labels()
        for position, atom in enumerate(term.factors):
            rule = rules.rule_for(atom.name)
            if rule is None:
                if atom.is_constant or atom.species in PARAMETER_SPECIES:
                    continue
                raise MissingRuleError(f"rule set '{rules.name}' has no rule for '{atom.name}'")
            varied = instantiate(rule, atom, labels)
            if varied.is_zero:
                continue
            if parameter is not None:
                varied = parameter * varied
            left = Expression((Monomial(term.coeff, term.factors[:position]),))
            right = Expression((Monomial(sympy.Integer(1), term.factors[position + 1:]),))
            out.extend((left * varied * right).terms)
    return apply_divergence_constraint(canonicalize(Expression(tuple(out))))


def brst_operator(expr: Expression, rules: RuleSet) -> Expression:
    """sX: the variation with the leading odd parameter stripped"""
    if not rules.prepend:
        raise WorkbenchError(f"rule set '{rules.name}' has no odd parameter")
    out = []
    for term in vary(expr, rules).terms:
        head, *rest = term.factors
        if head.name != rules.parameter:
            raise WorkbenchError(f"variation term does not start with {rules.parameter}")
        out.append(Monomial(term.coeff, tuple(rest)))
    return canonicalize(Expression(tuple(out)))


def apply_residual_gauge(expr: Expression, parameter: str = "E") -> Expression:
    """Restrict ℰ to ∇∇ℰ = 0 with antisymmetric ∇_βℰ_α"""
    half = normalize_coefficient(sympy.Rational(1, 2))
    out = []
    for term in canonicalize(expr).terms:
        pieces = [Monomial(term.coeff, ())]
        for atom in term.factors:
            replacement = [atom]
            if atom.name == parameter and atom.iderivs:
                if len(atom.iderivs) > 1:
                    pieces = []
                    break
                (d,) = atom.iderivs
                (own,) = atom.indices
                mirrored = FieldAtom(
                    atom.name, (Index(IndexKind.INNER, d.label, own.lower),),
                    atom.sderivs, (Index(IndexKind.INNER, own.label, d.lower),))
                replacement = [atom, mirrored]
            grown = []
            for piece in pieces:
                if len(replacement) == 1:
                    grown.append(Monomial(piece.coeff, piece.factors + (replacement[0],)))
                else:
                    grown.append(Monomial(piece.coeff * half, piece.factors + (replacement[0],)))
                    grown.append(Monomial(-piece.coeff * half, piece.factors + (replacement[1],)))
            pieces = grown
        out.extend(pieces)
    return apply_divergence_constraint(canonicalize(Expression(tuple(out))))
