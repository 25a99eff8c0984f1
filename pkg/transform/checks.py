"""Identity checks on transformation rules and Lagrangians"""
import logging
from dataclasses import dataclass
from typing import Dict, List

import sympy

from symbolic import (
    Expression, Monomial, WorkbenchError, apply_divergence_constraint, canonicalize, contract_metric,
    derive, fresh_index, ghost_number, group_by_fields, ibp_equivalent, ibp_reduce, make_atom, mass_dimension, parse,
    substitute,
)
from symbolic.atoms import FIELDS
from symbolic.errors import InhomogeneousExpressionError
from symbolic.ibp import DEFAULT_DEPTH, INCONCLUSIVE as IBP_INCONCLUSIVE
from symbolic.indices import Index, IndexKind
from symbolic.verdicts import FAIL, INCONCLUSIVE, PASS, CheckResult, flag, verdict
from transform.lagrangians import (
    field_strength, gauge_fixing_function, gauge_lagrangian, ghost_lagrangian, l_new, matter_lagrangian,
)
from transform.rules import RuleSet, TransformationRule, rename_atoms, rule_set
from transform.variation import apply_residual_gauge, brst_operator, vary

logger = logging.getLogger(__name__)


def _normal(expr: Expression) -> Expression:
    return apply_divergence_constraint(canonicalize(expr))


def check_nilpotent(rules: RuleSet) -> Dict[str, Expression]:
    """δ_θ′ of every sF with an independent odd parameter θ′; zero means nilpotent"""
    second = rules.with_parameter("theta2")
    residuals = {}
    for name in rules.fields:
        residuals[name] = vary(rules.rule_for(name).template, second)
        logger.debug("s(s %s) = %s", name, residuals[name])
    return residuals


def nilpotency_verdicts(rules: RuleSet) -> List[CheckResult]:
    return [verdict(f"nilpotent-{name}", f"nilpotency of the {rules.name} rule on {name}", residual)
            for name, residual in check_nilpotent(rules).items()]


def _bracket() -> Expression:
    """[ℰ, ℱ]^γ = ℱ^β∇_βℰ^γ − ℰ^β∇_βℱ^γ"""
    return parse("E2[be]*nab[.be](E[ga]) - E[be]*nab[.be](E2[ga])")


def _commutator(expr: Expression, rules: RuleSet) -> Expression:
    other = rules.with_parameter("E2")
    return _normal(vary(vary(expr, rules), other) - vary(vary(expr, other), rules))


def _vary_with_bracket(expr: Expression, rules: RuleSet) -> Expression:
    bracket = _bracket()

    def build(atom):
        (own,) = atom.indices
        taken = set(atom.labels())
        result = Expression(tuple(t.freshened(taken).relabel({"ga": own.label}) for t in bracket.terms))
        for d in atom.sderivs + atom.iderivs:
            result = derive(result, d)
        return result

    return _normal(substitute(vary(expr, rules), rules.parameter, build))


def check_algebra_closure() -> List[CheckResult]:
    """The gauge transformations close on the inner bracket"""
    gauge = rule_set("gauge")
    psi = parse("psi")
    bracket = _bracket()
    on_psi = _commutator(psi, gauge) - _vary_with_bracket(psi, gauge)
    divergence = _normal(derive(bracket, Index.inner("ga", True)))
    gauge_field = parse("A[.mu,al]")
    on_a = _commutator(gauge_field, gauge) - _vary_with_bracket(gauge_field, gauge)
    return [
        verdict("closure-matter", "commutator of two gauge transformations on the matter field", _normal(on_psi)),
        verdict("closure-bracket-divergence", "divergence of the inner bracket vanishes", divergence),
        verdict("closure-gauge-field", "commutator of two gauge transformations on the gauge field", _normal(on_a)),
    ]


def covariant_derivative(expr: Expression, mu: str) -> Expression:
    """D_μX = ∂_μX + A_μ^β∇_βX"""
    inner = fresh_index(IndexKind.INNER, expr, avoid={mu})
    gauge_field = make_atom("A", (Index.spacetime(mu, True), inner))
    transport = Expression.of(gauge_field) * derive(expr, inner.lowered())
    return canonicalize(derive(expr, Index.spacetime(mu, True)) + transport)


def check_field_strength() -> List[CheckResult]:
    psi = parse("psi")
    commutator = covariant_derivative(covariant_derivative(psi, "nu"), "mu") - \
        covariant_derivative(covariant_derivative(psi, "mu"), "nu")
    expected = field_strength("mu", "nu", "be") * parse("nab[.be](psi)")
    divergence = derive(field_strength(), Index.inner("al", True))
    strength = field_strength()
    transported = field_strength("mu", "nu", "be") * parse("nab[.be](E[al])") - \
        parse("E[be]") * derive(strength, Index.inner("be", True))
    covariance = vary(strength, rule_set("gauge")) - transported
    return [
        verdict("field-strength-commutator", "[D_mu, D_nu] acting on the matter field", _normal(commutator - expected)),
        verdict("field-strength-divergence", "inner divergence of the field strength", _normal(divergence)),
        verdict("field-strength-covariance", "gauge covariance of the field strength", _normal(covariance)),
    ]


def check_fp_kernel(depth: int = DEFAULT_DEPTH) -> List[CheckResult]:
    """Gauge variation of ∂^μA_μ^α and the ghost action it generates"""
    kernel = vary(gauge_fixing_function(), rule_set("gauge"))
    abelian = Expression(tuple(t for t in kernel.terms if not any(a.name == "A" for a in t.factors)))
    expected = parse(
        "d[mu](d[.mu](E[al])) + d[mu](A[.mu,be]*nab[.be](E[al])) - d[mu](E[be]*nab[.be](A[.mu,al]))")
    ghost = parse("ws[.al]") * rename_atoms(kernel, "E", "w")
    result = ibp_equivalent(ghost, ghost_lagrangian(), depth)
    return [
        verdict("fp-kernel-abelian", "abelian part of the Faddeev-Popov kernel",
                _normal(abelian - parse("d[mu](d[.mu](E[al]))"))),
        verdict("fp-kernel", "Faddeev-Popov kernel", _normal(kernel - expected)),
        _from_ibp("fp-ghost-action", "ghost Lagrangian from the Faddeev-Popov kernel", result),
    ]


def _from_ibp(check_id: str, reference: str, result) -> CheckResult:
    if result.equivalent:
        status = PASS
    elif result.status == IBP_INCONCLUSIVE:
        status = INCONCLUSIVE
    else:
        status = FAIL
    detail = f"{len(result.witness)} total derivatives"
    if not result.equivalent:
        remaining = ", ".join(group_by_fields(result.residual))
        detail += f"; uncancelled groups: {remaining}"
    return CheckResult(check_id, reference, status, result.residual, detail=detail, witness=result.witness)


def check_action_invariance(lagrangian: Expression, rules: RuleSet, residual_gauge: bool = False,
                            depth: int = DEFAULT_DEPTH, check_id: str = "action-invariance",
                            reference: str = "invariance of the action") -> CheckResult:
    """δL must be a total derivative"""
    delta = vary(lagrangian, rules)
    if residual_gauge:
        delta = apply_residual_gauge(delta, rules.parameter)
    delta = contract_metric(delta)
    result = ibp_reduce(delta, depth)
    logger.info("%s: %s after %d passes", check_id, result.status, result.passes)
    return _from_ibp(check_id, reference, result)


def invariance_verdicts(depth: int = DEFAULT_DEPTH) -> List[CheckResult]:
    gauge = rule_set("gauge")
    return [
        check_action_invariance(gauge_lagrangian(metric=True), gauge, depth=depth,
                                check_id="gauge-action-compensated",
                                reference="gauge invariance of -1/4 g F F with the metric compensator"),
        check_action_invariance(gauge_lagrangian(), gauge, residual_gauge=True, depth=depth,
                                check_id="gauge-action-residual",
                                reference="invariance of -1/4 F F under the residual global transformations"),
        check_action_invariance(matter_lagrangian(), gauge, depth=depth, check_id="matter-action",
                                reference="gauge invariance of the matter Lagrangian"),
        check_action_invariance(matter_lagrangian(rescaled=True), rule_set("gauge-rescaled"), depth=depth,
                                check_id="matter-action-rescaled",
                                reference="invariance of the matter Lagrangian with rescaled inner derivatives"),
        check_action_invariance(l_new(metric=True), rule_set("brst"), depth=depth, check_id="brst-invariance",
                                reference="BRST invariance of the Lagrangian with the Nakanishi-Lautrup field"),
    ]


def check_exact_gauge_fixing(depth: int = DEFAULT_DEPTH) -> List[CheckResult]:
    """-s(ω*_α f^α + ξ/2 ω*_α h^α) against its expanded form"""
    brst = rule_set("brst")
    fermion = parse("ws[.al]*d[mu](A[.mu,al]) + 1/2*xi*ws[.al]*h[al]")
    exact = -brst_operator(fermion, brst)
    delta = derive(brst_operator(parse("A[.mu,al]"), brst), Index.spacetime("mu"))
    expanded = parse("ws[.al]") * delta + parse("h[.al]*d[mu](A[.mu,al]) + 1/2*xi*h[.al]*h[al]")
    rest = l_new() - gauge_lagrangian()
    return [
        verdict("exact-gauge-fixing", "gauge fixing term is BRST exact", _normal(exact - expanded)),
        _from_ibp("exact-gauge-fixing-action", "ghost and Nakanishi-Lautrup terms equal -s(Psi)",
                  ibp_equivalent(rest, exact, depth)),
    ]


def check_divergence_preservation(rules: RuleSet) -> List[CheckResult]:
    """∇_α δF^α vanishes for every divergence-free field"""
    results = []
    for name in rules.fields:
        pattern = rules.rule_for(name).pattern
        own = pattern.own_inner_index
        if own is None:
            continue
        divergence = derive(vary(Expression.of(pattern), rules), Index(IndexKind.INNER, own.label, True))
        results.append(verdict(f"divergence-{name}", f"{rules.name} variation of {name} stays divergence free",
                               _normal(divergence)))
    return results


@dataclass(frozen=True)
class SupertraceResult:
    blocks: Dict[str, Expression]
    total: Expression

    @property
    def vanishes(self) -> bool:
        return self.total.is_zero and all(b.is_zero for b in self.blocks.values())


def _diagonal_trace(rule: TransformationRule) -> Expression:
    """Trace of the block ∂(sF)/∂F, with v^β∇_β contributing −½∇_βv^β"""
    outputs = rule.pattern.indices
    pieces = []
    for term in rule.template.terms:
        for k, atom in enumerate(term.factors):
            if atom.name != rule.pattern.name:
                continue
            derivatives = atom.sderivs + atom.iderivs
            if len(derivatives) > 1:
                raise WorkbenchError(f"higher-derivative diagonal term in the {rule.pattern.name} rule")
            odd_before = sum(1 for a in term.factors[:k] if a.odd)
            sign = -1 if atom.odd and odd_before % 2 else 1
            deltas = tuple(make_atom("eta", (Index(x.kind, x.label), Index(o.kind, o.label)))
                           for x, o in zip(atom.indices, outputs))
            trace = contract_metric(Expression((Monomial(
                term.coeff * sign, term.factors[:k] + term.factors[k + 1:] + deltas),)))
            if derivatives:
                (d,) = derivatives
                trace = derive(trace, Index(d.kind, d.label)).scaled(sympy.Rational(-1, 2))
            pieces.append(trace)
    return _normal(contract_metric(Expression.sum(pieces)))


def jacobian_supertrace(rules: RuleSet) -> SupertraceResult:
    """Field-space supertrace of the linearized transformation"""
    blocks = {}
    total = Expression.zero()
    for name in rules.fields:
        rule = rules.rule_for(name)
        block = _diagonal_trace(rule)
        blocks[name] = block
        total = total + (block.scaled(-1) if rule.pattern.odd else block)
    return SupertraceResult(blocks, _normal(total))


def check_template_homogeneity(rules: RuleSet) -> List[CheckResult]:
    """[sF] = [F] + 1 and |sF| = |F| + 1 for BRST sets; gauge sets keep [F]"""
    shift = 1 if rules.prepend else 0
    results = []
    for name in rules.fields:
        rule = rules.rule_for(name)
        if rule.template.is_zero:
            continue
        pattern = rule.pattern
        try:
            dimension = mass_dimension(rule.template)
            ghost = ghost_number(rule.template)
        except InhomogeneousExpressionError as e:
            results.append(flag(f"homogeneous-{name}", f"{rules.name} template of {name}", False, str(e)))
            continue
        ok = dimension == pattern.dimension + shift and ghost == pattern.ghost + shift
        results.append(flag(f"homogeneous-{name}", f"{rules.name} template of {name}", ok,
                            f"dimension {dimension}, ghost number {ghost}",
                            dimension=str(dimension), ghost=ghost))
    return results


@dataclass(frozen=True)
class FieldRow:
    name: str
    species: str
    dimension: str
    ghost: int
    odd: bool


TABLE_FIELDS = ("A", "ws", "w", "h", "psi", "KA", "Kws", "Kw", "Kpsi")
SOURCES = {"KA": "A", "Kws": "ws", "Kw": "w", "Kpsi": "psi"}


def field_table() -> List[FieldRow]:
    """Mass dimension, ghost number and parity of the fields and their sources"""
    rows = []
    for name in TABLE_FIELDS:
        spec = FIELDS[name]
        rows.append(FieldRow(name, spec.species.value, str(spec.dimension), spec.ghost, spec.odd))
    return rows


def check_source_table() -> List[CheckResult]:
    """[K] = 3 − [F] and |K| = −|F| − 1 so that K·sF is a dimension-4, ghost-0 density"""
    results = []
    for source, target in SOURCES.items():
        k, f = FIELDS[source], FIELDS[target]
        ok = k.dimension == 3 - f.dimension and k.ghost == -f.ghost - 1
        results.append(flag(f"source-{source}", f"source {source} coupled to s{target}", ok,
                            f"dimension {k.dimension}, ghost number {k.ghost}"))
    return results
