from dataclasses import replace

import pytest
import sympy
from hypothesis import assume, given

from strategies import monomials
from symbolic import Expression, canonicalize, equal, ghost_number, mass_dimension, parse
from symbolic.calculus import apply_divergence_constraint, relabel
from transform import MissingRuleError, UnknownRuleSetError, rule_set, vary
from transform.checks import (
    check_algebra_closure, check_divergence_preservation, check_exact_gauge_fixing, check_field_strength,
    check_fp_kernel, check_nilpotent, check_source_table, check_template_homogeneity, field_table,
    invariance_verdicts, jacobian_supertrace, _commutator,
)
from transform.general import (
    B, C, G, K_B, K_C, K_D, K_E, N, Z, ConstraintSystemError, eta_reduced, is_eta_multiple, rank2_invariant,
    solve_equations, solve_rule_constraints, substitute_coefficients,
)
from transform.lagrangians import field_strength
from transform.rules import TransformationRule, rename_atoms
from transform.variation import apply_residual_gauge, brst_operator


@pytest.fixture(scope="module")
def brst():
    return rule_set("brst")


def test_antighost_goes_to_nl_field(brst):
    assert vary(parse("ws[.al]"), brst) == parse("-theta*h[.al]")


def test_nl_field_is_invariant(brst):
    assert vary(parse("h[.al]"), brst).is_zero


def test_gauge_field_variation_has_three_terms():
    varied = vary(parse("A[.mu,al]"), rule_set("gauge"))
    expected = parse("d[.mu](E[al]) + A[.mu,be]*nab[.be](E[al]) - E[be]*nab[.be](A[.mu,al])")
    assert equal(varied, expected)
    assert len(varied) == 3


def test_parameter_is_moved_leftmost_with_sign(brst):
    varied = vary(parse("psibar*psi"), brst)
    expected = parse("-theta*w[be]*nab[.be](psibar)*psi + theta*psibar*w[be]*nab[.be](psi)")
    assert equal(varied, expected)
    assert all(t.factors[0].name == "theta" for t in varied.terms)


def test_brst_operator_strips_parameter(brst):
    assert brst_operator(parse("w[al]"), brst) == parse("-w[be]*nab[.be](w[al])")


def test_missing_rule_raises(brst):
    with pytest.raises(MissingRuleError):
        vary(parse("Kw[al]"), brst)
    with pytest.raises(MissingRuleError):
        vary(parse("w[al]"), rule_set("gauge"))


def test_unknown_rule_set():
    with pytest.raises(UnknownRuleSetError):
        rule_set("anomalous")


@pytest.mark.parametrize("name", ["brst", "reduced-brst"])
def test_brst_rules_are_nilpotent(name):
    residuals = check_nilpotent(rule_set(name))
    assert set(residuals) >= {"A", "ws", "w", "h", "psi"}
    assert all(r.is_zero for r in residuals.values())


def test_scalar_ansatz_nilpotent_only_when_c_equals_z():
    residuals = check_nilpotent(rule_set("eta-brst"))
    assert not residuals["A"].is_zero
    assert not residuals["psi"].is_zero
    assert residuals["w"].is_zero
    for residual in residuals.values():
        for term in residual.terms:
            assert sympy.simplify(term.coeff.subs({C: Z, G: Z})) == 0


def test_general_ansatz_specializes_to_brst(brst):
    reduced = eta_reduced(rule_set("general-brst"))
    values = {K_B: 1, K_C: 1, K_D: -1, K_E: sympy.Rational(-1, 2)}
    for name in ("A", "ws", "w", "h", "psi", "psibar"):
        specialized = substitute_coefficients(reduced.rule_for(name).template, values)
        assert equal(specialized, brst.rule_for(name).template), name


def test_solve_rule_constraints_recovers_reduced_brst():
    solution = solve_rule_constraints()
    divergence, rank2, lorentz, identification, nilpotency, normalization = solution.steps
    assert divergence.solution == {sympy.Symbol("E_sym"): 0, sympy.Symbol("D_sym"): 0, sympy.Symbol("B_rest"): 0}
    assert rank2.name == "lorentz-rank2"
    assert is_eta_multiple(rank2_invariant(rank2))
    x1, x2, x3 = sympy.symbols("x1:4")
    assert lorentz.solution[x1] == 0
    assert sympy.simplify((x2 + x3).subs(lorentz.solution)) == 0
    assert identification.solution == {B: K_B, C: -K_D, Z: -2 * K_E, G: K_C}
    assert nilpotency.solution == {C: Z, G: Z}
    assert normalization.solution == {B: Z * N, C: Z, G: Z}
    reduced = rule_set("reduced-brst")
    for name in reduced.fields:
        assert equal(solution.solved.rule_for(name).template, reduced.rule_for(name).template), name
    assert solution.nilpotent


def test_invariant_rank2_tensor_is_eta():
    tensor = rank2_invariant(solve_rule_constraints().steps[1])
    assert tensor.free_symbols and len(tensor.free_symbols) == 1
    assert is_eta_multiple(tensor)
    assert not is_eta_multiple(sympy.diag(1, 1, 1, 2))
    assert not is_eta_multiple(sympy.zeros(4))


def test_inconsistent_system_lists_equations():
    x = sympy.Symbol("x")
    with pytest.raises(ConstraintSystemError) as info:
        solve_equations([x - 1, x - 2], [x], "contradiction")
    assert len(info.value.equations) == 2
    assert "x - 2 = 0" in str(info.value)


def test_algebra_closes():
    results = check_algebra_closure()
    assert [r.check_id for r in results] == ["closure-matter", "closure-bracket-divergence", "closure-gauge-field"]
    assert all(r.passed for r in results), [str(r.residual) for r in results]


def test_commutator_with_equal_parameters_vanishes():
    commutator = _commutator(parse("psi"), rule_set("gauge"))
    assert apply_divergence_constraint(canonicalize(rename_atoms(commutator, "E2", "E"))).is_zero


def test_field_strength_identities():
    assert all(r.passed for r in check_field_strength())


@pytest.mark.parametrize("al", ["be", "ga", "de"])
def test_field_strength_free_index_never_meets_its_dummy(al):
    strength = field_strength("mu", "nu", al)
    assert equal(strength, relabel(field_strength(), {"al": al}))
    assert all(term.externals() == {"mu", "nu", al} for term in strength.terms)
    assert len(strength) == 4


def test_field_strength_accepts_dummy_style_labels():
    strength = field_strength("mu", "nu", "i1")
    assert all(term.externals() == {"mu", "nu", "i1"} for term in strength.terms)
    assert len(strength) == 4


def test_fp_kernel():
    results = {r.check_id: r for r in check_fp_kernel()}
    assert results["fp-kernel-abelian"].passed
    assert results["fp-kernel"].passed
    assert results["fp-ghost-action"].passed


def test_residual_gauge_antisymmetrizes_single_gradient():
    restricted = apply_residual_gauge(parse("w[be]*nab[.be](E[al])*ws[.al]"))
    expected = parse("1/2*w[be]*nab[.be](E[al])*ws[.al] - 1/2*w[be]*nab[al](E[.be])*ws[.al]")
    assert equal(restricted, expected)
    assert apply_residual_gauge(parse("nab[.be](nab[.ga](E[al]))*w[be]*w[ga]*ws[.al]")).is_zero


@pytest.mark.slow
def test_actions_are_invariant():
    for result in invariance_verdicts():
        assert result.passed, (result.check_id, result.detail)


def test_gauge_fixing_is_brst_exact():
    assert all(r.passed for r in check_exact_gauge_fixing())


def test_variations_stay_divergence_free(brst):
    results = check_divergence_preservation(brst)
    assert {r.check_id for r in results} == {"divergence-A", "divergence-ws", "divergence-w", "divergence-h"}
    assert all(r.passed for r in results)


def test_jacobian_supertrace_vanishes(brst):
    result = jacobian_supertrace(brst)
    assert {"A", "w", "psi"} <= set(result.blocks)
    assert result.vanishes


@pytest.mark.parametrize("name", ["gauge", "brst", "eta-brst", "reduced-brst", "general-brst"])
def test_templates_are_homogeneous(name):
    assert all(r.passed for r in check_template_homogeneity(rule_set(name)))


def test_inhomogeneous_template_fails(brst):
    rule = brst.rule_for("ws")
    broken = replace(brst, rules={**brst.rules, "ws": TransformationRule(rule.pattern, parse("-h[.al] + w[.al]"))})
    results = {r.check_id: r for r in check_template_homogeneity(broken)}
    assert not results["homogeneous-ws"].passed


def test_field_table_and_sources():
    rows = {row.name: row for row in field_table()}
    assert rows["A"].dimension == "1" and rows["A"].ghost == 0
    assert rows["w"].odd and rows["w"].ghost == 1
    assert rows["Kw"].dimension == "2" and rows["Kw"].ghost == -2
    assert rows["Kpsi"].dimension == "3/2"
    assert all(r.passed for r in check_source_table())


@given(monomials(2), monomials(2))
def test_vary_is_a_graded_derivation(a, b):
    brst = rule_set("brst")
    x, y = Expression((a,)), Expression((b,))
    left = vary(x * y, brst)
    right = apply_divergence_constraint(canonicalize(vary(x, brst) * y + x * vary(y, brst)))
    assert left == right


@given(monomials(3))
def test_vary_preserves_dimension_and_ghost_number(m):
    x = canonicalize(Expression((m,)))
    varied = vary(x, rule_set("brst"))
    assume(not x.is_zero and not varied.is_zero)
    assert mass_dimension(varied) == mass_dimension(x)
    assert ghost_number(varied) == ghost_number(x)
