import pytest
import sympy

from symbolic import (
    Expression, Index, IndexArityError, IndexKind, InhomogeneousExpressionError,
    ParseError, UnknownSpeciesError, apply_divergence_constraint, canonicalize,
    contract_metric, derive, ghost_number, group_by_fields, ibp_equivalent, ibp_reduce,
    mass_dimension, parse, scale_weight, to_text, verify_witness,
)
from symbolic.atoms import Species


def test_parse_single_gauge_atom(p):
    e = p("A[mu,al]")
    (term,) = e.terms
    (atom,) = term.factors
    assert atom.species == Species.GAUGE_A
    assert [i.kind for i in atom.indices] == [IndexKind.SPACETIME, IndexKind.INNER]
    assert term.coeff == 1


def test_grassmann_symmetric_sum_vanishes(p):
    assert p("w[al]*w[be] + w[be]*w[al]").is_zero


def test_abelian_field_strength_has_two_terms(p):
    e = p("d[mu](A[nu,al]) - d[nu](A[mu,al])")
    assert len(e) == 2
    assert sorted(t.coeff for t in e.terms) == [-1, 1]


def test_syntax_error_reports_column(p):
    with pytest.raises(ParseError) as info:
        p("A[mu,al] * * w[be]")
    assert info.value.column > 0


def test_unknown_species_and_arity(p):
    with pytest.raises(UnknownSpeciesError):
        p("Foo[al]")
    with pytest.raises(IndexArityError):
        p("A[mu]")
    with pytest.raises(IndexArityError):
        p("w[mu]")


def test_derive_constant_is_zero(p):
    assert derive(p("T[al,be]"), Index.spacetime("mu")).is_zero
    assert derive(p("theta"), Index.inner("ga")).is_zero


def test_derive_leibniz_on_ghost_pair(p):
    e = derive(p("w[al]*w[be]"), Index.inner("ga"), IndexKind.INNER)
    assert e == p("nab[ga](w[al])*w[be] + w[al]*nab[ga](w[be])")


def test_derive_family_mismatch(p):
    with pytest.raises(IndexArityError):
        derive(p("w[al]"), Index.inner("ga"), "spacetime")


def test_odd_swap_with_derivative_vanishes(p):
    assert p("w[al]*nab[be](w[ga]) + nab[be](w[ga])*w[al]").is_zero


def test_relabelled_contractions_agree(p):
    first = p("A[mu,al]*nab[al](A[.mu,be])*w[be]")
    second = p("A[nu,ga]*nab[ga](A[.nu,de])*w[de]")
    assert first == second


def test_canonicalize_idempotent(p):
    e = p("h[al]*nab[be](A[mu,al]*A[.mu,be]) + 3/2*Z*d[.mu](ws[al])*d[mu](w[al])")
    assert canonicalize(Expression(e.terms)) == e


def test_mass_dimension_and_ghost_number(p):
    ff = p("d[mu](A[nu,al])*d[mu](A[nu,al])")
    assert mass_dimension(ff) == 4
    assert ghost_number(ff) == 0
    ghosts = p("d[mu](ws[al])*d[mu](w[al])")
    assert mass_dimension(ghosts) == 4
    assert ghost_number(ghosts) == 0
    assert mass_dimension(p("w[al]")) == 1
    assert ghost_number(p("w[al]")) == 1
    assert mass_dimension(p("m*psibar*psi")) == 4


def test_theta_variation_is_homogeneous_with_field(p):
    assert mass_dimension(p("-theta*h[al]")) == mass_dimension(p("ws[al]"))
    assert ghost_number(p("-theta*h[al]")) == ghost_number(p("ws[al]"))


def test_inhomogeneous_dimension_lists_monomials(p):
    with pytest.raises(InhomogeneousExpressionError) as info:
        mass_dimension(p("h[al] + w[al]*d[mu](A[mu,be])*ws[be]"))
    assert len(info.value.offending) == 2


def test_scale_weight(p):
    assert scale_weight(p("Lam*P1[al]")) == 0
    assert scale_weight(p("P1[al]")) == -1
    assert scale_weight(p("Lam^2*P1[al]*P2[be]")) == 0


def test_divergence_constraint(p):
    assert apply_divergence_constraint(p("nab[al](A[mu,al])")).is_zero
    assert apply_divergence_constraint(p("nab[al](E[al])")).is_zero
    kept = p("nab[be](A[mu,al])")
    assert apply_divergence_constraint(kept) == kept


def test_contract_metric(p):
    assert contract_metric(p("eta[al,al]")) == p("4")
    assert contract_metric(p("eta[al,be]*P1[be]*P2[al]")) == p("P1[al]*P2[al]")
    assert contract_metric(p("eta[al,be]*P1[be]")) == p("P1[al]")


def test_ibp_single_step(p):
    result = ibp_equivalent(p("d[mu](h[al])*A[mu,al]"), p("-h[al]*d[mu](A[mu,al])"))
    assert result.equivalent
    assert verify_witness(p("d[mu](h[al])*A[mu,al] + h[al]*d[mu](A[mu,al])"), result)


def test_ibp_reflexive(p):
    e = p("d[mu](ws[al])*A[mu,be]*nab[be](w[al])")
    assert ibp_equivalent(e, e).equivalent


def test_ibp_not_equivalent(p):
    result = ibp_equivalent(p("h[al]*h[al]"), p("2*h[al]*h[al]"))
    assert result.status == "not-equivalent"


def test_ibp_inner_gradient_on_divergence_free_field(p):
    # E^β ∇_β(X) integrates to zero for divergence-free E
    e = p("E[be]*nab[be](h[al]*h[al])")
    assert ibp_equivalent(e, Expression.zero()).equivalent


@pytest.mark.parametrize("left, right", [
    ("h[al]*h[al]", "h[al]*d[mu](d[.mu](h[al]))"),
    ("h[al]*w[al]", "w[al]*Kw[al]"),
    ("h[al]*h[al]", "Lam*h[al]*h[al]"),
])
def test_ibp_equivalence_needs_homogeneous_sides(p, left, right):
    with pytest.raises(InhomogeneousExpressionError):
        ibp_equivalent(p(left), p(right))


def test_ibp_depth_bound_is_inconclusive(p):
    result = ibp_reduce(p("d[mu](h[al])*A[mu,al]"), depth=0)
    assert result.status == "inconclusive"
    assert not result.residual.is_zero


def test_group_by_fields(p):
    e = p("h[.al]*h[al] + 2*A[mu,al]*A[.mu,al] + d[mu](h[.al])*d[.mu](h[al])")
    groups = group_by_fields(e)
    assert list(groups) == ["A*A", "h*h"]
    assert len(groups["h*h"].terms) == 2
    assert canonicalize(Expression.sum(groups.values()) - e).is_zero


def test_round_trip_of_symbolic_coefficients(p):
    e = p("Zw*N^-1*Z^-1*h[al]*d[mu](A[mu,al]) + 1/2*xi_N*h[al]*h[al]")
    assert parse(to_text(e)) == e


def test_round_trip_of_polynomial_denominators(p):
    e = p("(N + Z)^-1*h[.al]*h[al] + Z*(N^2 + N*Z)^-1*A[mu,al]*A[.mu,al]")
    text = to_text(e)
    assert "(N + Z)^-1" in text
    assert parse(text) == e


def test_power_of_field_group_is_rejected(p):
    with pytest.raises(IndexArityError):
        p("(h[al]*h[al])^2")
