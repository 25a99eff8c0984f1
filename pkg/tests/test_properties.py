import itertools

from hypothesis import assume, given, strategies as st

from strategies import IN, ST, monomials
from symbolic import (
    Expression, Index, Monomial, canonicalize, derive, ghost_number, mass_dimension, parse, to_text,
)


def single(m):
    return Expression((m,))


def parity(m):
    return sum(a.odd for a in m.factors) % 2


@given(monomials())
def test_canonicalize_is_idempotent(m):
    once = canonicalize(single(m))
    assert canonicalize(Expression(once.terms)) == once


@given(st.lists(monomials(3), min_size=2, max_size=4))
def test_canonicalize_is_idempotent_on_sums(terms):
    once = canonicalize(Expression(tuple(terms)))
    assert canonicalize(Expression(once.terms)) == once


@given(monomials(3), monomials(3))
def test_canonicalize_is_idempotent_on_products(a, b):
    once = canonicalize(single(a) * single(b))
    assert canonicalize(Expression(once.terms)) == once


@given(monomials(), st.data())
def test_canonical_form_is_permutation_stable(m, data):
    perm = data.draw(st.permutations(range(len(m.factors))))
    odd = [i for i in perm if m.factors[i].odd]
    inversions = sum(1 for a, b in itertools.combinations(odd, 2) if a > b)
    shuffled = Monomial(m.coeff * (-1) ** inversions, tuple(m.factors[i] for i in perm))
    dummies = sorted(m.dummies())
    targets = data.draw(st.permutations(range(len(dummies))))
    kinds = m.index_kinds()
    mapping = {
        old: ("s" if kinds[old] == ST else "i") + str(100 + n)
        for old, n in zip(dummies, targets)
    }
    assert canonicalize(single(shuffled.relabel(mapping))) == canonicalize(single(m))


@given(monomials(3), monomials(3))
def test_graded_commutativity(a, b):
    sign = -1 if parity(a) and parity(b) else 1
    swapped = (single(b) * single(a)).scaled(sign)
    assert canonicalize(single(a) * single(b) - swapped).is_zero


@given(monomials(3), monomials(3), st.sampled_from([Index(ST, "s99"), Index(IN, "i99")]))
def test_leibniz_rule(a, b, d):
    product_first = derive(single(a) * single(b), d)
    atom_wise = derive(single(a), d) * single(b) + single(a) * derive(single(b), d)
    assert product_first == canonicalize(atom_wise)


@given(monomials(3), monomials(3))
def test_dimension_and_ghost_number_are_additive(a, b):
    product = canonicalize(single(a) * single(b))
    assume(not product.is_zero)
    assert mass_dimension(product) == mass_dimension(single(a)) + mass_dimension(single(b))
    assert ghost_number(product) == ghost_number(single(a)) + ghost_number(single(b))
    assert mass_dimension(product) == mass_dimension(single(a) * single(b))


@given(st.lists(monomials(), min_size=1, max_size=3))
def test_parse_print_round_trip(terms):
    e = canonicalize(Expression(tuple(terms)))
    assert parse(to_text(e)) == e
