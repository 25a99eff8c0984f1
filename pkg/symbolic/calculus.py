"""Derivatives, constraints and bookkeeping over expressions"""
import re
from collections import defaultdict
from typing import Callable, Dict, Iterable, List, Optional, Tuple, Union

import sympy

from symbolic.atoms import METRIC_NAMES, FieldAtom
from symbolic.canonical import canonicalize, monomial_key
from symbolic.errors import IndexArityError, InhomogeneousExpressionError
from symbolic.expression import Expression, Monomial
from symbolic.indices import Index, IndexKind, fresh_label

# mass dimension of named scalar coefficients
SCALAR_DIMENSIONS = {"m": 1}
# Λ carries inner-scale weight +1
SCALAR_SCALE_WEIGHTS = {"Lam": 1}
# inverse squares inv_P, inv_L1, ... of inner momenta carry +2
_INVERSE_INNER_SQUARE = re.compile(r"inv_[PQL]\w*$")

LAMBDA = sympy.Symbol("Lam")


def _table_weight(name: str, table) -> int:
    if table is SCALAR_SCALE_WEIGHTS and _INVERSE_INNER_SQUARE.match(name):
        return 2
    return table.get(name, 0)


def derive(expr: Expression, d: Index, family: Union[IndexKind, str, None] = None) -> Expression:
    """Apply ∂_d (spacetime) or Λ∇_d (inner) by the Leibniz rule"""
    if family is not None and IndexKind(family) != d.kind:
        raise IndexArityError(f"derivative index '{d.label}' is not a {IndexKind(family).value} index")
    terms = []
    for term in expr.terms:
        term = term.freshened({d.label})
        for position, atom in enumerate(term.factors):
            if atom.is_constant:
                continue
            terms.append(term.replace_factor(position, atom.with_derivative(d)))
    return canonicalize(Expression(tuple(terms)))


def violates_divergence(term: Monomial) -> bool:
    for atom in term.factors:
        own = atom.own_inner_index
        if own is not None and any(d.label == own.label for d in atom.iderivs):
            return True
    return False


def apply_divergence_constraint(expr: Expression) -> Expression:
    """Drop monomials where an atom's inner derivative contracts its own inner index"""
    kept = tuple(t for t in expr.terms if not violates_divergence(t))
    return Expression(kept, canonical=expr.canonical)


def _scalar_weight(coeff, table) -> sympy.Rational:
    weighted = {s: s * sympy.Symbol("_t") ** _table_weight(s.name, table)
                for s in coeff.free_symbols if _table_weight(s.name, table)}
    if not weighted:
        return sympy.Integer(0)
    ratio = sympy.powsimp(sympy.cancel(coeff.subs(weighted) / coeff))
    return sympy.Rational(ratio.as_powers_dict().get(sympy.Symbol("_t"), 0))


def _homogeneous(expr: Expression, quantity: str, per_term: Callable[[Monomial], object]):
    from symbolic.grammar import to_text
    values = defaultdict(list)
    for term in expr.terms:
        values[per_term(term)].append(term)
    if not values:
        return None
    if len(values) > 1:
        offending = [f"{to_text(Expression((t,)))} -> {value}"
                     for value, terms in values.items() for t in terms]
        raise InhomogeneousExpressionError(quantity, offending)
    return next(iter(values))


def term_dimension(term: Monomial) -> sympy.Rational:
    return sum((a.dimension for a in term.factors), sympy.Integer(0)) + \
        _scalar_weight(term.coeff, SCALAR_DIMENSIONS)


def term_ghost_number(term: Monomial) -> int:
    return sum(a.ghost for a in term.factors)


def term_scale_weight(term: Monomial) -> int:
    return int(sum(a.scale_weight for a in term.factors) +
               _scalar_weight(term.coeff, SCALAR_SCALE_WEIGHTS))


def mass_dimension(expr: Expression) -> Optional[sympy.Rational]:
    return _homogeneous(expr, "mass dimension", term_dimension)


def ghost_number(expr: Expression) -> Optional[int]:
    return _homogeneous(expr, "ghost number", term_ghost_number)


def term_inner_index_weight(term: Monomial) -> int:
    return sum(sum(1 for i in a.indices if i.kind == IndexKind.INNER) - len(a.iderivs)
               for a in term.factors if not a.is_constant)


def inner_index_weight(expr: Expression) -> Optional[int]:
    """Inner indices carried by fields minus Λ∇ derivatives, the position-space inner-scale count"""
    return _homogeneous(expr, "inner index weight", term_inner_index_weight)


def scale_weights(expr: Expression) -> List[Tuple[Monomial, int]]:
    """Inner-scale weight of every monomial"""
    return [(t, term_scale_weight(t)) for t in expr.terms]


def scale_weight(expr: Expression) -> int:
    """Common inner-scale weight; Λ counts +1 and each inner momentum −1"""
    value = _homogeneous(expr, "inner-scale weight", term_scale_weight)
    return 0 if value is None else value


def fresh_index(kind: IndexKind, *exprs: Expression, avoid: Iterable[str] = ()) -> Index:
    taken = set(avoid)
    for expr in exprs:
        for term in expr.terms:
            taken |= term.labels()
    return Index(kind, fresh_label(kind, taken))


def relabel(expr: Expression, mapping: Dict[str, str]) -> Expression:
    return Expression(tuple(t.relabel(mapping) for t in expr.terms))


def substitute(expr: Expression, name: str, builder: Callable[[FieldAtom], Expression]) -> Expression:
    """Replace every atom called name by builder(atom), keeping factor order"""
    out = []
    for term in expr.terms:
        if not any(a.name == name for a in term.factors):
            out.append(term)
            continue
        avoid = term.labels()
        product = Expression((Monomial(term.coeff, ()),))
        for atom in term.factors:
            if atom.name != name:
                product = product * Expression.of(atom)
                continue
            replacement = builder(atom)
            replacement = Expression(tuple(r.freshened(avoid) for r in replacement.terms))
            for r in replacement.terms:
                avoid = avoid | r.labels()
            product = product * replacement
        out.extend(product.terms)
    return canonicalize(Expression(tuple(out)))


def _contract_once(term: Monomial, names) -> Optional[Tuple[Monomial, ...]]:
    counts = term.label_counts()
    for position, atom in enumerate(term.factors):
        if atom.name not in names or len(atom.indices) != 2:
            continue
        first, second = atom.indices
        if first.label == second.label:
            rest = term.factors[:position] + term.factors[position + 1:]
            return (Monomial(term.coeff * 4, rest),)
        for here, there in ((first, second), (second, first)):
            if counts[here.label] == 2:
                rest = term.factors[:position] + term.factors[position + 1:]
                moved = tuple(a.relabel({here.label: there.label}) for a in rest)
                return (Monomial(term.coeff, moved),)
    return None


def contract_metric(expr: Expression, names: Iterable[str] = METRIC_NAMES) -> Expression:
    """Eliminate η (and the metric stand-in g) by index substitution; η^α_α = 4"""
    names = tuple(names)
    pending = list(expr.terms)
    done = []
    while pending:
        term = pending.pop()
        step = _contract_once(term, names)
        if step is None:
            done.append(term)
        else:
            pending.extend(step)
    return canonicalize(Expression(tuple(done)))


def field_signature(term: Monomial) -> str:
    names = sorted(a.name for a in term.factors if not a.is_constant)
    return "*".join(names) or "1"


def group_by_fields(expr: Expression) -> Dict[str, Expression]:
    """Split an expression into term groups keyed by field content"""
    groups = defaultdict(list)
    for term in expr.terms:
        groups[field_signature(term)].append(term)
    return {key: Expression(tuple(terms), canonical=expr.canonical)
            for key, terms in sorted(groups.items())}


def coefficient_map(expr: Expression) -> Dict[tuple, sympy.Expr]:
    """Map canonical monomial structure to its coefficient"""
    expr = canonicalize(expr)
    return {monomial_key(t): t.coeff for t in expr.terms}


def is_zero(expr: Expression) -> bool:
    return canonicalize(expr).is_zero


def equal(left: Expression, right: Expression) -> bool:
    return is_zero(left - right)
