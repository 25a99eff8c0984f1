"""Integration-by-parts normal form with total-derivative witnesses"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import sympy

from symbolic.calculus import (
    apply_divergence_constraint, derive, ghost_number, mass_dimension, scale_weight, violates_divergence,
)
from symbolic.canonical import canonicalize, monomial_key
from symbolic.expression import Expression, Monomial
from symbolic.indices import Index, IndexKind

logger = logging.getLogger(__name__)

DEFAULT_DEPTH = 64

EQUIVALENT = "equivalent"
NOT_EQUIVALENT = "not-equivalent"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class IbpResult:
    status: str
    residual: Expression
    witness: Tuple[Tuple[Index, Expression], ...] = ()
    passes: int = 0
    ambiguous: bool = False

    @property
    def equivalent(self) -> bool:
        return self.status == EQUIVALENT


def normalize(expr: Expression) -> Expression:
    return apply_divergence_constraint(canonicalize(expr))


def _pivot(term: Monomial) -> Tuple[Optional[int], bool]:
    """Position of the pivot factor and whether the choice was forced by repetition"""
    names = [a.name for a in term.factors if not a.is_constant]
    for position, atom in enumerate(term.factors):
        if not atom.is_constant and names.count(atom.name) == 1:
            return position, False
    for position, atom in enumerate(term.factors):
        if not atom.is_constant:
            return position, True
    return None, False


def _integrate_off(term: Monomial, k: int, d: Index):
    """t = ∂_d(W) − rest with the derivative d taken off factor k"""
    stripped = term.replace_factor(k, term.factors[k].without_derivative(d))
    rest = []
    for j, atom in enumerate(stripped.factors):
        if j == k or atom.is_constant:
            continue
        rest.append(stripped.replace_factor(j, atom.with_derivative(d)))
    return stripped, Expression(tuple(rest))


def _gradient_move(term: Monomial, p: int):
    """Locate ∇_γ contracted with the pivot's own index sitting on its canonical host"""
    own = term.factors[p].own_inner_index
    if own is None:
        return None
    d = Index(IndexKind.INNER, own.label)
    for k, atom in enumerate(term.factors):
        if k != p and any(i.label == own.label for i in atom.iderivs):
            break
    else:
        return None
    stripped = term.replace_factor(k, term.factors[k].without_derivative(d))
    keys = {}
    for j, atom in enumerate(stripped.factors):
        if j == p or atom.is_constant:
            continue
        moved = stripped.replace_factor(j, atom.with_derivative(d))
        if violates_divergence(moved):
            continue
        key = monomial_key(moved)
        if key is not None:
            keys[j] = key
    if k not in keys or keys[k] != min(keys.values()):
        return None
    return k, d


def _move(term: Monomial):
    p, _ = _pivot(term)
    if p is None:
        return None
    pivot = term.factors[p]
    if pivot.sderivs or pivot.iderivs:
        d = pivot.sderivs[0] if pivot.sderivs else pivot.iderivs[0]
        k = p
    else:
        found = _gradient_move(term, p)
        if found is None:
            return None
        k, d = found
    stripped, rest = _integrate_off(term, k, d)
    rest = normalize(rest)
    key = monomial_key(term)
    self_part = sympy.Integer(0)
    others = []
    for r in rest.terms:
        if monomial_key(r) == key:
            self_part += r.coeff / term.coeff
        else:
            others.append(r)
    factor = sympy.cancel(1 + self_part)
    if factor == 0:
        return None
    witness = Expression((stripped.scaled(1 / factor),))
    replacement = Expression(tuple(others)).scaled(-1 / factor)
    return d, witness, replacement


def ibp_reduce(expr: Expression, depth: int = DEFAULT_DEPTH) -> IbpResult:
    """Move derivatives off each monomial's pivot factor until a fixed point"""
    current = normalize(expr)
    witness: List[Tuple[Index, Expression]] = []
    for n in range(depth):
        kept, produced, changed = [], [], False
        for term in current.terms:
            step = _move(term)
            if step is None:
                kept.append(term)
                continue
            d, w, replacement = step
            witness.append((d, w))
            produced.extend(replacement.terms)
            changed = True
        if not changed:
            return _finish(current, witness, n)
        current = normalize(Expression(tuple(kept + produced)))
    logger.info("IBP reduction hit depth bound %d with %d terms left", depth, len(current))
    return IbpResult(INCONCLUSIVE, current, tuple(witness), depth)


def _finish(residual: Expression, witness, passes: int) -> IbpResult:
    if residual.is_zero:
        return IbpResult(EQUIVALENT, residual, tuple(witness), passes)
    ambiguous = any(_pivot(t)[1] and _has_derivatives(t) for t in residual.terms)
    status = INCONCLUSIVE if ambiguous else NOT_EQUIVALENT
    return IbpResult(status, residual, tuple(witness), passes, ambiguous)


def ibp_equivalent(e1: Expression, e2: Expression, depth: int = DEFAULT_DEPTH) -> IbpResult:
    """Decide e1 ≃ e2 modulo total ∂ and Λ∇ derivatives

    Both sides together must be homogeneous in mass dimension, ghost number and
    inner-scale weight, otherwise InhomogeneousExpressionError is raised.
    """
    both = Expression(e1.terms + e2.terms)
    for grading in (mass_dimension, ghost_number, scale_weight):
        grading(both)
    return ibp_reduce(e1 - e2, depth)


def verify_witness(expr: Expression, result: IbpResult) -> bool:
    """Check expr − residual equals the sum of the recorded total derivatives"""
    total = Expression.sum(derive(w, d) for d, w in result.witness)
    return normalize(expr - result.residual - total).is_zero


def _has_derivatives(term: Monomial) -> bool:
    return any(a.sderivs or a.iderivs for a in term.factors)
