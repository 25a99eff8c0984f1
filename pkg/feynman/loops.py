"""Reduction of inner loop-momentum monomials to symmetrized η tensors times Ω_k"""
import logging
from collections import Counter
from typing import Iterable, Optional

import sympy

from feynman.errors import MixedLoopError
from feynman.tensors import sym_eta_tensor
from symbolic import Expression, Monomial, canonicalize, contract_metric
from symbolic.atoms import Species

logger = logging.getLogger(__name__)


def omega_symbol(k: int) -> sympy.Symbol:
    """Placeholder for Λ^{2k+4} ∫ d⁴P/(2π)⁴ (−P²)^k"""
    return sympy.Symbol(f"Om{k}")


def inner_momenta(term: Monomial) -> set:
    return {a.name for a in term.factors if a.species == Species.INNER_MOMENTUM}


def loop_rank(term: Monomial, loop: str) -> int:
    return sum(1 for a in term.factors if a.name == loop)


def _only_loop(expr: Expression) -> str:
    names = set()
    for term in expr.terms:
        names |= inner_momenta(term)
    if len(names) != 1:
        raise MixedLoopError(f"expected one inner loop momentum, found {sorted(names)}; factorize first")
    return names.pop()


def _reduce_term(term: Monomial, loop: str) -> Expression:
    loop_atoms = [a for a in term.factors if a.name == loop]
    rank = len(loop_atoms)
    if rank % 2:
        return Expression.zero()
    rest = tuple(a for a in term.factors if a.name != loop)
    tensor = sym_eta_tensor(rank)
    labels = [a.indices[0] for a in loop_atoms]
    scalar = Monomial(term.coeff * omega_symbol(rank // 2), rest)
    return Expression((scalar,)) * tensor.expression(labels)


def reduce_inner(expr: Expression, loop: Optional[str] = None) -> Expression:
    """Replace P^{α1}…P^{α2k} of one loop by its symmetrized η tensor times Ω_k

    Odd ranks vanish. Without an explicit loop name the expression must depend
    on a single inner momentum.
    """
    if loop is None:
        loop = _only_loop(expr)
    reduced = [_reduce_term(term, loop) for term in expr.terms]
    logger.debug("Reduced %d terms over loop %s", len(expr.terms), loop)
    return contract_metric(Expression.sum(reduced))


def reduce_loops(expr: Expression, loops: Iterable[str]) -> Expression:
    """Loop-by-loop reduction of a factorized multi-loop expression"""
    for loop in loops:
        expr = reduce_inner(expr, loop)
    return expr


def omega_orders(expr: Expression) -> Counter:
    """Multiset of Ω_k powers appearing in the reduced coefficients"""
    orders = Counter()
    for term in canonicalize(expr).terms:
        for part in sympy.Add.make_args(sympy.expand(term.coeff)):
            powers = part.as_powers_dict()
            key = tuple(sorted((str(s), int(e)) for s, e in powers.items()
                               if isinstance(s, sympy.Symbol) and s.name.startswith("Om")))
            orders[key] += 1
    return orders
