"""Exact component evaluation of index expressions"""
import string
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Mapping, Sequence

import numpy as np
import sympy

from feynman.errors import DanglingIndexError, DiagramError
from symbolic import Expression, contract_metric, make_atom
from symbolic.atoms import METRIC_NAMES, Species
from symbolic.expression import Monomial
from symbolic.indices import Index
from transform.general import eta_pairings

DIMENSION = 4

# mostly-plus signature, L² = −Λ⁻² for the rest-frame vector
METRIC = np.array([[sympy.Integer(v) if i == j else sympy.Integer(0) for j, v in enumerate((-1, 1, 1, 1))]
                   for i in range(DIMENSION)], dtype=object)

_MOMENTUM_SPECIES = (Species.MOMENTUM, Species.INNER_MOMENTUM)


def vector(components: Sequence) -> np.ndarray:
    """Exact contravariant 4-vector"""
    values = [sympy.Rational(c) if isinstance(c, float) else sympy.sympify(c) for c in components]
    if len(values) != DIMENSION:
        raise DiagramError(f"expected {DIMENSION} components, got {len(values)}")
    return np.array(values, dtype=object)


def minkowski_square(v: np.ndarray) -> sympy.Expr:
    return sympy.expand(v @ METRIC @ v)


def zeros(rank: int) -> np.ndarray:
    return np.full((DIMENSION,) * rank, sympy.Integer(0), dtype=object)


def _atom_array(atom, momenta: Mapping[str, np.ndarray]) -> np.ndarray:
    if atom.sderivs or atom.iderivs:
        raise DiagramError(f"cannot evaluate differentiated atom '{atom.name}'")
    if atom.name in METRIC_NAMES and len(atom.indices) == 2:
        return METRIC
    if atom.species in _MOMENTUM_SPECIES:
        if atom.name not in momenta:
            raise DiagramError(f"no components given for momentum '{atom.name}'")
        return momenta[atom.name]
    raise DiagramError(f"cannot evaluate field atom '{atom.name}'")


def _evaluate_monomial(term: Monomial, momenta, order, scalars) -> np.ndarray:
    letters = iter(string.ascii_letters)
    first: Dict[str, str] = {}
    specs, operands = [], []
    for atom in term.factors:
        spec = ""
        for _, _, index in atom.slots():
            if index.label in first:
                # second occurrence: lower through the metric
                letter = next(letters)
                specs.append(first[index.label] + letter)
                operands.append(METRIC)
                spec += letter
            else:
                first[index.label] = next(letters)
                spec += first[index.label]
        specs.append(spec)
        operands.append(_atom_array(atom, momenta))
    coeff = sympy.sympify(term.coeff).subs(scalars)
    if not operands:
        return np.array(coeff, dtype=object)
    output = "".join(first[label] for label in order)
    value = np.einsum(",".join(specs) + "->" + output, *operands)
    return np.asarray(value, dtype=object) * np.array(coeff, dtype=object)


def evaluate(expr: Expression, momenta: Mapping[str, Sequence], order: Sequence[str],
             scalars: Mapping = None) -> np.ndarray:
    """Fully contravariant components of expr, free indices in the given order

    Dummy indices are summed with the metric inserted; scalars maps coefficient
    symbols to values.
    """
    momenta = {name: vector(v) for name, v in momenta.items()}
    scalars = {sympy.Symbol(k) if isinstance(k, str) else k: v for k, v in (scalars or {}).items()}
    expected = set(order)
    result = zeros(len(order))
    for term in expr.terms:
        externals = term.externals()
        if externals != expected:
            raise DanglingIndexError("evaluated expression", externals ^ expected)
        result = result + _evaluate_monomial(term, momenta, order, scalars)
    return result


@dataclass(frozen=True)
class SymEtaTensor:
    """coefficient · Σ over the (2k−1)!! η-pairings of rank 2k"""
    rank: int
    coefficient: sympy.Expr

    @property
    def pairing_count(self) -> int:
        return int(sympy.factorial2(self.rank - 1)) if self.rank else 1

    def expression(self, labels: Sequence[Index]) -> Expression:
        if len(labels) != self.rank:
            raise DiagramError(f"rank {self.rank} tensor given {len(labels)} indices")
        return Expression.sum(eta_pairings(labels)).scaled(self.coefficient)

    def components(self) -> np.ndarray:
        labels = [Index.inner(f"i{n}") for n in range(1, self.rank + 1)]
        return evaluate(self.expression(labels), {}, [i.label for i in labels])


def full_contraction(labels: Sequence[Index]) -> Expression:
    """Product η_{l1 l2} η_{l3 l4} … closing every index pairwise"""
    atoms = [make_atom("eta", (labels[n].lowered(), labels[n + 1].lowered()))
             for n in range(0, len(labels), 2)]
    return Expression.of(*atoms)


@lru_cache(maxsize=None)
def sym_eta_tensor(rank: int) -> SymEtaTensor:
    """Normalized so that closing every index pair reproduces (P²)^k = (−1)^k (−P²)^k"""
    if rank % 2:
        raise DiagramError(f"symmetrized η tensor needs an even rank, got {rank}")
    k = rank // 2
    labels = [Index.inner(f"i{n}") for n in range(1, rank + 1)]
    closed = contract_metric(Expression.sum(eta_pairings(labels)) * full_contraction(labels))
    trace = sum((t.coeff for t in closed.terms), sympy.Integer(0))
    c = sympy.Symbol("c")
    solution = sympy.solve(sympy.Eq(c * trace, (-1) ** k), c)
    return SymEtaTensor(rank, sympy.Rational(solution[0]))
