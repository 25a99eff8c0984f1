"""Monomials and expressions over field atoms"""
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, Set, Tuple

import sympy

from symbolic.atoms import FieldAtom
from symbolic.indices import fresh_label


def normalize_coefficient(value) -> sympy.Expr:
    """Exact canonical representation of a scalar coefficient"""
    value = sympy.sympify(value)
    if value.is_Rational:
        return value
    return sympy.cancel(value)


@dataclass(frozen=True)
class Monomial:
    coeff: sympy.Expr
    factors: Tuple[FieldAtom, ...] = ()

    def label_counts(self) -> Counter:
        counts = Counter()
        for atom in self.factors:
            counts.update(atom.labels())
        return counts

    def labels(self) -> Set[str]:
        return set(self.label_counts())

    def externals(self) -> Set[str]:
        return {label for label, n in self.label_counts().items() if n == 1}

    def dummies(self) -> Set[str]:
        return {label for label, n in self.label_counts().items() if n == 2}

    def index_kinds(self) -> Dict[str, object]:
        kinds = {}
        for atom in self.factors:
            for _, _, index in atom.slots():
                kinds[index.label] = index.kind
        return kinds

    def freshened(self, avoid: Iterable[str]) -> "Monomial":
        """Rename dummies that collide with labels in avoid"""
        avoid = set(avoid)
        clashes = sorted(self.dummies() & avoid)
        if not clashes:
            return self
        kinds = self.index_kinds()
        taken = avoid | self.labels()
        mapping = {}
        for label in clashes:
            new = fresh_label(kinds[label], taken)
            taken.add(new)
            mapping[label] = new
        return self.relabel(mapping)

    def relabel(self, mapping: Dict[str, str]) -> "Monomial":
        return Monomial(self.coeff, tuple(a.relabel(mapping) for a in self.factors))

    def times(self, other: "Monomial") -> "Monomial":
        left = self.freshened(other.externals())
        other = other.freshened(left.labels())
        coeff = normalize_coefficient(left.coeff * other.coeff)
        return Monomial(coeff, left.factors + other.factors)

    def scaled(self, value) -> "Monomial":
        return Monomial(normalize_coefficient(self.coeff * value), self.factors)

    def replace_factor(self, position: int, atom: FieldAtom) -> "Monomial":
        factors = list(self.factors)
        factors[position] = atom
        return Monomial(self.coeff, tuple(factors))


@dataclass(frozen=True)
class Expression:
    terms: Tuple[Monomial, ...] = ()
    canonical: bool = field(default=False, compare=False)

    @classmethod
    def zero(cls) -> "Expression":
        return cls((), canonical=True)

    @classmethod
    def scalar(cls, value) -> "Expression":
        value = normalize_coefficient(value)
        if value == 0:
            return cls.zero()
        return cls((Monomial(value, ()),))

    @classmethod
    def of(cls, *atoms: FieldAtom, coeff=1) -> "Expression":
        return cls((Monomial(normalize_coefficient(coeff), tuple(atoms)),))

    @classmethod
    def sum(cls, parts: Iterable["Expression"]) -> "Expression":
        terms = []
        for part in parts:
            terms.extend(part.terms)
        return cls(tuple(terms))

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __iter__(self) -> Iterator[Monomial]:
        return iter(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __add__(self, other: "Expression") -> "Expression":
        return Expression(self.terms + _coerce(other).terms)

    def __radd__(self, other):
        return _coerce(other) + self

    def __sub__(self, other: "Expression") -> "Expression":
        return self + (-_coerce(other))

    def __neg__(self) -> "Expression":
        return self.scaled(-1)

    def scaled(self, value) -> "Expression":
        return Expression(tuple(t.scaled(value) for t in self.terms))

    def __mul__(self, other) -> "Expression":
        if not isinstance(other, Expression):
            return self.scaled(other)
        return Expression(tuple(a.times(b) for a in self.terms for b in other.terms))

    def __rmul__(self, other) -> "Expression":
        return self.scaled(other)

    def canonicalize(self) -> "Expression":
        from symbolic.canonical import canonicalize
        return canonicalize(self)

    def __str__(self):
        from symbolic.grammar import to_text
        return to_text(self)


def _coerce(value) -> Expression:
    if isinstance(value, Expression):
        return value
    return Expression.scalar(value)
