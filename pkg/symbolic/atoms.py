"""Field atoms and the per-species bookkeeping table"""
import re
from dataclasses import dataclass, replace
from enum import Enum
from functools import lru_cache
from typing import Dict, Optional, Tuple

from sympy import Rational

from symbolic.errors import IndexArityError, UnknownSpeciesError
from symbolic.indices import Index, IndexKind

ST = IndexKind.SPACETIME
IN = IndexKind.INNER


SYMMETRIC_PAIR = ((0, 1, 1),)
ANTISYMMETRIC_PAIR = ((0, 1, -1),)


class Species(Enum):
    THETA_PARAM = "ThetaParam"
    SCALAR_COEFFICIENT = "ScalarCoefficient"
    MOMENTUM = "Momentum"
    INNER_MOMENTUM = "InnerMomentum"
    GAUGE_PARAM = "GaugeParam"
    GHOST = "Ghost"
    ANTI_GHOST = "AntiGhost"
    NL_FIELD = "NLfield"
    GAUGE_A = "GaugeA"
    MATTER = "Matter"
    SOURCE = "Source"


# position in the canonical factor order
SPECIES_RANK = {species: rank for rank, species in enumerate(Species)}

CONSTANT_SPECIES = frozenset({
    Species.THETA_PARAM, Species.SCALAR_COEFFICIENT,
    Species.MOMENTUM, Species.INNER_MOMENTUM,
})

DIVERGENCE_FREE_SPECIES = frozenset({
    Species.GAUGE_A, Species.GHOST, Species.ANTI_GHOST,
    Species.NL_FIELD, Species.GAUGE_PARAM,
})


@dataclass(frozen=True)
class FieldSpec:
    name: str
    species: Species
    slots: Optional[Tuple[IndexKind, ...]]  # None: any number of indices
    odd: bool
    dimension: Rational
    ghost: int
    # slot exchanges (i, j, sign) under which the tensor is (anti)symmetric
    exchange: Tuple[Tuple[int, int, int], ...] = ()

    @property
    def symmetric(self) -> bool:
        return bool(self.exchange)


def _spec(name, species, slots, odd, dimension, ghost, exchange=()):
    return FieldSpec(name, species, slots, odd, Rational(dimension), ghost, exchange)


FIELDS: Dict[str, FieldSpec] = {spec.name: spec for spec in [
    _spec("A", Species.GAUGE_A, (ST, IN), False, 1, 0),
    _spec("w", Species.GHOST, (IN,), True, 1, 1),
    _spec("ws", Species.ANTI_GHOST, (IN,), True, 1, -1),
    _spec("h", Species.NL_FIELD, (IN,), False, 2, 0),
    _spec("psi", Species.MATTER, (), True, Rational(3, 2), 0),
    _spec("psibar", Species.MATTER, (), True, Rational(3, 2), 0),
    _spec("E", Species.GAUGE_PARAM, (IN,), False, 0, 0),
    _spec("E2", Species.GAUGE_PARAM, (IN,), False, 0, 0),
    # θ·sF must carry the dimension and ghost number of F
    _spec("theta", Species.THETA_PARAM, (), True, -1, -1),
    _spec("theta2", Species.THETA_PARAM, (), True, -1, -1),
    _spec("KA", Species.SOURCE, (ST, IN), True, 2, -1),
    _spec("Kw", Species.SOURCE, (IN,), False, 2, -2),
    _spec("Kws", Species.SOURCE, (IN,), False, 2, 0),
    _spec("Kpsi", Species.SOURCE, (), False, Rational(3, 2), -1),
    _spec("eta", Species.SCALAR_COEFFICIENT, None, False, 0, 0, SYMMETRIC_PAIR),
    _spec("g", Species.SCALAR_COEFFICIENT, (IN, IN), False, 0, 0, SYMMETRIC_PAIR),
    _spec("gam", Species.SCALAR_COEFFICIENT, (ST,), False, 0, 0),
    # parts of a general rank-4 inner tensor, split over its first index pair
    _spec("TEs", Species.SCALAR_COEFFICIENT, (IN, IN, IN, IN), False, 0, 0, SYMMETRIC_PAIR),
    _spec("TEa", Species.SCALAR_COEFFICIENT, (IN, IN, IN, IN), False, 0, 0, ANTISYMMETRIC_PAIR),
    _spec("TDs", Species.SCALAR_COEFFICIENT, (IN, IN, IN, IN), False, 0, 0, SYMMETRIC_PAIR),
    _spec("TDa", Species.SCALAR_COEFFICIENT, (IN, IN, IN, IN), False, 0, 0, ANTISYMMETRIC_PAIR),
]}

METRIC_NAMES = ("eta", "g")

_SPACETIME_MOMENTUM = re.compile(r"[pql]\d*$")
_INNER_MOMENTUM = re.compile(r"[PQL]\d*$")
_CONSTANT_TENSOR = re.compile(r"(T[A-Za-z]*\d*|[cde]\d*)$")


@lru_cache(maxsize=None)
def field_spec(name: str) -> FieldSpec:
    """Look up the bookkeeping entry for an atom name"""
    if name in FIELDS:
        return FIELDS[name]
    if _SPACETIME_MOMENTUM.match(name):
        return _spec(name, Species.MOMENTUM, (ST,), False, 1, 0)
    if _INNER_MOMENTUM.match(name):
        return _spec(name, Species.INNER_MOMENTUM, (IN,), False, 0, 0)
    if _CONSTANT_TENSOR.match(name):
        return _spec(name, Species.SCALAR_COEFFICIENT, None, False, 0, 0)
    raise UnknownSpeciesError(f"Unknown species for atom '{name}'")


def is_atom_name(name: str) -> bool:
    """True for names that denote atoms even without an index list"""
    return name in FIELDS and FIELDS[name].slots == ()


@dataclass(frozen=True)
class FieldAtom:
    name: str
    indices: Tuple[Index, ...] = ()
    sderivs: Tuple[Index, ...] = ()
    iderivs: Tuple[Index, ...] = ()

    @property
    def spec(self) -> FieldSpec:
        return field_spec(self.name)

    @property
    def species(self) -> Species:
        return self.spec.species

    @property
    def odd(self) -> bool:
        return self.spec.odd

    @property
    def is_constant(self) -> bool:
        return self.spec.species in CONSTANT_SPECIES

    @property
    def dimension(self) -> Rational:
        return self.spec.dimension + len(self.sderivs)

    @property
    def ghost(self) -> int:
        return self.spec.ghost

    @property
    def scale_weight(self) -> int:
        return -1 if self.species == Species.INNER_MOMENTUM else 0

    @property
    def own_inner_index(self) -> Optional[Index]:
        """The inner index that the divergence constraint acts on"""
        if self.species not in DIVERGENCE_FREE_SPECIES:
            return None
        for index in self.indices:
            if index.kind == IndexKind.INNER:
                return index
        return None

    def slots(self):
        """All index occurrences as (slot code, position, index)"""
        for position, index in enumerate(self.indices):
            yield ("idx", position, index)
        for index in self.sderivs:
            yield ("sd", 0, index)
        for index in self.iderivs:
            yield ("id", 0, index)

    def labels(self) -> Tuple[str, ...]:
        return tuple(index.label for _, _, index in self.slots())

    def with_derivative(self, d: Index) -> "FieldAtom":
        if d.kind == IndexKind.SPACETIME:
            return replace(self, sderivs=self.sderivs + (d,))
        return replace(self, iderivs=self.iderivs + (d,))

    def without_derivative(self, d: Index) -> "FieldAtom":
        """Remove one derivative carrying the label of d"""
        pool = self.sderivs if d.kind == IndexKind.SPACETIME else self.iderivs
        for position, index in enumerate(pool):
            if index.label == d.label:
                rest = pool[:position] + pool[position + 1:]
                if d.kind == IndexKind.SPACETIME:
                    return replace(self, sderivs=rest)
                return replace(self, iderivs=rest)
        raise IndexArityError(f"{self.name} carries no derivative {d.label}")

    def relabel(self, mapping: Dict[str, str]) -> "FieldAtom":
        def move(index):
            return index.with_label(mapping.get(index.label, index.label))
        return FieldAtom(
            self.name,
            tuple(move(i) for i in self.indices),
            tuple(move(i) for i in self.sderivs),
            tuple(move(i) for i in self.iderivs),
        )


def make_atom(name: str, indices=()) -> FieldAtom:
    """Build an atom, validating index arity and families"""
    spec = field_spec(name)
    indices = tuple(indices)
    if spec.slots is not None:
        if len(indices) != len(spec.slots):
            raise IndexArityError(
                f"{name} takes {len(spec.slots)} indices, got {len(indices)}")
        for kind, index in zip(spec.slots, indices):
            if index.kind != kind:
                raise IndexArityError(
                    f"{name} expects a {kind.value} index, got '{index.label}'")
    if spec.symmetric and spec.slots is None and len(indices) != 2:
        raise IndexArityError(f"{name} takes 2 indices, got {len(indices)}")
    return FieldAtom(name, indices)
