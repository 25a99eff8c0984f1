"""Momentum-space propagators, vertices and free kernels"""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Optional, Sequence, Tuple

import numpy as np
import sympy

from feynman import tensors
from feynman.errors import FeynmanRuleError, MomentumConservationError
from symbolic import Expression, FieldAtom, canonicalize, contract_metric, make_atom, relabel
from symbolic.calculus import LAMBDA
from symbolic.expression import Monomial, normalize_coefficient
from symbolic.indices import Index
from transform.lagrangians import l_mod

logger = logging.getLogger(__name__)

GAUGE = "gauge"
GHOST = "ghost"
SPECIES = (GAUGE, GHOST)

# leg species in the order each vertex expects them
VERTEX_LEGS = {
    "AAA": (GAUGE, GAUGE, GAUGE),
    "AAAA": (GAUGE, GAUGE, GAUGE, GAUGE),
    "ghost-A": (GHOST, GHOST, GAUGE),
}
VERTEX_KINDS = tuple(VERTEX_LEGS)

PRINTED = "printed"
CONSISTENT = "consistent"
GHOST_VARIANTS = (CONSISTENT, PRINTED)

XI = sympy.Symbol("xi")


class ProjectorMode(str, Enum):
    FULL = "full"
    SIMPLIFIED = "simplified"


@dataclass(frozen=True)
class Leg:
    inner: str
    spacetime: Optional[str] = None
    momentum: str = "p"
    inner_momentum: str = "P"

    def labels(self) -> Tuple[str, ...]:
        return tuple(label for label in (self.spacetime, self.inner) if label is not None)


@dataclass(frozen=True)
class Propagator:
    species: str
    gauge_parameter: sympy.Expr
    mode: ProjectorMode
    numerator: Expression
    # formal 1/(p² − iε), never evaluated
    denominator: sympy.Symbol

    @property
    def expression(self) -> Expression:
        return self.numerator.scaled(self.denominator)


@dataclass(frozen=True)
class Vertex:
    kind: str
    legs: Tuple[Leg, ...]
    expression: Expression
    variant: str = CONSISTENT

    @property
    def indices(self) -> Tuple[str, ...]:
        return tuple(label for leg in self.legs for label in leg.labels())


def _st(label: str) -> Index:
    return Index.spacetime(label, True)


def _in(label: str) -> Index:
    return Index.inner(label)


def _eta(a: Index, b: Index) -> FieldAtom:
    return make_atom("eta", (a, b))


def _p(name: str, label: str) -> FieldAtom:
    return make_atom(name, (_st(label),))


def _P(name: str, label: str) -> FieldAtom:
    return make_atom(name, (_in(label),))


def _suffix(tag: str) -> str:
    return f"_{tag}" if tag else ""


def inverse_square(momentum: str, tag: str = "") -> sympy.Symbol:
    return sympy.Symbol(f"inv_{momentum}{_suffix(tag)}")


def gauge_parameter_value(gauge_parameter) -> sympy.Expr:
    value = sympy.sympify(gauge_parameter)
    if value == 0:
        raise FeynmanRuleError("gauge parameter xi = 0 (Landau limit) is not supported")
    return value


def transversal_delta(a: str, b: str, inner_momentum: str = "P", tag: str = "") -> Expression:
    """η^{ab} − P^a P^b / P²"""
    return (Expression.of(_eta(_in(a), _in(b)))
            - Expression.of(_P(inner_momentum, a), _P(inner_momentum, b),
                            coeff=inverse_square(inner_momentum, tag)))


_PROPAGATOR_ENDS = {
    GAUGE: (Leg("al", "mu"), Leg("be", "nu")),
    GHOST: (Leg("ga"), Leg("de")),
}


def propagator(species: str, gauge_parameter=1, mode=ProjectorMode.SIMPLIFIED,
               ends: Optional[Sequence[Leg]] = None, momentum: str = "p",
               inner_momentum: str = "P", tag: str = "") -> Propagator:
    if species not in SPECIES:
        raise FeynmanRuleError(f"unknown propagator species '{species}'")
    mode = ProjectorMode(mode)
    xi = gauge_parameter_value(gauge_parameter)
    start, end = ends or _PROPAGATOR_ENDS[species]
    if mode == ProjectorMode.FULL:
        numerator = transversal_delta(start.inner, end.inner, inner_momentum, tag)
    else:
        numerator = Expression.of(_eta(_in(start.inner), _in(end.inner)))
    if species == GAUGE:
        if start.spacetime is None or end.spacetime is None:
            raise FeynmanRuleError("gauge propagator ends need spacetime indices")
        spacetime = (Expression.of(_eta(_st(start.spacetime), _st(end.spacetime)))
                     - Expression.of(_p(momentum, start.spacetime), _p(momentum, end.spacetime),
                                     coeff=(1 - xi) * inverse_square(momentum, tag)))
        numerator = spacetime * numerator
    denominator = sympy.Symbol(f"D_{momentum}{_suffix(tag)}")
    return Propagator(species, xi, mode, canonicalize(numerator), denominator)


def default_legs(kind: str) -> Tuple[Leg, ...]:
    if kind == "ghost-A":
        return (Leg("ga", None, "p1", "P1"), Leg("de", None, "p2", "P2"), Leg("al", "mu", "p3", "P3"))
    labels = zip(("al", "be", "ga", "de"), ("mu", "nu", "rho", "si"))
    return tuple(Leg(inner, spacetime, f"p{n}", f"P{n}")
                 for n, (inner, spacetime) in enumerate(labels, start=1))[:len(VERTEX_LEGS[kind])]


def _cubic(legs) -> Expression:
    terms = []
    for x, y, z in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        a, b, c = legs[x], legs[y], legs[z]
        head = Expression.of(_P(a.inner_momentum, c.inner), _eta(_in(a.inner), _in(b.inner)),
                             coeff=-2 * LAMBDA)
        tail = (Expression.of(_p(b.momentum, c.spacetime), _eta(_st(a.spacetime), _st(b.spacetime)))
                - Expression.of(_p(b.momentum, a.spacetime), _eta(_st(b.spacetime), _st(c.spacetime))))
        terms.append(head * tail)
    return Expression.sum(terms)


# (sign, (leg, leg whose inner index it carries), (same), η pair) and the two spacetime η pairings
_QUARTIC_BLOCKS = (
    (((1, (0, 2), (1, 3), (0, 1)), (-1, (1, 3), (2, 0), (1, 2)),
      (1, (2, 0), (3, 1), (2, 3)), (-1, (0, 2), (3, 1), (0, 3))),
     ((0, 1), (2, 3)), ((0, 3), (1, 2))),
    (((1, (0, 3), (1, 2), (0, 1)), (-1, (0, 3), (2, 1), (0, 2)),
      (1, (2, 1), (3, 0), (2, 3)), (-1, (1, 2), (3, 0), (1, 3))),
     ((0, 1), (2, 3)), ((0, 2), (1, 3))),
    (((1, (0, 1), (2, 3), (0, 2)), (-1, (0, 1), (3, 2), (0, 3)),
      (1, (1, 0), (3, 2), (1, 3)), (-1, (1, 0), (2, 3), (1, 2))),
     ((0, 2), (1, 3)), ((0, 3), (1, 2))),
)


def _spacetime_pairing(legs, pairs) -> Expression:
    (a, b), (c, d) = pairs
    return Expression.of(_eta(_st(legs[a].spacetime), _st(legs[b].spacetime)),
                         _eta(_st(legs[c].spacetime), _st(legs[d].spacetime)))


def _quartic(legs) -> Expression:
    blocks = []
    for inner_terms, plus, minus in _QUARTIC_BLOCKS:
        inner = Expression.sum(
            Expression.of(_P(legs[i].inner_momentum, legs[a].inner),
                          _P(legs[j].inner_momentum, legs[b].inner),
                          _eta(_in(legs[e].inner), _in(legs[f].inner)), coeff=sign)
            for sign, (i, a), (j, b), (e, f) in inner_terms)
        blocks.append(inner * (_spacetime_pairing(legs, plus) - _spacetime_pairing(legs, minus)))
    return Expression.sum(blocks).scaled(-LAMBDA ** 2)


def _ghost_gauge(legs, variant: str, stray: str) -> Expression:
    anti, ghost, gauge = legs
    partner = anti.inner if variant == CONSISTENT else stray
    first = Expression.of(_P(ghost.inner_momentum, gauge.inner), _eta(_in(anti.inner), _in(ghost.inner)),
                          _p(anti.momentum, gauge.spacetime), coeff=-LAMBDA)
    second = Expression.of(_P(gauge.inner_momentum, ghost.inner), _eta(_in(gauge.inner), _in(partner)),
                           _p(anti.momentum, gauge.spacetime), coeff=LAMBDA)
    return first + second


def vertex(kind: str, legs: Optional[Sequence[Leg]] = None, variant: str = CONSISTENT,
           stray: str = "be") -> Vertex:
    """Vertex factor with incoming momenta on every leg

    The printed ghost-gauge variant pairs the gauge leg's inner index with the
    stray label instead of the antighost index; it is returned uncanonicalized
    because its terms do not share free indices.
    """
    if kind not in VERTEX_LEGS:
        raise FeynmanRuleError(f"unknown vertex kind '{kind}'")
    if variant not in GHOST_VARIANTS:
        raise FeynmanRuleError(f"unknown vertex variant '{variant}'")
    legs = tuple(legs) if legs else default_legs(kind)
    expected = VERTEX_LEGS[kind]
    if len(legs) != len(expected):
        raise FeynmanRuleError(f"{kind} vertex takes {len(expected)} legs, got {len(legs)}")
    for leg, species in zip(legs, expected):
        if species == GAUGE and leg.spacetime is None:
            raise FeynmanRuleError(f"gauge leg of {kind} vertex needs a spacetime index")
    if kind == "AAA":
        raw = _cubic(legs)
    elif kind == "AAAA":
        raw = _quartic(legs)
    else:
        raw = _ghost_gauge(legs, variant, stray)
        if variant == PRINTED:
            return Vertex(kind, legs, raw, variant)
    return Vertex(kind, legs, canonicalize(raw), variant)


def evaluate_vertex(kind: str, momenta: Sequence[Tuple[Sequence, Sequence]],
                    variant: str = CONSISTENT, scalars: Optional[Mapping] = None) -> np.ndarray:
    """Exact components of a vertex; momenta holds one (p, P) pair per leg

    Index order is leg by leg, spacetime before inner; Λ defaults to 1.
    """
    v = vertex(kind, variant=variant)
    if len(momenta) != len(v.legs):
        raise FeynmanRuleError(f"{kind} vertex takes {len(v.legs)} momenta, got {len(momenta)}")
    values = {}
    for leg, (p, P) in zip(v.legs, momenta):
        values[leg.momentum] = tensors.vector(p)
        values[leg.inner_momentum] = tensors.vector(P)
    for part, names in (("p", [leg.momentum for leg in v.legs]),
                        ("P", [leg.inner_momentum for leg in v.legs])):
        residual = sum((values[name] for name in names), tensors.vector((0, 0, 0, 0)))
        if any(c != 0 for c in residual):
            raise MomentumConservationError(kind, f"sum {part} = {list(residual)}")
    scalars = {LAMBDA: 1, **(scalars or {})}
    logger.debug("Evaluating %s vertex (%s)", kind, variant)
    return tensors.evaluate(v.expression, values, v.indices, scalars)


_KERNEL_FIELDS = {GAUGE: ("A", "A"), GHOST: ("ws", "w")}


def _link(atom: FieldAtom, leg: Leg) -> Tuple[FieldAtom, ...]:
    targets = [_st(leg.spacetime)] if leg.spacetime is not None else []
    targets.append(_in(leg.inner))
    return tuple(_eta(own, target) for own, target in zip(atom.indices, targets))


def _kernel_piece(term: Monomial, left: int, right: int, ends, momentum: str) -> Expression:
    first, second = term.factors[left], term.factors[right]
    if first.iderivs or second.iderivs:
        raise FeynmanRuleError("quadratic term carries inner derivatives")
    derivatives = first.sderivs + second.sderivs
    if len(derivatives) % 2:
        raise FeynmanRuleError("quadratic term with an odd number of derivatives")
    # move every derivative onto the right field, then ∂ → −ip
    coeff = term.coeff * (-1) ** len(first.sderivs) * (-1) ** (len(derivatives) // 2)
    rest = tuple(a for n, a in enumerate(term.factors) if n not in (left, right))
    momenta = tuple(make_atom(momentum, (d,)) for d in derivatives)
    links = _link(first, ends[0]) + _link(second, ends[1])
    return contract_metric(Expression((Monomial(normalize_coefficient(coeff), rest + momenta + links),)))


def free_operator(species: str, gauge_parameter="xi", momentum: str = "p") -> Expression:
    """Momentum-space kernel of the quadratic gauge-fixed Lagrangian

    Read off as L0 = −½ A·D·A for the gauge field and L0 = −ω*·D·ω for the
    ghosts, with the Nakanishi-Lautrup field eliminated.
    """
    if species not in SPECIES:
        raise FeynmanRuleError(f"unknown kernel species '{species}'")
    xi = gauge_parameter_value(gauge_parameter)
    left_name, right_name = _KERNEL_FIELDS[species]
    ends = _PROPAGATOR_ENDS[species]
    pieces = []
    for term in l_mod().terms:
        fields = [(n, a) for n, a in enumerate(term.factors) if not a.is_constant]
        if sorted(a.name for _, a in fields) != sorted((left_name, right_name)):
            continue
        (left, first), (right, _) = fields
        sign = 1
        if first.name != left_name:
            # ghosts are odd: ω ω* = −ω* ω
            left, right, sign = right, left, -1
        pieces.append(_kernel_piece(term, left, right, ends, momentum).scaled(sign))
    half = Expression.sum(pieces)
    if species == GAUGE:
        swap = {"mu": "nu", "nu": "mu", "al": "be", "be": "al"}
        kernel = -(half + relabel(half, swap))
    else:
        kernel = -half
    kernel = canonicalize(kernel)
    return Expression(tuple(Monomial(normalize_coefficient(t.coeff.subs(XI, xi)), t.factors)
                            for t in kernel.terms)).canonicalize()
