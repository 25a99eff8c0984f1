"""Enumeration of local operators allowed by the linear symmetries"""
import itertools
import logging
from dataclasses import dataclass
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

import sympy

from symbolic import (
    Expression, InhomogeneousExpressionError, Monomial, WorkbenchError, apply_divergence_constraint,
    canonicalize, coefficient_map, contract_metric, derive, ghost_number, ibp_reduce, inner_index_weight,
    make_atom, mass_dimension, monomial_key,
)
from symbolic.atoms import FIELDS, FieldAtom, Species
from symbolic.ibp import DEFAULT_DEPTH
from symbolic.indices import Index, IndexKind
from transform.rules import RuleSet, rule_set
from transform.variation import apply_residual_gauge, vary

logger = logging.getLogger(__name__)

ST, IN = IndexKind.SPACETIME, IndexKind.INNER
SPACETIME_LABELS = ("mu", "nu", "rho", "si", "ta", "la", "ka", "ph", "ch")
INNER_LABELS = ("al", "be", "ga", "de", "ep", "ze", "et", "th", "io", "om")

SECTORS = ("ghost", "NL", "gauge-matter")
# fields that may appear next to the lead field; antighosts only appear differentiated, as the lead
REST_FIELDS = ("h", "A", "w")
FLAGS = ("mass_dimension", "ghost_neutral", "antighost_translation_safe", "inner_lorentz_scalar",
         "inner_scale_invariant", "spacetime_scalar")
# inner indices on fields minus Λ∇ of F·F, ∂ω*·∂ω and h·∂A
INNER_SCALE_WEIGHT = 2


class UnknownSectorError(WorkbenchError):
    pass


def _value(fn: Callable[[Expression], object], shape: Expression):
    try:
        return fn(shape)
    except InhomogeneousExpressionError:
        return None


def _free(term: Monomial, kind: IndexKind) -> bool:
    kinds = term.index_kinds()
    return any(kinds[label] == kind for label in term.externals())


def operator_flags(shape: Expression, max_dim: int) -> Dict[str, bool]:
    """Every admissibility filter evaluated on one shape"""
    terms = shape.terms
    return {
        "mass_dimension": _value(mass_dimension, shape) == max_dim,
        "ghost_neutral": _value(ghost_number, shape) == 0,
        "antighost_translation_safe": all(
            a.sderivs for t in terms for a in t.factors if a.species == Species.ANTI_GHOST),
        "inner_lorentz_scalar": all(
            not _free(t, IN) and all(sum(i.kind == IN for i in a.indices) % 2 == 0
                                     for a in t.factors if a.is_constant)
            for t in terms),
        "inner_scale_invariant": _value(inner_index_weight, shape) == INNER_SCALE_WEIGHT,
        "spacetime_scalar": not any(_free(t, ST) for t in terms),
    }


@dataclass(frozen=True)
class OperatorTerm:
    shape: Expression
    dimension: Optional[sympy.Rational]
    ghost: Optional[int]
    fields: Tuple[str, ...]
    flags: Dict[str, bool]

    @classmethod
    def from_shape(cls, shape: Expression, max_dim: int, fields: Tuple[str, ...]) -> "OperatorTerm":
        return cls(shape, _value(mass_dimension, shape), _value(ghost_number, shape), fields,
                   operator_flags(shape, max_dim))

    @property
    def admissible(self) -> bool:
        return all(self.flags.values())

    @property
    def rejected_by(self) -> List[str]:
        return [name for name in FLAGS if not self.flags[name]]


def _lead(sector: str) -> FieldAtom:
    if sector == "ghost":
        return make_atom("ws", (Index.inner("al", True),)).with_derivative(Index.spacetime("mu"))
    return make_atom("h", (Index.inner("al", True),))


def _labels(pool: Sequence[str], used: Sequence[str]) -> Iterator[str]:
    return (label for label in pool if label not in used)


def _shape(lead: FieldAtom, rest: Sequence[str], spacetime_derivs: int, inner_derivs: int) -> Expression:
    """lead · T · ∂^n Λ∇^m (product of rest), all inner indices carried by the tensor T"""
    inner = _labels(INNER_LABELS, lead.labels())
    spacetime = _labels(SPACETIME_LABELS, lead.labels())
    # spacetime slots in order, paired two by two; the lead's own slot pairs with the first slot of the rest
    open_label = lead.sderivs[0].label if lead.sderivs else None
    pending = [open_label] if open_label else []

    def next_spacetime() -> Index:
        if pending:
            return Index.spacetime(pending.pop(), True)
        label = next(spacetime)
        pending.append(label)
        return Index.spacetime(label)

    tensor = [Index.inner(i.label) for i in lead.indices]
    atoms = []
    for name in rest:
        indices = []
        for kind in FIELDS[name].slots:
            if kind == ST:
                indices.append(next_spacetime())
            else:
                label = next(inner)
                indices.append(Index.inner(label))
                tensor.append(Index.inner(label, True))
        atoms.append(make_atom(name, indices))
    product = Expression.of(*atoms)
    for _ in range(spacetime_derivs):
        product = derive(product, next_spacetime())
    for _ in range(inner_derivs):
        label = next(inner)
        product = derive(product, Index.inner(label, True))
        tensor.append(Index.inner(label))
    coefficient = Expression.of(make_atom("T", tensor)) if tensor else Expression.scalar(1)
    return canonicalize(Expression.of(lead) * coefficient * product)


def _shapes(sector: str, max_dim: int) -> Iterator[Tuple[Tuple[str, ...], int, int]]:
    lead = _lead(sector)
    budget = max_dim - lead.dimension
    for size in range(1, int(budget) + 1):
        for rest in itertools.combinations_with_replacement(REST_FIELDS, size):
            spacetime_derivs = budget - sum(FIELDS[name].dimension for name in rest)
            if spacetime_derivs < 0:
                continue
            for inner_derivs in range(len(rest) + 2):
                yield rest, int(spacetime_derivs), inner_derivs


def scan_shapes(sector: str, max_dim: int = 4) -> List[OperatorTerm]:
    """Every shape built for the sector with its filter flags, admissible or not"""
    if sector not in SECTORS or sector == "gauge-matter":
        raise UnknownSectorError(f"Unknown sector '{sector}'; choose from ghost, NL")
    lead = _lead(sector)
    scanned = []
    for rest, spacetime_derivs, inner_derivs in _shapes(sector, max_dim):
        shape = _shape(lead, rest, spacetime_derivs, inner_derivs)
        if not shape.is_zero:
            scanned.append(((len(rest), spacetime_derivs, rest, inner_derivs),
                            OperatorTerm.from_shape(shape, max_dim, (lead.name,) + rest)))
    return [op for _, op in sorted(scanned, key=lambda item: item[0])]


def enumerate_operators(sector: str, max_dim: int = 4) -> List[OperatorTerm]:
    """Admissible operator shapes of exactly max_dim in the ghost, NL or gauge-matter sector"""
    if sector not in SECTORS:
        raise UnknownSectorError(f"Unknown sector '{sector}'; choose from {', '.join(SECTORS)}")
    if sector == "gauge-matter":
        found = [OperatorTerm.from_shape(c, max_dim, ("A",))
                 for c in gauge_invariant_combinations(gauge_candidates(max_dim))]
    else:
        found = scan_shapes(sector, max_dim)
    kept = [op for op in found if op.admissible]
    for op in found:
        if not op.admissible:
            logger.debug("rejected %s: %s", op.fields, ", ".join(op.rejected_by))
    logger.info("%s sector at dimension %d: %d of %d shapes admissible", sector, max_dim, len(kept), len(found))
    return kept


def _pairings(slots: List) -> Iterator[List[Tuple]]:
    if not slots:
        yield []
        return
    first, rest = slots[0], slots[1:]
    for k, partner in enumerate(rest):
        for tail in _pairings(rest[:k] + rest[k + 1:]):
            yield [(first, partner)] + tail


def _candidate(count: int, sd: Sequence[int], nd: Sequence[int], st_pairs, in_pairs) -> Expression:
    label = {}
    for pairs, pool in ((st_pairs, SPACETIME_LABELS), (in_pairs, INNER_LABELS)):
        for (a, b), name in zip(pairs, pool):
            label[a] = label[b] = name
    atoms = []
    for n in range(count):
        atoms.append(FieldAtom(
            "A",
            (Index.spacetime(label[("s", n)]), Index.inner(label[("i", n)])),
            tuple(Index.spacetime(label[("sd", k)]) for k, m in enumerate(sd) if m == n),
            tuple(Index.inner(label[("id", k)]) for k, m in enumerate(nd) if m == n),
        ))
    return apply_divergence_constraint(canonicalize(Expression((Monomial(sympy.Integer(1), tuple(atoms)),))))


def gauge_candidates(max_dim: int) -> List[Expression]:
    """Gauge-field monomials of dimension max_dim with all indices contracted, one per canonical form"""
    found = {}
    for count in range(2, max_dim + 1):
        spacetime_derivs, inner_derivs = max_dim - count, count - 2
        for sd in itertools.combinations_with_replacement(range(count), spacetime_derivs):
            for nd in itertools.combinations_with_replacement(range(count), inner_derivs):
                st_slots = [("s", n) for n in range(count)] + [("sd", k) for k in range(len(sd))]
                in_slots = [("i", n) for n in range(count)] + [("id", k) for k in range(len(nd))]
                if len(st_slots) % 2 or len(in_slots) % 2:
                    continue
                for st_pairs in _pairings(st_slots):
                    for in_pairs in _pairings(in_slots):
                        term = _candidate(count, sd, nd, st_pairs, in_pairs)
                        if not term.is_zero:
                            found.setdefault(monomial_key(term.terms[0]), term.scaled(1 / term.terms[0].coeff))
    logger.info("%d gauge-field candidates at dimension %d", len(found), max_dim)
    return [found[key] for key in sorted(found, key=str)]


def _normal(expr: Expression) -> Expression:
    return apply_divergence_constraint(contract_metric(canonicalize(expr)))


def total_derivatives(candidates: Sequence[Expression]) -> List[Expression]:
    """∂_d W and Λ∇_d W for every W obtained by taking one derivative d off a candidate"""
    found = {}
    for candidate in candidates:
        for term in candidate.terms:
            for k, atom in enumerate(term.factors):
                for d in set(atom.sderivs + atom.iderivs):
                    stripped = term.replace_factor(k, atom.without_derivative(d))
                    moved = [stripped.replace_factor(j, a.with_derivative(d))
                             for j, a in enumerate(stripped.factors) if not a.is_constant]
                    total = _normal(Expression(tuple(moved)))
                    if not total.is_zero:
                        found.setdefault(str(total), total)
    return [found[key] for key in sorted(found)]


def _matrix(expressions: Sequence[Expression]) -> sympy.Matrix:
    maps = [coefficient_map(e) for e in expressions]
    keys = sorted({key for m in maps for key in m}, key=str)
    return sympy.Matrix(len(keys), len(maps), lambda i, j: maps[j].get(keys[i], 0))


def _rank(expressions: Sequence[Expression]) -> int:
    expressions = [e for e in expressions if not e.is_zero]
    return _matrix(expressions).rank() if expressions else 0


def in_span(target: Expression, generators: Sequence[Expression]) -> bool:
    """target is a linear combination of the generators"""
    return _rank(list(generators) + [target]) == _rank(generators)


def ibp_normal_form(expr: Expression, depth: int = DEFAULT_DEPTH) -> Expression:
    return ibp_reduce(contract_metric(expr), depth).residual


def gauge_invariant_combinations(candidates: Sequence[Expression], rules: RuleSet = None,
                                 depth: int = DEFAULT_DEPTH) -> List[Expression]:
    """Combinations of candidates whose residual-gauge variation is a total derivative, up to total derivatives"""
    rules = rules or rule_set("gauge")
    candidates = [c for c in candidates if not c.is_zero]
    if not candidates:
        return []
    variations = [
        ibp_normal_form(apply_residual_gauge(vary(c, rules), rules.parameter), depth) for c in candidates
    ]
    if all(v.is_zero for v in variations):
        kernel = [sympy.Matrix.eye(len(candidates))[:, j] for j in range(len(candidates))]
    else:
        kernel = _matrix(variations).nullspace()
    quotient = total_derivatives(candidates)
    combinations = []
    for vector in kernel:
        scale = next(v for v in vector if v != 0)
        combination = canonicalize(Expression.sum(
            c.scaled(v / scale) for c, v in zip(candidates, vector) if v != 0))
        if combination.is_zero or in_span(combination, quotient + combinations):
            continue
        combinations.append(combination)
    logger.info("%d invariant combinations among %d candidates modulo %d total derivatives",
                len(combinations), len(candidates), len(quotient))
    return combinations


def spanned_modulo_total_derivatives(target: Expression, combinations: Sequence[Expression],
                                     candidates: Sequence[Expression]) -> bool:
    """target equals a combination of the invariants plus total derivatives of the candidates"""
    return in_span(_normal(target), list(combinations) + total_derivatives(candidates))
