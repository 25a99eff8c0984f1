"""Canonical ordering and dummy renumbering of monomials"""
import itertools
import logging
import math
from collections import defaultdict
from dataclasses import replace
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

from symbolic.atoms import SPECIES_RANK, FieldAtom
from symbolic.errors import IndexContractionError
from symbolic.expression import Expression, Monomial, normalize_coefficient
from symbolic.indices import Index, IndexKind

logger = logging.getLogger(__name__)

MAX_ORDERINGS = 40320

_SLOT_ORDER = {"idx": 0, "sd": 1, "id": 2}


def _occurrences(factors) -> Dict[str, List[tuple]]:
    occurrences = defaultdict(list)
    for position, atom in enumerate(factors):
        for code, slot, index in atom.slots():
            occurrences[index.label].append((position, code, slot, index))
    for label, where in occurrences.items():
        if len(where) > 2:
            raise IndexContractionError(f"index '{label}' occurs {len(where)} times")
        if len(where) == 2 and where[0][3].kind != where[1][3].kind:
            raise IndexContractionError(f"index '{label}' contracts different families")
    return occurrences


def _shape_key(atom: FieldAtom, external) -> tuple:
    """Label-independent sort key of an atom"""
    pattern = [i.label if i.label in external else "" for i in atom.indices]
    for i, j, _ in atom.spec.exchange:
        if j < len(pattern) and pattern[j] < pattern[i]:
            pattern[i], pattern[j] = pattern[j], pattern[i]
    sd_external = tuple(sorted(i.label for i in atom.sderivs if i.label in external))
    id_external = tuple(sorted(i.label for i in atom.iderivs if i.label in external))
    return (SPECIES_RANK[atom.species], atom.name, len(atom.indices), tuple(pattern),
            len(atom.sderivs), sd_external, len(atom.iderivs), id_external)


def _tie_groups(keys) -> List[List[int]]:
    order = sorted(range(len(keys)), key=lambda i: keys[i])
    return [list(g) for _, g in itertools.groupby(order, key=lambda i: keys[i])]


def _orderings(keys):
    groups = _tie_groups(keys)
    order = [i for g in groups for i in g]
    total = math.prod(math.factorial(len(g)) for g in groups)
    if total > MAX_ORDERINGS:
        logger.warning("Monomial has %d tie orderings; truncating search", total)
        yield tuple(order)
        return
    for choice in itertools.product(*(itertools.permutations(g) for g in groups)):
        yield tuple(i for part in choice for i in part)


def _variants(atom: FieldAtom):
    """Index orderings of an (anti)symmetric constant tensor with their signs"""
    variants = [(atom, 1)]
    for i, j, sign in atom.spec.exchange:
        if j >= len(atom.indices):
            continue
        swapped = []
        for candidate, current in variants:
            indices = list(candidate.indices)
            indices[i], indices[j] = indices[j], indices[i]
            swapped.append((replace(candidate, indices=tuple(indices)), current * sign))
        variants.extend(swapped)
    return variants


def _odd_sign(order, factors) -> int:
    odd = [i for i in order if factors[i].odd]
    inversions = sum(1 for a, b in itertools.combinations(odd, 2) if a > b)
    return -1 if inversions % 2 else 1


def _partner_key(label, position, code, occurrences):
    here = [o for o in occurrences[label] if o[0] == position and o[1] == code]
    if len(here) == 2:
        return (-1, 0, 0)
    other = [o for o in occurrences[label] if not (o[0] == position and o[1] == code)][0]
    return (other[0], _SLOT_ORDER[other[1]], other[2])


def _relabel(atoms, external):
    """Number dummies by first occurrence; returns (key, numbering)"""
    occurrences = defaultdict(list)
    for position, atom in enumerate(atoms):
        for code, slot, index in atom.slots():
            occurrences[index.label].append((position, code, slot))
    numbering: Dict[str, int] = {}

    def token(label):
        if label in external:
            return ("x", label)
        return ("d", numbering[label])

    keys = []
    for position, atom in enumerate(atoms):
        for index in atom.indices:
            if index.label not in external and index.label not in numbering:
                numbering[index.label] = len(numbering)
        for code, pool in (("sd", atom.sderivs), ("id", atom.iderivs)):
            fresh = {i.label for i in pool
                     if i.label not in external and i.label not in numbering}
            for label in sorted(fresh, key=lambda l: _partner_key(l, position, code, occurrences)):
                numbering[label] = len(numbering)
        keys.append((
            SPECIES_RANK[atom.species], atom.name,
            tuple(token(i.label) for i in atom.indices),
            tuple(sorted(token(i.label) for i in atom.sderivs)),
            tuple(sorted(token(i.label) for i in atom.iderivs)),
        ))
    return tuple(keys), numbering


def _rebuild(atoms, numbering, external) -> Tuple[FieldAtom, ...]:
    kinds = {}
    where = defaultdict(list)
    for position, atom in enumerate(atoms):
        for code, slot, index in atom.slots():
            kinds[index.label] = index.kind
            where[index.label].append((position, _SLOT_ORDER[code], slot, code))
    counters = {IndexKind.SPACETIME: 0, IndexKind.INNER: 0}
    new_label = {}
    for label, _ in sorted(numbering.items(), key=lambda item: item[1]):
        kind = kinds[label]
        prefix = "s" if kind == IndexKind.SPACETIME else "i"
        counters[kind] += 1
        while f"{prefix}{counters[kind]}" in external:
            counters[kind] += 1
        new_label[label] = f"{prefix}{counters[kind]}"

    # derivative slot lower and field slot upper, else first occurrence lower
    lower_at = {}
    for label in numbering:
        first, second = sorted(where[label])
        if first[3] == "idx" and second[3] != "idx":
            lower_at[label] = second[:3]
        else:
            lower_at[label] = first[:3]

    def rename(index, position, code, slot):
        if index.label in external:
            return index
        lower = lower_at[index.label] == (position, _SLOT_ORDER[code], slot)
        return Index(index.kind, new_label[index.label], lower)

    def order_key(index):
        if index.label in external:
            return ("x", index.label)
        return ("d", numbering[index.label])

    rebuilt = []
    for position, atom in enumerate(atoms):
        indices = tuple(rename(i, position, "idx", k) for k, i in enumerate(atom.indices))
        sderivs = tuple(rename(i, position, "sd", 0) for i in sorted(atom.sderivs, key=order_key))
        iderivs = tuple(rename(i, position, "id", 0) for i in sorted(atom.iderivs, key=order_key))
        rebuilt.append(FieldAtom(atom.name, indices, sderivs, iderivs))
    return tuple(rebuilt)


@lru_cache(maxsize=200000)
def canonical_form(factors: Tuple[FieldAtom, ...]) -> Optional[Tuple[tuple, int, Tuple[FieldAtom, ...]]]:
    """Canonical (key, sign, factors) of a product, or None when it vanishes"""
    occurrences = _occurrences(factors)
    external = frozenset(label for label, where in occurrences.items() if len(where) == 1)
    shape = [_shape_key(atom, external) for atom in factors]
    best_key = None
    best_signs = set()
    best = None
    for order in _orderings(shape):
        odd_sign = _odd_sign(order, factors)
        for picked in itertools.product(*(_variants(factors[i]) for i in order)):
            chosen = tuple(atom for atom, _ in picked)
            sign = odd_sign * math.prod(s for _, s in picked)
            key, numbering = _relabel(chosen, external)
            if best_key is None or key < best_key:
                best_key, best_signs, best = key, {sign}, (chosen, numbering)
            elif key == best_key:
                best_signs.add(sign)
    if len(best_signs) > 1:
        return None
    chosen, numbering = best
    return best_key, best_signs.pop(), _rebuild(chosen, numbering, external)


def canonicalize(expr: Expression) -> Expression:
    """Sort factors, renumber dummies, track Grassmann signs and merge like terms"""
    if expr.canonical:
        return expr
    merged = {}
    for term in expr.terms:
        if term.coeff == 0:
            continue
        form = canonical_form(term.factors)
        if form is None:
            continue
        key, sign, atoms = form
        if key in merged:
            merged[key][0] = merged[key][0] + sign * term.coeff
        else:
            merged[key] = [sign * term.coeff, atoms]
    terms = []
    for key in sorted(merged):
        coeff = normalize_coefficient(merged[key][0])
        if coeff != 0:
            terms.append(Monomial(coeff, merged[key][1]))
    _check_externals(terms)
    return Expression(tuple(terms), canonical=True)


def _check_externals(terms) -> None:
    reference = None
    for term in terms:
        externals = term.externals()
        if reference is None:
            reference = externals
        elif externals != reference:
            raise IndexContractionError(
                f"free indices differ between monomials: {sorted(reference)} vs {sorted(externals)}")


def monomial_key(term: Monomial) -> tuple:
    """Canonical structure key of a single monomial (coefficient ignored)"""
    form = canonical_form(term.factors)
    return None if form is None else form[0]


def ordering_count(term: Monomial) -> int:
    """Factor orderings the canonical search has to compare for a monomial"""
    occurrences = _occurrences(term.factors)
    external = frozenset(label for label, where in occurrences.items() if len(where) == 1)
    groups = _tie_groups([_shape_key(atom, external) for atom in term.factors])
    return math.prod(math.factorial(len(g)) for g in groups)


def canonical_is_exact(term: Monomial) -> bool:
    """False when canonicalization fell back to a single ordering for this monomial"""
    return ordering_count(term) <= MAX_ORDERINGS
