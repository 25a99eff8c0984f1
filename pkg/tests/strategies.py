"""Hypothesis strategies for random field monomials"""
import sympy
from hypothesis import strategies as st

from symbolic import Index, IndexKind, Monomial
from symbolic.atoms import FieldAtom, field_spec

ST, IN = IndexKind.SPACETIME, IndexKind.INNER
POOL = ["A", "w", "ws", "h", "E", "psi", "theta"]
SPACETIME_LABELS = ["mu", "nu", "rho", "si", "ta", "la", "ka", "ph", "ch"]
INNER_LABELS = ["al", "be", "ga", "de", "ep", "ze", "et", "th", "io", "om"]
Z = sympy.Symbol("Z")


@st.composite
def monomials(draw, max_factors=4):
    """Fully contracted monomials over the dynamical fields"""
    names = draw(st.lists(st.sampled_from(POOL), min_size=1, max_size=max_factors))
    shapes = []
    for name in names:
        constant = name == "theta"
        shapes.append([
            name,
            list(field_spec(name).slots),
            0 if constant else draw(st.integers(0, 1)),
            0 if constant else draw(st.integers(0, 1)),
        ])
    for kind, position in ((ST, 2), (IN, 3)):
        count = sum(s[1].count(kind) + s[position] for s in shapes)
        if count % 2:
            target = next(s for s in shapes if s[0] != "theta")
            target[position] += 1

    slots = {ST: [], IN: []}
    for n, (name, kinds, nsd, nid) in enumerate(shapes):
        for k, kind in enumerate(kinds):
            slots[kind].append((n, "idx", k))
        slots[ST].extend((n, "sd", j) for j in range(nsd))
        slots[IN].extend((n, "id", j) for j in range(nid))
    label = {}
    for kind, pool in ((ST, SPACETIME_LABELS), (IN, INNER_LABELS)):
        order = draw(st.permutations(slots[kind]))
        chosen = draw(st.permutations(pool))
        for pair in range(len(order) // 2):
            label[order[2 * pair]] = label[order[2 * pair + 1]] = chosen[pair]

    atoms = []
    for n, (name, kinds, nsd, nid) in enumerate(shapes):
        atoms.append(FieldAtom(
            name,
            tuple(Index(kind, label[(n, "idx", k)]) for k, kind in enumerate(kinds)),
            tuple(Index(ST, label[(n, "sd", j)]) for j in range(nsd)),
            tuple(Index(IN, label[(n, "id", j)]) for j in range(nid)),
        ))
    coeff = draw(st.sampled_from([1, -1, 2, sympy.Rational(1, 2), sympy.Rational(-3, 4)]))
    coeff = coeff * draw(st.sampled_from([1, Z]))
    return Monomial(sympy.sympify(coeff), tuple(atoms))


