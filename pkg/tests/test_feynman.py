import itertools
import json
import math
from pathlib import Path

import numpy as np
import pytest
import sympy

from feynman import (
    PRINTED, DanglingIndexError, Diagram, DiagramError, FeynmanRuleError, Leg, MixedLoopError,
    MomentumConservationError, ProjectorMode, contract_diagram, contract_diagrams, evaluate,
    evaluate_vertex, free_operator, load_diagram, omega_orders, propagator, reduce_inner,
    reduce_loops, sym_eta_tensor, transversal_delta, vertex,
)
from feynman.loops import loop_rank
from feynman.rules import VERTEX_KINDS
from symbolic import Expression, contract_metric, equal, parse, scale_weight

DIAGRAMS = Path(__file__).resolve().parent.parent / "diagrams"
ETA = np.diag([-1, 1, 1, 1]).astype(object)


def same(a, b):
    return all(sympy.simplify(x - y) == 0 for x, y in zip(np.ravel(a), np.ravel(b)))


def diagram_data(name):
    return json.loads((DIAGRAMS / name).read_text(encoding="utf-8"))


def test_feynman_gauge_propagator_is_metric_product():
    prop = propagator("gauge", 1, ProjectorMode.SIMPLIFIED)
    assert prop.numerator == parse("eta[.mu,.nu]*eta[al,be]")
    assert prop.denominator == sympy.Symbol("D_p")


def test_ghost_propagator_full_projector():
    prop = propagator("ghost", mode="full")
    assert prop.numerator == parse("eta[ga,de] - inv_P*P[ga]*P[de]")


def test_covariant_gauge_propagator_keeps_longitudinal_term():
    prop = propagator("gauge", "xi")
    expected = parse("eta[.mu,.nu]*eta[al,be] - inv_p*p[.mu]*p[.nu]*eta[al,be] + xi*inv_p*p[.mu]*p[.nu]*eta[al,be]")
    assert equal(prop.numerator, expected)


def test_landau_limit_is_rejected():
    with pytest.raises(FeynmanRuleError):
        propagator("gauge", 0)
    with pytest.raises(FeynmanRuleError):
        free_operator("gauge", 0)


def test_unknown_species_and_kind():
    with pytest.raises(FeynmanRuleError):
        propagator("photon")
    with pytest.raises(FeynmanRuleError):
        vertex("AAAAA")


def test_transversal_delta_annihilates_momentum():
    contracted = transversal_delta("al", "be") * parse("P[.al]")
    P = (2, 1, 0, 1)
    square = sympy.Rational(-4 + 1 + 0 + 1)
    out = evaluate(contracted, {"P": P}, ["be"], {"inv_P": 1 / square})
    assert all(c == 0 for c in out)


def test_transversal_delta_is_idempotent():
    P = (3, 1, 2, 0)
    scalars = {"inv_P": sympy.Rational(1, -9 + 1 + 4)}
    twice = transversal_delta("al", "ga") * transversal_delta("ga", "be")
    once = transversal_delta("al", "be")
    assert same(evaluate(twice, {"P": P}, ["al", "be"], scalars),
                evaluate(once, {"P": P}, ["al", "be"], scalars))


def test_gauge_kernel_read_off_from_lagrangian():
    expected = parse(
        "p[la]*p[.la]*eta[mu,nu]*eta[al,be] - p[mu]*p[nu]*eta[al,be] + xi^-1*p[mu]*p[nu]*eta[al,be]")
    assert equal(free_operator("gauge"), expected)


def test_ghost_kernel_read_off_from_lagrangian():
    assert equal(free_operator("ghost"), parse("p[la]*p[.la]*eta[ga,de]"))


def test_kernel_inverts_propagator_numerator():
    kernel = free_operator("gauge", 3)
    numerator = propagator("gauge", 3, "full", ends=(Leg("be", "nu"), Leg("de", "rho"))).numerator
    p, P = (1, 2, 0, 1), (2, 1, 0, 1)
    scalars = {"inv_p": sympy.Rational(1, 4), "inv_P": sympy.Rational(-1, 2)}
    momenta = {"p": p, "P": P}
    order = ["mu", "al", "rho", "de"]
    product = evaluate(contract_metric(kernel * numerator), momenta, order, scalars)
    expected = evaluate(parse("4*eta[mu,rho]*eta[al,de] - 4*inv_P*eta[mu,rho]*P[al]*P[de]"),
                        momenta, order, scalars)
    assert same(product, expected)


@pytest.mark.parametrize("kind", VERTEX_KINDS)
def test_vertices_are_scale_invariant(kind):
    assert scale_weight(vertex(kind).expression) == 0


@pytest.mark.parametrize("species", ["gauge", "ghost"])
def test_full_propagators_are_scale_invariant(species):
    assert scale_weight(propagator(species, "xi", "full").numerator) == 0


def test_cubic_vertex_is_cyclic():
    legs = vertex("AAA").legs
    rotated = legs[1:] + legs[:1]
    assert equal(vertex("AAA", rotated).expression, vertex("AAA").expression)


@pytest.mark.parametrize("permutation", [(1, 0, 3, 2), (2, 3, 0, 1), (3, 2, 1, 0)])
def test_quartic_vertex_pair_exchange_symmetry(permutation):
    legs = vertex("AAAA").legs
    permuted = tuple(legs[n] for n in permutation)
    assert equal(vertex("AAAA", permuted).expression, vertex("AAAA").expression)


def _cubic_oracle(p, P):
    p1, p2, p3 = (np.array(v) for v in p)
    P1, P2, P3 = (np.array(v) for v in P)
    E = ETA
    out = np.zeros((4,) * 6, dtype=object)
    for mu, al, nu, be, rho, ga in itertools.product(range(4), repeat=6):
        out[mu, al, nu, be, rho, ga] = (
            -2 * P1[ga] * E[al, be] * (p2[rho] * E[mu, nu] - p2[mu] * E[nu, rho])
            - 2 * P2[al] * E[be, ga] * (p3[mu] * E[nu, rho] - p3[nu] * E[rho, mu])
            - 2 * P3[be] * E[ga, al] * (p1[nu] * E[rho, mu] - p1[rho] * E[mu, nu]))
    return out


def test_cubic_vertex_matches_direct_substitution():
    p = [(1, 0, 0, 0), (-1, 0, 0, 0), (0, 0, 0, 0)]
    P = [(0, 1, 0, 0), (0, 0, 1, 0), (0, -1, -1, 0)]
    tensor = evaluate_vertex("AAA", list(zip(p, P)))
    assert tensor.shape == (4,) * 6
    assert same(tensor, _cubic_oracle(p, P))


def test_ghost_vertex_matches_direct_substitution():
    p = [(1, 2, 0, 0), (0, -1, 1, 0), (-1, -1, -1, 0)]
    P = [(1, 0, 0, 1), (0, 1, 0, 0), (-1, -1, 0, -1)]
    tensor = evaluate_vertex("ghost-A", list(zip(p, P)))
    p1, P2, P3 = np.array(p[0]), np.array(P[1]), np.array(P[2])
    expected = np.zeros((4,) * 4, dtype=object)
    for ga, de, mu, al in itertools.product(range(4), repeat=4):
        expected[ga, de, mu, al] = -(P2[al] * ETA[ga, de] - P3[de] * ETA[al, ga]) * p1[mu]
    assert same(tensor, expected)


def test_vertex_rejects_unbalanced_momenta():
    p = [(1, 0, 0, 0), (0, 0, 0, 0), (0, 0, 0, 0)]
    P = [(0, 0, 0, 0)] * 3
    with pytest.raises(MomentumConservationError) as info:
        evaluate_vertex("AAA", list(zip(p, P)))
    assert info.value.vertex == "AAA"


def test_printed_ghost_vertex_leaves_an_index_dangling():
    momenta = [((0, 0, 0, 0), (0, 0, 0, 0))] * 3
    with pytest.raises(DanglingIndexError):
        evaluate_vertex("ghost-A", momenta, variant=PRINTED)


@pytest.mark.parametrize("k", range(4))
def test_symmetrized_eta_normalization(k):
    tensor = sym_eta_tensor(2 * k)
    assert tensor.coefficient == sympy.Rational((-1) ** k, math.prod(4 + 2 * j for j in range(k)))
    assert tensor.pairing_count == math.prod(range(1, 2 * k, 2))


def _pairings(slots):
    if not slots:
        yield []
        return
    first, rest = slots[0], slots[1:]
    for n, partner in enumerate(rest):
        for tail in _pairings(rest[:n] + rest[n + 1:]):
            yield [(first, partner)] + tail


@pytest.mark.parametrize("rank", [2, 4])
def test_symmetrized_eta_matches_explicit_symmetrization(rank):
    tensor = sym_eta_tensor(rank)
    explicit = np.zeros((4,) * rank, dtype=object)
    for position in itertools.product(range(4), repeat=rank):
        explicit[position] = sum(math.prod(ETA[position[a], position[b]] for a, b in pairing)
                                 for pairing in _pairings(list(range(rank))))
    assert same(tensor.components(), explicit * tensor.coefficient)


def test_odd_rank_reduces_to_zero():
    assert reduce_inner(parse("L1[al]"), "L1").is_zero
    assert reduce_inner(parse("L1[al]*L1[be]*L1[ga]*Q1[de]"), "L1").is_zero


def test_rank_two_reduction():
    assert equal(reduce_inner(parse("L1[al]*L1[be]")), parse("-1/4*Om1*eta[al,be]"))


def test_rank_zero_gives_plain_shell_integral():
    assert equal(reduce_inner(parse("Q1[al]*Q1[.al]"), "L1"), parse("Om0*Q1[al]*Q1[.al]"))


@pytest.mark.parametrize("labels", [["al", "be"], ["al", "be", "ga", "de"], ["al", "be", "ga", "de", "ep", "ze"]])
def test_reduction_commutes_with_contraction(labels):
    monomial = parse("*".join(f"L1[{l}]" for l in labels))
    pair = parse("eta[.al,.be]")
    contract_first = reduce_inner(contract_metric(monomial * pair), "L1")
    reduce_first = contract_metric(reduce_inner(monomial, "L1") * pair)
    assert equal(contract_first, reduce_first)


def test_mixed_loops_need_an_explicit_loop():
    with pytest.raises(MixedLoopError):
        reduce_inner(parse("L1[al]*L2[be]"))


def test_single_propagator_diagram():
    result = contract_diagram(load_diagram(DIAGRAMS / "gauge_propagator.json"))
    assert equal(result, parse("D_p_e1*eta[mu,nu]*eta[al,be]"))


@pytest.fixture(scope="module")
def ghost_loop():
    return contract_diagram(load_diagram(DIAGRAMS / "ghost_loop.json"))


def test_ghost_loop_inner_part_is_rank_two(ghost_loop):
    ranks = {loop_rank(t, "L1") for t in ghost_loop.terms}
    assert max(ranks) == 2
    leading = Expression(tuple(t for t in ghost_loop.terms if loop_rank(t, "L1") == 2))
    expected = parse("-4*Lam^2*D_p_g1*D_p_g2*L1[al]*L1[be]*l1[nu]*(l1[mu] + q1[mu])")
    assert equal(leading, expected)


def test_ghost_loop_reduces_to_shell_integrals(ghost_loop):
    reduced = reduce_inner(ghost_loop, "L1")
    assert all(loop_rank(t, "L1") == 0 for t in reduced.terms)
    assert ((("Om1", 1),)) in omega_orders(reduced)


def test_two_loop_chain_factorizes():
    chain = contract_diagram(load_diagram(DIAGRAMS / "ghost_chain.json"))
    reduced = reduce_loops(chain, ["L1", "L2"])
    orders = omega_orders(reduced)
    assert orders
    assert all(sum(power for _, power in key) == 2 for key in orders)
    assert (("Om1", 2),) in orders


def test_printed_ghost_vertex_fails_contraction():
    data = diagram_data("ghost_loop.json")
    for v in data["vertices"]:
        v["variant"] = "printed"
    with pytest.raises(DanglingIndexError):
        contract_diagram(Diagram.from_dict(data))


def test_diagram_momentum_conservation():
    data = diagram_data("ghost_loop.json")
    data["externals"][1]["momentum"] = {"spacetime": {"q1": -2}, "inner": {"Q1": -1}}
    with pytest.raises(MomentumConservationError) as info:
        contract_diagram(Diagram.from_dict(data))
    assert info.value.vertex == "v2"


def test_declared_loops_must_match_topology():
    data = diagram_data("ghost_loop.json")
    data["loops"] = []
    with pytest.raises(DiagramError):
        contract_diagram(Diagram.from_dict(data))


def test_full_projector_rejected_inside_loops():
    with pytest.raises(DiagramError):
        contract_diagram(load_diagram(DIAGRAMS / "ghost_loop.json"), mode="full")


def test_schema_rejects_bad_momentum_names(tmp_path):
    data = diagram_data("gauge_propagator.json")
    data["edges"][0]["momentum"] = {"spacetime": {"p1": 1}}
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(data), encoding="utf-8")
    with pytest.raises(DiagramError):
        load_diagram(path)


def test_missing_diagram_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_diagram(tmp_path / "absent.json")


def test_concurrent_contraction_keeps_order():
    diagrams = [load_diagram(DIAGRAMS / name) for name in ("gauge_propagator.json", "ghost_loop.json")]
    results = contract_diagrams(diagrams, workers=2)
    assert results[0] == contract_diagram(diagrams[0])
    assert results[1] == contract_diagram(diagrams[1])
