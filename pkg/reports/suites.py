"""Named check suites and their assembly into reports"""
import json
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import sympy

from config.config_loader import WorkbenchConfig
from reports.commands import build_report
from reports.models import Report
from symbolic import WorkbenchError, canonicalize, contract_metric, parse, scale_weight
from symbolic.verdicts import CheckResult, flag, verdict

logger = logging.getLogger(__name__)

DIAGRAM_DIR = Path(__file__).resolve().parent.parent / "diagrams"

SuiteResult = Tuple[List[CheckResult], Dict[str, object]]


class UnknownSuiteError(WorkbenchError):
    pass


def _relative(a: float, b: float) -> float:
    return abs(a - b) / abs(b)


def brst_suite(settings: WorkbenchConfig) -> SuiteResult:
    from transform import rule_set
    from transform.checks import (
        check_divergence_preservation, check_exact_gauge_fixing, check_source_table,
        check_template_homogeneity, jacobian_supertrace, nilpotency_verdicts,
    )
    brst = rule_set("brst")
    supertrace = jacobian_supertrace(brst)
    results = nilpotency_verdicts(brst)
    results += check_template_homogeneity(brst)
    results += check_source_table()
    results += check_divergence_preservation(brst)
    results.append(verdict("jacobian-supertrace", "field-space supertrace of the BRST Jacobian",
                           supertrace.total))
    results += check_exact_gauge_fixing(settings.ibp.depth)
    return results, {}


def general_brst_suite(settings: WorkbenchConfig) -> SuiteResult:
    from transform import rule_set
    from transform.general import (
        B, B_REST, C, D_SYM, E_SYM, G, N, Z, is_eta_multiple, rank2_invariant, solve_rule_constraints,
    )
    solution = solve_rule_constraints()
    steps = {step.name: step for step in solution.steps}
    divergence, lorentz, nilpotency = steps["divergence"], steps["lorentz"], steps["nilpotency"]
    rank2, normalization = steps["lorentz-rank2"], steps["normalization"]
    x1, x2, x3 = sympy.symbols("x1:4")
    results = [
        flag("general-e-antisymmetric", divergence.reference, divergence.solution.get(E_SYM) == 0,
             "symmetric part of E vanishes"),
        flag("general-d-antisymmetric", divergence.reference, divergence.solution.get(D_SYM) == 0,
             "symmetric part of D vanishes"),
        flag("general-b-eta", divergence.reference, divergence.solution.get(B_REST) == 0,
             "B is proportional to eta"),
        flag("general-c-eta", rank2.reference, is_eta_multiple(rank2_invariant(rank2)),
             "invariant rank-2 tensors are multiples of eta"),
        flag("general-de-eta", lorentz.reference,
             lorentz.solution.get(x1) == 0 and sympy.simplify((x2 + x3).subs(lorentz.solution)) == 0,
             "antisymmetric rank-4 tensors reduce to eta eta - eta eta"),
        flag("general-c-equals-z", nilpotency.reference, nilpotency.solution.get(C) == Z, "C = Z"),
        flag("general-g-equals-z", nilpotency.reference, nilpotency.solution.get(G) == Z, "G = Z"),
        flag("general-b-equals-zn", normalization.reference, normalization.solution.get(B) == Z * N, "B = Z N"),
    ]
    results += [verdict(f"general-nilpotent-{name}", f"nilpotency of the solved rules on {name}", residual)
                for name, residual in solution.residuals.items()]
    reduced = rule_set("reduced-brst")
    results += [verdict(f"general-matches-reduced-{name}",
                        f"solved general rule on {name} equals the renormalized rule",
                        canonicalize(solution.solved.rule_for(name).template - reduced.rule_for(name).template))
                for name in reduced.fields]
    numbers = {step.name: {"equations": [str(e) for e in step.equations],
                           "solution": {str(k): str(v) for k, v in step.solution.items()}}
               for step in solution.steps}
    return results, numbers


def algebra_suite(settings: WorkbenchConfig) -> SuiteResult:
    from transform import rule_set
    from transform.checks import (
        check_algebra_closure, check_divergence_preservation, check_field_strength, check_fp_kernel,
        invariance_verdicts, jacobian_supertrace,
    )
    brst = rule_set("brst")
    depth = settings.ibp.depth
    results = check_algebra_closure()
    results += check_field_strength()
    results += check_fp_kernel(depth)
    supertrace = jacobian_supertrace(brst)
    results.append(verdict("jacobian-supertrace", "field-space supertrace of the BRST Jacobian",
                           supertrace.total))
    results += check_divergence_preservation(brst)
    results += invariance_verdicts(depth)
    return results, {}


def basis_suite(settings: WorkbenchConfig) -> SuiteResult:
    from basis import enumerate_operators, match_to_bare, renormalized_lagrangian, solve_counterterm_constraints
    from basis.ansatz import C, D_COMPONENTS, E_COMPONENTS
    from basis.operators import gauge_candidates, gauge_invariant_combinations, spanned_modulo_total_derivatives
    from transform.lagrangians import gauge_lagrangian
    ghost = enumerate_operators("ghost")
    nl = enumerate_operators("NL")
    candidates = gauge_candidates(4)
    invariants = gauge_invariant_combinations(candidates, depth=settings.ibp.depth)
    solution = solve_counterterm_constraints(depth=settings.ibp.depth)
    Zw, Z, N = sympy.symbols("Zw Z N")
    values = solution.solution
    d1, d2, d3 = D_COMPONENTS
    mapping = match_to_bare(renormalized_lagrangian(solution.lagrangian))
    results = [
        flag("basis-ghost-count", "admissible ghost sector operators", len(ghost) == 2, count=len(ghost)),
        flag("basis-nl-count", "admissible Nakanishi-Lautrup sector operators", len(nl) == 3, count=len(nl)),
        flag("basis-gauge-count", "gauge invariants of the gauge field up to total derivatives",
             len(invariants) == 1, count=len(invariants)),
        flag("basis-gauge-is-f-squared", "F·F is the gauge invariant up to total derivatives",
             len(invariants) == 1 and spanned_modulo_total_derivatives(gauge_lagrangian(), invariants, candidates)),
        flag("counterterm-c", "c = Zw/(Z N)", sympy.simplify(values.get(C, 0) - Zw / (Z * N)) == 0,
             str(values.get(C))),
        flag("counterterm-d", "d = (Zw/N)(eta eta - eta eta)",
             values.get(d1) == 0 and sympy.simplify(values.get(d2, 0) + Zw / N) == 0
             and sympy.simplify(values.get(d3, 0) - Zw / N) == 0,
             ", ".join(str(values.get(d)) for d in D_COMPONENTS)),
        flag("counterterm-e", "e = 0", all(values.get(e) == 0 for e in E_COMPONENTS)),
        solution.check,
        verdict("match-to-bare", "solved Lagrangian matches the tree-level terms", mapping.unmatched,
                "; ".join(f"{m.name}: {m.constant}" for m in mapping.matches)),
    ]
    numbers = {
        "ghost": [str(t.shape) for t in ghost],
        "nl": [str(t.shape) for t in nl],
        "gauge": [str(t) for t in invariants],
        "solution": {str(k): str(v) for k, v in values.items()},
        "constants": {m.name: str(m.constant) for m in mapping.matches},
    }
    return results, numbers


def _diagram_omega_orders(name: str, settings: WorkbenchConfig, variant: Optional[str] = None):
    from feynman import Diagram, contract_diagram, omega_orders, reduce_loops
    data = json.loads((DIAGRAM_DIR / name).read_text(encoding="utf-8"))
    data.setdefault("gauge_parameter", settings.feynman.gauge_parameter)
    if variant is not None:
        for v in data["vertices"]:
            v["variant"] = variant
    diagram = Diagram.from_dict(data)
    contracted = contract_diagram(diagram)
    reduced = reduce_loops(contracted, [loop.inner for loop in diagram.loops])
    return contracted, omega_orders(reduced)


def feynman_suite(settings: WorkbenchConfig) -> SuiteResult:
    from feynman import (
        PRINTED, VERTEX_KINDS, DanglingIndexError, free_operator, propagator, reduce_inner, vertex,
    )
    results = []
    for kind in VERTEX_KINDS:
        weight = scale_weight(vertex(kind).expression)
        results.append(flag(f"scale-weight-{kind}", f"{kind} vertex is inner-scale invariant", weight == 0,
                            weight=weight))
    for species in ("gauge", "ghost"):
        weight = scale_weight(propagator(species, "xi", "full").numerator)
        results.append(flag(f"scale-weight-{species}-propagator", f"{species} propagator is inner-scale invariant",
                            weight == 0, weight=weight))
    results.append(verdict("kernel-gauge", "gauge kernel read off from the Lagrangian", canonicalize(
        free_operator("gauge") - parse(
            "p[la]*p[.la]*eta[mu,nu]*eta[al,be] - p[mu]*p[nu]*eta[al,be] + xi^-1*p[mu]*p[nu]*eta[al,be]"))))
    results.append(verdict("kernel-ghost", "ghost kernel read off from the Lagrangian",
                           canonicalize(free_operator("ghost") - parse("p[la]*p[.la]*eta[ga,de]"))))
    results.append(flag("reduce-odd-rank", "odd powers of a loop momentum integrate to zero",
                        reduce_inner(parse("L1[al]*L1[be]*L1[ga]"), "L1").is_zero))
    labels = ["al", "be", "ga", "de"]
    for rank in (2, 4):
        monomial = parse("*".join(f"L1[{x}]" for x in labels[:rank]))
        pair = parse("eta[.al,.be]")
        first = reduce_inner(contract_metric(monomial * pair), "L1")
        second = contract_metric(reduce_inner(monomial, "L1") * pair)
        results.append(verdict(f"reduce-contraction-rank-{rank}",
                               f"rank-{rank} reduction commutes with eta contraction",
                               canonicalize(first - second)))

    contracted, orders = _diagram_omega_orders("ghost_loop.json", settings)
    one_loop = bool(orders) and all(sum(p for _, p in key) == 1 for key in orders)
    results.append(flag("ghost-loop-factorizes", "two-vertex ghost loop reduces to single Omega_k factors",
                        one_loop, terms=len(contracted), orders=[list(k) for k in sorted(orders)]))
    _, chain = _diagram_omega_orders("ghost_chain.json", settings)
    two_loop = bool(chain) and all(sum(p for _, p in key) == 2 for key in chain)
    results.append(flag("ghost-chain-factorizes", "two-loop chain reduces to products of two Omega_k",
                        two_loop, orders=[list(k) for k in sorted(chain)]))
    try:
        _diagram_omega_orders("ghost_loop.json", settings, variant=PRINTED)
        dangling = False
    except DanglingIndexError:
        dangling = True
    results.append(flag("printed-ghost-vertex", "the ghost vertex as printed leaves an index uncontracted",
                        dangling))
    return results, {}


def omega_suite(settings: WorkbenchConfig) -> SuiteResult:
    from regulator import (
        load_golden, omega_closed, omega_exact, omega_monte_carlo, omega_oracle, omega_table, reconcile,
    )
    reg = settings.regulator
    closed = omega_table(reg.ks, tol=reg.rel_tol, depth=reg.depth)
    oracle = omega_table(reg.ks, "oracle2d", tol=reg.oracle_tol, depth=reg.depth)
    golden = load_golden()
    threshold = 10 * max(reg.rel_tol, reg.oracle_tol)
    results = [
        flag("omega-positive", "Omega_k are positive and finite", all(v > 0 for v in closed.values.values())),
        flag("omega-decreasing", "Omega_k decrease with k", closed.is_decreasing),
    ]
    for k in reg.ks:
        c, o = closed[k].value, oracle[k].value
        results.append(flag(f"omega-agreement-{k}", f"closed form and cone oracle agree for k={k}",
                            _relative(o, c) <= threshold, relative=_relative(o, c)))
        results.append(flag(f"omega-exact-{k}", f"closed form matches {omega_exact(k)}",
                            _relative(c, float(omega_exact(k))) <= 10 * reg.rel_tol))
        if k in golden.entries:
            results.append(flag(f"omega-golden-{k}", f"closed form matches the golden value for k={k}",
                                _relative(c, golden[k].value) <= max(10 * reg.rel_tol, 1e-11)))
    reference = omega_oracle(1, tol=reg.oracle_tol, depth=reg.depth)
    for lam in reg.scales:
        rescaled = omega_oracle(1, tol=reg.oracle_tol, depth=reg.depth, lam=lam)
        drift = _relative(rescaled.value, reference.value)
        results.append(flag(f"omega-scale-{lam:g}", f"cone oracle unchanged at Lambda={lam:g}", drift <= 1e-8,
                            relative=drift))
    sampled = omega_monte_carlo(1, samples=reg.mc_samples, seed=reg.seed, shards=reg.shards)
    deviation = abs(sampled.value - closed[1].value)
    results.append(flag("omega-monte-carlo", "Monte Carlo estimate within five standard errors",
                        deviation <= 5 * sampled.error, value=sampled.value, error=sampled.error))
    numbers = {
        "closed": {str(k): closed[k].value for k in reg.ks},
        "oracle": {str(k): oracle[k].value for k in reg.ks},
        "exact": {str(k): str(omega_exact(k)) for k in reg.ks},
        "reconciliation": reconcile(closed[1] if 1 in closed.entries else omega_closed(1),
                                    oracle[1] if 1 in oracle.entries else None).to_dict(),
    }
    return results, numbers


def beta_suite(settings: WorkbenchConfig) -> SuiteResult:
    from regulator import beta_pure, beta_sm, omega_closed
    omega1 = omega_closed(1, tol=settings.regulator.rel_tol, depth=settings.regulator.depth).value
    results = []
    values = {}
    for g in (0.1, 0.5, 1.0):
        pure, sm = beta_pure(g, omega1), beta_sm(g, omega1)
        values[f"{g:g}"] = {"pure": pure, "sm": sm}
        results.append(flag(f"beta-pure-{g:g}", "pure gauge theory is asymptotically free", pure < 0, value=pure))
        results.append(flag(f"beta-sm-{g:g}", "with Standard Model fields the beta function is positive", sm > 0,
                            value=sm))
    linear = math.isclose(beta_pure(0.5, 2 * omega1), 2 * beta_pure(0.5, omega1), rel_tol=1e-12)
    results.append(flag("beta-linear", "beta is linear in Omega_1", linear))
    return results, {"omega1": omega1, "beta": values}


SUITES: Dict[str, Callable[[WorkbenchConfig], SuiteResult]] = {
    "brst": brst_suite,
    "general-brst": general_brst_suite,
    "algebra": algebra_suite,
    "basis": basis_suite,
    "feynman": feynman_suite,
    "omega": omega_suite,
    "beta": beta_suite,
}
SUITE_NAMES = tuple(SUITES) + ("all",)


def _members(name: str) -> Sequence[str]:
    if name == "all":
        return tuple(SUITES)
    if name not in SUITES:
        raise UnknownSuiteError(f"Unknown suite '{name}'; choose from {', '.join(SUITE_NAMES)}")
    return (name,)


def _run(name: str, settings: WorkbenchConfig) -> Tuple[str, List[CheckResult], Dict, float]:
    start = time.perf_counter()
    results, numbers = SUITES[name](settings)
    elapsed = time.perf_counter() - start
    logger.info("Suite %s: %d checks in %.2fs", name, len(results), elapsed)
    return name, results, numbers, elapsed


def run_check_suite(name: str, settings: Optional[WorkbenchConfig] = None,
                    command: Optional[Sequence[str]] = None, workers: Optional[int] = None) -> Report:
    """Run one suite (or all of them concurrently) and assemble the report in suite order"""
    members = _members(name)
    settings = settings or WorkbenchConfig()
    command = list(command) if command is not None else ["verify", name]
    with ThreadPoolExecutor(max_workers=workers or len(members)) as pool:
        runs = list(pool.map(lambda member: _run(member, settings), members))
    results, numbers, timing = [], {}, {}
    for member, member_results, member_numbers, elapsed in runs:
        results += member_results
        if member_numbers:
            numbers[member] = member_numbers
        timing[member] = round(elapsed, 3)
    seed = settings.regulator.seed if name in ("omega", "all") else None
    return build_report(command, name, results, numbers, settings, seed=seed, timing=timing)
