"""Reports for the single-purpose subcommands (basis, feynman, omega, beta)"""
import dataclasses
import logging
from collections import Counter
from typing import Dict, Iterable, List, Optional, Sequence

import sympy

from config.config_loader import WorkbenchConfig
from reports.golden import bless_omega, golden_deviations
from reports.models import Report, Verdict, inputs_digest, plain
from symbolic import to_text
from symbolic.verdicts import INCONCLUSIVE, CheckResult, flag, verdict

logger = logging.getLogger(__name__)

EXPECTED_OPERATOR_COUNTS = {("ghost", 4): 2, ("NL", 4): 3, ("gauge-matter", 4): 1}


def build_report(command: Sequence[str], suite: str, results: Iterable[CheckResult],
                 numbers: Dict, settings: WorkbenchConfig, seed: Optional[int] = None,
                 timing: Optional[Dict[str, float]] = None) -> Report:
    command = list(command)
    return Report(
        command=command,
        suite=suite,
        inputs_digest=inputs_digest(command, settings.model_dump(mode="json")),
        seed=seed,
        verdicts=[Verdict.from_check(r) for r in results],
        numbers=plain(numbers),
        timing=timing if settings.report.timing else None,
    )


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def _order_label(key) -> str:
    return "*".join(f"{name}^{power}" if power != 1 else name for name, power in key) or "1"


# ----- basis -----

def basis_report(settings: WorkbenchConfig, action: str, sector: str = "ghost", max_dim: int = 4,
                 command: Optional[Sequence[str]] = None) -> Report:
    from basis import (
        enumerate_operators, match_to_bare, operator_flags, renormalized_lagrangian, scan_shapes,
        solve_counterterm_constraints,
    )
    from basis.ansatz import C

    command = command or ["basis", action]
    if action == "enumerate":
        scanned = enumerate_operators(sector, max_dim) if sector == "gauge-matter" else scan_shapes(sector, max_dim)
        operators = [op for op in scanned if op.admissible]
        rows = [{"shape": to_text(op.shape), "dimension": str(op.dimension), "ghost": op.ghost,
                 "fields": list(op.fields), "flags": dict(op.flags)} for op in operators]
        rejected = Counter(name for op in scanned for name in op.rejected_by)
        recomputed = all(operator_flags(op.shape, max_dim) == op.flags for op in operators)
        results = [flag(f"basis-{sector}-admissible", f"{sector} sector shapes pass every admissibility filter",
                        recomputed, count=len(operators))]
        expected = EXPECTED_OPERATOR_COUNTS.get((sector, max_dim))
        if expected is not None:
            results.append(flag(f"basis-{sector}-count", f"{expected} admissible {sector} operators",
                                len(operators) == expected, count=len(operators)))
        numbers = {"sector": sector, "max_dim": max_dim, "operators": rows,
                   "scanned": len(scanned), "rejected": dict(rejected)}
        return build_report(command, "basis-enumerate", results, numbers, settings)

    solution = solve_counterterm_constraints(depth=settings.ibp.depth)
    if action == "solve":
        Zw, Z, N = sympy.symbols("Zw Z N")
        c = solution.solution.get(C)
        results = [
            solution.check,
            flag("counterterm-c", "c = Zw/(Z N)", c is not None and sympy.simplify(c - Zw / (Z * N)) == 0, str(c)),
        ]
        numbers = {
            "solution": {str(k): str(v) for k, v in solution.solution.items()},
            "free_parameters": [str(s) for s in solution.free_parameters],
            "redundant": [str(s) for s in solution.redundant],
            "lagrangian": to_text(solution.lagrangian),
        }
        return build_report(command, "basis-solve", results, numbers, settings)
    if action == "match":
        mapping = match_to_bare(renormalized_lagrangian(solution.lagrangian))
        results = [verdict("match-to-bare", "solved Lagrangian matches the tree-level terms", mapping.unmatched,
                           "; ".join(f"{m.name}: {m.constant}" for m in mapping.matches))]
        numbers = {"constants": {m.name: str(m.constant) for m in mapping.matches},
                   "complete": mapping.complete}
        return build_report(command, "basis-match", results, numbers, settings)
    raise ValueError(f"unknown basis action '{action}'")


# ----- feynman -----

def feynman_report(settings: WorkbenchConfig, action: str, kind: str = "AAA", species: str = "gauge",
                   diagram: Optional[str] = None, variant: Optional[str] = None,
                   command: Optional[Sequence[str]] = None) -> Report:
    from feynman import CONSISTENT, contract_diagram, load_diagram, omega_orders, propagator, reduce_loops, vertex

    command = command or ["feynman", action]
    fey = settings.feynman
    if action == "vertex":
        v = vertex(kind, variant=variant or CONSISTENT)
        numbers = {"kind": v.kind, "variant": v.variant, "indices": list(v.indices),
                   "expression": to_text(v.expression)}
        return build_report(command, "feynman-vertex", [], numbers, settings)
    if action == "propagator":
        p = propagator(species, fey.gauge_parameter, fey.projector)
        numbers = {"species": p.species, "gauge_parameter": str(p.gauge_parameter), "projector": p.mode.value,
                   "numerator": to_text(p.numerator), "denominator": str(p.denominator)}
        return build_report(command, "feynman-propagator", [], numbers, settings)
    if action == "contract":
        if diagram is None:
            raise ValueError("feynman contract needs a diagram file")
        loaded = load_diagram(diagram)
        if variant is not None:
            loaded = dataclasses.replace(
                loaded, vertices=tuple(dataclasses.replace(v, variant=variant) for v in loaded.vertices))
        contracted = contract_diagram(loaded, fey.projector)
        reduced = reduce_loops(contracted, [loop.inner for loop in loaded.loops])
        orders = omega_orders(reduced)
        logger.debug("Reduced %s to %d terms", loaded.name, len(reduced.terms))
        results = []
        if loaded.loops:
            single = bool(orders) and all(sum(power for _, power in key) == len(loaded.loops) for key in orders)
            results.append(flag(f"{loaded.name}-omega-orders", "every reduced term carries one Omega per loop",
                                single))
        numbers = {"diagram": loaded.name, "loops": len(loaded.loops), "contracted": to_text(contracted),
                   "reduced": to_text(reduced),
                   "omega_orders": {_order_label(key): count for key, count in orders.items()}}
        return build_report(command, "feynman-contract", results, numbers, settings)
    raise ValueError(f"unknown feynman action '{action}'")


# ----- regulator -----

def _omega_options(settings: WorkbenchConfig, method: str) -> Dict:
    from regulator import CLOSED, ORACLE

    reg = settings.regulator
    if method == CLOSED:
        return {"tol": reg.rel_tol, "depth": reg.depth}
    if method == ORACLE:
        return {"tol": reg.oracle_tol, "depth": reg.depth}
    return {"samples": reg.mc_samples, "seed": reg.seed, "shards": reg.shards}


def omega_report(settings: WorkbenchConfig, ks: Optional[Iterable[int]] = None, method: str = "closed",
                 bless: bool = False, command: Optional[Sequence[str]] = None) -> Report:
    from regulator import CLOSED, MONTE_CARLO, ORACLE, omega_table, reconcile

    reg = settings.regulator
    ks = sorted(set(ks)) if ks is not None else list(reg.ks)
    command = command or ["omega", "--method", method]
    table = omega_table(ks, method, **_omega_options(settings, method))
    results: List[CheckResult] = []
    if bless:
        blessed = bless_omega(ks, tol=reg.rel_tol, depth=reg.depth)
        results.append(flag("omega-bless", "golden values regenerated from the exact integrals", True,
                            ks=sorted(blessed.entries)))
    else:
        allowed = {CLOSED: max(10 * reg.rel_tol, 1e-11), ORACLE: 10 * reg.oracle_tol}
        for k, deviation in golden_deviations(table).items():
            check_id, reference = f"omega-golden-{k}", f"Omega_{k} matches the golden value"
            if deviation is None:
                results.append(CheckResult(check_id, reference, INCONCLUSIVE, detail="no golden value"))
            elif method == MONTE_CARLO:
                sigmas = deviation * table[k].value / table[k].error if table[k].error else float("inf")
                results.append(flag(check_id, reference, sigmas <= 5, sigmas=sigmas))
            else:
                results.append(flag(check_id, reference, deviation <= allowed[method], relative=deviation))
    numbers = {"estimates": {str(k): dataclasses.asdict(table[k]) for k in table}}
    if 1 in table.entries and method == CLOSED:
        numbers["reconciliation"] = reconcile(table[1]).to_dict()
    return build_report(command, "omega", results, numbers, settings,
                        seed=reg.seed if method == MONTE_CARLO else None)


def beta_report(settings: WorkbenchConfig, model: str = "pure", couplings: Sequence[float] = (0.1,),
                command: Optional[Sequence[str]] = None) -> Report:
    from regulator import BETA_COEFFICIENTS, beta, omega_closed

    reg = settings.regulator
    command = command or ["beta", "--model", model]
    if model not in BETA_COEFFICIENTS:
        raise ValueError(f"unknown model '{model}', expected one of {sorted(BETA_COEFFICIENTS)}")
    omega1 = omega_closed(1, tol=reg.rel_tol, depth=reg.depth).value
    values, results = {}, []
    for g in couplings:
        value = beta(g, model, omega1)
        values[f"{g:g}"] = value
        # sign(β) = sign(coefficient) · sign(g)
        expected = _sign(BETA_COEFFICIENTS[model]) * _sign(g)
        results.append(flag(f"beta-{model}-sign-{g:g}", f"sign of beta for the {model} model at g={g:g}",
                            _sign(value) == expected, value=value))
    coefficient = BETA_COEFFICIENTS[model]
    numbers = {"model": model, "coefficient": str(coefficient), "omega1": omega1, "beta": values}
    return build_report(command, "beta", results, numbers, settings)
