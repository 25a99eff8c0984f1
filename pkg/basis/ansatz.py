"""General counterterm Lagrangian with unknown coefficients"""
from dataclasses import dataclass
from typing import Dict, Tuple

import sympy

from symbolic import Expression, contract_metric, parse, substitute
from symbolic.calculus import apply_divergence_constraint
from transform.general import eta_pairings

ANSATZ_TEXT = (
    "1/2*xi_N*h[.al]*h[al]"
    " + c*h[.al]*d[mu](A[.mu,al])"
    " + e[al,.be,.ga,.de]*h[.al]*nab[be](A[mu,ga]*A[.mu,de])"
    " - Zw*d[mu](ws[.al])*d[.mu](w[al])"
    " - d[al,.be,.ga,.de]*d[mu](ws[.al])*nab[be](A[.mu,ga]*w[de])"
)

XI_N, C, ZW = sympy.symbols("xi_N c Zw")
D_COMPONENTS = sympy.symbols("d1:4")
E_COMPONENTS = sympy.symbols("e1:4")


@dataclass(frozen=True)
class Ansatz:
    lagrangian: Expression
    scalars: Tuple[sympy.Symbol, ...]
    tensors: Tuple[str, ...]
    gauge_parameter: sympy.Symbol
    # the gauge-matter part is fixed separately by gauge invariance
    remainder: str = "L_psiA"

    @property
    def coefficient_count(self) -> int:
        return len(self.scalars) + len(self.tensors) + 1


def build_ansatz() -> Ansatz:
    """Most general dimension-4 ghost and Nakanishi-Lautrup sector"""
    return Ansatz(parse(ANSATZ_TEXT), (C, ZW), ("d", "e"), XI_N)


def expand_tensors(lagrangian: Expression) -> Expression:
    """Write the rank-4 tensors d and e in the η-pairing basis and contract"""
    def component(symbols):
        def build(atom):
            pairings = eta_pairings(atom.indices)
            return Expression.sum(p.scaled(s) for p, s in zip(pairings, symbols))
        return build

    expanded = substitute(lagrangian, "d", component(D_COMPONENTS))
    expanded = substitute(expanded, "e", component(E_COMPONENTS))
    return apply_divergence_constraint(contract_metric(expanded))


def bare_values() -> Dict[sympy.Symbol, sympy.Expr]:
    """Coefficients that turn the ansatz into the tree-level Lagrangian"""
    d1, d2, d3 = D_COMPONENTS
    values = {C: 1, ZW: 1, d1: 0, d2: -1, d3: 1}
    values.update({e: 0 for e in E_COMPONENTS})
    return values

