"""Catalog of gauge and BRST transformation rule sets"""
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable, Dict, Mapping, Optional, Tuple

from symbolic import Expression, WorkbenchError, parse, substitute
from symbolic.atoms import FieldAtom


class UnknownRuleSetError(WorkbenchError):
    pass


@dataclass(frozen=True)
class TransformationRule:
    """Variation template of one atom, written in the labels of pattern"""
    pattern: FieldAtom
    template: Expression


@dataclass(frozen=True)
class RuleSet:
    name: str
    parameter: str
    # BRST-type sets put the odd parameter in front: δF = θ·sF
    prepend: bool
    rules: Mapping[str, TransformationRule]
    description: str = ""

    def rule_for(self, name: str) -> Optional[TransformationRule]:
        return self.rules.get(name)

    @property
    def fields(self) -> Tuple[str, ...]:
        """Dynamical atoms the set transforms"""
        return tuple(name for name, rule in self.rules.items() if not rule.pattern.is_constant)

    def with_parameter(self, parameter: str) -> "RuleSet":
        """Same rules with the parameter atom renamed (θ → θ′, ℰ → ℱ)"""
        if self.prepend:
            return replace(self, parameter=parameter)
        rules = {
            name: TransformationRule(rule.pattern, rename_atoms(rule.template, self.parameter, parameter))
            for name, rule in self.rules.items()
        }
        return replace(self, parameter=parameter, rules=rules)

    def map_templates(self, fn: Callable[[Expression], Expression], name: Optional[str] = None) -> "RuleSet":
        rules = {key: TransformationRule(rule.pattern, fn(rule.template)) for key, rule in self.rules.items()}
        return replace(self, name=name or self.name, rules=rules)


def rename_atoms(expr: Expression, old: str, new: str) -> Expression:
    return substitute(expr, old, lambda atom: Expression.of(replace(atom, name=new)))


def _build(name: str, parameter: str, prepend: bool, table: Dict[str, str], description: str) -> RuleSet:
    rules = {}
    for pattern_text, template_text in table.items():
        (pattern,) = parse(pattern_text).terms[0].factors
        rules[pattern.name] = TransformationRule(pattern, parse(template_text))
    return RuleSet(name, parameter, prepend, rules, description)


_METRIC_GAUGE = "-g[.ga,.be]*nab[.al](E[ga]) - g[.al,.ga]*nab[.be](E[ga])"

GAUGE_TABLE = {
    "A[.mu,al]": "d[.mu](E[al]) + A[.mu,be]*nab[.be](E[al]) - E[be]*nab[.be](A[.mu,al])",
    "psi": "-E[be]*nab[.be](psi)",
    "psibar": "-E[be]*nab[.be](psibar)",
    "g[.al,.be]": _METRIC_GAUGE,
}

GAUGE_RESCALED_TABLE = {
    "A[.mu,al]": "d[.mu](E[al]) + N^-1*A[.mu,be]*nab[.be](E[al]) - N^-1*E[be]*nab[.be](A[.mu,al])",
    "psi": "-N^-1*E[be]*nab[.be](psi)",
    "psibar": "-N^-1*E[be]*nab[.be](psibar)",
    "g[.al,.be]": "-N^-1*g[.ga,.be]*nab[.al](E[ga]) - N^-1*g[.al,.ga]*nab[.be](E[ga])",
}

BRST_TABLE = {
    "A[.mu,al]": "d[.mu](w[al]) + A[.mu,be]*nab[.be](w[al]) - w[be]*nab[.be](A[.mu,al])",
    "ws[.al]": "-h[.al]",
    "w[al]": "-w[be]*nab[.be](w[al])",
    "h[.al]": "0",
    "psi": "-w[be]*nab[.be](psi)",
    "psibar": "-w[be]*nab[.be](psibar)",
    # inner metric compensator at g = η, parameter ℰ = θω
    "g[.al,.be]": "-g[.ga,.be]*nab[.al](w[ga]) - g[.al,.ga]*nab[.be](w[ga])",
}

GENERAL_BRST_TABLE = {
    "A[.mu,al]": "TB[al,.be]*d[.mu](w[be]) + TD[al,be,.ga,.de]*nab[.be](A[.mu,ga]*w[de])",
    "ws[.al]": "-h[.al]",
    "w[al]": "-TE[al,be,.ga,.de]*nab[.be](w[ga]*w[de])",
    "h[.al]": "0",
    "psi": "-TC[al,.be]*w[be]*nab[.al](psi)",
    "psibar": "-TC[al,.be]*w[be]*nab[.al](psibar)",
}

ETA_BRST_TABLE = {
    "A[.mu,al]": "B*d[.mu](w[al]) + C*A[.mu,be]*nab[.be](w[al]) - C*w[be]*nab[.be](A[.mu,al])",
    "ws[.al]": "-h[.al]",
    "w[al]": "-Z*w[be]*nab[.be](w[al])",
    "h[.al]": "0",
    "psi": "-G*w[be]*nab[.be](psi)",
    "psibar": "-G*w[be]*nab[.be](psibar)",
}

REDUCED_BRST_TABLE = {
    "A[.mu,al]": "Z*N*d[.mu](w[al]) + Z*A[.mu,be]*nab[.be](w[al]) - Z*w[be]*nab[.be](A[.mu,al])",
    "ws[.al]": "-h[.al]",
    "w[al]": "-Z*w[be]*nab[.be](w[al])",
    "h[.al]": "0",
    "psi": "-Z*w[be]*nab[.be](psi)",
    "psibar": "-Z*w[be]*nab[.be](psibar)",
}

_CATALOG = {
    "gauge": ("E", False, GAUGE_TABLE, "local volume-preserving gauge transformation"),
    "gauge-rescaled": ("E", False, GAUGE_RESCALED_TABLE, "gauge transformation with inner derivatives rescaled by 1/N"),
    "brst": ("theta", True, BRST_TABLE, "BRST-type transformation of the gauge-fixed theory"),
    "general-brst": ("theta", True, GENERAL_BRST_TABLE, "most general local BRST ansatz with constant tensors B, C, D, E"),
    "eta-brst": ("theta", True, ETA_BRST_TABLE, "BRST ansatz after the tensors are reduced to the inner metric"),
    "reduced-brst": ("theta", True, REDUCED_BRST_TABLE, "renormalized BRST transformation with constants Z and N"),
}

RULE_SET_NAMES = tuple(_CATALOG)


@lru_cache(maxsize=None)
def rule_set(name: str) -> RuleSet:
    """Look up a rule set by its CLI name"""
    if name not in _CATALOG:
        raise UnknownRuleSetError(f"Unknown rule set '{name}'; choose from {', '.join(RULE_SET_NAMES)}")
    parameter, prepend, table, description = _CATALOG[name]
    return _build(name, parameter, prepend, table, description)
