"""Symbolic core: field expressions, canonical forms, derivatives and IBP"""
from symbolic.atoms import FIELDS, FieldAtom, Species, field_spec, make_atom
from symbolic.calculus import (
    apply_divergence_constraint, coefficient_map, contract_metric, derive, equal,
    fresh_index, ghost_number, group_by_fields, inner_index_weight, is_zero, mass_dimension, relabel,
    scale_weight, scale_weights, substitute,
)
from symbolic.canonical import canonicalize, monomial_key
from symbolic.errors import (
    IndexArityError, IndexContractionError, InhomogeneousExpressionError,
    NonConvergenceError, ParseError, UnknownIndexError, UnknownSpeciesError, WorkbenchError,
)
from symbolic.expression import Expression, Monomial
from symbolic.grammar import parse, to_text
from symbolic.ibp import IbpResult, ibp_equivalent, ibp_reduce, verify_witness
from symbolic.indices import Index, IndexKind
