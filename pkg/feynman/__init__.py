"""Feynman rules, diagram contraction and inner loop reduction"""
from feynman.diagram import Diagram, contract_diagram, contract_diagrams, load_diagram
from feynman.errors import (
    DanglingIndexError, DiagramError, FeynmanRuleError, MixedLoopError, MomentumConservationError,
)
from feynman.loops import omega_orders, omega_symbol, reduce_inner, reduce_loops
from feynman.rules import (
    CONSISTENT, GAUGE, GHOST, PRINTED, VERTEX_KINDS, Leg, ProjectorMode, Propagator, Vertex,
    evaluate_vertex, free_operator, propagator, transversal_delta, vertex,
)
from feynman.tensors import SymEtaTensor, evaluate, sym_eta_tensor
