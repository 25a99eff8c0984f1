"""Operator basis, counterterm ansatz and the counterterm constraint solve"""
from basis.ansatz import Ansatz, build_ansatz
from basis.matching import RenormalizationMap, match_to_bare, renormalized_lagrangian
from basis.operators import (
    FLAGS, SECTORS, OperatorTerm, UnknownSectorError, enumerate_operators, operator_flags, scan_shapes,
)
from basis.solver import CountertermSolution, solve_counterterm_constraints
