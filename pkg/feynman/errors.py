"""Errors raised while building rules and contracting diagrams"""
from symbolic.errors import WorkbenchError


class FeynmanRuleError(WorkbenchError):
    pass


class MomentumConservationError(WorkbenchError):
    def __init__(self, vertex: str, residual: str):
        self.vertex = vertex
        self.residual = residual
        super().__init__(f"momentum not conserved at vertex '{vertex}': residual {residual}")


class DiagramError(WorkbenchError):
    pass


class DanglingIndexError(DiagramError):
    def __init__(self, where: str, labels):
        self.where = where
        self.labels = sorted(labels)
        super().__init__(f"dangling indices {self.labels} in {where}")


class MixedLoopError(WorkbenchError):
    pass
