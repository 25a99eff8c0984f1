"""Exceptions shared by every workbench package"""
from typing import Iterable, Optional


class WorkbenchError(Exception):
    """Base class for workbench errors"""


class ParseError(WorkbenchError):
    def __init__(self, message: str, text: str = "", column: int = 0):
        self.text = text
        self.column = column
        super().__init__(f"{message} (column {column})")


class UnknownSpeciesError(WorkbenchError):
    pass


class UnknownIndexError(WorkbenchError):
    pass


class IndexArityError(WorkbenchError):
    pass


class IndexContractionError(WorkbenchError):
    pass


class InhomogeneousExpressionError(WorkbenchError):
    def __init__(self, quantity: str, offending: Iterable[str]):
        self.quantity = quantity
        self.offending = list(offending)
        listing = "; ".join(self.offending)
        super().__init__(f"expression is not homogeneous in {quantity}: {listing}")


class NonConvergenceError(WorkbenchError):
    def __init__(self, message: str, best_estimate: Optional[float] = None,
                 error: Optional[float] = None):
        self.best_estimate = best_estimate
        self.error = error
        super().__init__(f"{message} (best estimate {best_estimate}, error {error})")
