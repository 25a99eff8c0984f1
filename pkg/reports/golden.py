"""Golden Ω values: regeneration and drift checks"""
import logging
from pathlib import Path
from typing import Dict, Iterable, Optional, Union

from regulator import GOLDEN_PATH, OmegaTable, exact_estimate, load_golden, omega_closed, write_golden
from symbolic import NonConvergenceError

logger = logging.getLogger(__name__)


def bless_omega(ks: Iterable[int], tol: float = 1e-10, depth: int = 200,
                path: Union[str, Path] = GOLDEN_PATH) -> OmegaTable:
    """Store the exact values after the quadrature has confirmed each of them"""
    entries = {}
    for k in sorted(set(ks)):
        exact = exact_estimate(k)
        closed = omega_closed(k, tol=tol, depth=depth)
        if abs(closed.value - exact.value) > 10 * tol * exact.value:
            raise NonConvergenceError(f"Ω_{k} quadrature disagrees with the exact value {exact.value}",
                                      closed.value, closed.error)
        entries[k] = exact
    table = OmegaTable(entries)
    write_golden(table, path)
    return table


def golden_deviations(table: OmegaTable, path: Union[str, Path] = GOLDEN_PATH) -> Dict[int, Optional[float]]:
    """Relative deviation of each computed Ω_k from the golden file; None when k has no golden entry"""
    golden = load_golden(path)
    deviations = {}
    for k in table:
        if k not in golden.entries:
            deviations[k] = None
            continue
        reference = golden[k].value
        deviations[k] = abs(table[k].value - reference) / reference
        logger.debug("Ω_%d: %.15g vs golden %.15g", k, table[k].value, reference)
    return deviations
