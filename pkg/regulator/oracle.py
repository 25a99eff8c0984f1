"""Ω_k straight from the regularized cone integral

The definition integrates (−P²)^k over both inner light cones, shell by shell
in M² = −P², with the cutoffs written through the frame vector L = (1/Λ, 0):

    Λ^{2k+4} ∫₀^{1/(4Λ²)} dM² M^{2k} ∫ d⁴P/(2π)⁴ δ(M² + P²)
        · [θ(−L·P) θ(−L² + 2L·P) + θ(L·P) θ(−L² − 2L·P)]

In the rest frame of L the brackets restrict |P⁰| ≤ 1/(2Λ). The δ function
fixes P⁰ = ±√(M² + |P|²) with Jacobian 1/(2|P⁰|), both cones contribute
equally and the solid angle gives 4π, leaving

    Λ^{2k+4} · 4π/(2π)⁴ ∫₀^{c²} dM² M^{2k} ∫₀^{√(c² − M²)} d|P| |P|² / √(M² + |P|²),

with c = 1/(2Λ). omega_oracle integrates this nested pair with scipy;
omega_monte_carlo samples the unreduced four-vectors and applies the cone
cutoffs literally, which validates the reduction.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Tuple

import numpy as np
from scipy import integrate

from regulator.omega import MONTE_CARLO, ORACLE, OmegaEstimate
from symbolic.errors import NonConvergenceError

logger = logging.getLogger(__name__)

MEASURE = 1.0 / (2.0 * math.pi) ** 4
SOLID_ANGLE = 4.0 * math.pi
CONES = 2


def frame_vector(lam: float) -> np.ndarray:
    return np.array([1.0 / lam, 0.0, 0.0, 0.0])


def minkowski_dot(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """a·b with signature (−, +, +, +) over the last axis"""
    return -a[..., 0] * b[..., 0] + np.sum(a[..., 1:] * b[..., 1:], axis=-1)


def cone_cutoff(momenta, lam: float = 1.0) -> np.ndarray:
    """1 inside the cut-off forward or backward cone, 0 elsewhere (space-like included)"""
    momenta = np.atleast_2d(np.asarray(momenta, dtype=float))
    L = frame_vector(lam)
    square = minkowski_dot(momenta, momenta)
    l_dot_p = minkowski_dot(momenta, L)
    l_square = minkowski_dot(L, L)
    forward = (-l_dot_p >= 0) & (-l_square + 2 * l_dot_p >= 0)
    backward = (l_dot_p >= 0) & (-l_square - 2 * l_dot_p >= 0)
    return np.where(square <= 0, (forward | backward).astype(float), 0.0)


def _check_scale(lam: float):
    if not lam > 0:
        raise ValueError(f"Λ must be positive, got {lam}")


def omega_oracle(k: int, tol: float = 1e-9, depth: int = 200, lam: float = 1.0) -> OmegaEstimate:
    """Ω_k from the shell-sliced cone integral, independent of the closed form"""
    if k < 0:
        raise ValueError(f"k must be non-negative, got {k}")
    _check_scale(lam)
    edge = 1.0 / (2.0 * lam)
    bound = edge * edge

    def shell(p, m2):
        return m2 ** k * p * p / math.sqrt(m2 + p * p) if p > 0 else 0.0

    # inner tolerance a hundredfold below the outer one
    inner = {"epsabs": 0.0, "epsrel": max(tol / 100, 1e-13), "limit": depth}
    outer = {"epsabs": 0.0, "epsrel": tol, "limit": depth}
    value, error, info = integrate.nquad(
        shell, [lambda m2: (0.0, math.sqrt(max(bound - m2, 0.0))), (0.0, bound)],
        opts=[inner, outer], full_output=True)
    scale = lam ** (2 * k + 4) * MEASURE * SOLID_ANGLE
    value, error = scale * value, scale * error
    if not math.isfinite(value) or error > 10 * tol * abs(value):
        raise NonConvergenceError(f"Ω_{k} cone oracle missed relative tolerance {tol}", value, error)
    logger.debug("Ω_%d cone oracle at Λ=%g: %.15g ± %.3g (%d evaluations)",
                 k, lam, value, error, info["neval"])
    return OmegaEstimate(k, value, error, ORACLE, int(info["neval"]))


def _shard(k: int, samples: int, lam: float, seed: np.random.SeedSequence) -> Tuple[float, float]:
    """Sum and sum of squares of the weighted samples of one shard"""
    rng = np.random.default_rng(seed)
    edge = 1.0 / (2.0 * lam)
    m2 = rng.uniform(0.0, edge * edge, samples)
    spatial = rng.uniform(-edge, edge, (samples, 3))
    energy = np.sqrt(m2 + np.sum(spatial ** 2, axis=1))
    cone = rng.choice((-1.0, 1.0), samples)
    momenta = np.column_stack((cone * energy, spatial))
    jacobian = np.divide(1.0, 2.0 * energy, out=np.zeros_like(energy), where=energy > 0)
    weights = cone_cutoff(momenta, lam) * m2 ** k * jacobian
    return math.fsum(weights), math.fsum(weights * weights)


def omega_monte_carlo(k: int, samples: int = 200_000, seed: int = 42, shards: int = 8,
                      lam: float = 1.0, workers: Optional[int] = None) -> OmegaEstimate:
    """Ω_k by sampling (M², P) uniformly, shard streams spawned from one seed

    A fixed seed and shard count reproduce the estimate bit for bit.
    """
    if k < 0:
        raise ValueError(f"k must be non-negative, got {k}")
    if samples < shards or shards < 1:
        raise ValueError(f"need at least one sample per shard, got {samples} samples in {shards} shards")
    _check_scale(lam)
    edge = 1.0 / (2.0 * lam)
    sizes = [samples // shards + (1 if n < samples % shards else 0) for n in range(shards)]
    streams = np.random.SeedSequence(seed).spawn(shards)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        partial = list(pool.map(lambda job: _shard(k, job[0], lam, job[1]), zip(sizes, streams)))
    total = math.fsum(s for s, _ in partial)
    squares = math.fsum(q for _, q in partial)
    mean = total / samples
    variance = max(squares / samples - mean * mean, 0.0)
    # volume of the sampled box times the two cone choices
    volume = edge * edge * (2.0 * edge) ** 3 * CONES
    scale = lam ** (2 * k + 4) * MEASURE * volume
    value = scale * mean
    error = scale * math.sqrt(variance / samples)
    logger.debug("Ω_%d Monte Carlo: %.10g ± %.3g from %d samples in %d shards",
                 k, value, error, samples, shards)
    return OmegaEstimate(k, value, error, MONTE_CARLO, samples, samples)
