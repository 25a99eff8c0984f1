import math

import numpy as np
import pytest
import sympy

from regulator import (
    OmegaEstimate, OmegaTable, beta, beta_pure, beta_sm, cone_cutoff, load_golden, omega_closed,
    omega_exact, omega_monte_carlo, omega_oracle, omega_table, reconcile, write_golden,
)
from symbolic.errors import NonConvergenceError

KS = range(5)


def relative(a, b):
    return abs(a - b) / abs(b)


@pytest.mark.parametrize("k, denominator", [(0, 384), (1, 5760), (2, 53760), (3, 403200), (4, 2661120)])
def test_exact_values(k, denominator):
    assert omega_exact(k) == 1 / (denominator * sympy.pi ** 3)


@pytest.mark.parametrize("k", KS)
def test_closed_form_matches_golden_and_exact(k):
    closed = omega_closed(k)
    assert relative(closed.value, load_golden()[k].value) < 1e-10
    assert relative(closed.value, float(omega_exact(k))) < 1e-10
    assert closed.evaluations > 0


@pytest.mark.parametrize("k", KS)
def test_cone_oracle_agrees_with_closed_form(k):
    assert relative(omega_oracle(k).value, omega_closed(k).value) < 1e-6


@pytest.mark.parametrize("lam", [0.5, 2.0, 10.0])
def test_cone_oracle_is_scale_invariant(lam):
    reference = omega_oracle(1)
    assert relative(omega_oracle(1, lam=lam).value, reference.value) < 1e-8


def test_table_is_positive_and_decreasing():
    table = omega_table(KS)
    assert all(v > 0 for v in table.values.values())
    assert table.is_decreasing
    assert list(table) == list(KS)


def test_table_rejects_non_positive_entries():
    with pytest.raises(ValueError):
        OmegaTable({0: OmegaEstimate(0, 0.0, 0.0)})
    with pytest.raises(ValueError):
        OmegaTable({0: OmegaEstimate(0, math.inf, 0.0)})


def test_space_like_momenta_are_cut_off():
    rng = np.random.default_rng(3)
    spatial = rng.uniform(-0.4, 0.4, (500, 3))
    norm = np.linalg.norm(spatial, axis=1)
    energy = rng.uniform(0.0, 1.0, 500) * norm
    momenta = np.column_stack((energy, spatial))
    assert not cone_cutoff(momenta).any()


def test_cone_cutoff_bounds_the_energy():
    inside = [(0.3, 0.1, 0.0, 0.0), (-0.3, 0.0, 0.2, 0.0), (0.5, 0.0, 0.0, 0.0)]
    outside = [(0.6, 0.1, 0.0, 0.0), (-0.7, 0.0, 0.0, 0.1)]
    assert cone_cutoff(inside, lam=1.0).tolist() == [1.0, 1.0, 1.0]
    assert cone_cutoff(outside, lam=1.0).tolist() == [0.0, 0.0]
    assert cone_cutoff(inside, lam=2.0).tolist() == [0.0, 0.0, 0.0]


def test_monte_carlo_is_reproducible():
    first = omega_monte_carlo(1, samples=20_000, seed=7, shards=4)
    second = omega_monte_carlo(1, samples=20_000, seed=7, shards=4)
    assert first == second
    assert omega_monte_carlo(1, samples=20_000, seed=8, shards=4).value != first.value


@pytest.mark.parametrize("k", [0, 1])
def test_monte_carlo_agrees_with_closed_form(k):
    estimate = omega_monte_carlo(k, samples=400_000, seed=42)
    assert abs(estimate.value - omega_closed(k).value) < 5 * estimate.error
    assert estimate.samples == 400_000


def test_monte_carlo_sharding_keeps_the_expectation():
    four = omega_monte_carlo(0, samples=200_000, seed=11, shards=4)
    sixteen = omega_monte_carlo(0, samples=200_000, seed=11, shards=16)
    assert abs(four.value - sixteen.value) < 5 * math.hypot(four.error, sixteen.error)


def test_non_convergence_carries_best_estimate():
    with pytest.raises(NonConvergenceError) as info:
        omega_closed(1, tol=1e-13, depth=1)
    assert info.value.best_estimate is not None


def test_invalid_arguments():
    with pytest.raises(ValueError):
        omega_closed(-1)
    with pytest.raises(ValueError):
        omega_closed(1, tol=0)
    with pytest.raises(ValueError):
        omega_oracle(1, lam=0)
    with pytest.raises(ValueError):
        omega_monte_carlo(1, samples=3, shards=4)
    with pytest.raises(ValueError):
        omega_table([1], method="simpson")


def test_literature_value_differs_by_a_rational_factor():
    closed = omega_closed(1)
    result = reconcile(closed, omega_oracle(1))
    assert result.factor == 8
    assert result.to_dict()["factor"] == "8"
    assert relative(result.closed, float(result.exact)) < 1e-10


def test_golden_file_written_and_read_back(tmp_path):
    table = omega_table([0, 1])
    path = write_golden(table, tmp_path / "omega.json")
    loaded = load_golden(path)
    assert relative(loaded[1].value, table[1].value) < 1e-11
    assert loaded[1].method == "closed"
    with pytest.raises(FileNotFoundError):
        load_golden(tmp_path / "missing.json")


@pytest.mark.parametrize("g", [0.1, 0.5, 1.0])
def test_beta_signs(g):
    assert beta_pure(g) < 0
    assert beta_sm(g) > 0


def test_beta_is_linear_in_omega1():
    assert beta_pure(0.0) == 0
    assert beta_pure(0.5, omega1=2e-6) == pytest.approx(2 * beta_pure(0.5, omega1=1e-6))
    assert beta_sm(1.0, omega1=1.0) == pytest.approx(2 / (2 * math.pi) ** 2)
    assert beta_pure(1.0, omega1=1.0) == pytest.approx(-11 / 3 / (2 * math.pi) ** 2)
    with pytest.raises(ValueError):
        beta(0.1, model="qed")
