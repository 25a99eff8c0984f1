"""Regularized inner shell integrals and the beta functions built on them"""
from regulator.beta import BETA_COEFFICIENTS, beta, beta_pure, beta_sm
from regulator.omega import (
    CLOSED, GOLDEN_PATH, LITERATURE_OMEGA1, METHODS, MONTE_CARLO, ORACLE, OmegaEstimate, OmegaTable,
    Reconciliation, exact_estimate, load_golden, omega_closed, omega_exact, omega_table, reconcile,
    shell_integrand, shell_prefactor, write_golden,
)
from regulator.oracle import cone_cutoff, omega_monte_carlo, omega_oracle
