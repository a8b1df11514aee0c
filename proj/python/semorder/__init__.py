"""Causal order estimation for additive structural equations models.

Variables and permutations are 0-based here. Specs are plain dicts in the
same layout as the CLI JSON configs (where variables are 1-based), and the
report dicts returned by identifiability_gap and rate_experiment mirror the
CLI output files.
"""

import json

import numpy as np

from . import _semorder
from ._semorder import (
    CapacityError,
    FitResult,
    NumericalError,
    OrderEstimate,
    UsageError,
    __version__,
    delta_n,
    entropy_bound_l1,
    fit_l1,
    fit_span,
    inner_product_sup,
    j_integral_l1,
    project_l1_ball,
    subgauss_product_sup,
    z_sup_ellipsoid,
    z_sup_l1,
)


def _dump(obj):
    return obj if isinstance(obj, str) else json.dumps(obj)


def validate_sem(spec):
    """Return the normalised spec dict, raising UsageError if it is invalid."""
    return json.loads(_semorder.validate_sem(_dump(spec)))


def simulate(spec, n, seed, threads=1):
    """n x p sample of the SEM; identical for any thread count."""
    return _semorder.simulate(_dump(spec), n, seed, threads)


def design_matrix(dictionary, columns, intercept=True):
    columns = np.asarray(columns, dtype=float)
    if columns.ndim == 1:
        columns = columns[:, None]
    return _semorder.design_matrix(_dump(dictionary), columns, intercept)


def score(data, perm, cls):
    return _semorder.score(np.asarray(data, dtype=float), list(perm), _dump(cls))


def estimate_order(data, cls, method="exact", threads=1):
    return _semorder.estimate_order(np.asarray(data, dtype=float), _dump(cls), method, threads)


def identifiability_gap(spec, cls, oracle_n, seed, threads=1, batches=10):
    return json.loads(_semorder.identifiability_gap(_dump(spec), _dump(cls), oracle_n, seed, threads, batches))


def rate_experiment(case, n_grid, p_grid, N_grid, family="trigonometric", domain=(0.0, 1.0), M=1.0, reps=50,
                    restarts=64, seed=0, self_test=False, threads=1):
    text = _semorder.rate_experiment(case, family, domain[0], domain[1], list(n_grid), list(p_grid), list(N_grid),
                                     M, reps, restarts, seed, self_test, threads)
    return json.loads(text)
