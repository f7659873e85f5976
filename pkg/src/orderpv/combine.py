"""Collapse n conditionally i.i.d. p-values into one valid summary p-value.

The summary is the corrected k-th order statistic.  k must be fixed before
seeing the data; the recommended default is the left sample median index
``floor((n+1)/2)``, for which the simple conservative summary is the minimum
of 1 and twice the sample median.
"""

from dataclasses import dataclass

import numpy as np

from .correction import solve_combiner


def default_k(n):
    """Index of the left sample median: floor((n+1)/2)."""
    if n != int(n) or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    return (int(n) + 1) // 2


def _check_sample(values):
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1 or arr.size < 1:
        raise ValueError("expected a non-empty 1-d vector of p-values")
    if np.any(np.isnan(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
        raise ValueError("all p-values must lie in [0, 1]")
    return arr


def order_statistic(values, k):
    """The k-th smallest entry (ties counted with multiplicity)."""
    arr = _check_sample(values)
    if k != int(k) or not 1 <= k <= arr.size:
        raise ValueError(f"k must be an integer in [1, {arr.size}], got {k!r}")
    return float(np.partition(arr, int(k) - 1)[int(k) - 1])


@dataclass(frozen=True)
class CombineResult:
    """Summary p-value plus everything needed to report the combination.

    ``bound`` is the simple conservative value min(1, (n/k) * order_stat);
    the exact ``summary`` never exceeds it.
    """

    summary: float
    n: int
    k: int
    order_stat: float
    knee: float
    slope: float
    bound: float


def combine_pvalues(values, k=None):
    """Combine a vector of conditionally i.i.d. p-values.

    Parameters
    ----------
    values : array_like
        The n p-values, each in [0, 1]; order carries no meaning.
    k : int, optional
        Order-statistic index in 1..n, fixed before seeing the data.
        Defaults to the left sample median index.

    Returns
    -------
    CombineResult
        With ``summary`` the valid combined p-value.
    """
    arr = _check_sample(values)
    n = arr.size
    if k is None:
        k = default_k(n)
    u = order_statistic(arr, k)
    spec = solve_combiner(n, int(k))
    return CombineResult(
        summary=spec.apply(u),
        n=n,
        k=int(k),
        order_stat=u,
        knee=spec.knee,
        slope=spec.slope,
        bound=min(1.0, (n / int(k)) * u),
    )
