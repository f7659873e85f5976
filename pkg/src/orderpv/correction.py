"""The optimal monotone correction for a single order statistic of p-values.

Given n individually valid, conditionally i.i.d. p-values, the k-th smallest
of them is not itself a valid p-value; the smallest increasing transform that
repairs it is piecewise: a straight line of slope ``c`` up to a knee ``p*``,
then the binomial upper tail ``P(Bin(n, u) >= k)``.  The pair ``(p*, c)`` is
found by maximizing the tail ratio ``P(Bin(n, p) >= k) / p`` over p, which is
unimodal, so the stationarity condition has a single sign change and plain
bisection is unconditionally convergent.

The resulting map is a continuous increasing bijection of [0,1] onto [0,1],
bounded above by ``min(1, n*u/k)`` (so "twice the left sample median" is
always a conservative summary) and below by that bound divided by
``1 + 5*k**(-1/3)``.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special

from .binom import (
    _as_result,
    _check_k,
    _check_n,
    _check_p,
    binom_upper_tail,
    binom_upper_tail_derivative,
)

DEFAULT_TOL = 1e-12


def tail_ratio(n, k, p):
    """P(Bin(n, p) >= k) / p, extended by continuity at p = 0.

    The continuity value at 0 is the tail's derivative there: n when k = 1,
    0 when k >= 2.  Unimodal in p; its maximum is the correction factor.
    """
    n = _check_n(n)
    k = _check_k(k, n, 1)
    parr = _check_p(p).ravel()

    out = np.empty_like(parr)
    pos = parr > 0.0
    out[pos] = binom_upper_tail(n, k, parr[pos]) / parr[pos]
    out[~pos] = float(n) if k == 1 else 0.0
    return _as_result(out, p)


@dataclass(frozen=True)
class CombinerSpec:
    """Solved correction for the k-th order statistic of n p-values.

    Attributes
    ----------
    n, k : int
        Sample size and order-statistic index, fixed before seeing data.
    knee : float
        Argmax of the tail ratio; upper end of the linear branch.
    slope : float
        Maximum of the tail ratio; the multiplier on the linear branch.
    """

    n: int
    k: int
    knee: float
    slope: float

    def __post_init__(self):
        if not 1 <= self.k <= self.n:
            raise ValueError(f"need 1 <= k <= n, got k={self.k}, n={self.n}")
        if not 0.0 <= self.knee <= 1.0:
            raise ValueError(f"knee must lie in [0, 1], got {self.knee}")
        if self.slope < 1.0 - 1e-9:
            raise ValueError(f"slope must be >= 1, got {self.slope}")

    @classmethod
    def solve(cls, n, k, tol=DEFAULT_TOL):
        """Locate the knee to absolute precision `tol` and the slope there.

        The stationarity function ``w(p) = p * tail' (p) - tail(p)`` is
        strictly decreasing on [(k-1)/(n-1), 1], so its root is bracketed by
        a sign check at the endpoints and found by bisection.  Degenerate
        configurations are dispatched analytically: k = n gives the identity
        correction (knee 1, slope 1) and k = 1 gives slope n at knee 0.
        """
        n = _check_n(n)
        k = _check_k(k, n, 1)
        if not 0.0 < tol <= 1e-6:
            raise ValueError(f"tol must lie in (0, 1e-6], got {tol}")

        if n == 1:
            return cls(1, 1, 0.0, 1.0)
        if k == n:
            return cls(n, k, 1.0, 1.0)
        if k == 1:
            return cls(n, k, 0.0, float(n))

        def stationarity(p):
            return p * binom_upper_tail_derivative(n, k, p) - binom_upper_tail(n, k, p)

        lo = (k - 1) / (n - 1)
        hi = 1.0
        if stationarity(lo) <= 0.0:
            knee = lo
        elif stationarity(hi) >= 0.0:
            knee = hi
        else:
            while hi - lo > tol:
                mid = 0.5 * (lo + hi)
                if stationarity(mid) > 0.0:
                    lo = mid
                else:
                    hi = mid
            knee = 0.5 * (lo + hi)
        return cls(n, k, knee, tail_ratio(n, k, knee))

    def apply(self, u):
        """Corrected p-value for an observed order statistic u.

        Linear (slope * u) on [0, knee], the binomial upper tail beyond;
        the branches agree at the knee by construction.
        """
        uarr = _check_p(u).ravel()
        out = np.where(
            uarr <= self.knee,
            self.slope * uarr,
            binom_upper_tail(self.n, self.k, uarr),
        )
        return _as_result(np.clip(out, 0.0, 1.0), u)

    def invert(self, alpha):
        """The unique u with apply(u) == alpha.

        The linear branch inverts by division; the tail branch through the
        inverse regularized incomplete beta function, which is accurate to
        well below the 1e-12 contract.
        """
        aarr = _check_p(alpha).ravel()
        cutoff = self.slope * self.knee
        out = np.where(
            aarr <= cutoff,
            aarr / self.slope,
            special.betaincinv(self.k, self.n - self.k + 1, aarr),
        )
        return _as_result(np.clip(out, 0.0, 1.0), alpha)


@lru_cache(maxsize=None)
def solve_combiner(n, k, tol=DEFAULT_TOL):
    """Cached CombinerSpec.solve; repeated combinations skip the bisection."""
    return CombinerSpec.solve(n, k, tol)


def envelope(n, k, u):
    """Universal (lower, upper) bounds for the corrected value at u.

    upper = min(1, n*u/k); lower = upper / (1 + 5*k**(-1/3)).  The corrected
    value always lies between the two, so the upper bound is a valid, simple
    stand-in for the exact correction.
    """
    n = _check_n(n)
    k = _check_k(k, n, 1)
    uarr = _check_p(u).ravel()

    upper = np.minimum(1.0, n * uarr / k)
    lower = upper / (1.0 + 5.0 * k ** (-1.0 / 3.0))
    return _as_result(lower, u), _as_result(upper, u)
