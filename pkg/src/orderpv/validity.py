"""Monte Carlo verification that a combination rule yields valid p-values.

A simulated kernel draws conditionally i.i.d. p-value vectors; a combination
rule is valid when the empirical CDF of the combined value never climbs above
the diagonal.  The worst case over all kernels is a two-point family: with
probability t all n values collapse onto a shared atom below t, otherwise
they scatter uniformly above t.  That family attains equality in the validity
bound, so it both certifies the exact correction and convicts anything
smaller.

Kernels are callables ``kernel(rng, size) -> (size, n) array``.  Replications
are processed in fixed-size blocks with one counter-derived stream per block
(see `rngs`), so reports are bit-identical however the blocks are scheduled.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .binom import binom_upper_tail
from .correction import solve_combiner
from .rngs import check_seed, iter_chunks, stream

DEFAULT_ALPHA_GRID = np.linspace(0.025, 0.5, 20)

# Flag only excursions beyond 3 binomial standard errors: across a 20-point
# grid this keeps the false-alarm rate per report at the percent level.
SIGMA_RULE = 3.0


@dataclass(frozen=True)
class SimConfig:
    """Replication plan for a validity study."""

    n: int
    k: int
    reps: int
    seed: int
    alpha_grid: np.ndarray = field(default_factory=lambda: DEFAULT_ALPHA_GRID.copy())

    def __post_init__(self):
        if not 1 <= self.k <= self.n:
            raise ValueError(f"need 1 <= k <= n, got k={self.k}, n={self.n}")
        if self.reps < 1:
            raise ValueError("reps must be >= 1")
        check_seed(self.seed)
        grid = np.asarray(self.alpha_grid, dtype=float)
        if grid.ndim != 1 or grid.size == 0:
            raise ValueError("alpha_grid must be a non-empty 1-d vector")
        if np.any(grid < 0.0) or np.any(grid > 1.0) or np.any(np.diff(grid) <= 0.0):
            raise ValueError("alpha_grid must be strictly increasing within [0, 1]")
        object.__setattr__(self, "alpha_grid", grid)


@dataclass(frozen=True)
class SimReport:
    """Empirical CDF of the combined value on the alpha grid."""

    alpha: np.ndarray
    empirical_cdf: np.ndarray
    std_err: np.ndarray
    verdict: tuple
    reps: int
    seed: int

    @property
    def violations(self):
        """Alpha grid points where the empirical CDF exceeds alpha + 3 SE."""
        mask = np.array([v == "violation" for v in self.verdict])
        return self.alpha[mask]

    @property
    def any_violation(self):
        return bool(len(self.violations))

    def rows(self):
        for a, e, s, v in zip(self.alpha, self.empirical_cdf, self.std_err, self.verdict):
            yield float(a), float(e), float(s), v

    def write_csv(self, fh, metadata=None):
        """Write the report as CSV; `metadata` becomes leading '# key = value' lines."""
        for key, value in (metadata or {}).items():
            fh.write(f"# {key} = {value}\n")
        fh.write("alpha,empirical_cdf,std_err,verdict\n")
        for a, e, s, v in self.rows():
            fh.write(f"{a:.10g},{e:.10g},{s:.10g},{v}\n")


def adversarial_draw(n, t, rng):
    """One worst-case p-value vector at atom weight t.

    Draws a shared x uniform on [0,1]; each of the n values independently
    equals x*t with probability t, else is uniform on [t, 1].
    """
    if not 0.0 <= t <= 1.0:
        raise ValueError("t must lie in [0, 1]")
    x = rng.random()
    atom = rng.random(n) < t
    u = rng.random(n)
    return np.where(atom, x * t, t + (1.0 - t) * u)


def adversarial_kernel(n, t):
    """Vectorized kernel for `adversarial_draw`: (rng, size) -> (size, n)."""
    if not 0.0 <= t <= 1.0:
        raise ValueError("t must lie in [0, 1]")

    def kernel(rng, size):
        x = rng.random(size)
        atom = rng.random((size, n)) < t
        u = rng.random((size, n))
        return np.where(atom, (x * t)[:, None], t + (1.0 - t) * u)

    return kernel


def uniform_kernel(n):
    """Kernel drawing n i.i.d. uniforms (the no-dependence base case)."""

    def kernel(rng, size):
        return rng.random((size, n))

    return kernel


def _tally_chunk(cfg, f, kernel, index, size):
    rng = stream(cfg.seed, index)
    draws = kernel(rng, size)
    u = np.partition(draws, cfg.k - 1, axis=1)[:, cfg.k - 1]
    v = np.asarray(f(u), dtype=float)
    return (v[:, None] <= cfg.alpha_grid[None, :]).sum(axis=0)


def check_validity(cfg, f, kernel, threads=1):
    """Estimate P(f(k-th smallest) <= alpha) on the alpha grid.

    Parameters
    ----------
    cfg : SimConfig
    f : callable
        Increasing map [0,1] -> [0,1], vectorized over ndarrays.
    kernel : callable
        ``kernel(rng, size) -> (size, n)`` of conditionally i.i.d. p-values.
    threads : int
        Worker threads over replication blocks; any value yields the same
        report because block streams are fixed and the tallies are summed.

    Returns
    -------
    SimReport
        Violation is declared where empirical_cdf > alpha + 3 * std_err.
    """
    chunks = list(iter_chunks(cfg.reps))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            tallies = list(
                pool.map(lambda c: _tally_chunk(cfg, f, kernel, *c), chunks)
            )
    else:
        tallies = [_tally_chunk(cfg, f, kernel, i, m) for i, m in chunks]
    counts = np.sum(tallies, axis=0)

    emp = counts / cfg.reps
    se = np.sqrt(emp * (1.0 - emp) / cfg.reps)
    verdict = tuple(
        "violation" if e > a + SIGMA_RULE * s else "consistent"
        for a, e, s in zip(cfg.alpha_grid, emp, se)
    )
    return SimReport(
        alpha=cfg.alpha_grid.copy(),
        empirical_cdf=emp,
        std_err=se,
        verdict=verdict,
        reps=cfg.reps,
        seed=cfg.seed,
    )


@dataclass(frozen=True)
class OrderStatCheck:
    """Monte Carlo check of P(k-th smallest of n uniforms <= q) against the binomial tail."""

    n: int
    k: int
    q: float
    reps: int
    seed: int
    empirical: float
    expected: float
    std_err: float
    zscore: float


def orderstat_cdf_check(n, k, q, reps, seed):
    """Compare the empirical order-statistic CDF at q with the binomial tail.

    Draws `reps` vectors of n i.i.d. uniforms, takes the k-th smallest of
    each, and z-scores the hit fraction of [0, q] against
    ``P(Bin(n, q) >= k)``.
    """
    if not 0.0 <= q <= 1.0:
        raise ValueError("q must lie in [0, 1]")
    expected = binom_upper_tail(n, k, q)

    hits = 0
    for index, size in iter_chunks(reps):
        rng = stream(seed, index)
        u = rng.random((size, n))
        kth = np.partition(u, k - 1, axis=1)[:, k - 1]
        hits += int(np.count_nonzero(kth <= q))

    empirical = hits / reps
    se = float(np.sqrt(expected * (1.0 - expected) / reps))
    if se > 0.0:
        z = (empirical - expected) / se
    else:
        z = 0.0 if empirical == expected else float("inf")
    return OrderStatCheck(
        n=n, k=k, q=float(q), reps=reps, seed=seed,
        empirical=empirical, expected=expected, std_err=se, zscore=float(z),
    )


def tightness_scan(n, k, shrink, reps, seed, alpha_grid=None, threads=1):
    """Probe whether a shrunken correction still looks valid.

    Runs `check_validity` with ``shrink * corrected`` against the worst-case
    kernel at the solved knee.  Any shrink < 1 inflates the combined CDF to
    alpha/shrink there, so violations appear once the Monte Carlo error is
    small enough; shrink = 1 is the boundary case and stays consistent.
    """
    if not 0.0 < shrink <= 1.0:
        raise ValueError(f"shrink must lie in (0, 1], got {shrink}")
    spec = solve_combiner(n, k)
    cfg = SimConfig(
        n=n, k=k, reps=reps, seed=seed,
        alpha_grid=DEFAULT_ALPHA_GRID.copy() if alpha_grid is None else alpha_grid,
    )
    return check_validity(
        cfg, lambda u: shrink * spec.apply(u), adversarial_kernel(n, spec.knee),
        threads=threads,
    )
