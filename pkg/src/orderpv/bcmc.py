"""Besag-Clifford serial Monte Carlo test for binary matrices with fixed margins.

The no-association null treats every 0/1 matrix with the observed row and
column sums as equally likely.  The sampler is the standard checkerboard-swap
chain: pick two rows and two columns uniformly; if the 2x2 corner pattern is
a checkerboard, flip it (margins are untouched), otherwise stay put.  The
proposal is symmetric, so the uniform distribution on the margin class is
stationary and the chain is reversible; the backward half of the serial
construction therefore reuses the forward kernel.

The serial p-value embeds the observed matrix at a uniform random position
of a length-N stationary chain and reports the fraction of chain states whose
statistic is at least the observed one; it is always a multiple of 1/N.
"""

from dataclasses import dataclass, field

import numpy as np

from .rngs import check_seed

_BLOCK = 8192  # index draws are pre-generated in blocks of this many steps


class BinaryMatrix:
    """Immutable 0/1 matrix with cached row and column sums."""

    __slots__ = ("_entries", "_row_sums", "_col_sums")

    def __init__(self, entries):
        arr = np.asarray(entries)
        if arr.ndim != 2 or arr.size == 0:
            raise ValueError("entries must be a non-empty 2-d array")
        if not np.isin(arr, (0, 1)).all():
            raise ValueError("entries must be 0/1")
        arr = arr.astype(np.int8)
        arr.setflags(write=False)
        self._entries = arr
        self._row_sums = arr.sum(axis=1, dtype=np.int64)
        self._col_sums = arr.sum(axis=0, dtype=np.int64)
        self._row_sums.setflags(write=False)
        self._col_sums.setflags(write=False)

    @property
    def entries(self):
        return self._entries

    @property
    def row_sums(self):
        return self._row_sums

    @property
    def col_sums(self):
        return self._col_sums

    @property
    def shape(self):
        return self._entries.shape

    def __eq__(self, other):
        if not isinstance(other, BinaryMatrix):
            return NotImplemented
        return np.array_equal(self._entries, other._entries)

    def __hash__(self):
        return hash(self._entries.tobytes())

    def __repr__(self):
        r, c = self.shape
        return f"BinaryMatrix({r}x{c}, row_sums={self._row_sums.tolist()})"


def _as_entries(mat):
    return mat.entries if isinstance(mat, BinaryMatrix) else np.asarray(mat)


def _check_swappable(shape):
    r, c = shape
    if r < 2 or c < 2:
        raise ValueError(
            f"checkerboard swaps need at least 2 rows and 2 columns, got {r}x{c}"
        )


def _distinct_pair(rng, size):
    """Ordered pair of distinct indices, uniform over all such pairs."""
    first = int(rng.integers(0, size))
    second = int(rng.integers(0, size - 1))
    if second >= first:
        second += 1
    return first, second


def swap_step(mat, rng):
    """One step of the checkerboard-swap chain.

    Returns a new matrix when the sampled 2x2 corner pattern is a
    checkerboard, otherwise the input matrix itself (lazy self-loop).
    Row and column sums are preserved exactly in either case.
    """
    _check_swappable(mat.shape)
    r, c = mat.shape
    i1, i2 = _distinct_pair(rng, r)
    j1, j2 = _distinct_pair(rng, c)
    e = mat.entries
    a, b = e[i1, j1], e[i1, j2]
    if a != b and e[i2, j2] == a and e[i2, j1] == b:
        flipped = e.copy()
        flipped[i1, j1] = b
        flipped[i2, j2] = b
        flipped[i1, j2] = a
        flipped[i2, j1] = a
        return BinaryMatrix(flipped)
    return mat


def _advance(work, steps, rng, statistic=None, threshold=None, trace=None):
    """Run `steps` swap steps in place on `work`.

    When `statistic` is given it is evaluated after every step; returns the
    number of steps with statistic >= threshold, appending each value to
    `trace` when provided.
    """
    if steps <= 0:
        return 0
    _check_swappable(work.shape)
    r, c = work.shape
    count = 0
    current = None  # statistic of the running state; rejected moves keep it
    remaining = steps
    while remaining:
        b = min(_BLOCK, remaining)
        i1 = rng.integers(0, r, size=b)
        i2 = rng.integers(0, r - 1, size=b)
        j1 = rng.integers(0, c, size=b)
        j2 = rng.integers(0, c - 1, size=b)
        i2 = i2 + (i2 >= i1)
        j2 = j2 + (j2 >= j1)
        for s in range(b):
            r1, r2, c1, c2 = i1[s], i2[s], j1[s], j2[s]
            a = work[r1, c1]
            bb = work[r1, c2]
            if a != bb and work[r2, c2] == a and work[r2, c1] == bb:
                work[r1, c1] = bb
                work[r2, c2] = bb
                work[r1, c2] = a
                work[r2, c1] = a
                current = None
            if statistic is not None:
                if current is None:
                    current = statistic(work)
                if trace is not None:
                    trace.append(current)
                if threshold is not None and current >= threshold:
                    count += 1
        remaining -= b
    return count


def cooccurrence_stat(mat):
    """Total pairwise co-presences: sum over column pairs of joint 1-counts.

    Equals the sum over rows of C(row_sum, 2), so it is determined by the
    row margins alone and does not vary across the fixed-margin class; use
    a custom statistic (e.g. `checkerboard_score`) when discriminating power
    is needed.
    """
    e = _as_entries(mat)
    overlap = e.T.astype(np.int64) @ e.astype(np.int64)
    return int((overlap.sum() - np.trace(overlap)) // 2)


def checkerboard_score(mat):
    """Mean over column pairs of (col_sum_j - overlap)(col_sum_j' - overlap).

    The classic checkerboard statistic: large values mean column pairs tend
    to avoid sharing rows.  Varies across the fixed-margin class.
    """
    e = _as_entries(mat)
    c = e.shape[1]
    if c < 2:
        raise ValueError("need at least 2 columns")
    overlap = e.T.astype(np.int64) @ e.astype(np.int64)
    col = e.sum(axis=0, dtype=np.int64)
    score = (col[:, None] - overlap) * (col[None, :] - overlap)
    # overlap's diagonal equals the column sums, so diagonal terms vanish and
    # the pair mean is the full sum over c*(c-1) ordered pairs.
    return float(score.sum() / (c * (c - 1)))


@dataclass(frozen=True)
class ChainConfig:
    """Length, statistic, and seed of one serial Monte Carlo run.

    `statistic` is any callable on the 0/1 entries array (BinaryMatrix
    instances are accepted too); larger values count as more extreme.
    """

    length: int
    statistic: object = field(default=cooccurrence_stat)
    seed: int = 0

    def __post_init__(self):
        if self.length < 1:
            raise ValueError("chain length must be >= 1")
        check_seed(self.seed)


def _serial_pvalue_rng(mat, length, statistic, rng, return_trace=False):
    """Serial construction on a caller-provided generator; see `serial_pvalue`."""
    tau = int(rng.integers(1, length + 1))
    observed = statistic(mat.entries)

    forward_trace = [] if return_trace else None
    backward_trace = [] if return_trace else None

    count = 1  # t = tau
    work = np.array(mat.entries, dtype=np.int8)
    count += _advance(work, length - tau, rng, statistic, observed, forward_trace)
    work = np.array(mat.entries, dtype=np.int8)
    count += _advance(work, tau - 1, rng, statistic, observed, backward_trace)

    pvalue = count / length
    if not return_trace:
        return pvalue
    trace = list(reversed(backward_trace)) + [observed] + (forward_trace or [])
    return pvalue, np.asarray(trace, dtype=float)


def serial_pvalue(mat, cfg, return_trace=False):
    """Serial Monte Carlo p-value for the no-association null.

    Places the observed matrix at a uniform position tau of a length-N
    chain, extends forward and backward with the (self-adjoint) swap kernel,
    and returns ``#{t : stat(X_tau) <= stat(X_t)} / N``.  Output is a
    multiple of 1/N in (0, 1]; the observed position always counts.

    With ``return_trace=True`` also returns the statistic values in chain
    order 1..N.
    """
    rng = np.random.default_rng(np.random.SeedSequence(check_seed(cfg.seed)))
    return _serial_pvalue_rng(mat, cfg.length, cfg.statistic, rng, return_trace)


def _check_margins(row_sums, col_sums):
    rows = np.asarray(row_sums, dtype=np.int64)
    cols = np.asarray(col_sums, dtype=np.int64)
    if rows.ndim != 1 or cols.ndim != 1 or rows.size == 0 or cols.size == 0:
        raise ValueError("row_sums and col_sums must be non-empty 1-d integer vectors")
    if np.any(rows < 0) or np.any(cols < 0):
        raise ValueError("margins must be non-negative")
    if np.any(rows > cols.size) or np.any(cols > rows.size):
        raise ValueError("margins cannot exceed the opposite dimension")
    if rows.sum() != cols.sum():
        raise ValueError("row and column sums must agree in total")
    # Gale-Ryser feasibility for 0/1 matrices.
    desc = np.sort(rows)[::-1]
    for m in range(1, desc.size + 1):
        if desc[:m].sum() > np.minimum(cols, m).sum():
            raise ValueError("margins are not realizable by any 0/1 matrix")
    return rows, cols


def generate_null_matrix(row_sums, col_sums, burn_in=10_000, seed=0):
    """A matrix with the given margins, randomized by `burn_in` swap steps.

    Builds a feasible matrix greedily (each row's ones go to the columns
    with the largest remaining demand) and then advances the swap chain.
    Degenerate shapes with fewer than 2 rows or columns are returned as
    built: their margin class is a single matrix.
    """
    rows, cols = _check_margins(row_sums, col_sums)
    if burn_in < 0:
        raise ValueError("burn_in must be >= 0")

    entries = np.zeros((rows.size, cols.size), dtype=np.int8)
    caps = cols.copy()
    for i in np.argsort(-rows, kind="stable"):
        need = int(rows[i])
        if need == 0:
            continue
        targets = np.argsort(-caps, kind="stable")[:need]
        if caps[targets[-1]] < 1:
            raise ValueError("margins are not realizable by any 0/1 matrix")
        entries[i, targets] = 1
        caps[targets] -= 1

    if burn_in > 0 and rows.size >= 2 and cols.size >= 2:
        rng = np.random.default_rng(np.random.SeedSequence(check_seed(seed)))
        _advance(entries, burn_in, rng)
    return BinaryMatrix(entries)
