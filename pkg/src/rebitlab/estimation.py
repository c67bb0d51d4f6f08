"""Mergeable reducers for sample streams: histograms, binned conditional means,
Kolmogorov-Smirnov statistics and the (R, C^2) boundary check."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import stats

from rebitlab.analytics import boundary_c2_max


@dataclass(frozen=True)
class Histogram:
    """Fixed-width histogram on ``[lower, upper]``.

    Bins are half-open ``[a, b)`` except the last, which is closed, so values
    exactly at ``upper`` (e.g. C = 1) are counted in range.
    """

    lower: float
    upper: float
    bin_count: int
    counts: np.ndarray = None
    underflow: int = 0
    overflow: int = 0
    total: int = 0

    def __post_init__(self):
        if self.bin_count < 1 or not self.upper > self.lower:
            raise ValueError("need bin_count >= 1 and upper > lower")
        counts = np.zeros(self.bin_count, dtype=np.int64) if self.counts is None else np.asarray(self.counts, dtype=np.int64)
        if counts.shape != (self.bin_count,):
            raise ValueError("counts must have one entry per bin")
        object.__setattr__(self, "counts", counts)

    @property
    def width(self) -> float:
        return (self.upper - self.lower) / self.bin_count

    @property
    def edges(self) -> np.ndarray:
        return self.lower + self.width * np.arange(self.bin_count + 1)

    @property
    def centers(self) -> np.ndarray:
        return self.lower + self.width * (np.arange(self.bin_count) + 0.5)

    def accumulate(self, values) -> Histogram:
        """Return a new histogram with ``values`` added."""
        v = np.asarray(values, dtype=float).ravel()
        if np.any(np.isnan(v)):
            raise ValueError("cannot histogram NaN")
        under = v < self.lower
        over = v > self.upper
        inside = v[~(under | over)]
        idx = np.floor((inside - self.lower) / self.width).astype(np.int64)
        idx = np.clip(idx, 0, self.bin_count - 1)
        return replace(
            self,
            counts=self.counts + np.bincount(idx, minlength=self.bin_count),
            underflow=self.underflow + int(under.sum()),
            overflow=self.overflow + int(over.sum()),
            total=self.total + v.size,
        )

    def merge(self, other: Histogram) -> Histogram:
        if (self.lower, self.upper, self.bin_count) != (other.lower, other.upper, other.bin_count):
            raise ValueError("histograms have different binning")
        return replace(
            self,
            counts=self.counts + other.counts,
            underflow=self.underflow + other.underflow,
            overflow=self.overflow + other.overflow,
            total=self.total + other.total,
        )


def hist_accumulate(h: Histogram, value: float) -> Histogram:
    return h.accumulate([value])


def hist_density(h: Histogram) -> list[tuple[float, float]]:
    """``(bin_center, density)`` with density = count / (total * width)."""
    return [(c, d) for c, d, _ in hist_density_with_errors(h)]


def hist_density_with_errors(h: Histogram) -> list[tuple[float, float, float]]:
    """As :func:`hist_density` plus the binomial standard error of each density."""
    if h.total == 0:
        raise ValueError("histogram is empty")
    p = h.counts / h.total
    dens = p / h.width
    err = np.sqrt(p * (1.0 - p) / h.total) / h.width
    return list(zip(h.centers.tolist(), dens.tolist(), err.tolist()))


@dataclass
class BinnedStat:
    """Per-bin count, mean and centred second moment of ``y`` given the bin of ``x``.

    Bins follow the :class:`Histogram` convention over ``x_edges``; points
    outside the edges are dropped. Batches are folded in with Chan's
    pairwise update, which is also the merge rule.
    """

    x_edges: np.ndarray
    count: np.ndarray = field(default=None)
    mean: np.ndarray = field(default=None)
    m2: np.ndarray = field(default=None)

    def __post_init__(self):
        self.x_edges = np.asarray(self.x_edges, dtype=float)
        if self.x_edges.ndim != 1 or self.x_edges.size < 2 or np.any(np.diff(self.x_edges) <= 0):
            raise ValueError("x_edges must be strictly increasing with at least two entries")
        nb = self.x_edges.size - 1
        if self.count is None:
            self.count = np.zeros(nb, dtype=np.int64)
            self.mean = np.zeros(nb)
            self.m2 = np.zeros(nb)

    @property
    def n_bins(self) -> int:
        return self.x_edges.size - 1

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.x_edges[:-1] + self.x_edges[1:])

    def bin_index(self, x: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(self.x_edges, x, side="right") - 1
        idx[x == self.x_edges[-1]] = self.n_bins - 1
        idx[(x < self.x_edges[0]) | (x > self.x_edges[-1])] = -1
        return idx

    def accumulate(self, x, y) -> BinnedStat:
        x = np.asarray(x, dtype=float).ravel()
        y = np.asarray(y, dtype=float).ravel()
        if x.shape != y.shape:
            raise ValueError("x and y must have the same length")
        if np.any(np.isnan(x)) or np.any(np.isnan(y)):
            raise ValueError("cannot accumulate NaN")
        idx = self.bin_index(x)
        keep = idx >= 0
        idx, y = idx[keep], y[keep]
        nb = self.n_bins
        cnt = np.bincount(idx, minlength=nb)
        # shift each bin by its first value: exact for constant data, stable otherwise
        shift = np.zeros(nb)
        first = np.unique(idx, return_index=True)
        shift[first[0]] = y[first[1]]
        resid = np.bincount(idx, weights=y - shift[idx], minlength=nb)
        mu = np.where(cnt > 0, shift + resid / np.maximum(cnt, 1), 0.0)
        dev = y - mu[idx]
        m2 = np.bincount(idx, weights=dev * dev, minlength=nb)
        return self.merge(BinnedStat(self.x_edges, cnt.astype(np.int64), mu, m2))

    def merge(self, other: BinnedStat) -> BinnedStat:
        if not np.array_equal(self.x_edges, other.x_edges):
            raise ValueError("binned statistics have different edges")
        na, nb_ = self.count, other.count
        n = na + nb_
        safe = np.maximum(n, 1)
        delta = other.mean - self.mean
        mean = np.where(n > 0, self.mean + delta * (nb_ / safe), 0.0)
        m2 = self.m2 + other.m2 + delta * delta * (na * nb_ / safe)
        # exact copies when one side is empty keep merges with empty accumulators lossless
        mean = np.where(na == 0, other.mean, np.where(nb_ == 0, self.mean, mean))
        m2 = np.where(na == 0, other.m2, np.where(nb_ == 0, self.m2, m2))
        return BinnedStat(self.x_edges, n, mean, m2)

    def means(self) -> np.ndarray:
        """Per-bin mean; NaN (missing) for empty bins."""
        return np.where(self.count > 0, self.mean, np.nan)

    def variances(self) -> np.ndarray:
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(self.count > 1, self.m2 / (self.count - 1), np.nan)

    def stderrs(self) -> np.ndarray:
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.sqrt(self.variances() / self.count)


def conditional_mean(x, y, edges) -> BinnedStat:
    return BinnedStat(edges).accumulate(x, y)


@dataclass(frozen=True)
class KsResult:
    statistic: float
    n: int
    scaled: float


def ks_critical_value(alpha: float) -> float:
    """Asymptotic critical value of ``sqrt(n) D`` (Kolmogorov distribution)."""
    return float(stats.kstwobign.isf(alpha))


def ks_uniform(samples) -> KsResult:
    """One-sample KS statistic of ``samples`` against U[0, 1]."""
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    n = x.size
    if n < 10:
        raise ValueError("ks_uniform needs at least 10 samples")
    if np.any(np.isnan(x)) or x[0] < 0.0 or x[-1] > 1.0:
        raise ValueError("samples must lie in [0, 1]")
    i = np.arange(1, n + 1)
    d = max(float(np.max(i / n - x)), float(np.max(x - (i - 1) / n)))
    return KsResult(d, n, d * math.sqrt(n))


def ks_against_cdf(samples, cdf) -> KsResult:
    """One-sample KS against a continuous ``cdf`` via the probability integral transform."""
    u = np.clip(cdf(np.asarray(samples, dtype=float)), 0.0, 1.0)
    return ks_uniform(u)


def ks_two_sample(a, b) -> KsResult:
    """Two-sample KS statistic; ``n`` is the effective size ``n_a n_b / (n_a + n_b)``."""
    a = np.sort(np.asarray(a, dtype=float).ravel())
    b = np.sort(np.asarray(b, dtype=float).ravel())
    grid = np.concatenate([a, b])
    fa = np.searchsorted(a, grid, side="right") / a.size
    fb = np.searchsorted(b, grid, side="right") / b.size
    d = float(np.max(np.abs(fa - fb)))
    n_eff = a.size * b.size / (a.size + b.size)
    return KsResult(d, int(round(n_eff)), d * math.sqrt(n_eff))


def boundary_violations(records, tolerance: float = 1e-9) -> int:
    """Number of records with ``c_cfr^2 > C^2_max(R) + tolerance``.

    ``records`` is either a mapping of column arrays (as from
    ``evaluate_batch``) or an iterable of ``StateRecord``.
    """
    if isinstance(records, dict):
        r = np.asarray(records["participation_ratio"], dtype=float)
        c = np.asarray(records["c_cfr"], dtype=float)
    else:
        recs = list(records)
        r = np.array([x.participation_ratio for x in recs], dtype=float)
        c = np.array([x.c_cfr for x in recs], dtype=float)
    r = np.clip(r, 1.0, 4.0)
    return int(np.count_nonzero(c * c > boundary_c2_max(r) + tolerance))
