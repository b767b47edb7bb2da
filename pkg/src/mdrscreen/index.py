"""Marginal screening index for one covariate against the slice partition.

The index for covariate k combines per-slice second moments of the
standardized column with per-slice means:

    g_k = 2 * sum_s p_s (V_s / p_s - 1)^2 + 4 * (sum_s U_s^2 / p_s)^2

where, for slice s, U_s and V_s are the n-denominator averages of
z_k * 1{i in s} and z_k^2 * 1{i in s}, and p_s is the empirical slice
probability.  ``mdr_index_bruteforce`` evaluates the same quantity
through the O(n^2) pairwise-difference definition and is used as an
independent oracle in the tests; the two agree exactly under the
empirical measure (self-pairs included) because z has sample mean 0 and
sample variance 1.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .data import IndexVector, SurvivalDataset, _readonly
from .errors import ZeroVarianceError
from .slicing import SlicePartition, slice_indicator_matrix


@dataclass(frozen=True)
class StandardizedColumn:
    """One covariate column centered and scaled to sample mean 0, variance 1.

    The scale uses the n-denominator: sd = sqrt(mean((x - mean(x))^2)).
    """

    z: np.ndarray
    mean: float
    sd: float

    def __post_init__(self):
        object.__setattr__(self, "z", _readonly(self.z))
        n = len(self.z)
        if self.sd <= 0:
            raise ValueError("sd must be positive")
        if abs(self.z.sum()) > 1e-12 * n or abs((self.z**2).sum() - n) > 1e-12 * n:
            raise ValueError("standardized column must have mean 0 and mean square 1")


@dataclass(frozen=True)
class SliceMoments:
    """Per-slice first and second moments of a standardized column.

    ``u[s] = mean_i z_i * 1{i in slice s}``, ``v[s]`` likewise with z^2;
    sums over slices are 0 and 1 by construction.
    """

    u: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "u", _readonly(self.u))
        object.__setattr__(self, "v", _readonly(self.v))
        if abs(self.u.sum()) > 1e-10 or abs(self.v.sum() - 1.0) > 1e-10:
            raise ValueError("slice moments must sum to 0 (u) and 1 (v)")
        if (self.v < 0).any():
            raise ValueError("second moments must be nonnegative")


def standardize(column):
    """Center and scale a column to sample mean 0 and (n-denominator) variance 1.

    Raises
    ------
    ZeroVarianceError
        for a constant column; such covariates cannot be scored.
    """
    x = np.asarray(column, dtype=np.float64)
    if x.ndim != 1 or len(x) < 2:
        raise ValueError("column must be 1-d with at least two entries")
    if not np.all(np.isfinite(x)):
        raise ValueError("column must be finite")
    # ptp == 0 is the exact constancy test; a computed sd can round away from 0.
    if np.ptp(x) == 0.0:
        raise ZeroVarianceError("constant column cannot be standardized")
    mean = x.mean()
    sd = x.std()
    if sd == 0.0 or not np.isfinite(sd):
        raise ZeroVarianceError("constant column cannot be standardized")
    return StandardizedColumn(z=(x - mean) / sd, mean=float(mean), sd=float(sd))


def slice_moments(z: StandardizedColumn, partition: SlicePartition):
    """Per-slice moments U, V of a standardized column."""
    zv = z.z
    if len(zv) != partition.n:
        raise ValueError("column length does not match partition")
    n = partition.n
    u = np.bincount(partition.labels, weights=zv, minlength=partition.n_slices) / n
    v = np.bincount(partition.labels, weights=zv**2, minlength=partition.n_slices) / n
    return SliceMoments(u=u, v=v)


def mdr_index(moments: SliceMoments, probs):
    """Screening index from slice moments and slice probabilities (all > 0)."""
    p = np.asarray(probs, dtype=np.float64)
    if (p <= 0).any():
        raise ValueError("slice probabilities must be positive")
    if p.shape != moments.u.shape:
        raise ValueError("probs must align with moments")
    term_v = 2.0 * np.sum(p * (moments.v / p - 1.0) ** 2)
    term_u = 4.0 * np.sum(moments.u**2 / p) ** 2
    return float(term_v + term_u)


def mdr_index_bruteforce(z: StandardizedColumn, partition: SlicePartition):
    """O(n^2) pairwise evaluation of the index; test oracle only.

    For each ordered pair of slices (s, t) the mean squared difference
    D_st of z over all ordered observation pairs (a in s, b in t) is
    computed literally -- including a == b pairs when s == t, matching
    the product of two independent copies of the empirical distribution.
    The returned value is sum_st p_s p_t (2 - D_st)^2.
    """
    zv = z.z
    if len(zv) != partition.n:
        raise ValueError("column length does not match partition")
    groups = [zv[partition.labels == s] for s in range(partition.n_slices)]
    total = 0.0
    for s, zs in enumerate(groups):
        for t, zt in enumerate(groups):
            d_st = np.mean((zs[:, None] - zt[None, :]) ** 2)
            total += partition.probs[s] * partition.probs[t] * (2.0 - d_st) ** 2
    return float(total)


def mdr_index_all(data: SurvivalDataset, partition: SlicePartition):
    """Screening index for every covariate column, vectorized.

    Constant columns are scored 0 (they carry no information) and
    reported through ``degenerate_ids`` plus a warning, so one bad
    column cannot abort a wide batch.
    """
    x = data.covariates
    n, p = x.shape
    mean = x.mean(axis=0)
    sd = x.std(axis=0)
    degenerate = (np.ptp(x, axis=0) == 0.0) | (sd == 0.0)
    safe_sd = np.where(degenerate, 1.0, sd)
    z = (x - mean) / safe_sd

    ind = slice_indicator_matrix(partition)
    u = z.T @ ind / n  # (p, n_slices)
    v = (z**2).T @ ind / n
    probs = partition.probs
    values = 2.0 * np.sum(probs * (v / probs - 1.0) ** 2, axis=1) + 4.0 * np.sum(
        u**2 / probs, axis=1
    ) ** 2

    ids = np.arange(1, p + 1)
    degenerate_ids = ()
    if degenerate.any():
        values = values.copy()
        values[degenerate] = 0.0
        degenerate_ids = tuple(int(k) for k in ids[degenerate])
        warnings.warn(
            f"{len(degenerate_ids)} constant covariate column(s) scored 0: "
            f"{degenerate_ids[:10]}{'...' if len(degenerate_ids) > 10 else ''}",
            RuntimeWarning,
            stacklevel=2,
        )
    return IndexVector(values=values, covariate_ids=ids, degenerate_ids=degenerate_ids)
