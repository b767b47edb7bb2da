"""Iterative screening: conditional index via residualization on the selected set.

Each stage regresses every remaining candidate on the covariates chosen
so far, standardizes the residual, and scores it with the same
slice-moment index as the marginal screen.  Stages run until the stage
sizes (summing to the screening budget) are exhausted.
"""

from __future__ import annotations

import math
import warnings as _warnings
from dataclasses import dataclass

import numpy as np

from .data import IndexVector, ScreeningResult, SurvivalDataset
from .errors import DegenerateResidualError, NotEnoughCandidatesError
from .index import mdr_index_all
from .ranking import select_top
from .slicing import SlicePartition, slice_indicator_matrix

# Relative floor below which a conditional variance counts as zero.
RESIDUAL_VARIANCE_FLOOR = 1e-10
# Near-singularity test and ridge size for the conditioning-set Gram matrix.
GRAM_EIGENVALUE_FLOOR = 1e-10
RIDGE_SCALE = 1e-8


@dataclass(frozen=True)
class ResidualParams:
    """Linear regression of one candidate column on the conditioning set.

    ``coef`` solves the (possibly ridged) normal equations;
    ``var_cond`` is the analytic conditional variance, clamped at zero.
    """

    coef: np.ndarray
    mu_cond: float
    var_cond: float
    ridge_used: bool = False
    ridge_eps: float = 0.0


def _gram_solve(s_ff, s_fe):
    """Solve S_ff @ coef = S_fe, ridging S_ff if it is numerically singular.

    Returns (coef, ridge_eps) with ridge_eps = 0.0 when no ridge was needed.
    """
    eigs = np.linalg.eigvalsh(s_ff)
    ridge_eps = 0.0
    if eigs[0] < GRAM_EIGENVALUE_FLOOR * max(eigs[-1], 0.0) or eigs[0] <= 0.0:
        ridge_eps = RIDGE_SCALE * float(np.trace(s_ff)) / s_ff.shape[0]
        s_ff = s_ff + ridge_eps * np.eye(s_ff.shape[0])
    coef = np.linalg.solve(s_ff, s_fe)
    return coef, ridge_eps


def _column_indices(data, ids):
    ids = np.asarray(list(ids), dtype=np.int64)
    if len(ids) == 0:
        raise ValueError("conditioning set must be non-empty")
    if ids.min() < 1 or ids.max() > data.p:
        raise ValueError("covariate ids must lie in 1..p")
    return ids - 1


def residual_params(data: SurvivalDataset, f, e):
    """Regression parameters of covariate ``e`` on covariate set ``f``.

    All moments use the n-denominator convention.  Raises
    DegenerateResidualError when the conditional variance falls below
    ``RESIDUAL_VARIANCE_FLOOR`` times the candidate's own variance,
    i.e. the candidate is numerically a linear combination of X_f.
    """
    f = tuple(int(k) for k in f)
    e = int(e)
    if e in f:
        raise ValueError("candidate must lie outside the conditioning set")
    if len(f) >= data.n:
        raise ValueError("conditioning set at least as large as n; Gram matrix singular")
    fi = _column_indices(data, f)
    xf = data.covariates[:, fi]
    xe = data.covariates[:, e - 1]
    n = data.n

    mu_f = xf.mean(axis=0)
    mu_e = xe.mean()
    xf_c = xf - mu_f
    xe_c = xe - mu_e
    s_ff = xf_c.T @ xf_c / n
    s_fe = xf_c.T @ xe_c / n
    var_e = float(xe_c @ xe_c / n)

    coef, ridge_eps = _gram_solve(s_ff, s_fe)
    var_cond = max(var_e - float(s_fe @ coef), 0.0)
    if np.ptp(xe) == 0.0 or var_e == 0.0 or var_cond < RESIDUAL_VARIANCE_FLOOR * var_e:
        raise DegenerateResidualError(
            f"covariate {e} is numerically a linear combination of the conditioning set"
        )
    return ResidualParams(
        coef=coef,
        mu_cond=float(mu_e - coef @ mu_f),
        var_cond=var_cond,
        ridge_used=ridge_eps > 0.0,
        ridge_eps=ridge_eps,
    )


def conditional_index(data: SurvivalDataset, partition: SlicePartition, f, e):
    """Index of candidate ``e`` after residualizing on covariate set ``f``.

    The realized residual is standardized empirically (its own sample
    mean and n-denominator standard deviation), then scored exactly like
    a marginal column.
    """
    params = residual_params(data, f, e)
    fi = _column_indices(data, f)
    xf = data.covariates[:, fi]
    xe = data.covariates[:, int(e) - 1]
    resid = xe - xf @ params.coef
    resid = resid - resid.mean()
    sd = resid.std()
    z = resid / sd
    n = data.n
    labels = partition.labels
    u = np.bincount(labels, weights=z, minlength=partition.n_slices) / n
    v = np.bincount(labels, weights=z**2, minlength=partition.n_slices) / n
    probs = partition.probs
    return float(2.0 * np.sum(probs * (v / probs - 1.0) ** 2) + 4.0 * np.sum(u**2 / probs) ** 2)


def conditional_index_batch(data: SurvivalDataset, partition: SlicePartition, f, candidates):
    """Conditional indices for many candidates against one conditioning set.

    Vectorizes the per-candidate computation; results match
    :func:`conditional_index` to floating-point round-off.

    Returns
    -------
    values : (m,) float64, 0.0 in degenerate positions
    degenerate : (m,) bool mask of candidates failing the variance floor
    ridge_eps : float, 0.0 when the Gram solve needed no ridge
    """
    f = tuple(int(k) for k in f)
    candidates = tuple(int(k) for k in candidates)
    if set(candidates) & set(f):
        raise ValueError("candidates must lie outside the conditioning set")
    fi = _column_indices(data, f)
    ci = _column_indices(data, candidates)
    xf = data.covariates[:, fi]
    xe = data.covariates[:, ci]
    n = data.n

    xf_c = xf - xf.mean(axis=0)
    xe_c = xe - xe.mean(axis=0)
    s_ff = xf_c.T @ xf_c / n
    s_fe = xf_c.T @ xe_c / n  # (|f|, m)
    var_e = np.einsum("ij,ij->j", xe_c, xe_c) / n

    coef, ridge_eps = _gram_solve(s_ff, s_fe)
    var_cond = np.maximum(var_e - np.einsum("ij,ij->j", s_fe, coef), 0.0)
    degenerate = (
        (np.ptp(xe, axis=0) == 0.0)
        | (var_e == 0.0)
        | (var_cond < RESIDUAL_VARIANCE_FLOOR * var_e)
    )

    resid = xe_c - xf_c @ coef  # already column-centered
    var_resid = np.einsum("ij,ij->j", resid, resid) / n
    sd = np.sqrt(np.where(degenerate, 1.0, var_resid))
    z = resid / sd

    ind = slice_indicator_matrix(partition)
    u = z.T @ ind / n
    v = (z**2).T @ ind / n
    probs = partition.probs
    values = 2.0 * np.sum(probs * (v / probs - 1.0) ** 2, axis=1) + 4.0 * np.sum(
        u**2 / probs, axis=1
    ) ** 2
    values[degenerate] = 0.0
    return values, degenerate, ridge_eps


def default_stage_plan(d):
    """Two nearly-equal stages splitting budget ``d`` (single stage when d == 1)."""
    d = int(d)
    if d < 1:
        raise ValueError("budget must be >= 1")
    if d == 1:
        return (1,)
    p1 = math.ceil(d / 2)
    return (p1, d - p1)


def mdr_is(data: SurvivalDataset, partition: SlicePartition, stage_sizes, config_echo=None):
    """Iterative screening with the given per-stage selection sizes.

    Stage 1 ranks all covariates by the marginal index; each later stage
    ranks the remaining candidates by their index conditional on the
    union selected so far.  Candidates whose residual is degenerate are
    skipped and recorded.  The result's ``indices`` carry the marginal
    (stage 1) scan; stage membership is in ``stage_members``.

    Raises
    ------
    NotEnoughCandidatesError
        when a stage cannot be filled with non-degenerate candidates.
    """
    stage_sizes = tuple(int(s) for s in stage_sizes)
    if not stage_sizes or any(s < 1 for s in stage_sizes):
        raise ValueError("stage sizes must be positive")
    total = sum(stage_sizes)
    if total > data.p:
        raise ValueError(f"stage sizes sum to {total} > p = {data.p}")
    if total >= data.n:
        _warnings.warn(
            f"screening budget {total} >= n = {data.n}; conditioning sets may degenerate",
            RuntimeWarning,
            stacklevel=2,
        )

    marginal = mdr_index_all(data, partition)
    stage1 = select_top(marginal, stage_sizes[0])
    selected = list(stage1.selected)
    stage_members = [stage1.selected]
    run_warnings = list(stage1.warnings)
    skipped = {}
    ridge_log = {}

    for v, size in enumerate(stage_sizes[1:], start=2):
        chosen = set(selected)
        remaining = [k for k in range(1, data.p + 1) if k not in chosen]
        values, degenerate, ridge_eps = conditional_index_batch(
            data, partition, selected, remaining
        )
        if ridge_eps > 0.0:
            ridge_log[f"stage_{v}"] = ridge_eps
        usable = ~degenerate
        if degenerate.any():
            skipped[f"stage_{v}"] = [remaining[i] for i in np.nonzero(degenerate)[0]]
        if int(usable.sum()) < size:
            raise NotEnoughCandidatesError(
                f"stage {v} needs {size} candidates but only {int(usable.sum())} are usable"
            )
        stage_iv = IndexVector(
            values=values[usable], covariate_ids=np.asarray(remaining)[usable]
        )
        picked = select_top(stage_iv, size)
        selected.extend(picked.selected)
        stage_members.append(picked.selected)
        run_warnings.extend(picked.warnings)

    echo = dict(config_echo or {})
    echo.setdefault("stage_sizes", list(stage_sizes))
    if skipped:
        echo["degenerate_candidates"] = skipped
        run_warnings.append(
            f"{sum(len(s) for s in skipped.values())} degenerate candidate(s) skipped"
        )
    if ridge_log:
        echo["ridge"] = ridge_log
    return ScreeningResult(
        selected=tuple(selected),
        indices=marginal,
        method="MDR-IS" if len(stage_sizes) > 1 else "MDR-SIS",
        config_echo=echo,
        stage_sizes=stage_sizes,
        stage_members=tuple(stage_members),
        warnings=tuple(run_warnings),
    )
