"""scikit-learn compatible selector estimators.

Each estimator wraps one screening procedure behind the usual
``fit(X, y)`` / ``transform(X)`` / ``get_support()`` surface so the
screens compose with pipelines and model selection.  The survival
target ``y`` bundles observed time and censoring status; see
:func:`split_survival_y` for the accepted layouts.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.feature_selection import SelectorMixin
from sklearn.utils.validation import check_is_fitted

from .data import validate_dataset
from .iterative import default_stage_plan, mdr_is
from .index import mdr_index_all
from .ranking import auto_budget, select_threshold, select_top
from .slicing import partition_slices
from .stability import StabilityConfig, mdr_ss

_TIME_FIELDS = ("time", "observed_time", "t")
_STATUS_FIELDS = ("status", "event", "delta")


def split_survival_y(y):
    """Split a survival target into (time, status) arrays.

    Accepts a (time, status) tuple/list, an (n, 2) array with columns
    [time, status], a structured array with recognizable field names,
    or a mapping / DataFrame with such keys.
    """
    if isinstance(y, (tuple, list)) and len(y) == 2:
        return np.asarray(y[0], dtype=np.float64), np.asarray(y[1])
    if hasattr(y, "dtype") and getattr(y.dtype, "names", None):
        names = {n.lower(): n for n in y.dtype.names}
        time_key = next((names[f] for f in _TIME_FIELDS if f in names), None)
        status_key = next((names[f] for f in _STATUS_FIELDS if f in names), None)
        if time_key is None or status_key is None:
            raise ValueError(f"structured y must carry time and status fields, got {y.dtype.names}")
        return np.asarray(y[time_key], dtype=np.float64), np.asarray(y[status_key])
    if hasattr(y, "keys"):
        keys = {str(k).lower(): k for k in y.keys()}
        time_key = next((keys[f] for f in _TIME_FIELDS if f in keys), None)
        status_key = next((keys[f] for f in _STATUS_FIELDS if f in keys), None)
        if time_key is None or status_key is None:
            raise ValueError(f"mapping y must carry time and status keys, got {list(y.keys())}")
        return np.asarray(y[time_key], dtype=np.float64), np.asarray(y[status_key])
    arr = np.asarray(y)
    if arr.ndim == 2 and arr.shape[1] == 2:
        return arr[:, 0].astype(np.float64), arr[:, 1]
    raise ValueError(
        "y must be (time, status), an (n, 2) array, a structured array, or a mapping"
    )


class _BaseMDRSelector(SelectorMixin, BaseEstimator):
    """Shared fit plumbing: validate inputs, run a screen, keep a support mask."""

    def _screen(self, data):
        raise NotImplementedError

    def fit(self, X, y):
        time, status = split_survival_y(y)
        data = validate_dataset(X, time, status)
        self.n_features_in_ = data.p
        result = self._screen(data)
        self.result_ = result
        self.selected_ids_ = np.asarray(result.selected, dtype=np.int64)
        mask = np.zeros(data.p, dtype=bool)
        mask[self.selected_ids_ - 1] = True
        self.support_ = mask
        return self

    def _get_support_mask(self):
        check_is_fitted(self, "support_")
        return self.support_

    def __sklearn_tags__(self):
        tags = super().__sklearn_tags__()
        tags.target_tags.required = True
        return tags


class MDRScreen(_BaseMDRSelector):
    """Marginal screening (MDR-SIS): rank covariates by the marginal index.

    Parameters
    ----------
    n_keep : int, "auto", or None
        Number of covariates to keep; "auto" uses floor(n / ln n).
        Set to None to select by ``threshold`` instead.
    threshold : float or None
        Keep every covariate whose index is at least this value
        (used only when ``n_keep`` is None).
    slices_event, slices_censored : int or None
        Slice counts for the two status groups; None picks defaults.

    Attributes
    ----------
    index_values_ : (p,) array of marginal index values
    selected_ids_ : selected covariate ids, 1-based, ranked
    result_ : the full ScreeningResult
    """

    def __init__(self, n_keep="auto", threshold=None, slices_event=None, slices_censored=None):
        self.n_keep = n_keep
        self.threshold = threshold
        self.slices_event = slices_event
        self.slices_censored = slices_censored

    def _screen(self, data):
        partition = partition_slices(data, self.slices_event, self.slices_censored)
        indices = mdr_index_all(data, partition)
        self.index_values_ = indices.values.copy()
        if self.n_keep is None:
            if self.threshold is None:
                raise ValueError("set n_keep or threshold")
            return select_threshold(indices, self.threshold)
        d = auto_budget(data.n, data.p) if self.n_keep == "auto" else int(self.n_keep)
        return select_top(indices, d)


class IterativeMDRScreen(_BaseMDRSelector):
    """Iterative screening (MDR-IS): stage-wise selection with residualization.

    Parameters
    ----------
    stage_sizes : sequence of int or "auto"
        Covariates to add per stage.  "auto" splits the total budget
        into two nearly equal stages.
    n_keep : int or "auto"
        Total budget when ``stage_sizes`` is "auto".
    """

    def __init__(self, stage_sizes="auto", n_keep="auto", slices_event=None, slices_censored=None):
        self.stage_sizes = stage_sizes
        self.n_keep = n_keep
        self.slices_event = slices_event
        self.slices_censored = slices_censored

    def _screen(self, data):
        partition = partition_slices(data, self.slices_event, self.slices_censored)
        if self.stage_sizes == "auto":
            budget = auto_budget(data.n, data.p) if self.n_keep == "auto" else int(self.n_keep)
            sizes = default_stage_plan(budget)
        else:
            sizes = tuple(int(s) for s in self.stage_sizes)
        result = mdr_is(data, partition, sizes)
        self.index_values_ = result.indices.values.copy()
        self.stage_members_ = result.stage_members
        return result


class StabilityMDRScreen(_BaseMDRSelector):
    """Stability screening (MDR-SS): frequency-thresholded iterative screens.

    Parameters
    ----------
    n_subsamples : int
        Number of subsamples drawn without replacement.
    subsample_size : int or None
        Rows per subsample; None uses floor(4n/5).
    pi0 : float
        Selection-frequency threshold in (0, 1].
    stage_sizes : sequence of int or None
        Per-subsample iteration plan; None scales the default plan to
        the subsample budget.
    random_state : int
        Seed for the per-subsample RNG streams.
    n_jobs : int
        Parallel workers for the subsample loop (results do not depend
        on this).
    """

    def __init__(
        self,
        n_subsamples=100,
        subsample_size=None,
        pi0=0.3,
        stage_sizes=None,
        slices_event=None,
        slices_censored=None,
        random_state=0,
        n_jobs=1,
    ):
        self.n_subsamples = n_subsamples
        self.subsample_size = subsample_size
        self.pi0 = pi0
        self.stage_sizes = stage_sizes
        self.slices_event = slices_event
        self.slices_censored = slices_censored
        self.random_state = random_state
        self.n_jobs = n_jobs

    def _screen(self, data):
        config = StabilityConfig(
            b=self.n_subsamples,
            n_s=self.subsample_size,
            pi0=self.pi0,
            stage_sizes=self.stage_sizes,
            seed=self.random_state,
            slices_event=self.slices_event,
            slices_censored=self.slices_censored,
        )
        result = mdr_ss(data, config, n_jobs=self.n_jobs)
        self.frequencies_ = result.frequencies.copy()
        return result
