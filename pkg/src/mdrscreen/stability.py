"""Stability screening: aggregate the iterative screen over many subsamples.

Each of ``b`` subsamples (drawn without replacement) gets its own slice
partition and iterative run; a covariate is kept when its selection
frequency across subsamples reaches the threshold ``pi0``.  Subsample
RNG streams are keyed by (seed material, subsample index), so results
are identical under any parallel schedule.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from joblib import Parallel, delayed

from .data import IndexVector, ScreeningResult, SurvivalDataset
from .errors import MdrError, SubsampleDegenerateError, TooManyFailuresError
from .iterative import default_stage_plan, mdr_is
from .ranking import auto_budget
from .slicing import partition_slices

MAX_REDRAWS = 100
MAX_FAILURE_FRACTION = 0.1


@dataclass(frozen=True)
class StabilityConfig:
    """Parameters of a stability-screening run.

    ``n_s`` defaults to floor(4n/5) at run time; ``stage_sizes`` default
    to the two-stage plan for the subsample budget floor(n_s / ln n_s).
    ``seed`` may be an int or a tuple of ints (key material for the
    per-subsample RNG streams).
    """

    b: int = 100
    n_s: int | None = None
    pi0: float = 0.3
    stage_sizes: tuple | None = None
    seed: int | tuple = 0
    slices_event: int | None = None
    slices_censored: int | None = None

    def __post_init__(self):
        if self.b < 1:
            raise ValueError("b must be >= 1")
        if not 0.0 < self.pi0 <= 1.0:
            raise ValueError("pi0 must lie in (0, 1]")
        if self.n_s is not None and self.n_s < 1:
            raise ValueError("n_s must be >= 1")
        if self.stage_sizes is not None:
            object.__setattr__(self, "stage_sizes", tuple(int(s) for s in self.stage_sizes))
        seed = self.seed if isinstance(self.seed, tuple) else (int(self.seed),)
        object.__setattr__(self, "seed", tuple(int(s) for s in seed))


def subsample_without_replacement(data: SurvivalDataset, n_s, rng):
    """Uniform subsample of ``n_s`` distinct rows containing both statuses.

    Redraws up to MAX_REDRAWS times when a draw misses one status group.
    """
    n_s = int(n_s)
    if not 1 <= n_s < data.n:
        raise ValueError(f"n_s must satisfy 1 <= n_s < n, got {n_s} with n = {data.n}")
    for _ in range(MAX_REDRAWS):
        rows = rng.choice(data.n, size=n_s, replace=False)
        sub = data.take(np.sort(rows))
        if sub.status.min() != sub.status.max():
            return sub
    raise SubsampleDegenerateError(
        f"could not draw a subsample of size {n_s} containing both statuses "
        f"in {MAX_REDRAWS} attempts"
    )


def _one_run(data, config: StabilityConfig, i, n_s, stage_sizes):
    rng = np.random.default_rng(config.seed + (i,))
    try:
        sub = subsample_without_replacement(data, n_s, rng)
        partition = partition_slices(sub, config.slices_event, config.slices_censored)
        result = mdr_is(sub, partition, stage_sizes)
        return ("ok", result.selected)
    except MdrError as exc:
        return ("fail", f"subsample {i}: {exc}")


def mdr_ss(data: SurvivalDataset, config: StabilityConfig, n_jobs=1):
    """Stability screening over ``config.b`` subsamples.

    Selection frequency pi_k is the fraction of completed subsample runs
    selecting covariate k; the result keeps every covariate with
    pi_k >= pi0, ordered by descending frequency then ascending id.
    Individual subsample failures become warnings; more than 10%
    failures abort the run.
    """
    n_s = config.n_s if config.n_s is not None else (4 * data.n) // 5
    if not 1 <= n_s < data.n:
        raise ValueError(f"subsample size {n_s} must satisfy 1 <= n_s < n = {data.n}")
    stage_sizes = (
        config.stage_sizes
        if config.stage_sizes is not None
        else default_stage_plan(auto_budget(n_s, data.p))
    )

    outcomes = Parallel(n_jobs=n_jobs)(
        delayed(_one_run)(data, config, i, n_s, stage_sizes) for i in range(config.b)
    )

    counts = np.zeros(data.p, dtype=np.int64)
    failures = []
    n_ok = 0
    for kind, payload in outcomes:
        if kind == "ok":
            n_ok += 1
            counts[np.asarray(payload, dtype=np.int64) - 1] += 1
        else:
            failures.append(payload)
    if len(failures) > MAX_FAILURE_FRACTION * config.b or n_ok == 0:
        raise TooManyFailuresError(
            f"{len(failures)} of {config.b} subsample runs failed: {failures[:3]}"
        )

    pi = counts / n_ok
    ids = np.arange(1, data.p + 1)
    order = np.lexsort((ids, -pi))
    keep = order[pi[order] >= config.pi0]

    echo = {
        "b": config.b,
        "n_s": int(n_s),
        "pi0": config.pi0,
        "stage_sizes": list(stage_sizes),
        "seed": list(config.seed),
        "slices_event": config.slices_event,
        "slices_censored": config.slices_censored,
        "completed_runs": n_ok,
    }
    return ScreeningResult(
        selected=tuple(int(k) for k in ids[keep]),
        indices=IndexVector(values=pi, covariate_ids=ids),
        method="MDR-SS",
        config_echo=echo,
        frequencies=pi,
        warnings=tuple(failures),
    )
