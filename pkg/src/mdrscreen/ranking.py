"""Turning an index vector into a selected covariate set.

Selection is either by threshold (keep everything scoring at least
gamma) or by rank (keep exactly the d best).  Rank selection returns
exactly d covariates with a deterministic tie-break -- ascending
covariate id at the boundary -- because the iterative procedure's stage
bookkeeping requires exact sizes.
"""

from __future__ import annotations

import math

import numpy as np

from .data import IndexVector, ScreeningResult
from .errors import DTooLargeError


def _ranked_order(indices: IndexVector):
    # Descending by value, ties by ascending covariate id.
    return np.lexsort((indices.covariate_ids, -indices.values))


def select_threshold(indices: IndexVector, gamma, config_echo=None):
    """Select every covariate whose index is at least ``gamma`` (>= 0)."""
    gamma = float(gamma)
    if gamma < 0:
        raise ValueError("gamma must be nonnegative")
    order = _ranked_order(indices)
    keep = order[indices.values[order] >= gamma]
    echo = dict(config_echo or {})
    echo.setdefault("rule", {"threshold": gamma})
    return ScreeningResult(
        selected=tuple(int(k) for k in indices.covariate_ids[keep]),
        indices=indices,
        method="MDR-SIS",
        config_echo=echo,
    )


def select_top(indices: IndexVector, d, config_echo=None):
    """Select exactly the ``d`` largest-index covariates.

    Boundary ties are broken by ascending covariate id so the output is
    deterministic; a tie at the cut is recorded in the result warnings.
    """
    d = int(d)
    if d < 1:
        raise ValueError("d must be >= 1")
    if d > len(indices):
        raise DTooLargeError(f"requested {d} covariates from {len(indices)} candidates")
    order = _ranked_order(indices)
    keep = order[:d]
    warns = ()
    if d < len(indices) and indices.values[order[d - 1]] == indices.values[order[d]]:
        warns = ("tie at selection boundary broken by ascending covariate id",)
    echo = dict(config_echo or {})
    echo.setdefault("rule", {"top": d})
    return ScreeningResult(
        selected=tuple(int(k) for k in indices.covariate_ids[keep]),
        indices=indices,
        method="MDR-SIS",
        config_echo=echo,
        warnings=warns,
    )


def default_dn(n):
    """Screening budget floor(n / ln n) (natural log); requires n >= 3."""
    n = int(n)
    if n < 3:
        raise ValueError("n must be >= 3")
    return int(math.floor(n / math.log(n)))


def auto_budget(n, p):
    """Default budget capped at the number of covariates."""
    return min(default_dn(n), int(p))
