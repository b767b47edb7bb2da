"""Two-group discretization of observed time.

Observed times are sliced into equal-frequency intervals separately
within the event group (status 1) and the censored group (status 0).
Every downstream index is a function of the resulting slice membership
and slice probabilities only, so slicing depends only on within-group
time ranks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import SurvivalDataset, _readonly
from .errors import DegenerateTimesError, GroupTooSmallError

DEFAULT_SLICES = 5


@dataclass(frozen=True)
class SlicePartition:
    """Slice membership for one dataset.

    ``slice_keys[s]`` is the ``(l, j)`` label of flat slice ``s`` with
    ``l`` the status group and ``j`` the 1-based interval number within
    the group; censored slices come first, then event slices.
    ``labels[i]`` is the flat slice index of observation ``i``.
    ``boundaries_*`` hold the interior empirical-quantile cut points,
    kept for reporting; membership is assigned by rank, not by cut value.
    """

    slice_keys: tuple
    labels: np.ndarray  # (n,) intp
    counts: np.ndarray  # (n_slices,) int64
    probs: np.ndarray  # (n_slices,) float64, counts / n
    boundaries_event: np.ndarray
    boundaries_censored: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "slice_keys", tuple((int(l), int(j)) for l, j in self.slice_keys))
        for name in ("labels", "counts", "probs", "boundaries_event", "boundaries_censored"):
            object.__setattr__(self, name, _readonly(getattr(self, name)))
        if (self.counts < 1).any():
            raise ValueError("every slice must be non-empty")
        if self.counts.sum() != len(self.labels):
            raise ValueError("slice counts must sum to n")

    @property
    def n(self):
        return len(self.labels)

    @property
    def n_slices(self):
        return len(self.slice_keys)


def default_slice_count(group_size):
    """Default number of slices for a status group of the given size.

    Five slices whenever the group is large enough for each slice to hold
    at least two observations; for smaller groups fall back to
    ``max(1, group_size // 2)`` so slices keep ~2 members.
    """
    if group_size >= 2 * DEFAULT_SLICES:
        return DEFAULT_SLICES
    return max(1, group_size // 2)


def _group_targets(m, h):
    # Equal-frequency targets: first (m mod h) slices take the extra observation.
    base, extra = divmod(m, h)
    return [base + (1 if j < extra else 0) for j in range(h)]


def partition_slices(data: SurvivalDataset, h_event=None, h_censored=None):
    """Equal-frequency slicing of observed times within each status group.

    Interior cut points sit at the j/H_l empirical quantiles of the
    group's times.  Tied times at a boundary fill the lower slice up to
    its target count first (stable in observation order), so the
    partition is deterministic.

    Parameters
    ----------
    data : SurvivalDataset
    h_event, h_censored : int or None
        Slice counts for the event / censored group.  ``None`` picks
        :func:`default_slice_count` for that group.

    Raises
    ------
    GroupTooSmallError
        if a group has fewer observations than its slice count.
    DegenerateTimesError
        if a group's times are all identical but >= 2 slices were requested.
    """
    status = data.status
    times = data.observed_time
    n = data.n

    sizes = {l: int((status == l).sum()) for l in (0, 1)}
    if h_event is None:
        # Auto mode clamps the event group to >= 2 slices whenever it can hold them.
        h_event = max(2, default_slice_count(sizes[1])) if sizes[1] >= 2 else 1
    else:
        h_event = int(h_event)
        if h_event < 2:
            raise ValueError("h_event must be >= 2")
    if h_censored is None:
        h_censored = default_slice_count(sizes[0])
    else:
        h_censored = int(h_censored)
        if h_censored < 1:
            raise ValueError("h_censored must be >= 1")

    h_by_group = {0: h_censored, 1: h_event}
    labels = np.empty(n, dtype=np.intp)
    slice_keys = []
    counts = []
    boundaries = {}

    flat = 0
    for l in (0, 1):
        h = h_by_group[l]
        members = np.nonzero(status == l)[0]
        m = len(members)
        if m < h:
            raise GroupTooSmallError(
                f"status-{l} group has {m} observations, fewer than {h} requested slices"
            )
        group_times = times[members]
        if h >= 2 and np.min(group_times) == np.max(group_times):
            raise DegenerateTimesError(
                f"status-{l} group times are all identical; cannot form {h} slices"
            )
        order = np.argsort(group_times, kind="stable")
        targets = _group_targets(m, h)
        start = 0
        for j, size in enumerate(targets, start=1):
            rows = members[order[start : start + size]]
            labels[rows] = flat
            slice_keys.append((l, j))
            counts.append(size)
            start += size
            flat += 1
        boundaries[l] = np.quantile(group_times, [j / h for j in range(1, h)]) if h > 1 else np.empty(0)

    counts = np.asarray(counts, dtype=np.int64)
    return SlicePartition(
        slice_keys=tuple(slice_keys),
        labels=labels,
        counts=counts,
        probs=counts / n,
        boundaries_event=boundaries[1],
        boundaries_censored=boundaries[0],
    )


def slice_indicator_matrix(partition: SlicePartition):
    """n x n_slices one-hot membership matrix (float64, for matrix products).

    Each row sums to 1; column sums equal the slice counts.
    """
    ind = np.zeros((partition.n, partition.n_slices))
    ind[np.arange(partition.n), partition.labels] = 1.0
    return ind
