"""Core data model: validated survival datasets, index vectors, screening results.

All containers are frozen dataclasses holding read-only numpy arrays, so
they are safe to share across parallel workers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ALL_ONE_STATUS,
    DIMENSION_MISMATCH,
    ILLEGAL_STATUS,
    NON_FINITE_VALUE,
    ValidationError,
    Violation,
)


def _readonly(a):
    out = np.array(a, copy=True)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class SurvivalDataset:
    """n observations of (covariate row, observed time, censoring status).

    ``status`` is 1 where the event time was observed and 0 where the
    observation is censored.  Construct through :func:`validate_dataset`;
    the constructor itself trusts its inputs.
    """

    covariates: np.ndarray  # (n, p) float64, read-only
    observed_time: np.ndarray  # (n,) float64
    status: np.ndarray  # (n,) uint8

    @property
    def n(self):
        return self.covariates.shape[0]

    @property
    def p(self):
        return self.covariates.shape[1]

    def take(self, rows):
        """Row subset as a new dataset (no revalidation; rows must be valid indices)."""
        rows = np.asarray(rows, dtype=np.intp)
        return SurvivalDataset(
            _readonly(self.covariates[rows]),
            _readonly(self.observed_time[rows]),
            _readonly(self.status[rows]),
        )


def validate_dataset(covariates, observed_time, status):
    """Validate raw arrays and assemble a :class:`SurvivalDataset`.

    Collects *every* violation before raising, so a caller sees all
    problems at once.  Never mutates its arguments.

    Raises
    ------
    ValidationError
        with violation codes among ``dimension_mismatch``,
        ``non_finite_value``, ``illegal_status``, ``all_one_status``.
    """
    x = np.asarray(covariates, dtype=np.float64)
    t = np.asarray(observed_time, dtype=np.float64)
    d = np.asarray(status)

    violations = []
    if x.ndim != 2 or x.shape[0] == 0:
        violations.append(
            Violation(DIMENSION_MISMATCH, f"covariates must be a non-empty 2-d matrix, got shape {x.shape}")
        )
        raise ValidationError(violations)
    n = x.shape[0]
    if t.ndim != 1 or t.shape[0] != n:
        violations.append(
            Violation(
                DIMENSION_MISMATCH,
                f"observed_time has shape {t.shape}, expected ({n},)",
            )
        )
    if d.ndim != 1 or d.shape[0] != n:
        violations.append(
            Violation(DIMENSION_MISMATCH, f"status has shape {d.shape}, expected ({n},)")
        )
    if violations:
        raise ValidationError(violations)

    bad = ~np.isfinite(x)
    if bad.any():
        for i, j in zip(*np.nonzero(bad)):
            violations.append(
                Violation(NON_FINITE_VALUE, "non-finite covariate entry", (int(i), int(j)))
            )
    bad_t = ~np.isfinite(t)
    if bad_t.any():
        for i in np.nonzero(bad_t)[0]:
            violations.append(Violation(NON_FINITE_VALUE, "non-finite observed time", (int(i),)))

    try:
        d_float = np.asarray(d, dtype=np.float64)
    except (TypeError, ValueError):
        d_float = None
        for i, v in enumerate(np.asarray(d, dtype=object)):
            try:
                float(v)
            except (TypeError, ValueError):
                violations.append(
                    Violation(ILLEGAL_STATUS, f"status must be 0 or 1, got {v!r}", (int(i),))
                )
    if d_float is not None:
        legal = (d_float == 0) | (d_float == 1)
        if not legal.all():
            for i in np.nonzero(~legal)[0]:
                violations.append(
                    Violation(ILLEGAL_STATUS, f"status must be 0 or 1, got {d_float[i]!r}", (int(i),))
                )
        elif d_float.min() == d_float.max():
            violations.append(
                Violation(
                    ALL_ONE_STATUS,
                    f"all observations have status {int(d_float[0])}; "
                    "both event and censored observations are required",
                )
            )

    if violations:
        raise ValidationError(violations)

    return SurvivalDataset(_readonly(x), _readonly(t), _readonly(d_float.astype(np.uint8)))


@dataclass(frozen=True)
class IndexVector:
    """Per-covariate screening index values with their 1-based covariate ids.

    ``degenerate_ids`` lists covariates that were scored 0 because their
    column was constant (kept in the batch, flagged for the caller).
    """

    values: np.ndarray
    covariate_ids: np.ndarray
    degenerate_ids: tuple = ()

    def __post_init__(self):
        values = _readonly(np.asarray(self.values, dtype=np.float64))
        ids = _readonly(np.asarray(self.covariate_ids, dtype=np.int64))
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "covariate_ids", ids)
        object.__setattr__(self, "degenerate_ids", tuple(int(i) for i in self.degenerate_ids))
        if values.shape != ids.shape or values.ndim != 1:
            raise ValueError("values and covariate_ids must be 1-d of equal length")
        if len(np.unique(ids)) != len(ids):
            raise ValueError("covariate_ids must be distinct")
        if not np.all(np.isfinite(values)) or (values < 0).any():
            raise ValueError("index values must be finite and nonnegative")

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class ScreeningResult:
    """Outcome of a screening run: an ordered selected set plus provenance.

    ``selected`` is ordered by the method's ranking quantity (index value
    or selection frequency), descending, ties broken by ascending id.
    ``stage_sizes``/``stage_members`` are populated for MDR-IS,
    ``frequencies`` for MDR-SS (aligned with ``indices.covariate_ids``).
    """

    selected: tuple
    indices: IndexVector
    method: str  # "MDR-SIS" | "MDR-IS" | "MDR-SS"
    config_echo: dict = field(default_factory=dict)
    stage_sizes: tuple | None = None
    stage_members: tuple | None = None
    frequencies: np.ndarray | None = None
    warnings: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "selected", tuple(int(k) for k in self.selected))
        if self.stage_sizes is not None:
            object.__setattr__(self, "stage_sizes", tuple(int(s) for s in self.stage_sizes))
        if self.stage_members is not None:
            object.__setattr__(
                self, "stage_members", tuple(tuple(int(k) for k in st) for st in self.stage_members)
            )
        if self.frequencies is not None:
            f = _readonly(np.asarray(self.frequencies, dtype=np.float64))
            object.__setattr__(self, "frequencies", f)
            if f.min() < 0 or f.max() > 1:
                raise ValueError("selection frequencies must lie in [0, 1]")
        if len(set(self.selected)) != len(self.selected):
            raise ValueError("selected ids must be distinct")
        scanned = set(int(i) for i in self.indices.covariate_ids)
        if not set(self.selected) <= scanned:
            raise ValueError("selected ids must appear among scanned candidates")
