"""Exception hierarchy for mdrscreen.

Every library error derives from :class:`MdrError` so callers (in
particular the stability subsampling loop and the CLI) can catch the
whole family without swallowing unrelated bugs.
"""

from __future__ import annotations

from dataclasses import dataclass


class MdrError(Exception):
    """Base class for all mdrscreen errors."""


@dataclass(frozen=True)
class Violation:
    """One validation failure: a machine-readable code plus location info."""

    code: str
    message: str
    location: tuple = ()

    def __str__(self):
        if self.location:
            return f"{self.code} at {self.location}: {self.message}"
        return f"{self.code}: {self.message}"


class ValidationError(MdrError, ValueError):
    """Input data failed validation; carries every violation found."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))

    @property
    def codes(self):
        return {v.code for v in self.violations}


# Violation codes used by validate_dataset / load_csv.
DIMENSION_MISMATCH = "dimension_mismatch"
NON_FINITE_VALUE = "non_finite_value"
ILLEGAL_STATUS = "illegal_status"
ALL_ONE_STATUS = "all_one_status"


class ZeroVarianceError(MdrError, ValueError):
    """A covariate column is constant and cannot be standardized."""


class GroupTooSmallError(MdrError, ValueError):
    """A status group has fewer observations than its requested slice count."""


class DegenerateTimesError(MdrError, ValueError):
    """All observed times in a status group are identical; cannot form >= 2 slices."""


class DegenerateResidualError(MdrError, ValueError):
    """Candidate covariate is numerically a linear combination of the conditioning set."""


class NotEnoughCandidatesError(MdrError, RuntimeError):
    """Too few usable candidates remain to fill an iteration stage."""


class DTooLargeError(MdrError, ValueError):
    """Requested rank-selection size exceeds the number of scanned covariates."""


class SubsampleDegenerateError(MdrError, RuntimeError):
    """Could not draw a subsample containing both status groups."""


class TooManyFailuresError(MdrError, RuntimeError):
    """More than the tolerated fraction of subsamples or replications failed."""
