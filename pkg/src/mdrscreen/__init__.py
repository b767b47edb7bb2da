"""Model-free variable screening for right-censored survival data.

Screens ultrahigh-dimensional covariates against an observed
(time, censoring indicator) pair using a slice-based second-moment
index, with marginal (MDR-SIS), iterative (MDR-IS), and stability
(MDR-SS) selection procedures, a Monte Carlo benchmark harness, and
scikit-learn compatible selector estimators.
"""

from .data import IndexVector, ScreeningResult, SurvivalDataset, validate_dataset
from .errors import (
    DegenerateResidualError,
    DegenerateTimesError,
    DTooLargeError,
    GroupTooSmallError,
    MdrError,
    NotEnoughCandidatesError,
    SubsampleDegenerateError,
    TooManyFailuresError,
    ValidationError,
    ZeroVarianceError,
)
from .estimators import IterativeMDRScreen, MDRScreen, StabilityMDRScreen
from .index import (
    SliceMoments,
    StandardizedColumn,
    mdr_index,
    mdr_index_all,
    mdr_index_bruteforce,
    slice_moments,
    standardize,
)
from .iterative import (
    ResidualParams,
    conditional_index,
    conditional_index_batch,
    default_stage_plan,
    mdr_is,
    residual_params,
)
from .io import load_csv, read_result, write_result
from .ranking import auto_budget, default_dn, select_threshold, select_top
from .simulation import (
    ProportionReport,
    SimulationSpec,
    censoring_times,
    gen_covariates,
    gen_response,
    run_experiment,
    truth_ids,
)
from .slicing import SlicePartition, partition_slices, slice_indicator_matrix
from .stability import StabilityConfig, mdr_ss, subsample_without_replacement

__version__ = "0.1.0"

__all__ = [
    "IndexVector",
    "IterativeMDRScreen",
    "MDRScreen",
    "MdrError",
    "ProportionReport",
    "ResidualParams",
    "ScreeningResult",
    "SimulationSpec",
    "SliceMoments",
    "SlicePartition",
    "StabilityConfig",
    "StabilityMDRScreen",
    "StandardizedColumn",
    "SurvivalDataset",
    "ValidationError",
    "ZeroVarianceError",
    "GroupTooSmallError",
    "DegenerateTimesError",
    "DegenerateResidualError",
    "NotEnoughCandidatesError",
    "SubsampleDegenerateError",
    "TooManyFailuresError",
    "DTooLargeError",
    "auto_budget",
    "censoring_times",
    "conditional_index",
    "conditional_index_batch",
    "default_dn",
    "default_stage_plan",
    "gen_covariates",
    "gen_response",
    "load_csv",
    "mdr_index",
    "mdr_index_all",
    "mdr_index_bruteforce",
    "mdr_is",
    "mdr_ss",
    "partition_slices",
    "read_result",
    "residual_params",
    "run_experiment",
    "select_threshold",
    "select_top",
    "slice_indicator_matrix",
    "slice_moments",
    "standardize",
    "subsample_without_replacement",
    "truth_ids",
    "validate_dataset",
    "write_result",
]
