"""Monte Carlo harness: five benchmark survival models and selection-proportion runs.

Covariates are multivariate normal with AR(1) correlation rho^|i-j|.
Each model defines a lifetime T as a nonlinear function of a few sparse
linear combinations of the covariates plus N(0,1) noise scaled by 0.2,
and an independent censoring time C; only (min(T, C), indicator) is
passed to the screening methods.  Experiments report the proportion of
replications in which each relevant covariate (and all of them jointly)
survived the screen.
"""

from __future__ import annotations

import time as _time
from dataclasses import asdict, dataclass, field

import numpy as np
from joblib import Parallel, delayed

from .data import validate_dataset
from .errors import MdrError, TooManyFailuresError
from .index import mdr_index_all
from .iterative import default_stage_plan, mdr_is
from .ranking import auto_budget, select_top
from .slicing import partition_slices
from .stability import StabilityConfig, mdr_ss

MODELS = ("M1", "M2", "M3", "M4", "M5")

# How to read the scale argument b of a normal component N(a, b) in the
# censoring definitions: "variance" (default) or "sd".
CENSOR_SCALE_INTERPRETATIONS = ("variance", "sd")

_BETA_12 = ((1, 0, 1, 0, 0, 0), (0, 0, 0, 0, 1, 1))

# Censoring components per model: (coeff, mean, b) terms summed as
# coeff * (mean + scale * Z) with independent Z; M5 censors through the
# covariates instead.
_CENSOR_COMPONENTS = {
    "M1": ((1.0, 0.0, 4.0), (-1.0, 5.0, 1.0), (1.0, 15.0, 1.0)),
    "M2": ((1.0, 0.0, 4.0), (-1.0, 5.0, 1.0), (1.0, 30.0, 1.0)),
    "M3": ((1.0, 0.0, 4.0), (-1.0, 5.0, 1.0), (1.0, 15.0, 1.0)),
    "M4": ((1.0, 0.0, 4.0), (-1.0, 5.0, 1.0), (4.0, 30.0, 1.0)),
}

_TRUTH = {
    "M1": (1, 3, 5, 6),
    "M2": (1, 3, 5, 6),
    "M3": (1, 3, 5, 6),
    "M4": (1, 2, 3, 5),
    "M5": (1, 2, 3, 6),
}


def truth_ids(model):
    """Ground-truth relevant covariate ids (1-based) for a benchmark model."""
    if model not in _TRUTH:
        raise ValueError(f"unknown model {model!r}")
    return _TRUTH[model]


def gen_covariates(n, p, rho, rng):
    """n draws from N(0, Sigma) with Sigma_ij = rho^|i-j|, via the AR(1) recursion.

    x_1 = eps_1 and x_j = rho * x_{j-1} + sqrt(1 - rho^2) * eps_j give
    exactly this covariance in O(np) without forming Sigma.
    """
    if not 0.0 <= rho < 1.0:
        raise ValueError("rho must lie in [0, 1)")
    eps = rng.standard_normal((n, p))
    if rho == 0.0:
        return eps
    x = np.empty((n, p))
    x[:, 0] = eps[:, 0]
    scale = np.sqrt(1.0 - rho * rho)
    for j in range(1, p):
        x[:, j] = rho * x[:, j - 1] + scale * eps[:, j]
    return x


def _component_scale(b, interpretation):
    if interpretation == "variance":
        return np.sqrt(b)
    if interpretation == "sd":
        return float(b)
    raise ValueError(f"censor scale interpretation must be one of {CENSOR_SCALE_INTERPRETATIONS}")


def censoring_times(model, n, rng, interpretation="variance", collapse=True):
    """Censoring draw for models M1-M4.

    ``collapse=True`` samples the analytically collapsed single normal;
    ``collapse=False`` sums independent component draws (same law, used
    to property-test the collapse).
    """
    comps = _CENSOR_COMPONENTS[model]
    if collapse:
        mean = sum(c * a for c, a, _ in comps)
        var = sum((c * _component_scale(b, interpretation)) ** 2 for c, _, b in comps)
        return mean + np.sqrt(var) * rng.standard_normal(n)
    total = np.zeros(n)
    for c, a, b in comps:
        total += c * (a + _component_scale(b, interpretation) * rng.standard_normal(n))
    return total


def _sparse_beta(p, first_six):
    b = np.zeros(p)
    b[:6] = first_six
    return b


def gen_response(model, x, rng, censor_scale="variance"):
    """Lifetime, censoring time, observed time, and status for one model.

    Draw order is fixed (noise first, then censoring) so a given rng
    state reproduces the same data.  Returns (t_true, c, t_obs, status).
    """
    n, p = x.shape
    if p < 6:
        raise ValueError("models require p >= 6")
    eps = rng.standard_normal(n)

    if model in ("M1", "M2", "M3"):
        b1 = _sparse_beta(p, _BETA_12[0])
        b2 = _sparse_beta(p, _BETA_12[1])
        xb1 = x @ b1
        xb2 = x @ b2
        if model == "M1":
            t = (2.0 * xb1) ** 2 + 12.0 * np.sin(3.0 * xb2 / 7.0) + 0.2 * eps
        elif model == "M2":
            t = (2.0 * xb1) ** 2 + np.abs(8.0 * xb2) + 0.2 * eps
        else:
            t = 10.0 * np.sin(xb1 / 4.0) + 4.0 * np.abs(xb2) + 0.2 * eps
        c = censoring_times(model, n, rng, censor_scale)
    elif model == "M4":
        b1 = _sparse_beta(p, (-4, 4, 3, 0, 0, 0))
        b2 = _sparse_beta(p, (0, 0, 1, 0, 1, 0))
        t = np.exp(x @ b1) + np.abs((x @ b2) ** 3) + 0.2 * eps
        c = censoring_times(model, n, rng, censor_scale)
    elif model == "M5":
        b1 = _sparse_beta(p, (1, 0, 0, 0, 0, 0))
        b2 = _sparse_beta(p, (1, 2, 2, 0, 0, 0))
        b3 = _sparse_beta(p, (0, 0, 1, 0, 0, 1))
        t = 1.5 * (x @ b1) ** 2 + np.exp(x @ b2) + 0.2 * eps
        c = x @ b3 + 8.0
    else:
        raise ValueError(f"unknown model {model!r}")

    status = (t <= c).astype(np.uint8)
    t_obs = np.minimum(t, c)
    return t, c, t_obs, status


@dataclass(frozen=True)
class SimulationSpec:
    """Full configuration of one Monte Carlo experiment."""

    model: str
    n: int
    p: int
    rho: float
    replications: int
    seed: int
    method: str = "mdr-sis"  # mdr-sis | mdr-is | mdr-ss
    top: int | None = None  # rank budget; None -> floor(n / ln n)
    stage_sizes: tuple | None = None  # mdr-is plan; None -> two equal stages
    slices_event: int | None = None
    slices_censored: int | None = None
    stability_b: int = 100
    stability_ns: int | None = None
    pi0: float = 0.3
    censor_scale: str = "variance"

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}")
        if self.p < 6:
            raise ValueError("p must be >= 6")
        if not 0.0 <= self.rho < 1.0:
            raise ValueError("rho must lie in [0, 1)")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if self.method not in ("mdr-sis", "mdr-is", "mdr-ss"):
            raise ValueError("method must be mdr-sis, mdr-is, or mdr-ss")
        if self.censor_scale not in CENSOR_SCALE_INTERPRETATIONS:
            raise ValueError(f"censor_scale must be one of {CENSOR_SCALE_INTERPRETATIONS}")
        if self.stage_sizes is not None:
            object.__setattr__(self, "stage_sizes", tuple(int(s) for s in self.stage_sizes))


@dataclass(frozen=True)
class ProportionReport:
    """Selection proportions over replications, plus run provenance.

    ``mean_rep_seconds`` is measured wall clock and is excluded from the
    deterministic serialized payload (see io.write_result).
    """

    spec: SimulationSpec
    truth_ids: tuple
    proportions: dict
    all_proportion: float
    replications_completed: int
    failures: tuple
    size_median: float
    size_iqr: float
    mean_rep_seconds: float = field(compare=False, default=0.0)

    def config_echo(self):
        return asdict(self.spec)


def _screen_once(spec: SimulationSpec, rep):
    rng = np.random.default_rng((spec.seed, rep))
    x = gen_covariates(spec.n, spec.p, spec.rho, rng)
    _, _, t_obs, status = gen_response(spec.model, x, rng, spec.censor_scale)
    data = validate_dataset(x, t_obs, status)

    if spec.method == "mdr-ss":
        config = StabilityConfig(
            b=spec.stability_b,
            n_s=spec.stability_ns,
            pi0=spec.pi0,
            stage_sizes=spec.stage_sizes,
            seed=(spec.seed, rep),
            slices_event=spec.slices_event,
            slices_censored=spec.slices_censored,
        )
        return mdr_ss(data, config)

    partition = partition_slices(data, spec.slices_event, spec.slices_censored)
    budget = spec.top if spec.top is not None else auto_budget(spec.n, spec.p)
    if spec.method == "mdr-sis":
        return select_top(mdr_index_all(data, partition), budget)
    sizes = spec.stage_sizes if spec.stage_sizes is not None else default_stage_plan(budget)
    return mdr_is(data, partition, sizes)


def _one_replication(spec: SimulationSpec, rep):
    start = _time.perf_counter()
    try:
        result = _screen_once(spec, rep)
    except MdrError as exc:
        return ("fail", f"replication {rep}: {exc}", _time.perf_counter() - start)
    selected = set(result.selected)
    hits = tuple(int(k in selected) for k in truth_ids(spec.model))
    return ("ok", (hits, len(selected)), _time.perf_counter() - start)


def run_experiment(spec: SimulationSpec, n_jobs=1):
    """Run the Monte Carlo experiment described by ``spec``.

    Replications use counter-based RNG keys (seed, replication index),
    so reports are identical under any parallel schedule.  Aborts when
    more than 5% of replications fail.
    """
    outcomes = Parallel(n_jobs=n_jobs)(
        delayed(_one_replication)(spec, rep) for rep in range(spec.replications)
    )

    truth = truth_ids(spec.model)
    hit_counts = np.zeros(len(truth), dtype=np.int64)
    all_count = 0
    sizes = []
    failures = []
    elapsed = []
    for kind, payload, seconds in outcomes:
        elapsed.append(seconds)
        if kind == "fail":
            failures.append(payload)
            continue
        hits, size = payload
        hit_counts += np.asarray(hits)
        all_count += int(all(hits))
        sizes.append(size)
    if len(failures) > 0.05 * spec.replications or not sizes:
        raise TooManyFailuresError(
            f"{len(failures)} of {spec.replications} replications failed: {failures[:3]}"
        )

    n_ok = len(sizes)
    sizes = np.asarray(sizes, dtype=np.float64)
    q25, q50, q75 = np.percentile(sizes, [25, 50, 75])
    return ProportionReport(
        spec=spec,
        truth_ids=truth,
        proportions={int(k): float(c / n_ok) for k, c in zip(truth, hit_counts)},
        all_proportion=float(all_count / n_ok),
        replications_completed=n_ok,
        failures=tuple(failures),
        size_median=float(q50),
        size_iqr=float(q75 - q25),
        mean_rep_seconds=float(np.mean(elapsed)),
    )
