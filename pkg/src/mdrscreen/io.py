"""CSV ingestion and result serialization.

Results serialize either as a human-readable table or as JSON lines
("jsonl"): one record object per line, numeric fields written with
Python's shortest round-trip float representation so a read-back
reproduces them exactly.  Files are written to a temporary sibling and
atomically renamed, so a failed run never leaves a partial output.
"""

from __future__ import annotations

import json
import os
import tempfile

import numpy as np
import pandas as pd

from .data import ScreeningResult, validate_dataset
from .errors import (
    ILLEGAL_STATUS,
    MdrError,
    ValidationError,
    Violation,
)
from .simulation import ProportionReport

FORMATS = ("table", "jsonl")


class ParseError(MdrError, ValueError):
    """CSV could not be parsed; message carries the location when known."""


class MissingColumnError(MdrError, ValueError):
    """A required column name is absent from the CSV header."""


def load_csv(path, time_col, status_col, id_col=None):
    """Load a survival dataset from a wide CSV.

    Every column other than ``time_col``, ``status_col``, and the
    optional ``id_col`` becomes a covariate, in file order.

    Returns
    -------
    (SurvivalDataset, dict) : the validated dataset and a mapping of
    1-based covariate id -> column name.
    """
    try:
        frame = pd.read_csv(path)
    except pd.errors.EmptyDataError as exc:
        raise ParseError(f"{path}: empty file") from exc
    except (pd.errors.ParserError, UnicodeDecodeError) as exc:
        raise ParseError(f"{path}: {exc}") from exc
    if frame.shape[0] == 0:
        raise ParseError(f"{path}: no data rows")

    for name in (time_col, status_col) + ((id_col,) if id_col else ()):
        if name not in frame.columns:
            raise MissingColumnError(f"{path}: column {name!r} not in header")

    drop = [time_col, status_col] + ([id_col] if id_col else [])
    cov_names = [c for c in frame.columns if c not in drop]
    if not cov_names:
        raise ParseError(f"{path}: no covariate columns besides {drop}")

    try:
        covariates = frame[cov_names].to_numpy(dtype=np.float64)
    except (TypeError, ValueError) as exc:
        # Locate the first offending cell for the error message.
        for name in cov_names:
            coerced = pd.to_numeric(frame[name], errors="coerce")
            bad = coerced.isna() & frame[name].notna()
            if bad.any():
                row = int(bad.idxmax())
                raise ParseError(
                    f"{path}: non-numeric value {frame[name][row]!r} "
                    f"at row {row}, column {name!r}"
                ) from exc
        raise ParseError(f"{path}: non-numeric covariate data") from exc

    times = pd.to_numeric(frame[time_col], errors="coerce").to_numpy(dtype=np.float64)
    status_raw = frame[status_col]
    status_num = pd.to_numeric(status_raw, errors="coerce")
    violations = [
        Violation(ILLEGAL_STATUS, f"status must be 0 or 1, got {status_raw[int(i)]!r}", (int(i), status_col))
        for i in np.nonzero(~(status_num.isin([0, 1])).to_numpy())[0]
    ]
    if violations:
        raise ValidationError(violations)

    dataset = validate_dataset(covariates, times, status_num.to_numpy(dtype=np.float64))
    return dataset, {i + 1: name for i, name in enumerate(cov_names)}


def _versions():
    from . import __version__

    return {"mdrscreen": __version__, "numpy": np.__version__}


def _float(x):
    # json emits Python floats with the shortest round-trip decimal form.
    return float(x)


def _screening_records(result: ScreeningResult):
    yield {
        "record": "meta",
        "kind": "screening",
        "method": result.method,
        "config": result.config_echo,
        "versions": _versions(),
        "warnings": list(result.warnings),
    }
    for k, v in zip(result.indices.covariate_ids, result.indices.values):
        yield {"record": "index", "id": int(k), "value": _float(v)}
    if result.indices.degenerate_ids:
        yield {"record": "degenerate", "ids": list(result.indices.degenerate_ids)}
    if result.stage_sizes is not None:
        yield {
            "record": "stages",
            "sizes": list(result.stage_sizes),
            "members": [list(m) for m in (result.stage_members or ())],
        }
    if result.frequencies is not None:
        for k, f in zip(result.indices.covariate_ids, result.frequencies):
            yield {"record": "frequency", "id": int(k), "pi": _float(f)}
    yield {"record": "selected", "ids": list(result.selected)}


def _report_records(report: ProportionReport, include_timing):
    yield {
        "record": "meta",
        "kind": "simulation",
        "config": report.config_echo(),
        "versions": _versions(),
        "replications_completed": report.replications_completed,
        "failures": list(report.failures),
    }
    for k in report.truth_ids:
        yield {"record": "proportion", "id": int(k), "value": _float(report.proportions[k])}
    yield {"record": "all", "value": _float(report.all_proportion)}
    yield {"record": "sizes", "median": _float(report.size_median), "iqr": _float(report.size_iqr)}
    if include_timing:
        yield {"record": "timing", "mean_rep_seconds": _float(report.mean_rep_seconds)}


def _screening_table(result: ScreeningResult, names=None):
    names = names or {}
    ranking = result.frequencies if result.frequencies is not None else result.indices.values
    by_id = dict(zip((int(k) for k in result.indices.covariate_ids), ranking))
    header = "rank  covariate  name              value"
    lines = [header, "-" * len(header)]
    for rank, k in enumerate(result.selected, start=1):
        label = names.get(k, "-")
        lines.append(f"{rank:<5d} {k:<10d} {label:<17s} {by_id[k]:.6g}")
    lines.append(f"# method={result.method} selected={len(result.selected)}")
    for w in result.warnings:
        lines.append(f"# warning: {w}")
    return "\n".join(lines) + "\n"


def _report_table(report: ProportionReport):
    ids = list(report.truth_ids)
    header = "covariate   " + "".join(f"{k:<8d}" for k in ids) + "all"
    values = "proportion  " + "".join(f"{report.proportions[k]:<8.2f}" for k in ids)
    values += f"{report.all_proportion:.2f}"
    spec = report.spec
    meta = (
        f"# model={spec.model} rho={spec.rho} n={spec.n} p={spec.p} "
        f"method={spec.method} reps={report.replications_completed}"
    )
    size = f"# selected size: median={report.size_median:g} iqr={report.size_iqr:g}"
    return "\n".join([header, values, meta, size]) + "\n"


def render_result(result, format="table", names=None, include_timing=False):
    """Serialize a ScreeningResult or ProportionReport to text."""
    if format not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}")
    if isinstance(result, ScreeningResult):
        if format == "jsonl":
            return "\n".join(json.dumps(r, sort_keys=True) for r in _screening_records(result)) + "\n"
        return _screening_table(result, names)
    if isinstance(result, ProportionReport):
        if format == "jsonl":
            return (
                "\n".join(json.dumps(r, sort_keys=True) for r in _report_records(result, include_timing))
                + "\n"
            )
        return _report_table(result)
    raise TypeError(f"cannot serialize {type(result).__name__}")


def write_result(result, path, format="table", names=None, include_timing=False):
    """Serialize a ScreeningResult or ProportionReport to ``path``.

    ``format="jsonl"`` writes one JSON record per line and round-trips
    through :func:`read_result` losslessly for numeric fields.  Writing
    is atomic (temp file + rename).  ``include_timing`` adds the
    wall-clock record to simulation output; it is off by default so
    outputs are byte-identical across runs and worker counts.
    """
    text = render_result(result, format=format, names=names, include_timing=include_timing)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".mdrscreen-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_result(path):
    """Read back a jsonl result file written by :func:`write_result`.

    Returns a dict with the meta record plus collated numeric payloads:
    for screening output keys ``ids``, ``values``, ``selected`` (and
    ``frequencies`` when present); for simulation output keys
    ``proportions``, ``all_proportion``, ``size_median``, ``size_iqr``.
    """
    records = []
    with open(path) as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                records.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise ParseError(f"{path}:{line_no}: not valid JSON ({exc})") from exc
    if not records or records[0].get("record") != "meta":
        raise ParseError(f"{path}: missing meta record; not a jsonl result file")

    out = {"meta": records[0]}
    kind = records[0].get("kind")
    if kind == "screening":
        idx = [(r["id"], r["value"]) for r in records if r["record"] == "index"]
        out["ids"] = np.asarray([k for k, _ in idx], dtype=np.int64)
        out["values"] = np.asarray([v for _, v in idx], dtype=np.float64)
        freq = [(r["id"], r["pi"]) for r in records if r["record"] == "frequency"]
        if freq:
            out["frequencies"] = np.asarray([f for _, f in freq], dtype=np.float64)
        for r in records:
            if r["record"] == "selected":
                out["selected"] = tuple(r["ids"])
            elif r["record"] == "stages":
                out["stage_sizes"] = tuple(r["sizes"])
                out["stage_members"] = tuple(tuple(m) for m in r["members"])
    elif kind == "simulation":
        out["proportions"] = {
            int(r["id"]): r["value"] for r in records if r["record"] == "proportion"
        }
        for r in records:
            if r["record"] == "all":
                out["all_proportion"] = r["value"]
            elif r["record"] == "sizes":
                out["size_median"] = r["median"]
                out["size_iqr"] = r["iqr"]
    else:
        raise ParseError(f"{path}: unknown result kind {kind!r}")
    return out
