import numpy as np
import pytest

from mdrscreen import (
    DTooLargeError,
    IndexVector,
    auto_budget,
    default_dn,
    select_threshold,
    select_top,
)


def iv(values, ids=None):
    values = np.asarray(values, dtype=float)
    ids = np.arange(1, len(values) + 1) if ids is None else np.asarray(ids)
    return IndexVector(values=values, covariate_ids=ids)


def test_threshold_zero_selects_all():
    res = select_threshold(iv([3.0, 1.0, 2.0]), 0.0)
    assert res.selected == (1, 3, 2)  # descending by value
    assert res.method == "MDR-SIS"


def test_threshold_above_max_selects_none():
    res = select_threshold(iv([3.0, 1.0, 2.0]), 3.5)
    assert res.selected == ()


def test_threshold_filter():
    res = select_threshold(iv([3.0, 1.0, 2.0]), 2.0)
    assert res.selected == (1, 3)


def test_threshold_rejects_negative():
    with pytest.raises(ValueError):
        select_threshold(iv([1.0]), -0.1)


def test_top_basic():
    res = select_top(iv([3.0, 1.0, 2.0]), 2)
    assert res.selected == (1, 3)


def test_top_all_equal_breaks_ties_by_id():
    res = select_top(iv([1.0, 1.0, 1.0]), 2)
    assert res.selected == (1, 2)
    assert any("tie" in w for w in res.warnings)


def test_top_full_size():
    res = select_top(iv([3.0, 1.0, 2.0]), 3)
    assert res.selected == (1, 3, 2)


def test_top_too_large():
    with pytest.raises(DTooLargeError):
        select_top(iv([1.0, 2.0]), 3)


def test_top_exact_size_and_monotone_nesting():
    rng = np.random.default_rng(0)
    values = rng.random(40)
    indices = iv(values)
    previous = set()
    for d in range(1, 41):
        selected = set(select_top(indices, d).selected)
        assert len(selected) == d
        assert previous <= selected
        previous = selected


def test_top_rank_invariance_under_increasing_transform():
    rng = np.random.default_rng(1)
    values = rng.random(30) * 5
    base = select_top(iv(values), 7).selected
    transformed = select_top(iv(np.expm1(values) + 2.0), 7).selected
    assert transformed == base


def test_default_dn_reference_values():
    assert default_dn(200) == 37
    assert default_dn(300) == 52
    assert default_dn(160) == 31


def test_default_dn_small_n_rejected():
    with pytest.raises(ValueError):
        default_dn(2)


def test_auto_budget_caps_at_p():
    assert auto_budget(200, 400) == 37
    assert auto_budget(200, 10) == 10


def test_selected_ids_use_original_labels():
    res = select_top(iv([0.5, 2.0], ids=[17, 4]), 1)
    assert res.selected == (4,)
