import numpy as np
import pytest

from mdrscreen import (
    ZeroVarianceError,
    mdr_index,
    mdr_index_all,
    mdr_index_bruteforce,
    partition_slices,
    slice_moments,
    standardize,
    validate_dataset,
)
from mdrscreen.index import SliceMoments

from conftest import random_survival_data


def test_standardize_two_points():
    col = standardize(np.array([1.0, 3.0]))
    assert col.mean == 2.0 and col.sd == 1.0
    assert np.array_equal(col.z, [-1.0, 1.0])


def test_standardize_constant_column():
    with pytest.raises(ZeroVarianceError):
        standardize(np.array([5.0, 5.0, 5.0]))


def test_standardize_affine_equivariance(rng):
    x = rng.standard_normal(40)
    base = standardize(x).z
    assert np.allclose(standardize(3.5 * x - 2.0).z, base, atol=1e-12)
    assert np.allclose(standardize(-0.7 * x + 4.0).z, -base, atol=1e-12)


def test_standardize_uses_n_denominator(rng):
    x = rng.standard_normal(10)
    col = standardize(x)
    assert col.sd == pytest.approx(np.sqrt(np.mean((x - x.mean()) ** 2)))
    assert col.sd != pytest.approx(x.std(ddof=1))


def test_slice_moments_values():
    # n=2 singleton slices via one event and one censored observation.
    data = validate_dataset(np.array([[1.0], [3.0]]), [1.0, 2.0], [1, 0])
    part = partition_slices(data, h_event=None, h_censored=None)
    z = standardize(data.covariates[:, 0])
    m = slice_moments(z, part)
    assert sorted(m.u.tolist()) == [-0.5, 0.5]
    assert np.allclose(m.v, [0.5, 0.5])


def test_slice_moments_one_slice_per_group():
    rng = np.random.default_rng(2)
    data = random_survival_data(rng, 30, 1)
    part = partition_slices(data, h_event=2, h_censored=1)
    z = standardize(data.covariates[:, 0])
    m = slice_moments(z, part)
    assert m.u.sum() == pytest.approx(0.0, abs=1e-10)
    assert m.v.sum() == pytest.approx(1.0, abs=1e-10)
    assert (m.v >= 0).all()


def test_mdr_index_single_slice_is_zero():
    m = SliceMoments(u=np.array([0.0]), v=np.array([1.0]))
    assert mdr_index(m, np.array([1.0])) == 0.0


def test_mdr_index_two_equal_slices_closed_form():
    m = SliceMoments(u=np.array([-0.5, 0.5]), v=np.array([0.5, 0.5]))
    assert mdr_index(m, np.array([0.5, 0.5])) == pytest.approx(4.0)


def test_bruteforce_singletons_reproduce_closed_form():
    # Hand enumeration over ordered pairs: within-slice D=0, cross-slice
    # D=(z1-z2)^2=4, so the weighted sum of (2-D)^2 is 4.
    data = validate_dataset(np.array([[1.0], [3.0]]), [1.0, 2.0], [1, 0])
    part = partition_slices(data)
    z = standardize(data.covariates[:, 0])
    assert mdr_index_bruteforce(z, part) == pytest.approx(4.0)


def test_bruteforce_one_slice_per_observation_group(rng):
    # single slice overall is impossible (two status groups), but a
    # one-slice group contributes D = 2 on the diagonal pair.
    data = random_survival_data(rng, 25, 1)
    part = partition_slices(data, h_event=2, h_censored=1)
    z = standardize(data.covariates[:, 0])
    fast = mdr_index(slice_moments(z, part), part.probs)
    slow = mdr_index_bruteforce(z, part)
    assert slow == pytest.approx(fast, abs=1e-10)


def test_oracle_equality_random_datasets():
    rng = np.random.default_rng(42)
    for _ in range(10):
        n = int(rng.integers(20, 120))
        data = random_survival_data(rng, n, int(rng.integers(1, 6)))
        part = partition_slices(data)
        fast = mdr_index_all(data, part)
        for k in range(data.p):
            z = standardize(data.covariates[:, k])
            slow = mdr_index_bruteforce(z, part)
            assert abs(slow - fast.values[k]) <= 1e-8


def test_mdr_index_all_matches_scalar_path(small_data, small_partition):
    iv = mdr_index_all(small_data, small_partition)
    assert np.array_equal(iv.covariate_ids, np.arange(1, small_data.p + 1))
    for k in range(small_data.p):
        z = standardize(small_data.covariates[:, k])
        scalar = mdr_index(slice_moments(z, small_partition), small_partition.probs)
        assert iv.values[k] == pytest.approx(scalar, rel=1e-12)


def test_mdr_index_all_column_permutation(small_data, small_partition):
    iv = mdr_index_all(small_data, small_partition)
    perm = np.array([2, 0, 3, 1])
    permuted = validate_dataset(
        small_data.covariates[:, perm], small_data.observed_time, small_data.status
    )
    iv2 = mdr_index_all(permuted, small_partition)
    assert np.allclose(iv2.values, iv.values[perm])


def test_mdr_index_all_constant_column_scores_zero_with_warning(small_data, small_partition):
    x = small_data.covariates.copy()
    x[:, 1] = 7.7
    data = validate_dataset(x, small_data.observed_time, small_data.status)
    with pytest.warns(RuntimeWarning, match="constant covariate"):
        iv = mdr_index_all(data, small_partition)
    assert iv.values[1] == 0.0
    assert iv.degenerate_ids == (2,)
    assert (iv.values[[0, 2, 3]] > 0).all()


def test_affine_invariance():
    rng = np.random.default_rng(6)
    data = random_survival_data(rng, 70, 4)
    part = partition_slices(data)
    base = mdr_index_all(data, part).values
    # exact-representable transforms (sign flip, power-of-two scale) are
    # bit-identical; general affine maps agree to round-off
    flipped = validate_dataset(-data.covariates, data.observed_time, data.status)
    assert np.array_equal(mdr_index_all(flipped, part).values, base)
    doubled = validate_dataset(4.0 * data.covariates, data.observed_time, data.status)
    assert np.array_equal(mdr_index_all(doubled, part).values, base)
    x = data.covariates * np.array([2.3, -0.3, 10.0, 1.0]) + np.array([5, 0, -2, 1.0])
    general = validate_dataset(x, data.observed_time, data.status)
    assert np.allclose(mdr_index_all(general, part).values, base, rtol=1e-10)


def test_slice_label_invariance(small_data):
    # Same membership, different (l, j) processing order: relabeling must
    # not change the index because the formula is a symmetric slice sum.
    part = partition_slices(small_data, 3, 2)
    base = mdr_index_all(small_data, part).values
    from mdrscreen.slicing import SlicePartition

    order = np.argsort([-s for s, _ in enumerate(part.slice_keys)])
    relabeled = SlicePartition(
        slice_keys=tuple(part.slice_keys[i] for i in order),
        labels=np.argsort(order)[part.labels],
        counts=part.counts[order],
        probs=part.probs[order],
        boundaries_event=part.boundaries_event,
        boundaries_censored=part.boundaries_censored,
    )
    assert np.allclose(mdr_index_all(small_data, relabeled).values, base, atol=1e-12)


def test_nonnegativity_and_determinism(rng):
    data = random_survival_data(rng, 80, 6)
    part = partition_slices(data)
    a = mdr_index_all(data, part).values
    b = mdr_index_all(data, part).values
    assert (a >= 0).all()
    assert np.array_equal(a, b)
