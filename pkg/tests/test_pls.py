import numpy as np
import pytest

from fitting.pls import (
    PLSModel,
    StandardizedDesign,
    closed_form_pls1,
    fit_pls,
    pearson,
    r_squared,
    standardize,
)
from utils.errors import ComponentLimitError, DegenerateGradientError, DegenerateVarianceError

CROSS = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])


def test_standardize_two_rows():
    Z, stats = standardize(np.array([[1.0], [3.0]]))

    np.testing.assert_allclose(Z, [[-1.0], [1.0]])
    np.testing.assert_allclose(stats.means, [2.0])
    np.testing.assert_allclose(stats.stds, [1.0])


def test_standardize_is_idempotent():
    Z, _ = standardize(np.random.default_rng(0).standard_normal((30, 4)))
    again, stats = standardize(Z)

    assert np.max(np.abs(again - Z)) <= 1e-9
    np.testing.assert_allclose(stats.stds, 1.0, atol=1e-9)


def test_standardize_lists_constant_columns():
    X = np.column_stack([np.full(5, 5.0), np.arange(5.0), np.full(5, -1.0)])

    with pytest.raises(DegenerateVarianceError) as excinfo:
        standardize(X)
    assert excinfo.value.columns == [0, 2]


def test_closed_form_recovers_axis():
    gradient = closed_form_pls1(CROSS, CROSS[:, 0])

    np.testing.assert_allclose(gradient.direction, [1.0, 0.0], atol=1e-12)
    assert gradient.K == 1


def test_closed_form_matches_least_squares_on_cross():
    solution, *_ = np.linalg.lstsq(CROSS, CROSS[:, 0], rcond=None)
    gradient = closed_form_pls1(CROSS, CROSS[:, 0])

    assert gradient.direction @ (solution / np.linalg.norm(solution)) == pytest.approx(1.0, abs=1e-12)


def test_closed_form_finds_label_column():
    rng = np.random.default_rng(1)
    y = rng.standard_normal(100)
    X = np.column_stack([y, rng.standard_normal((100, 5))])

    gradient = closed_form_pls1(X, y)

    assert abs(gradient.direction[0]) >= 0.9
    assert np.linalg.norm(gradient.direction) == pytest.approx(1.0, abs=1e-9)


def test_closed_form_rejects_orthogonal_labels():
    with pytest.raises(DegenerateGradientError):
        closed_form_pls1(CROSS, np.array([1.0, 1.0, -1.0, -1.0]))


def test_single_component_fit_matches_closed_form():
    rng = np.random.default_rng(2024)
    for _ in range(100):
        n = int(rng.integers(12, 51))
        d = int(rng.integers(2, 11))
        X = rng.standard_normal((n, d))
        y = X @ rng.standard_normal(d) + rng.standard_normal(n)

        closed = closed_form_pls1(X, y).direction
        fitted, _ = fit_pls(X, y, 1)

        assert closed @ fitted.direction >= 1 - 1e-10


def test_full_rank_fit_interpolates_noiseless_labels():
    rng = np.random.default_rng(3)
    X = rng.standard_normal((40, 6))
    y = X @ rng.standard_normal(6)

    gradient, model = fit_pls(X, y, 6)

    assert r_squared(y, model.predict(X)) >= 1 - 1e-6
    assert gradient.K == 6
    assert np.linalg.norm(gradient.direction) == pytest.approx(1.0, abs=1e-9)


def test_in_sample_r_squared_grows_with_components():
    rng = np.random.default_rng(4)
    for _ in range(10):
        X = rng.standard_normal((30, 8))
        y = X @ rng.standard_normal(8) + 0.5 * rng.standard_normal(30)
        model = PLSModel(X, y, 8, strict=False)

        scores = [r_squared(y, model.predict(X, k)) for k in range(1, model.n_components + 1)]

        assert all(b >= a - 1e-10 for a, b in zip(scores, scores[1:]))


def test_direction_is_invariant_to_affine_labels():
    rng = np.random.default_rng(5)
    X = rng.standard_normal((60, 5))
    y = X @ rng.standard_normal(5) + rng.standard_normal(60)

    assert closed_form_pls1(X, y).direction @ closed_form_pls1(X, 10 * y + 3).direction >= 1 - 1e-10
    assert fit_pls(X, y, 3)[0].direction @ fit_pls(X, 10 * y + 3, 3)[0].direction >= 1 - 1e-10


def test_closed_form_is_column_permutation_equivariant():
    rng = np.random.default_rng(6)
    X = rng.standard_normal((50, 7))
    y = X @ rng.standard_normal(7) + rng.standard_normal(50)
    perm = rng.permutation(7)

    np.testing.assert_allclose(
        closed_form_pls1(X[:, perm], y).direction,
        closed_form_pls1(X, y).direction[perm],
        atol=1e-12,
    )


def test_direction_correlates_non_negatively_with_labels():
    rng = np.random.default_rng(7)
    X = rng.standard_normal((80, 4))
    y = -(X @ np.array([1.0, 2.0, 0.0, -1.0])) + 0.1 * rng.standard_normal(80)

    for K in (1, 2, 4):
        gradient, _ = fit_pls(X, y, K)
        assert pearson(X @ gradient.direction, y) >= 0


def test_component_limits():
    X = np.random.default_rng(8).standard_normal((5, 3))
    y = np.arange(5.0)

    with pytest.raises(ComponentLimitError) as excinfo:
        fit_pls(X, y, 4)
    assert excinfo.value.achievable == 3
    with pytest.raises(ComponentLimitError):
        fit_pls(X, y, 0)


def test_deflation_exhaustion_reports_achievable_components():
    rng = np.random.default_rng(9)
    base = rng.standard_normal((20, 1))
    X = np.hstack([base, 2 * base + 1, -base])
    y = base[:, 0]

    with pytest.raises(ComponentLimitError) as excinfo:
        PLSModel(X, y, 3)
    assert excinfo.value.achievable == 1
    assert PLSModel(X, y, 3, strict=False).n_components == 1


def test_standardized_design_reuses_statistics():
    rng = np.random.default_rng(10)
    X = rng.standard_normal((40, 3))
    design = StandardizedDesign(X)
    y = rng.standard_normal(40)

    np.testing.assert_array_equal(design.direction(y), closed_form_pls1(X, y).direction)


def test_pearson_and_r_squared_edge_cases():
    assert pearson(np.ones(5), np.arange(5.0)) == 0.0
    assert pearson(np.arange(5.0), 2 * np.arange(5.0)) == pytest.approx(1.0)
    assert r_squared(np.ones(4), np.zeros(4)) == 0.0
    assert r_squared(np.arange(4.0), np.arange(4.0)) == 1.0
