"""
Component selection and significance of fitted gradients.
"""
import logging
from typing import Any, Dict, List, Tuple

import numpy as np
from scipy import stats
from sklearn.model_selection import KFold, ShuffleSplit

from utils.errors import ComponentLimitError, DegenerateDataError, SplitFitError
from utils.parallel import run_ordered

from .pls import FitReport, Gradient, PLSModel, pearson, r_squared

logger = logging.getLogger(__name__)

P_VALUE_FLOOR = 1e-300


def cross_validate_components(
    X: np.ndarray,
    y: np.ndarray,
    k_max: int,
    folds: int = 5,
    seed: int = 0
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Cross-validated mean squared error for every k in [1, k_max].

    Components a fold cannot support get an infinite error.

    Args:
        X: Raw design
        y: Labels
        k_max: Largest number of components tried
        folds: Number of CV folds
        seed: Shuffling seed

    Returns:
        (mean error per k, standard error of the mean per k)
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if k_max < 1:
        raise ValueError('k_max must be at least 1')

    fold_errors = np.full((folds, k_max), np.inf)
    splitter = KFold(n_splits=folds, shuffle=True, random_state=seed)
    for fold, (train, test) in enumerate(splitter.split(X)):
        n_train, d = len(train), X.shape[1]
        cap = min(k_max, d, n_train - 1)
        model = PLSModel(X[train], y[train], cap, strict=False)
        for k in range(1, model.n_components + 1):
            residual = y[test] - model.predict(X[test], k)
            fold_errors[fold, k - 1] = float(np.mean(residual ** 2))

    means = fold_errors.mean(axis=0)
    with np.errstate(invalid='ignore'):
        ses = fold_errors.std(axis=0, ddof=1) / np.sqrt(folds)
    ses[~np.isfinite(means)] = np.inf
    return means, ses


def select_k(
    X: np.ndarray,
    y: np.ndarray,
    k_max: int,
    folds: int = 5,
    seed: int = 0
) -> int:
    """
    Number of PLS components by the one-standard-error rule.

    The smallest k whose CV error is within one standard error of the minimum.
    """
    if k_max == 1:
        return 1
    return select_k_with_curve(X, y, k_max, folds, seed)[0]


def select_k_with_curve(
    X: np.ndarray,
    y: np.ndarray,
    k_max: int,
    folds: int = 5,
    seed: int = 0
) -> Tuple[int, List[float], List[float]]:
    """select_k plus the CV error curve and its standard errors."""
    means, ses = cross_validate_components(X, y, k_max, folds, seed)
    best = int(np.argmin(means))
    threshold = means[best] + ses[best]
    chosen = int(np.flatnonzero(means <= threshold)[0]) + 1
    logger.info(
        f"Selected K={chosen} (min CV error {means[best]:.4g} at k={best + 1}, "
        f"threshold {threshold:.4g})"
    )
    return chosen, [float(m) for m in means], [float(s) for s in ses]


def corrected_t_test(
    X: np.ndarray,
    y: np.ndarray,
    K: int,
    J: int = 30,
    test_fraction: float = 0.2,
    seed: int = 0,
    workers: int = 1
) -> FitReport:
    """
    Corrected resampled t-test of out-of-sample skill over J random splits.

    Skill is the test-set R^2 against predicting the training-label mean. The
    variance of the split scores is inflated by (1/J + n_test/n_train) for the
    overlap between splits; p is the upper-tail Student t probability with
    J-1 degrees of freedom.

    Raises:
        SplitFitError: A split violates the fit preconditions
    """
    if J < 2:
        raise ValueError('J must be at least 2')
    if not 0 < test_fraction < 1:
        raise ValueError('test_fraction must lie in (0, 1)')

    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    splitter = ShuffleSplit(n_splits=J, test_size=test_fraction, random_state=seed)
    splits = list(enumerate(splitter.split(X)))

    def score(item) -> Tuple[float, float, int, int]:
        index, (train, test) = item
        try:
            model = PLSModel(X[train], y[train], K)
            predicted = model.predict(X[test])
        except (DegenerateDataError, ComponentLimitError) as e:
            raise SplitFitError(index, e)
        skill = r_squared(y[test], predicted, baseline=float(y[train].mean()))
        return skill, pearson(predicted, y[test]), len(test), len(train)

    results = run_ordered(score, splits, workers=workers, label='t-test splits')
    skills = np.array([r[0] for r in results])
    correlations = np.array([r[1] for r in results])
    n_test, n_train = results[0][2], results[0][3]

    mean_skill = float(skills.mean())
    variance = float(skills.var(ddof=1)) * (1.0 / J + n_test / n_train)
    if variance > 0:
        t_statistic = mean_skill / np.sqrt(variance)
    else:
        t_statistic = np.inf if mean_skill > 0 else (-np.inf if mean_skill < 0 else 0.0)
    p_value = float(np.clip(stats.t.sf(t_statistic, J - 1), P_VALUE_FLOOR, 1.0))

    logger.info(
        f"Corrected t-test (K={K}, J={J}): R2={mean_skill:.3f}, "
        f"r_pred={correlations.mean():.3f}, t={t_statistic:.3f}, p={p_value:.3g}"
    )
    return FitReport(
        r_squared=mean_skill,
        r_pred=float(correlations.mean()),
        p_value=p_value,
        splits=J,
        split_scores=skills.tolist(),
        t_statistic=float(t_statistic),
        test_fraction=test_fraction,
    )



def fit_record(gradient: Gradient, n: int, model: str, dropped_oov: int = 0) -> Dict[str, Any]:
    """
    Table row for one fitted gradient.

    ``r_squared`` is the mean held-out R^2 over the resampled splits; the
    in-sample and k-fold values are reported next to it under their own names.
    """
    fit = gradient.fit
    if fit is None:
        raise ValueError(f"Gradient {gradient.language}/{gradient.dimension} has no fit report")
    return {
        'language': gradient.language,
        'model': model,
        'N': n,
        'dropped_oov': dropped_oov,
        'dimension': gradient.dimension,
        'K': gradient.K,
        'r_squared': fit.r_squared,
        'r_squared_source': 'mean held-out R^2 over resampled splits',
        'in_sample_r_squared': fit.in_sample_r_squared,
        'cv_r_squared': fit.cv_r_squared,
        'r_pred': fit.r_pred,
        'p_value': fit.p_value,
        't_statistic': fit.t_statistic,
        'splits': fit.splits,
        'test_fraction': fit.test_fraction,
        'split_scores': list(fit.split_scores),
        'cv_errors': list(fit.cv_errors),
        'cv_standard_errors': list(fit.cv_standard_errors),
    }
