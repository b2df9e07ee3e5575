"""
Supervised semantic gradients with a PLS backend.

Columns are standardized into Z, labels are z-scored, and the gradient is the
PLS regression coefficient vector mapped back to raw embedding coordinates
(divided by the column standard deviations) and unit-normalized.
"""
import logging
from dataclasses import dataclass, field, replace
from typing import List, Optional, Tuple

import numpy as np

from lexicon.norms import zscore
from utils.errors import ComponentLimitError, DegenerateGradientError, DegenerateVarianceError

logger = logging.getLogger(__name__)

STD_EPSILON = 1e-12
BETA_EPSILON = 1e-12
RESIDUAL_EPSILON = 1e-12


@dataclass(frozen=True, eq=False)
class StandardizationStats:
    means: np.ndarray
    stds: np.ndarray


@dataclass
class FitReport:
    """
    Significance and predictive quality of a fitted gradient.

    r_squared and r_pred are means over the held-out test sets of the
    resampled splits; in_sample_r_squared is measured on the full sample.
    """
    r_squared: float
    r_pred: float
    p_value: float
    splits: int
    split_scores: List[float]
    t_statistic: float = 0.0
    test_fraction: float = 0.2
    in_sample_r_squared: Optional[float] = None
    cv_r_squared: Optional[float] = None
    cv_errors: List[float] = field(default_factory=list)
    cv_standard_errors: List[float] = field(default_factory=list)


@dataclass(frozen=True, eq=False)
class Gradient:
    """Unit direction in raw embedding coordinates along which the label increases."""
    direction: np.ndarray
    language: str = ''
    dimension: str = ''
    K: int = 1
    fit: Optional[FitReport] = None

    @property
    def dim(self) -> int:
        return self.direction.shape[0]

    def with_fit(self, fit: FitReport) -> 'Gradient':
        return replace(self, fit=fit)


def standardize(X: np.ndarray) -> Tuple[np.ndarray, StandardizationStats]:
    """
    Column-wise standardization with the population standard deviation.

    Raises:
        DegenerateVarianceError: Listing near-constant columns
    """
    X = np.asarray(X, dtype=np.float64)
    means = X.mean(axis=0)
    centered = X - means
    stds = np.sqrt(np.mean(centered * centered, axis=0))
    constant = np.flatnonzero(stds <= STD_EPSILON)
    if constant.size:
        raise DegenerateVarianceError(
            f"Near-constant columns cannot be standardized: {constant.tolist()}",
            columns=constant.tolist()
        )
    return centered / stds, StandardizationStats(means=means, stds=stds)


class StandardizedDesign:
    """
    A design matrix standardized once, for repeated K=1 fits with new labels.

    Used by the permutation tests, where only the labels change between refits.
    """

    def __init__(self, X: np.ndarray):
        self.Z, self.stats = standardize(X)

    def direction(self, y: np.ndarray) -> np.ndarray:
        """Closed-form single-component direction for labels y."""
        y_tilde = zscore(y)
        beta = (self.Z.T @ y_tilde) / self.stats.stds
        norm = np.linalg.norm(beta)
        if norm <= BETA_EPSILON:
            raise DegenerateGradientError(
                f"Labels are orthogonal to every column (|beta|={norm:.3g})"
            )
        return beta / norm


def closed_form_pls1(X: np.ndarray, y: np.ndarray, language: str = '', dimension: str = '') -> Gradient:
    """
    Single-component PLS1 gradient: beta_j = (Z^T y~)_j / s_j, normalized.

    The orientation makes projections correlate non-negatively with y.

    Raises:
        DegenerateVarianceError: Constant column or constant labels
        DegenerateGradientError: beta vanishes
    """
    direction = StandardizedDesign(X).direction(y)
    return Gradient(direction=direction, language=language, dimension=dimension, K=1)


class PLSModel:
    """
    NIPALS PLS1 fitted on standardized columns and z-scored labels.

    Components are nested, so coefficients for any k <= n_components come
    from the same fit.
    """

    def __init__(self, X: np.ndarray, y: np.ndarray, n_components: int, strict: bool = True):
        """
        Fit up to n_components components.

        Args:
            X: Raw N x d design
            y: Labels
            n_components: Components to extract
            strict: Raise if deflation exhausts the signal early; otherwise keep
                the achievable components

        Raises:
            ComponentLimitError: K out of range, or residual collapse when strict
        """
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        n, d = X.shape
        limit = min(d, n - 1)
        if n_components < 1 or n_components > limit:
            raise ComponentLimitError(n_components, max(limit, 0))

        Z, self.stats = standardize(X)
        self.y_mean = float(y.mean())
        self.y_std = float(np.sqrt(np.mean((y - self.y_mean) ** 2)))
        f = zscore(y)
        E = Z.copy()

        weights, loadings, y_loadings = [], [], []
        for k in range(n_components):
            w = E.T @ f
            w_norm = np.linalg.norm(w)
            if w_norm < RESIDUAL_EPSILON:
                if strict or k == 0:
                    raise ComponentLimitError(n_components, k)
                logger.debug(f"Deflation exhausted after {k} components")
                break
            w /= w_norm
            t = E @ w
            tt = t @ t
            p = E.T @ t / tt
            q = (f @ t) / tt
            E -= np.outer(t, p)
            f = f - q * t
            weights.append(w)
            loadings.append(p)
            y_loadings.append(q)

        self.W = np.column_stack(weights)
        self.P = np.column_stack(loadings)
        self.q = np.array(y_loadings)
        self.n_components = len(weights)
        self._train_X = X
        self._train_y = y

    def coefficients(self, k: Optional[int] = None) -> np.ndarray:
        """Regression coefficients on standardized columns predicting z-scored labels."""
        k = self.n_components if k is None else k
        W, P, q = self.W[:, :k], self.P[:, :k], self.q[:k]
        return W @ np.linalg.solve(P.T @ W, q)

    def raw_direction(self, k: Optional[int] = None) -> np.ndarray:
        """Unit coefficient direction in raw coordinates, oriented to correlate with y."""
        beta = self.coefficients(k) / self.stats.stds
        norm = np.linalg.norm(beta)
        if norm <= BETA_EPSILON:
            raise DegenerateGradientError('PLS coefficients vanish')
        direction = beta / norm
        projection = (self._train_X - self.stats.means) @ direction
        if projection @ (self._train_y - self.y_mean) < 0:
            direction = -direction
        return direction

    def predict(self, X: np.ndarray, k: Optional[int] = None) -> np.ndarray:
        """Predicted labels for raw rows, on the original label scale."""
        Z = (np.asarray(X, dtype=np.float64) - self.stats.means) / self.stats.stds
        return self.y_mean + self.y_std * (Z @ self.coefficients(k))


def fit_pls(
    X: np.ndarray,
    y: np.ndarray,
    K: int,
    language: str = '',
    dimension: str = ''
) -> Tuple[Gradient, PLSModel]:
    """
    Fit a K-component PLS gradient.

    Args:
        X: Raw N x d design
        y: Labels
        K: Components, 1 <= K <= min(d, N-1)
        language: Recorded on the gradient
        dimension: Recorded on the gradient

    Returns:
        (Gradient, predictor)
    """
    model = PLSModel(X, y, K)
    gradient = Gradient(direction=model.raw_direction(), language=language, dimension=dimension, K=K)
    return gradient, model


def r_squared(y_true: np.ndarray, y_pred: np.ndarray, baseline: Optional[float] = None) -> float:
    """Coefficient of determination against a constant baseline (the mean of y_true by default)."""
    y_true = np.asarray(y_true, dtype=np.float64)
    reference = y_true.mean() if baseline is None else baseline
    total = np.sum((y_true - reference) ** 2)
    if total == 0.0:
        return 0.0
    return float(1.0 - np.sum((y_true - y_pred) ** 2) / total)


def pearson(a: np.ndarray, b: np.ndarray) -> float:
    """Pearson correlation; 0.0 when either side is constant."""
    a = np.asarray(a, dtype=np.float64) - np.mean(a)
    b = np.asarray(b, dtype=np.float64) - np.mean(b)
    denominator = np.sqrt((a @ a) * (b @ b))
    if denominator == 0.0:
        return 0.0
    return float(np.clip((a @ b) / denominator, -1.0, 1.0))
