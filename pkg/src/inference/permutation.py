"""
Permutation tests comparing two gradients through their cosine.

Every refit inside a test uses the closed-form single-component solution, and
the observed statistic is computed the same way so that it is exchangeable
with the null draws.
"""
import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, Union

import numpy as np

from fitting.pls import Gradient, StandardizedDesign
from lexicon.norms import JoinedSample, zscore
from utils.errors import (
    DegenerateGradientError,
    DegenerateVarianceError,
    DimensionMismatchError,
    ResamplingExhaustedError,
)
from utils.parallel import run_ordered, spawn_generators

logger = logging.getLogger(__name__)

MAX_RETRIES = 10
# Null draws within this distance of the observed statistic count as ties
TIE_TOLERANCE = 1e-12
UPPER = 'upper'
LOWER = 'lower'

VectorLike = Union[Gradient, np.ndarray]


@dataclass
class PermutationResult:
    rho_observed: float
    null_samples: np.ndarray
    p_value: float
    n: int
    tail: str
    seed: int


def _vector(g: VectorLike) -> np.ndarray:
    return g.direction if isinstance(g, Gradient) else np.asarray(g, dtype=np.float64)


def cosine(g_a: VectorLike, g_b: VectorLike) -> float:
    """
    Cosine of two unit gradients, i.e. their inner product, clamped to [-1, 1].

    Raises:
        DimensionMismatchError: Different dimensionality
    """
    a, b = _vector(g_a), _vector(g_b)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"Gradient dimensions differ: {a.shape} vs {b.shape}")
    return float(np.clip(a @ b, -1.0, 1.0))


def permutation_p_value(null_samples: np.ndarray, observed: float, tail: str) -> float:
    """
    (1 + #{null at least as extreme}) / (n + 1); ties count as extreme.
    """
    null_samples = np.asarray(null_samples)
    if tail == UPPER:
        extreme = np.count_nonzero(null_samples >= observed - TIE_TOLERANCE)
    elif tail == LOWER:
        extreme = np.count_nonzero(null_samples <= observed + TIE_TOLERANCE)
    else:
        raise ValueError(f"Unknown tail '{tail}'")
    return (1.0 + extreme) / (null_samples.size + 1.0)


def resample_with_retries(
    draw: Callable[[np.random.Generator], float],
    rng: np.random.Generator,
    replicate: int
) -> float:
    """
    Run one replicate, redrawing when the refit is degenerate.

    Raises:
        ResamplingExhaustedError: Still degenerate after MAX_RETRIES redraws
    """
    last_error = None
    for attempt in range(MAX_RETRIES + 1):
        try:
            return draw(rng)
        except (DegenerateGradientError, DegenerateVarianceError) as e:
            last_error = e
            if attempt < MAX_RETRIES:
                logger.warning(f"Replicate {replicate} degenerate ({e}); redrawing")
    raise ResamplingExhaustedError(replicate, MAX_RETRIES, last_error)


def observed_cosine(sample_a: JoinedSample, sample_b: JoinedSample) -> float:
    """Cosine of the K=1 gradients of two intact samples."""
    g_a = StandardizedDesign(sample_a.X).direction(sample_a.y)
    g_b = StandardizedDesign(sample_b.X).direction(sample_b.y)
    return cosine(g_a, g_b)


def check_pair(sample_a: JoinedSample, sample_b: JoinedSample, n: int):
    if sample_a.X.shape[1] != sample_b.X.shape[1]:
        raise DimensionMismatchError(
            f"Samples live in spaces of different dimensionality: "
            f"{sample_a.X.shape[1]} vs {sample_b.X.shape[1]}"
        )
    if n < 1:
        raise ValueError('Number of permutations must be positive')


def alignment_test(
    sample_a: JoinedSample,
    sample_b: JoinedSample,
    n: int = 1000,
    seed: int = 0,
    workers: int = 1
) -> PermutationResult:
    """
    Test H0: rho = 0 by shuffling word-label pairings within each sample.

    Args:
        sample_a: First language sample
        sample_b: Second language sample
        n: Number of permutations
        seed: Root seed; each permutation draws from its own derived stream
        workers: Concurrent workers

    Returns:
        PermutationResult with the upper-tail p-value
    """
    check_pair(sample_a, sample_b, n)
    design_a = StandardizedDesign(sample_a.X)
    design_b = StandardizedDesign(sample_b.X)
    rho_observed = cosine(design_a.direction(sample_a.y), design_b.direction(sample_b.y))

    def draw(rng: np.random.Generator) -> float:
        order_a = rng.permutation(sample_a.n)
        order_b = rng.permutation(sample_b.n)
        return cosine(
            design_a.direction(sample_a.y[order_a]),
            design_b.direction(sample_b.y[order_b]),
        )

    null = run_replicates(draw, n, seed, workers, 'alignment permutations')
    p_value = permutation_p_value(null, rho_observed, UPPER)
    logger.info(
        f"Alignment test {sample_a.language}-{sample_b.language}/{sample_a.dimension}: "
        f"rho={rho_observed:.4f}, p={p_value:.4g} (n={n})"
    )
    return PermutationResult(rho_observed, null, p_value, n, UPPER, seed)


def difference_test(
    sample_a: JoinedSample,
    sample_b: JoinedSample,
    n: int = 1000,
    seed: int = 0,
    workers: int = 1
) -> PermutationResult:
    """
    Test H0: rho = 1 by reassigning pooled rows to groups of the original sizes.

    Labels are z-scored within each language before pooling.

    Returns:
        PermutationResult with the lower-tail p-value
    """
    check_pair(sample_a, sample_b, n)
    rho_observed = observed_cosine(sample_a, sample_b)

    X = np.vstack([sample_a.X, sample_b.X])
    y = np.concatenate([zscore(sample_a.y), zscore(sample_b.y)])
    n_a, total = sample_a.n, sample_a.n + sample_b.n

    def draw(rng: np.random.Generator) -> float:
        order = rng.permutation(total)
        group_a, group_b = order[:n_a], order[n_a:]
        return cosine(
            StandardizedDesign(X[group_a]).direction(y[group_a]),
            StandardizedDesign(X[group_b]).direction(y[group_b]),
        )

    null = run_replicates(draw, n, seed, workers, 'difference permutations')
    p_value = permutation_p_value(null, rho_observed, LOWER)
    logger.info(
        f"Difference test {sample_a.language}-{sample_b.language}/{sample_a.dimension}: "
        f"rho={rho_observed:.4f}, p={p_value:.4g} (n={n})"
    )
    return PermutationResult(rho_observed, null, p_value, n, LOWER, seed)


def run_replicates(
    draw: Callable[[np.random.Generator], float],
    n: int,
    seed: int,
    workers: int,
    label: str
) -> np.ndarray:
    generators = spawn_generators(seed, n)
    samples = run_ordered(
        lambda t: resample_with_retries(draw, generators[t], t),
        list(range(n)),
        workers=workers,
        label=label,
    )
    return np.array(samples, dtype=np.float64)


def null_histogram(samples: np.ndarray, bins: int = 40) -> Dict[str, List[float]]:
    """Histogram of replicate statistics for external plotting."""
    counts, edges = np.histogram(np.asarray(samples, dtype=np.float64), bins=bins)
    return {'bin_edges': [float(e) for e in edges], 'counts': [int(c) for c in counts]}
