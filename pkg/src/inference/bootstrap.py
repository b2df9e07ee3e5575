"""
Hybrid Fisher-z bootstrap interval for the cross-lingual cosine.

Only the spread comes from the bootstrap; the interval is centered on the
observed cosine and built on the arctanh scale, then mapped back with tanh.
"""
import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from fitting.pls import StandardizedDesign
from lexicon.norms import JoinedSample

from .permutation import check_pair, run_replicates, cosine, observed_cosine

logger = logging.getLogger(__name__)

CLAMP = 1.0 - 1e-12
Z_CRITICAL = 1.96
MIN_REPLICATES = 100


@dataclass
class BootstrapResult:
    rho_observed: float
    sigma_z: float
    ci_low: float
    ci_high: float
    B: int
    replicate_rhos: np.ndarray


def fisher_z(rho: float) -> float:
    """arctanh of rho clamped away from +-1."""
    return float(np.arctanh(np.clip(rho, -CLAMP, CLAMP)))


def fisher_z_interval(rho: float, sigma_z: float, z_crit: float = Z_CRITICAL) -> Tuple[float, float]:
    """
    [tanh(z - z_crit * sigma), tanh(z + z_crit * sigma)] with z = arctanh(rho).

    The endpoints bracket the clamped rho and never reach +-1.
    """
    center = float(np.clip(rho, -CLAMP, CLAMP))
    z = fisher_z(center)
    low = float(np.tanh(z - z_crit * sigma_z))
    high = float(np.tanh(z + z_crit * sigma_z))
    low = float(np.clip(min(low, center), -CLAMP, CLAMP))
    high = float(np.clip(max(high, center), -CLAMP, CLAMP))
    return low, high


def bootstrap_interval(
    sample_a: JoinedSample,
    sample_b: JoinedSample,
    B: int = 1000,
    seed: int = 0,
    workers: int = 1
) -> BootstrapResult:
    """
    Resample (word, label) pairs with replacement within each sample and refit.

    Args:
        sample_a: First language sample
        sample_b: Second language sample
        B: Number of bootstrap replicates (at least 100)
        seed: Root seed
        workers: Concurrent workers

    Returns:
        BootstrapResult with the 95% hybrid interval
    """
    if B < MIN_REPLICATES:
        raise ValueError(f"Bootstrap needs at least {MIN_REPLICATES} replicates, got {B}")
    check_pair(sample_a, sample_b, B)
    rho_observed = observed_cosine(sample_a, sample_b)

    def draw(rng: np.random.Generator) -> float:
        rows_a = rng.integers(0, sample_a.n, sample_a.n)
        rows_b = rng.integers(0, sample_b.n, sample_b.n)
        return cosine(
            StandardizedDesign(sample_a.X[rows_a]).direction(sample_a.y[rows_a]),
            StandardizedDesign(sample_b.X[rows_b]).direction(sample_b.y[rows_b]),
        )

    rhos = run_replicates(draw, B, seed, workers, 'bootstrap replicates')
    z_values = np.arctanh(np.clip(rhos, -CLAMP, CLAMP))
    sigma_z = float(np.std(z_values, ddof=1))
    ci_low, ci_high = fisher_z_interval(rho_observed, sigma_z)

    logger.info(
        f"Bootstrap {sample_a.language}-{sample_b.language}/{sample_a.dimension}: "
        f"rho={rho_observed:.4f}, sigma_z={sigma_z:.4f}, CI=[{ci_low:.4f}, {ci_high:.4f}] (B={B})"
    )
    return BootstrapResult(
        rho_observed=float(np.clip(rho_observed, -CLAMP, CLAMP)),
        sigma_z=sigma_z,
        ci_low=ci_low,
        ci_high=ci_high,
        B=B,
        replicate_rhos=rhos,
    )
