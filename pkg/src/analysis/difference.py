"""
Difference gradient between two languages and its pole vocabularies.
"""
import logging
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from embeddings.store import EmbeddingSpace
from fitting.pls import Gradient
from inference.permutation import cosine
from utils.errors import CoincidentGradientsError, ConfigurationError, DimensionMismatchError

logger = logging.getLogger(__name__)

POSITIVE = 'positive'
NEGATIVE = 'negative'
COINCIDENCE_EPSILON = 1e-9
MIN_CANDIDATES = 10


@dataclass(frozen=True, eq=False)
class DifferenceGradient:
    """delta = g_a - g_b, with a unit copy used for every cosine."""
    delta: np.ndarray
    delta_unit: np.ndarray
    languages: Tuple[str, str]
    dimension: str
    source_cosine: float

    def pole_direction(self, pole: str) -> np.ndarray:
        if pole == POSITIVE:
            return self.delta_unit
        if pole == NEGATIVE:
            return -self.delta_unit
        raise ValueError(f"Unknown pole '{pole}'")


def difference_gradient(g_a: Gradient, g_b: Gradient) -> DifferenceGradient:
    """
    Raw difference of two unit gradients.

    Raises:
        DimensionMismatchError: Different dimensionality
        CoincidentGradientsError: The gradients coincide
    """
    if g_a.direction.shape != g_b.direction.shape:
        raise DimensionMismatchError(
            f"Gradient dimensions differ: {g_a.direction.shape} vs {g_b.direction.shape}"
        )
    delta = g_a.direction - g_b.direction
    norm = float(np.linalg.norm(delta))
    if norm <= COINCIDENCE_EPSILON:
        raise CoincidentGradientsError(
            f"Gradients {g_a.language} and {g_b.language} coincide (|delta|={norm:.3g})"
        )
    dg = DifferenceGradient(
        delta=delta,
        delta_unit=delta / norm,
        languages=(g_a.language, g_b.language),
        dimension=g_a.dimension or g_b.dimension,
        source_cosine=cosine(g_a, g_b),
    )
    logger.info(
        f"Difference gradient {g_a.language}-{g_b.language}/{dg.dimension}: "
        f"|delta|={norm:.4f}, cos(g_a, g_b)={dg.source_cosine:.4f}"
    )
    return dg


def select_pole_candidates(space: EmbeddingSpace, dg: DifferenceGradient, pole: str, M: int) -> List[str]:
    """
    The M vocabulary words projecting furthest along one pole of the difference gradient.

    Ties keep vocabulary order.

    Raises:
        ConfigurationError: M below the minimum or above the vocabulary size
    """
    if M < MIN_CANDIDATES:
        raise ConfigurationError(f"Need at least {MIN_CANDIDATES} pole candidates, got {M}")
    if M > space.size:
        raise ConfigurationError(f"Requested {M} pole candidates from a {space.size}-word vocabulary")
    if space.dim != dg.delta_unit.shape[0]:
        raise DimensionMismatchError(
            f"Space '{space.language}' has d={space.dim}, gradient has d={dg.delta_unit.shape[0]}"
        )
    projections = space.vectors @ dg.pole_direction(pole)
    order = np.argsort(-projections, kind='stable')[:M]
    return [space.vocab[i] for i in order]
