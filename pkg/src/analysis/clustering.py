"""
Silhouette-selected k-means clustering of pole vocabularies.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from sklearn.cluster import KMeans
from sklearn.metrics import silhouette_score

from embeddings.store import EmbeddingSpace
from utils.errors import ClusteringError, ZeroNormError
from utils.parallel import run_ordered

from .difference import NEGATIVE, POSITIVE, DifferenceGradient

logger = logging.getLogger(__name__)

MAX_ITER = 300
MAX_RESEEDS = 5
DISPERSION_EPSILON = 1e-12


@dataclass
class Cluster:
    words: List[str]
    n: int
    centroid_cos: float
    coherence: float


@dataclass
class ClusterReport:
    pole: str
    clusters: List[Cluster]
    k: int
    silhouette: float
    vocabulary_source: str
    silhouette_by_k: Dict[int, float] = field(default_factory=dict)
    inertia: float = 0.0


@dataclass
class _Partition:
    k: int
    labels: np.ndarray
    inertia: float
    silhouette: float


def _unit(rows: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(rows, axis=1)
    if np.any(norms == 0.0):
        raise ClusteringError('Cannot cluster zero-norm vectors')
    return rows / norms[:, None]


def cluster_metrics(cluster_rows: np.ndarray, dg: DifferenceGradient) -> Tuple[float, float]:
    """
    (cosine of the cluster centroid with the unit difference gradient, coherence).

    Coherence is the mean cosine over all unordered pairs of distinct members;
    a singleton has coherence 1.0.

    Raises:
        ZeroNormError: The centroid (or a member) has zero norm
    """
    rows = np.asarray(cluster_rows, dtype=np.float64)
    if rows.ndim != 2 or rows.shape[0] < 1:
        raise ClusteringError('A cluster needs at least one row')
    centroid = rows.mean(axis=0)
    centroid_norm = np.linalg.norm(centroid)
    if centroid_norm == 0.0:
        raise ZeroNormError('<cluster centroid>')
    centroid_cos = float(centroid @ dg.delta_unit / centroid_norm)

    n = rows.shape[0]
    if n == 1:
        return centroid_cos, 1.0
    norms = np.linalg.norm(rows, axis=1)
    if np.any(norms == 0.0):
        raise ZeroNormError('<cluster member>')
    unit = rows / norms[:, None]
    upper = np.triu_indices(n, k=1)
    coherence = float(np.mean((unit @ unit.T)[upper]))
    return centroid_cos, coherence


def farthest_first_seeds(rows: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """Greedy farthest-first centers starting from a random row."""
    chosen = [int(rng.integers(rows.shape[0]))]
    distances = np.sum((rows - rows[chosen[0]]) ** 2, axis=1)
    for _ in range(1, k):
        nxt = int(np.argmax(distances))
        chosen.append(nxt)
        distances = np.minimum(distances, np.sum((rows - rows[nxt]) ** 2, axis=1))
    return rows[chosen].copy()


def _kmeans(rows: np.ndarray, k: int, seed: int, restarts: int) -> Optional[_Partition]:
    """Best of several farthest-first k-means runs; None when every run leaves a cluster empty."""
    best = None
    for restart in range(restarts):
        for attempt in range(MAX_RESEEDS + 1):
            rng = np.random.default_rng([seed, k, restart, attempt])
            model = KMeans(
                n_clusters=k,
                init=farthest_first_seeds(rows, k, rng),
                n_init=1,
                max_iter=MAX_ITER,
                tol=0.0,
                algorithm='lloyd',
            ).fit(rows)
            sizes = np.bincount(model.labels_, minlength=k)
            if np.all(sizes > 0):
                break
            logger.warning(f"k={k} restart {restart}: empty cluster, re-seeding")
        else:
            continue
        if best is None or model.inertia_ < best.inertia:
            best = _Partition(k, model.labels_.copy(), float(model.inertia_), 0.0)
    if best is not None:
        best.silhouette = float(silhouette_score(rows, best.labels, metric='euclidean'))
    return best


def _partition(
    rows: np.ndarray,
    k_min: int,
    k_max: int,
    seed: int,
    restarts: int,
    workers: int
) -> Tuple[_Partition, Dict[int, float]]:
    n = rows.shape[0]
    if k_min < 2:
        raise ClusteringError(f"k_min must be at least 2, got {k_min}")
    spread = np.max(np.linalg.norm(rows - rows.mean(axis=0), axis=1))
    if spread <= DISPERSION_EPSILON:
        raise ClusteringError('All candidate vectors are identical (zero dispersion)')

    ks = [k for k in range(k_min, k_max + 1) if k < n]
    if len(ks) < k_max - k_min + 1:
        logger.warning(f"Skipping k >= {n}: silhouette undefined for {n} candidates")
    if not ks:
        raise ClusteringError(f"No usable k in [{k_min}, {k_max}] for {n} candidates")

    partitions = run_ordered(lambda k: _kmeans(rows, k, seed, restarts), ks, workers=workers, label='k values')
    best = None
    scores = {}
    for partition in partitions:
        if partition is None:
            continue
        scores[partition.k] = partition.silhouette
        # Ascending k, strict improvement: ties go to the smaller k
        if best is None or partition.silhouette > best.silhouette:
            best = partition
    if best is None:
        raise ClusteringError('Every k-means run left an empty cluster')
    return best, scores


def _build_clusters(
    words: Sequence[str],
    raw_rows: np.ndarray,
    unit_rows: np.ndarray,
    labels: np.ndarray,
    dg: DifferenceGradient
) -> List[Cluster]:
    clusters = []
    for label in np.unique(labels):
        members = np.flatnonzero(labels == label)
        centroid_cos, coherence = cluster_metrics(raw_rows[members], dg)
        centroid = unit_rows[members].mean(axis=0)
        closeness = unit_rows[members] @ centroid
        ordered = members[np.argsort(-closeness, kind='stable')]
        clusters.append(Cluster(
            words=[words[i] for i in ordered],
            n=int(members.size),
            centroid_cos=centroid_cos,
            coherence=coherence,
        ))
    clusters.sort(key=lambda c: -c.centroid_cos)
    return clusters


def _rows(words: Sequence[str], space: EmbeddingSpace) -> np.ndarray:
    missing = [w for w in words if w not in space]
    if missing:
        raise ClusteringError(f"{len(missing)} candidate words missing from '{space.language}', e.g. {missing[0]}")
    return space.vectors[[space.index_of(w) for w in words]]


def cluster_pole(
    words: Sequence[str],
    space: EmbeddingSpace,
    dg: DifferenceGradient,
    k_min: int = 2,
    k_max: int = 10,
    seed: int = 0,
    pole: str = POSITIVE,
    restarts: int = 10,
    workers: int = 1
) -> ClusterReport:
    """
    Cluster one pole's candidate words with k chosen by maximum silhouette.

    Rows are unit-normalized, so Euclidean k-means and silhouette follow the
    cosine geometry. Clusters are ordered by centroid cosine, descending; words
    inside a cluster by closeness to its centroid.

    Args:
        words: Candidate words (e.g. from select_pole_candidates)
        space: Vocabulary the words come from
        dg: Difference gradient
        k_min: Smallest k tried (>= 2)
        k_max: Largest k tried
        seed: Seed for the farthest-first starts
        pole: Pole label recorded on the report
        restarts: k-means starts per k; the lowest inertia run is kept
        workers: Concurrent workers over k

    Returns:
        ClusterReport

    Raises:
        ClusteringError: Zero dispersion or no usable k
    """
    raw_rows = _rows(words, space)
    unit_rows = _unit(raw_rows)
    best, scores = _partition(unit_rows, k_min, k_max, seed, restarts, workers)
    clusters = _build_clusters(words, raw_rows, unit_rows, best.labels, dg)
    logger.info(
        f"{space.language} {pole} pole: k={best.k}, silhouette={best.silhouette:.3f}, "
        f"sizes={[c.n for c in clusters]}"
    )
    return ClusterReport(
        pole=pole,
        clusters=clusters,
        k=best.k,
        silhouette=best.silhouette,
        vocabulary_source=space.language,
        silhouette_by_k=scores,
        inertia=best.inertia,
    )


def cluster_poles_jointly(
    positive_words: Sequence[str],
    negative_words: Sequence[str],
    space: EmbeddingSpace,
    dg: DifferenceGradient,
    k_min: int = 2,
    k_max: int = 10,
    seed: int = 0,
    restarts: int = 10,
    workers: int = 1
) -> Tuple[ClusterReport, ClusterReport]:
    """
    Cluster both poles' candidates in one pass; each cluster joins the pole its
    centroid cosine points to.
    """
    words = list(dict.fromkeys(list(positive_words) + list(negative_words)))
    raw_rows = _rows(words, space)
    unit_rows = _unit(raw_rows)
    best, scores = _partition(unit_rows, k_min, k_max, seed, restarts, workers)
    clusters = _build_clusters(words, raw_rows, unit_rows, best.labels, dg)

    reports = []
    for pole, keep in ((POSITIVE, lambda c: c.centroid_cos >= 0), (NEGATIVE, lambda c: c.centroid_cos < 0)):
        reports.append(ClusterReport(
            pole=pole,
            clusters=[c for c in clusters if keep(c)],
            k=best.k,
            silhouette=best.silhouette,
            vocabulary_source=space.language,
            silhouette_by_k=scores,
            inertia=best.inertia,
        ))
    logger.info(f"{space.language} joint clustering: k={best.k}, silhouette={best.silhouette:.3f}")
    return reports[0], reports[1]
