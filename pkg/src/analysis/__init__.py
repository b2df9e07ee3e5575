"""
Difference-gradient analysis: pole vocabularies and their clusters.
"""
from .clustering import (
    Cluster,
    ClusterReport,
    cluster_metrics,
    cluster_pole,
    cluster_poles_jointly,
    farthest_first_seeds,
)
from .difference import (
    NEGATIVE,
    POSITIVE,
    DifferenceGradient,
    difference_gradient,
    select_pole_candidates,
)

__all__ = [
    'NEGATIVE', 'POSITIVE', 'Cluster', 'ClusterReport', 'DifferenceGradient',
    'cluster_metrics', 'cluster_pole', 'cluster_poles_jointly', 'difference_gradient',
    'farthest_first_seeds', 'select_pole_candidates',
]
