"""
Cross-lingual comparison of gradients: cosine, permutation tests and bootstrap interval.
"""
from .bootstrap import BootstrapResult, bootstrap_interval, fisher_z, fisher_z_interval
from .permutation import (
    LOWER,
    UPPER,
    PermutationResult,
    alignment_test,
    cosine,
    difference_test,
    null_histogram,
    observed_cosine,
    permutation_p_value,
)

__all__ = [
    'LOWER', 'UPPER', 'BootstrapResult', 'PermutationResult', 'alignment_test',
    'bootstrap_interval', 'cosine', 'difference_test', 'fisher_z', 'fisher_z_interval',
    'null_histogram', 'observed_cosine', 'permutation_p_value',
]
