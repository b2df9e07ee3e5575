"""
Synthetic data with planted gradients and clusters.
"""
from .generator import (
    SynthDataset,
    SynthSpec,
    generate,
    generate_blobs,
    planted_directions,
    round_significant,
    write_dataset,
)

__all__ = [
    'SynthDataset', 'SynthSpec', 'generate', 'generate_blobs', 'planted_directions',
    'round_significant', 'write_dataset',
]
