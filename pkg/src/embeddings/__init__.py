"""
Embedding store: word-vector files, preprocessing and lookups.
"""
from .store import (
    EmbeddingSpace,
    Preprocessing,
    l2_normalize,
    load_embeddings,
    lookup,
    nearest_words,
    preprocess,
    remove_first_component,
    remove_first_component_joint,
    save_embeddings,
)

__all__ = [
    'EmbeddingSpace', 'Preprocessing', 'l2_normalize', 'load_embeddings', 'lookup',
    'nearest_words', 'preprocess', 'remove_first_component',
    'remove_first_component_joint', 'save_embeddings',
]
