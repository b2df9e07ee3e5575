"""
Shared fixtures: synthetic joined samples and planted-gradient datasets.
"""
import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from embeddings.store import preprocess  # noqa: E402
from lexicon.norms import JoinedSample, join  # noqa: E402
from synth.generator import SynthSpec, generate  # noqa: E402
from utils.base import Base  # noqa: E402


@pytest.fixture(autouse=True)
def fresh_singletons():
    """Report writers are shared per output directory; tests must not see each other's."""
    Base.clear_instances()
    yield
    Base.clear_instances()


def synth_samples(**overrides):
    """
    Generate a synthetic pair and return (dataset, sample_a, sample_b), joined on
    preprocessed spaces.
    """
    dataset = generate(SynthSpec(**overrides))
    prepared_a = preprocess(dataset.space_a)
    prepared_b = preprocess(dataset.space_b)
    dimension = dataset.spec.dimension
    sample_a = join(dataset.lexicon_a, prepared_a, dimension, min_samples=10)
    sample_b = join(dataset.lexicon_b, prepared_b, dimension, min_samples=10)
    return dataset, sample_a, sample_b


def gaussian_sample(
    rng: np.random.Generator,
    n: int,
    d: int,
    w: np.ndarray = None,
    noise: float = 0.1,
    language: str = 'a',
    dimension: str = 'valence'
) -> JoinedSample:
    """Independent Gaussian rows with labels <x, w> + noise (pure noise when w is None)."""
    X = rng.standard_normal((n, d))
    signal = X @ w if w is not None else np.zeros(n)
    y = signal + noise * rng.standard_normal(n)
    words = tuple(f"{language}{i:05d}" for i in range(n))
    return JoinedSample(words=words, X=X, y=y, language=language, dimension=dimension)


def unit_vector(rng: np.random.Generator, d: int) -> np.ndarray:
    v = rng.standard_normal(d)
    return v / np.linalg.norm(v)


def write_text(path, text: str) -> str:
    with open(path, 'w', encoding='utf-8') as f:
        f.write(text)
    return str(path)
