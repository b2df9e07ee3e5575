"""
Word-vector storage: loading, preprocessing and lookups.

Preprocessing follows a fixed order: L2 normalization, removal of the first
principal direction of the mean-centered vocabulary, renormalization.
"""
import logging
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from utils.errors import DegenerateVarianceError, InputFormatError, ZeroNormError

logger = logging.getLogger(__name__)

POWER_TOLERANCE = 1e-10
POWER_MAX_ITER = 10000
POWER_SEED = 12345


@dataclass(frozen=True)
class Preprocessing:
    l2_normalized: bool = False
    first_pc_removed: bool = False


@dataclass(frozen=True, eq=False)
class EmbeddingSpace:
    """
    Vocabulary plus a V x d matrix; row i is the vector of vocab[i].

    Instances are never mutated; preprocessing returns new spaces.
    """
    language: str
    vocab: Tuple[str, ...]
    vectors: np.ndarray
    preprocessed: Preprocessing = field(default_factory=Preprocessing)
    removed_direction: Optional[np.ndarray] = None
    _index: Dict[str, int] = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self):
        vectors = np.array(self.vectors, dtype=np.float64)
        if vectors.ndim != 2:
            raise InputFormatError(f"Vectors must be a matrix, got shape {vectors.shape}")
        if vectors.shape[0] != len(self.vocab):
            raise InputFormatError(
                f"{len(self.vocab)} words but {vectors.shape[0]} vector rows"
            )
        if vectors.shape[1] < 2:
            raise InputFormatError(f"Dimensionality must be at least 2, got {vectors.shape[1]}")
        vectors.setflags(write=False)
        object.__setattr__(self, 'vectors', vectors)
        object.__setattr__(self, 'vocab', tuple(self.vocab))

        index = {}
        for i, word in enumerate(self.vocab):
            if word in index:
                raise InputFormatError(f"Duplicate word '{word}'")
            index[word] = i
        object.__setattr__(self, '_index', index)

    @property
    def size(self) -> int:
        return len(self.vocab)

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def __contains__(self, word: str) -> bool:
        return word in self._index

    def index_of(self, word: str) -> Optional[int]:
        return self._index.get(word)


def load_embeddings(path: str, max_vocab: Optional[int] = None, language: str = '') -> EmbeddingSpace:
    """
    Load a whitespace-separated word-vector text file.

    An optional first line "V d" is treated as a header. Every other line is
    a word followed by d floats.

    Args:
        path: File path
        max_vocab: Keep only the first max_vocab words (file order)
        language: Language identifier recorded on the space

    Returns:
        EmbeddingSpace with preprocessing flags unset

    Raises:
        InputFormatError: On inconsistent dimensionality, duplicate words or bad floats
    """
    if max_vocab is not None and max_vocab < 1:
        raise InputFormatError('max_vocab must be a positive integer', path=path)

    words: List[str] = []
    rows: List[List[float]] = []
    seen = set()
    dim = None

    with open(path, 'r', encoding='utf-8') as f:
        for line_no, line in enumerate(f, start=1):
            parts = line.rstrip('\n').split()
            if not parts:
                continue
            if line_no == 1 and len(parts) == 2 and _is_header(parts):
                dim = int(parts[1])
                continue
            if max_vocab is not None and len(words) >= max_vocab:
                break

            word, values = parts[0], parts[1:]
            if dim is None:
                dim = len(values)
            if len(values) != dim:
                raise InputFormatError(
                    f"Expected {dim} values for '{word}', found {len(values)} "
                    f"(inconsistent dimensionality)",
                    path=path, line=line_no
                )
            try:
                row = [float(v) for v in values]
            except ValueError as e:
                raise InputFormatError(f"Unparseable float for '{word}': {e}", path=path, line=line_no)
            if word in seen:
                raise InputFormatError(f"Duplicate word '{word}'", path=path, line=line_no)
            seen.add(word)
            words.append(word)
            rows.append(row)

    if not words:
        raise InputFormatError('No word vectors found', path=path)

    logger.info(f"Loaded {len(words)} vectors (d={dim}) from {path}")
    return EmbeddingSpace(language=language, vocab=tuple(words), vectors=np.array(rows, dtype=np.float64))


def _is_header(parts: Sequence[str]) -> bool:
    return all(p.isdigit() for p in parts)


def save_embeddings(space: EmbeddingSpace, path: str, precision: int = 9):
    """
    Write a space in the word-vector text format with a "V d" header.

    Args:
        space: Space to write
        path: Destination file
        precision: Significant digits per float
    """
    fmt = f"%.{precision}g"
    with open(path, 'w', encoding='utf-8') as f:
        f.write(f"{space.size} {space.dim}\n")
        for word, row in zip(space.vocab, space.vectors):
            f.write(word + ' ' + ' '.join(fmt % v for v in row) + '\n')
    logger.debug(f"Wrote {space.size} vectors to {path}")


def lookup(space: EmbeddingSpace, word: str) -> Optional[np.ndarray]:
    """Row for word, or None when the word is not in the vocabulary."""
    index = space.index_of(word)
    if index is None:
        return None
    return space.vectors[index]


def _unit_rows(vectors: np.ndarray, vocab: Sequence[str]) -> np.ndarray:
    norms = np.linalg.norm(vectors, axis=1)
    zero = np.flatnonzero(norms == 0.0)
    if zero.size:
        raise ZeroNormError(vocab[zero[0]])
    return vectors / norms[:, None]


def l2_normalize(space: EmbeddingSpace) -> EmbeddingSpace:
    """
    Scale every row to unit Euclidean norm.

    Raises:
        ZeroNormError: Naming the first zero-norm word
    """
    unit = _unit_rows(space.vectors, space.vocab)
    return replace(
        space,
        vectors=unit,
        preprocessed=replace(space.preprocessed, l2_normalized=True),
    )


def top_principal_direction(matrix: np.ndarray) -> np.ndarray:
    """
    Unit top principal direction of a matrix (rows as observations).

    Power iteration on the covariance from a fixed-seed start vector.

    Raises:
        DegenerateVarianceError: When the rows carry no variance
    """
    centered = matrix - matrix.mean(axis=0)
    total = float(np.sum(centered * centered))
    if total <= 1e-24 * max(1.0, float(np.sum(matrix * matrix))):
        raise DegenerateVarianceError('All rows are identical (zero variance)')

    cov = centered.T @ centered
    u = np.random.default_rng(POWER_SEED).standard_normal(cov.shape[0])
    u /= np.linalg.norm(u)
    for _ in range(POWER_MAX_ITER):
        nxt = cov @ u
        norm = np.linalg.norm(nxt)
        if norm == 0.0:
            raise DegenerateVarianceError('Power iteration collapsed to zero')
        nxt /= norm
        # Sign of the iterate is irrelevant
        if nxt @ u < 0:
            nxt = -nxt
        delta = np.linalg.norm(nxt - u)
        u = nxt
        if delta < POWER_TOLERANCE:
            break
    else:
        logger.warning(f"Power iteration did not reach tolerance {POWER_TOLERANCE}")
    return u


def _project_out(space: EmbeddingSpace, u1: np.ndarray) -> EmbeddingSpace:
    vectors = space.vectors
    # Removes the centered component and the mean's component, so every row ends orthogonal to u1
    stripped = vectors - np.outer(vectors @ u1, u1)
    unit = _unit_rows(stripped, space.vocab)
    return replace(
        space,
        vectors=unit,
        preprocessed=Preprocessing(l2_normalized=True, first_pc_removed=True),
        removed_direction=u1,
    )


def remove_first_component(space: EmbeddingSpace) -> EmbeddingSpace:
    """
    Remove the first principal direction of variance and renormalize rows.

    Raises:
        DegenerateVarianceError: V < 2 or identical rows
    """
    if space.size < 2:
        raise DegenerateVarianceError('Component removal needs at least two words')
    u1 = top_principal_direction(space.vectors)
    logger.info(f"Removed first principal direction from '{space.language}' ({space.size} words)")
    return _project_out(space, u1)


def remove_first_component_joint(spaces: Sequence[EmbeddingSpace]) -> List[EmbeddingSpace]:
    """
    Remove one principal direction computed over all vocabularies stacked together.

    Each vocabulary is mean-centered on its own before stacking so that language
    offsets do not masquerade as the shared direction.
    """
    if not spaces:
        return []
    dims = {s.dim for s in spaces}
    if len(dims) != 1:
        raise DegenerateVarianceError(f"Spaces have different dimensionality: {sorted(dims)}")
    stacked = np.vstack([s.vectors - s.vectors.mean(axis=0) for s in spaces])
    if stacked.shape[0] < 2:
        raise DegenerateVarianceError('Component removal needs at least two words')
    u1 = top_principal_direction(stacked)
    logger.info(f"Removed joint first principal direction from {len(spaces)} spaces")
    return [_project_out(s, u1) for s in spaces]


def preprocess(space: EmbeddingSpace, l2: bool = True, remove_component: bool = True) -> EmbeddingSpace:
    """normalize, remove component, renormalize."""
    if l2:
        space = l2_normalize(space)
    if remove_component:
        space = remove_first_component(space)
    return space


def nearest_words(space: EmbeddingSpace, direction: np.ndarray, top_n: int = 10) -> List[Tuple[str, float]]:
    """
    Vocabulary words ranked by cosine with a direction.

    Args:
        space: Vocabulary to search
        direction: Query direction (any norm)
        top_n: Number of words to return

    Returns:
        (word, cosine) pairs, most similar first
    """
    direction = np.asarray(direction, dtype=np.float64)
    norms = np.linalg.norm(space.vectors, axis=1) * np.linalg.norm(direction)
    with np.errstate(invalid='ignore', divide='ignore'):
        cosines = np.where(norms > 0, space.vectors @ direction / norms, 0.0)
    order = np.argsort(-cosines, kind='stable')[:top_n]
    return [(space.vocab[i], float(cosines[i])) for i in order]
