"""
Rating lexicons: ingestion, z-scoring and joins with an embedding space.
"""
import logging
import re
from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from embeddings.store import EmbeddingSpace
from utils.errors import (
    ConfigurationError,
    DegenerateVarianceError,
    InputFormatError,
    InsufficientSampleError,
)

logger = logging.getLogger(__name__)

DEFAULT_MIN_SAMPLES = 50
STD_EPSILON = 1e-12


@dataclass(frozen=True, eq=False)
class NormLexicon:
    """Per-language word -> {dimension -> score} table, words lowercased and unique."""
    language: str
    dimensions: Tuple[str, ...]
    entries: Dict[str, Dict[str, float]]

    @property
    def words(self) -> Tuple[str, ...]:
        return tuple(self.entries.keys())

    def __len__(self) -> int:
        return len(self.entries)

    def scores(self, dimension: str) -> np.ndarray:
        return np.array([scores[dimension] for scores in self.entries.values()], dtype=np.float64)


@dataclass(frozen=True, eq=False)
class JoinedSample:
    """
    Lexicon words found in an embedding space, with their rows and labels.
    """
    words: Tuple[str, ...]
    X: np.ndarray
    y: np.ndarray
    language: str
    dimension: str
    dropped_oov: int = 0

    @property
    def n(self) -> int:
        return len(self.words)

    def with_labels(self, y: np.ndarray) -> 'JoinedSample':
        """Same words and rows with replacement labels."""
        return JoinedSample(self.words, self.X, np.asarray(y, dtype=np.float64),
                            self.language, self.dimension, self.dropped_oov)


def _parse_score(text: str) -> float:
    # Correctly rounded parse, so values written at 9 significant digits read back exactly
    try:
        return float(text)
    except ValueError:
        return float('nan')


def load_lexicon(path: str, language: str) -> NormLexicon:
    """
    Load a rating lexicon CSV with header ``word,<dim1>[,<dim2>...]``.

    Words are lowercased; for duplicates the first occurrence is kept.

    Args:
        path: CSV file path
        language: Language identifier

    Returns:
        NormLexicon

    Raises:
        InputFormatError: Empty file, missing header or a non-numeric score
    """
    # Header read as a data row; a row wider than it fails to tokenize
    try:
        frame = pd.read_csv(path, header=None, dtype=str, keep_default_na=False, encoding='utf-8')
    except pd.errors.EmptyDataError:
        raise InputFormatError('Lexicon file is empty', path=path)
    except pd.errors.ParserError as e:
        match = re.search(r'line (\d+)', str(e))
        raise InputFormatError(f"Malformed CSV: {str(e).strip()}", path=path,
                               line=int(match.group(1)) if match else None)

    columns = [str(c).strip() for c in frame.iloc[0]]
    frame = frame.iloc[1:].reset_index(drop=True)
    if len(columns) < 2 or columns[0].lower() != 'word':
        raise InputFormatError("Missing header 'word,<dimension>[,...]'", path=path, line=1)
    frame.columns = ['word'] + [c.lower() for c in columns[1:]]
    dimensions = tuple(frame.columns[1:])
    if len(set(dimensions)) != len(dimensions):
        raise InputFormatError('Duplicate dimension names in header', path=path, line=1)
    if frame.empty:
        raise InputFormatError('Lexicon has a header but no rows', path=path)

    frame['word'] = frame['word'].str.strip().str.lower()
    for dimension in dimensions:
        raw = frame[dimension].str.strip()
        numeric = raw.map(_parse_score).astype(np.float64)
        bad = numeric.isna() | ~np.isfinite(numeric.fillna(0.0))
        if bad.any():
            row = int(np.flatnonzero(bad.to_numpy())[0])
            raise InputFormatError(
                f"Non-numeric {dimension} score '{raw.iloc[row]}' for word '{frame['word'].iloc[row]}'",
                path=path, line=row + 2
            )
        frame[dimension] = numeric.astype(np.float64)

    duplicated = frame.duplicated(subset='word', keep='first')
    for row in np.flatnonzero(duplicated.to_numpy()):
        logger.warning(f"{path}:{row + 2}: duplicate word '{frame['word'].iloc[row]}' ignored (first kept)")
    frame = frame[~duplicated]

    entries = {
        record['word']: {dimension: float(record[dimension]) for dimension in dimensions}
        for record in frame.to_dict(orient='records')
    }
    logger.info(f"Loaded {len(entries)} {language} lexicon entries ({', '.join(dimensions)}) from {path}")
    return NormLexicon(language=language, dimensions=dimensions, entries=entries)


def save_lexicon(lexicon: NormLexicon, path: str, precision: int = 9):
    """Write a lexicon as CSV with ``precision`` significant digits."""
    frame = pd.DataFrame(
        [[word] + [scores[d] for d in lexicon.dimensions] for word, scores in lexicon.entries.items()],
        columns=['word'] + list(lexicon.dimensions),
    )
    frame.to_csv(path, index=False, float_format=f"%.{precision}g", encoding='utf-8')


def zscore(values: Sequence[float]) -> np.ndarray:
    """
    Standardize to mean 0 and population standard deviation 1.

    Raises:
        DegenerateVarianceError: Fewer than two values or constant input
    """
    values = np.asarray(values, dtype=np.float64)
    if values.size < 2:
        raise DegenerateVarianceError('z-scoring needs at least two values')
    centered = values - values.mean()
    std = np.sqrt(np.mean(centered * centered))
    if std <= STD_EPSILON:
        raise DegenerateVarianceError('Cannot z-score constant values (zero variance)')
    return centered / std


def join(
    lexicon: NormLexicon,
    space: EmbeddingSpace,
    dimension: str,
    min_samples: int = DEFAULT_MIN_SAMPLES,
    require_preprocessed: bool = True
) -> JoinedSample:
    """
    Align lexicon words with embedding rows for one dimension.

    Out-of-vocabulary words are dropped and counted. Row order follows the
    lexicon.

    Args:
        lexicon: Rating lexicon
        space: Embedding space
        dimension: Dimension to use as labels
        min_samples: Smallest acceptable N
        require_preprocessed: Enforce that both preprocessing flags are set

    Returns:
        JoinedSample

    Raises:
        ConfigurationError: Unknown dimension or unpreprocessed space
        InsufficientSampleError: N below min_samples
    """
    if dimension not in lexicon.dimensions:
        raise ConfigurationError(
            f"Dimension '{dimension}' not in {lexicon.language} lexicon ({', '.join(lexicon.dimensions)})"
        )
    flags = space.preprocessed
    if require_preprocessed and not (flags.l2_normalized and flags.first_pc_removed):
        raise ConfigurationError(
            f"Space '{space.language}' must be L2-normalized with the first component removed before joining"
        )

    words, rows, labels = [], [], []
    for word, scores in lexicon.entries.items():
        index = space.index_of(word)
        if index is None:
            continue
        words.append(word)
        rows.append(index)
        labels.append(scores[dimension])

    dropped = len(lexicon) - len(words)
    X = space.vectors[np.array(rows, dtype=np.intp)] if rows else np.empty((0, space.dim))
    sample = JoinedSample(
        words=tuple(words),
        X=X,
        y=np.array(labels, dtype=np.float64),
        language=lexicon.language,
        dimension=dimension,
        dropped_oov=dropped,
    )
    logger.info(
        f"Joined {lexicon.language}/{dimension}: N={sample.n}, dropped_oov={dropped}"
    )
    if sample.n < min_samples:
        raise InsufficientSampleError(
            f"{lexicon.language}/{dimension}: only {sample.n} lexicon words found in the space "
            f"(minimum {min_samples})"
        )
    return sample


def join_summary(sample: JoinedSample) -> Dict[str, Any]:
    """Join record for the run report."""
    return {
        'language': sample.language,
        'dimension': sample.dimension,
        'N': sample.n,
        'dropped_oov': sample.dropped_oov,
    }


def composition_diagnostics(
    sample_a: JoinedSample,
    sample_b: JoinedSample,
    translations: Optional[str] = None
) -> Dict[str, Any]:
    """
    Lexical-composition diagnostics for a pair of samples.

    Args:
        sample_a: First sample
        sample_b: Second sample
        translations: Optional two-column CSV (word in A, word in B)

    Returns:
        Sizes, shared word forms and, when translations are given, the number
        of translation pairs present in both samples
    """
    words_a, words_b = set(sample_a.words), set(sample_b.words)
    diagnostics: Dict[str, Any] = {
        'n_a': sample_a.n,
        'n_b': sample_b.n,
        'shared_word_forms': len(words_a & words_b),
        'translation_pairs': None,
    }
    if translations:
        frame = pd.read_csv(translations, index_col=False, dtype=str, keep_default_na=False, encoding='utf-8')
        if frame.shape[1] < 2:
            raise InputFormatError('Translation file needs two columns', path=translations)
        source = frame.iloc[:, 0].str.strip().str.lower()
        target = frame.iloc[:, 1].str.strip().str.lower()
        diagnostics['translation_pairs'] = int(sum(
            1 for a, b in zip(source, target) if a in words_a and b in words_b
        ))
    return diagnostics
