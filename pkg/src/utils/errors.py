"""
Exception hierarchy for the gradient pipeline.

Every error carries the process exit code the CLI maps it to:
2 for invalid input or configuration, 3 for statistical degeneracy.
"""
from typing import List, Optional

EXIT_VALIDATION = 2
EXIT_DEGENERATE = 3


class SSDError(Exception):
    """Base class for all pipeline errors."""
    exit_code = 1


class InputFormatError(SSDError):
    """Raised when an embeddings or lexicon file cannot be parsed."""
    exit_code = EXIT_VALIDATION

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None):
        self.path = path
        self.line = line
        location = ''
        if path is not None:
            location = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(f"{location}{message}")


class ConfigurationError(SSDError):
    """Raised when required configuration is missing or invalid."""
    exit_code = EXIT_VALIDATION


class InsufficientSampleError(SSDError):
    """Raised when a joined sample falls below the minimum size floor."""
    exit_code = EXIT_VALIDATION


class DegenerateDataError(SSDError):
    """Raised when the data make a statistic undefined."""
    exit_code = EXIT_DEGENERATE


class ZeroNormError(DegenerateDataError):
    """A row (or centroid) has zero Euclidean norm."""

    def __init__(self, word: str):
        self.word = word
        super().__init__(f"Zero-norm vector for '{word}'")


class DegenerateVarianceError(DegenerateDataError):
    """Rows or columns carry no variance."""

    def __init__(self, message: str, columns: Optional[List[int]] = None):
        self.columns = columns or []
        super().__init__(message)


class DegenerateGradientError(DegenerateDataError):
    """Labels are orthogonal to every column; the gradient has no direction."""


class ComponentLimitError(DegenerateDataError):
    """PLS deflation exhausted the signal before the requested K."""

    def __init__(self, requested: int, achievable: int):
        self.requested = requested
        self.achievable = achievable
        super().__init__(
            f"Requested K={requested} components but only {achievable} can be extracted"
        )


class CoincidentGradientsError(DegenerateDataError):
    """Two gradients coincide, so their difference has no direction."""


class ResamplingExhaustedError(DegenerateDataError):
    """A resampling replicate stayed degenerate after every retry."""

    def __init__(self, replicate: int, retries: int, cause: Exception):
        self.replicate = replicate
        self.retries = retries
        super().__init__(
            f"Replicate {replicate} degenerate after {retries} retries: {cause}"
        )


class SplitFitError(DegenerateDataError):
    """A train/test split of the corrected t-test could not be fitted."""

    def __init__(self, split: int, cause: Exception):
        self.split = split
        super().__init__(f"Split {split} failed: {cause}")


class ClusteringError(DegenerateDataError):
    """Clustering input has no dispersion or no usable k."""


class DimensionMismatchError(SSDError):
    """Two vectors or spaces that must share a dimensionality do not."""
    exit_code = EXIT_VALIDATION
