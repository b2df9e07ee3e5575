"""
Configuration management for the gradient pipeline.

Two layers: `Config` holds process settings read from the environment (and a
root .env file), `RunConfig` holds one analysis run read from a JSON document.
"""
import itertools
import json
import logging
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from dotenv import load_dotenv

from .errors import ConfigurationError

# Load environment variables from root .env file
env_path = Path(__file__).parent.parent.parent / '.env'
load_dotenv(dotenv_path=env_path)

_LOG_LEVELS = ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL')


def _int_env(name: str, default: Optional[int]) -> Optional[int]:
    raw = os.getenv(name)
    if raw is None or raw == '':
        return default
    try:
        return int(raw)
    except ValueError:
        return None


class Config:
    """Process-level settings for application runs."""

    # Worker threads for resampling and analysis units
    WORKERS = _int_env('SSD_WORKERS', 1)

    # Logging
    LOG_LEVEL = os.getenv('SSD_LOG_LEVEL', 'INFO').upper()
    LOG_FILE = os.getenv('SSD_LOG_FILE', 'ssd.log')

    # Minimum joined sample size; overrides the run config when set
    MIN_SAMPLES = _int_env('SSD_MIN_SAMPLES', None)

    # Optional real-data integration recipe
    INTEGRATION_CONFIG = os.getenv('SSD_INTEGRATION_CONFIG')

    @classmethod
    def validate(cls):
        """
        Validate environment settings.

        Raises:
            ConfigurationError: If a value is malformed
        """
        problems = []
        if cls.WORKERS is None or cls.WORKERS < 1:
            problems.append('SSD_WORKERS must be a positive integer')
        if cls.LOG_LEVEL not in _LOG_LEVELS:
            problems.append(f"SSD_LOG_LEVEL must be one of {', '.join(_LOG_LEVELS)}")
        if os.getenv('SSD_MIN_SAMPLES') and (cls.MIN_SAMPLES is None or cls.MIN_SAMPLES < 1):
            problems.append('SSD_MIN_SAMPLES must be a positive integer')

        if problems:
            raise ConfigurationError(
                f"Invalid environment configuration: {'; '.join(problems)}. "
                f"Please check your .env file."
            )


@dataclass
class LanguageInputs:
    """Input files for one language."""
    embeddings: str
    lexicon: str
    max_vocab: Optional[int] = None


@dataclass
class PreprocessingOptions:
    l2_normalize: bool = True
    remove_first_component: bool = True
    joint_component_removal: bool = False


@dataclass
class TestParameters:
    """Resampling and clustering parameters; defaults are the reference protocol values."""
    n_permutations: int = 1000
    n_bootstrap: int = 1000
    n_splits: int = 30
    test_fraction: float = 0.2
    k_max: int = 10
    cv_folds: int = 5
    m_candidates: int = 250
    k_range: Tuple[int, int] = (2, 10)
    alpha: float = 0.05
    min_samples: int = 50
    kmeans_restarts: int = 10
    histogram_bins: int = 40
    single_pass_clustering: bool = False
    cluster_gradient: str = 'selected'


@dataclass
class RunConfig:
    """
    One analysis run: inputs per language, dimensions, parameters, seed and output.
    """
    languages: Dict[str, LanguageInputs]
    dimensions: List[str]
    pairs: List[Tuple[str, str]] = field(default_factory=list)
    preprocessing: PreprocessingOptions = field(default_factory=PreprocessingOptions)
    tests: TestParameters = field(default_factory=TestParameters)
    seed: int = 0
    output_dir: str = 'ssd_output'
    translations: Optional[str] = None
    model: str = 'multilingual'
    source: Optional[str] = None

    @classmethod
    def from_file(cls, path: str) -> 'RunConfig':
        """
        Load a run configuration from a JSON file.

        Relative input paths are resolved against the config file's directory.

        Args:
            path: Path to the JSON document

        Returns:
            Parsed RunConfig (not yet validated)
        """
        try:
            with open(path, 'r', encoding='utf-8') as f:
                data = json.load(f)
        except FileNotFoundError:
            raise ConfigurationError(f"Config file not found: {path}")
        except json.JSONDecodeError as e:
            raise ConfigurationError(f"Invalid JSON in config {path}: {e}")

        config = cls.from_dict(data, base_dir=Path(path).resolve().parent)
        config.source = str(path)
        return config

    @classmethod
    def from_dict(cls, data: Dict[str, Any], base_dir: Optional[Path] = None) -> 'RunConfig':
        """Build a RunConfig from a plain dictionary, filling defaults."""
        if not isinstance(data, dict):
            raise ConfigurationError('Run config must be a JSON object')

        def resolve(value: Optional[str]) -> Optional[str]:
            if value is None or base_dir is None or os.path.isabs(value):
                return value
            return str(base_dir / value)

        languages = {}
        for name, entry in (data.get('languages') or {}).items():
            if not isinstance(entry, dict):
                raise ConfigurationError(f"Language '{name}' must map to an object")
            try:
                languages[name] = LanguageInputs(
                    embeddings=resolve(entry.get('embeddings')),
                    lexicon=resolve(entry.get('lexicon')),
                    max_vocab=entry.get('max_vocab'),
                )
            except TypeError as e:
                raise ConfigurationError(f"Language '{name}': {e}")

        try:
            preprocessing = PreprocessingOptions(**(data.get('preprocessing') or {}))
            test_fields = dict(data.get('tests') or {})
            if 'k_range' in test_fields:
                test_fields['k_range'] = tuple(test_fields['k_range'])
            tests = TestParameters(**test_fields)
        except TypeError as e:
            raise ConfigurationError(f"Unknown configuration key: {e}")

        pairs = [tuple(pair) for pair in (data.get('pairs') or [])]

        return cls(
            languages=languages,
            dimensions=list(data.get('dimensions') or []),
            pairs=pairs,
            preprocessing=preprocessing,
            tests=tests,
            seed=int(data.get('seed', 0)),
            output_dir=resolve(data.get('output_dir', 'ssd_output')),
            translations=resolve(data.get('translations')),
            model=data.get('model', 'multilingual'),
        )

    def language_pairs(self) -> List[Tuple[str, str]]:
        """Explicit pairs, or every combination of languages in config order."""
        if self.pairs:
            return list(self.pairs)
        return list(itertools.combinations(self.languages.keys(), 2))

    def min_samples(self) -> int:
        return Config.MIN_SAMPLES if Config.MIN_SAMPLES is not None else self.tests.min_samples

    def validate(self, require_pairs: bool = False):
        """
        Validate that the configuration is complete and consistent.

        Args:
            require_pairs: Whether the command compares languages

        Raises:
            ConfigurationError: Listing every problem found
        """
        problems = []
        if not self.languages:
            problems.append('no languages configured')
        if require_pairs and len(self.languages) < 2:
            problems.append('comparison needs at least two languages')
        if not self.dimensions:
            problems.append('no dimensions configured')

        for name, inputs in self.languages.items():
            for kind in ('embeddings', 'lexicon'):
                path = getattr(inputs, kind)
                if not path:
                    problems.append(f"language '{name}' is missing its {kind} path")
                elif not os.path.exists(path):
                    problems.append(f"language '{name}' {kind} file does not exist: {path}")
            if inputs.max_vocab is not None and int(inputs.max_vocab) < 1:
                problems.append(f"language '{name}' max_vocab must be positive")

        for a, b in self.pairs:
            if a not in self.languages or b not in self.languages:
                problems.append(f"pair ({a}, {b}) names an unconfigured language")
            if a == b:
                problems.append(f"pair ({a}, {b}) compares a language with itself")

        if self.translations and not os.path.exists(self.translations):
            problems.append(f"translations file does not exist: {self.translations}")

        t = self.tests
        if t.n_permutations < 1:
            problems.append('n_permutations must be positive')
        if t.n_bootstrap < 100:
            problems.append('n_bootstrap must be at least 100')
        if t.n_splits < 2:
            problems.append('n_splits must be at least 2')
        if not 0 < t.test_fraction < 1:
            problems.append('test_fraction must lie in (0, 1)')
        if t.k_max < 1:
            problems.append('k_max must be at least 1')
        if t.cv_folds < 2:
            problems.append('cv_folds must be at least 2')
        if t.m_candidates < 10:
            problems.append('m_candidates must be at least 10')
        if len(t.k_range) != 2 or t.k_range[0] < 2 or t.k_range[1] < t.k_range[0]:
            problems.append('k_range must be [k_min, k_max] with 2 <= k_min <= k_max')
        if not 0 < t.alpha < 1:
            problems.append('alpha must lie in (0, 1)')
        if t.min_samples < 1:
            problems.append('min_samples must be positive')
        if t.kmeans_restarts < 1:
            problems.append('kmeans_restarts must be positive')
        if t.cluster_gradient not in ('selected', 'k1'):
            problems.append("cluster_gradient must be 'selected' or 'k1'")

        if problems:
            raise ConfigurationError(f"Invalid run configuration: {'; '.join(problems)}")

    def to_dict(self) -> Dict[str, Any]:
        """Fully defaulted document recorded into every report."""
        data = asdict(self)
        data['tests']['k_range'] = list(self.tests.k_range)
        data['pairs'] = [list(pair) for pair in self.language_pairs()]
        data.pop('source', None)
        return data
