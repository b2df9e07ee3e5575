"""
Synthetic aligned embedding pairs with planted gradients.

Rows are isotropic Gaussian draws shared by both languages (optionally
jittered for language B). The planted directions live in the analysis
geometry: they are orthogonal to the principal direction that preprocessing
removes, and labels are computed from the preprocessed rows, so a pipeline
that loads the emitted files recovers them without distortion.
"""
import json
import logging
import math
import os
from dataclasses import asdict, dataclass, fields
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from embeddings.store import EmbeddingSpace, preprocess, save_embeddings
from lexicon.norms import NormLexicon, save_lexicon
from utils.config import LanguageInputs, RunConfig
from utils.errors import ConfigurationError

logger = logging.getLogger(__name__)

PRECISION = 9

# Exact (cos, sin) where floating-point trigonometry would leave residue
_EXACT_ANGLES = {0.0: (1.0, 0.0), 90.0: (0.0, 1.0), 180.0: (-1.0, 0.0)}


@dataclass
class SynthSpec:
    """
    Parameters of one synthetic language pair.

    Labels are y = label_scale * (sqrt(d) * <p, w> + noise) + label_shift, with p
    a preprocessed row, so the clean signal has roughly unit variance.
    """
    d: int = 20
    N_a: int = 500
    N_b: int = 500
    angle_deg: float = 0.0
    noise_sigma: float = 0.1
    vocab_size: int = 2000
    seed: int = 0
    dimension: str = 'valence'
    label_scale: float = 1.0
    label_shift: float = 0.0
    anisotropy: float = 0.0
    alignment_noise: float = 0.0
    language_a: str = 'a'
    language_b: str = 'b'

    def __post_init__(self):
        self.validate()

    def validate(self):
        """
        Raises:
            ConfigurationError: Listing every violated constraint
        """
        problems = []
        if self.d < 2:
            problems.append('d must be at least 2')
        if not 0.0 <= self.angle_deg <= 180.0:
            problems.append('angle_deg must lie in [0, 180]')
        if self.noise_sigma < 0:
            problems.append('noise_sigma must be non-negative')
        if self.N_a < 2 or self.N_b < 2:
            problems.append('N_a and N_b must be at least 2')
        if self.vocab_size < max(self.N_a, self.N_b):
            problems.append('vocab_size must cover both samples')
        if self.label_scale == 0:
            problems.append('label_scale must be non-zero')
        if self.anisotropy < 0 or self.alignment_noise < 0:
            problems.append('anisotropy and alignment_noise must be non-negative')
        if self.language_a == self.language_b:
            problems.append('the two languages need distinct names')
        if problems:
            raise ConfigurationError(f"Invalid synthetic spec: {'; '.join(problems)}")

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'SynthSpec':
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigurationError(f"Unknown synthetic spec keys: {', '.join(unknown)}")
        return cls(**data)

    @classmethod
    def from_file(cls, path: str) -> 'SynthSpec':
        try:
            with open(path, 'r', encoding='utf-8') as f:
                return cls.from_dict(json.load(f))
        except FileNotFoundError:
            raise ConfigurationError(f"Synthetic spec not found: {path}")
        except json.JSONDecodeError as e:
            raise ConfigurationError(f"Invalid JSON in synthetic spec {path}: {e}")


@dataclass(eq=False)
class SynthDataset:
    """
    Generated spaces (raw, as written to disk), lexicons and the planted
    unit directions in preprocessed coordinates.
    """
    spec: SynthSpec
    space_a: EmbeddingSpace
    lexicon_a: NormLexicon
    space_b: EmbeddingSpace
    lexicon_b: NormLexicon
    w_a: np.ndarray
    w_b: np.ndarray


def round_significant(values: np.ndarray, digits: int = PRECISION) -> np.ndarray:
    """Round to the values that survive a text round trip at ``digits`` significant digits."""
    fmt = f"%.{digits}g"
    return np.vectorize(lambda v: float(fmt % v), otypes=[np.float64])(np.asarray(values, dtype=np.float64))


def _unit(vector: np.ndarray) -> np.ndarray:
    return vector / np.linalg.norm(vector)


def planted_directions(
    d: int,
    angle_deg: float,
    rng: np.random.Generator,
    avoid: Optional[np.ndarray] = None
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Unit w_a, w_b with cos(w_a, w_b) = cos(angle_deg), both orthogonal to ``avoid``.

    Args:
        d: Dimensionality
        angle_deg: Angle between the two directions in degrees
        rng: Random generator
        avoid: Optional unit direction both must be orthogonal to

    Returns:
        (w_a, w_b)
    """
    basis = [] if avoid is None else [_unit(np.asarray(avoid, dtype=np.float64))]
    if d < len(basis) + 2:
        raise ConfigurationError(f"d={d} leaves no room for two planted directions")
    planted = []
    for _ in range(2):
        v = rng.standard_normal(d)
        for b in basis + planted:
            v -= (v @ b) * b
        planted.append(_unit(v))
    w_a, u = planted

    angle = float(angle_deg)
    if angle in _EXACT_ANGLES:
        c, s = _EXACT_ANGLES[angle]
    else:
        c, s = math.cos(math.radians(angle)), math.sin(math.radians(angle))
    if s == 0.0:
        return w_a, c * w_a
    if c == 0.0:
        return w_a, u
    return w_a, c * w_a + s * u


def _labels(
    rows: np.ndarray,
    w: np.ndarray,
    spec: SynthSpec,
    rng: np.random.Generator
) -> np.ndarray:
    signal = math.sqrt(spec.d) * (rows @ w)
    noise = spec.noise_sigma * rng.standard_normal(rows.shape[0])
    return round_significant(spec.label_scale * (signal + noise) + spec.label_shift)


def _lexicon(language: str, words: List[str], labels: np.ndarray, dimension: str) -> NormLexicon:
    entries = {word: {dimension: float(value)} for word, value in zip(words, labels)}
    return NormLexicon(language=language, dimensions=(dimension,), entries=entries)


def generate(spec: SynthSpec) -> SynthDataset:
    """
    Draw a synthetic pair of aligned spaces and rated lexicons.

    Language A rates the first N_a vocabulary words, language B the first N_b;
    translation pairs share a row up to ``alignment_noise``.

    Args:
        spec: Generation parameters

    Returns:
        SynthDataset
    """
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    V, d = spec.vocab_size, spec.d
    vocab = tuple(f"w{i:05d}" for i in range(V))

    raw = rng.standard_normal((V, d))
    if spec.anisotropy > 0:
        common = _unit(rng.standard_normal(d))
        raw += spec.anisotropy * (1.0 + rng.standard_normal(V))[:, None] * common[None, :]
    raw_b = raw
    if spec.alignment_noise > 0:
        raw_b = raw + spec.alignment_noise * rng.standard_normal((V, d))

    space_a = EmbeddingSpace(spec.language_a, vocab, round_significant(raw))
    space_b = EmbeddingSpace(spec.language_b, vocab, round_significant(raw_b))
    prepared_a = preprocess(space_a)
    prepared_b = prepared_a if raw_b is raw else preprocess(space_b)

    w_a, w_b = planted_directions(d, spec.angle_deg, rng, avoid=prepared_a.removed_direction)
    y_a = _labels(prepared_a.vectors[:spec.N_a], w_a, spec, rng)
    y_b = _labels(prepared_b.vectors[:spec.N_b], w_b, spec, rng)

    dataset = SynthDataset(
        spec=spec,
        space_a=space_a,
        lexicon_a=_lexicon(spec.language_a, list(vocab[:spec.N_a]), y_a, spec.dimension),
        space_b=space_b,
        lexicon_b=_lexicon(spec.language_b, list(vocab[:spec.N_b]), y_b, spec.dimension),
        w_a=w_a,
        w_b=w_b,
    )
    logger.info(
        f"Generated synthetic pair: V={V}, d={d}, N=({spec.N_a}, {spec.N_b}), "
        f"angle={spec.angle_deg}, noise={spec.noise_sigma}, cos(w_a, w_b)={float(w_a @ w_b):.6f}"
    )
    return dataset


def generate_blobs(
    n_per_blob: int,
    d: int,
    sigma: float,
    seed: int,
    k: int = 3
) -> Tuple[EmbeddingSpace, np.ndarray]:
    """
    Space of k Gaussian blobs around the first k basis vectors.

    Centers are sqrt(2) apart. Rows are ordered blob by blob.

    Returns:
        (space, planted blob index per row)
    """
    if k < 2 or d < k:
        raise ConfigurationError(f"Blobs need 2 <= k <= d, got k={k}, d={d}")
    rng = np.random.default_rng(seed)
    centers = np.eye(d)[:k]
    assignment = np.repeat(np.arange(k), n_per_blob)
    rows = centers[assignment] + sigma * rng.standard_normal((k * n_per_blob, d))
    vocab = tuple(f"blob{b}_{i:04d}" for b in range(k) for i in range(n_per_blob))
    return EmbeddingSpace('blobs', vocab, rows), assignment


def write_dataset(dataset: SynthDataset, out_dir: str) -> Dict[str, str]:
    """
    Write spaces, lexicons, an identity translation table, the spec and a
    ready-to-run config into out_dir.

    Returns:
        Mapping of artifact name to written path
    """
    os.makedirs(out_dir, exist_ok=True)
    spec = dataset.spec
    a, b = spec.language_a, spec.language_b
    names = {
        f"{a}_embeddings": f"{a}.vec",
        f"{b}_embeddings": f"{b}.vec",
        f"{a}_lexicon": f"{a}_lexicon.csv",
        f"{b}_lexicon": f"{b}_lexicon.csv",
        'translations': 'translations.csv',
        'spec': 'synth_spec.json',
        'config': 'run_config.json',
    }
    paths = {key: os.path.join(out_dir, name) for key, name in names.items()}

    save_embeddings(dataset.space_a, paths[f"{a}_embeddings"], precision=PRECISION)
    save_embeddings(dataset.space_b, paths[f"{b}_embeddings"], precision=PRECISION)
    save_lexicon(dataset.lexicon_a, paths[f"{a}_lexicon"], precision=PRECISION)
    save_lexicon(dataset.lexicon_b, paths[f"{b}_lexicon"], precision=PRECISION)

    with open(paths['translations'], 'w', encoding='utf-8') as f:
        f.write(f"{a},{b}\n")
        for word in dataset.lexicon_a.words:
            f.write(f"{word},{word}\n")

    with open(paths['spec'], 'w', encoding='utf-8') as f:
        json.dump(spec.to_dict(), f, indent=2, sort_keys=True)

    config = RunConfig(
        languages={
            a: LanguageInputs(embeddings=names[f"{a}_embeddings"], lexicon=names[f"{a}_lexicon"]),
            b: LanguageInputs(embeddings=names[f"{b}_embeddings"], lexicon=names[f"{b}_lexicon"]),
        },
        dimensions=[spec.dimension],
        seed=spec.seed,
        output_dir='ssd_output',
        translations=names['translations'],
        model='synthetic',
    )
    with open(paths['config'], 'w', encoding='utf-8') as f:
        json.dump(config.to_dict(), f, indent=2, sort_keys=True)

    logger.info(f"Wrote synthetic dataset to {out_dir}")
    return paths
