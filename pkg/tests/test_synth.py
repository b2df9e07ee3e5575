import json
import math

import numpy as np
import pytest

from conftest import synth_samples
from embeddings.store import load_embeddings, preprocess
from fitting.pls import closed_form_pls1, fit_pls, r_squared
from lexicon.norms import join, load_lexicon
from synth.generator import (
    SynthSpec,
    generate,
    generate_blobs,
    planted_directions,
    round_significant,
    write_dataset,
)
from utils.config import RunConfig
from utils.errors import ConfigurationError


@pytest.mark.parametrize('angle, expected', [(0.0, 1.0), (90.0, 0.0), (180.0, -1.0)])
def test_planted_angles_are_exact(angle, expected):
    dataset = generate(SynthSpec(d=8, N_a=50, N_b=50, vocab_size=60, angle_deg=angle, seed=3))

    assert float(dataset.w_a @ dataset.w_b) == pytest.approx(expected, abs=1e-12)


def test_planted_directions_hit_requested_cosine():
    rng = np.random.default_rng(0)
    w_a, w_b = planted_directions(12, 30.0, rng)

    assert float(w_a @ w_b) == pytest.approx(math.cos(math.radians(30)), abs=1e-12)
    assert np.linalg.norm(w_a) == pytest.approx(1.0, abs=1e-12)
    assert np.linalg.norm(w_b) == pytest.approx(1.0, abs=1e-12)


def test_planted_directions_avoid_removed_component():
    dataset = generate(SynthSpec(d=10, N_a=100, N_b=100, vocab_size=200, angle_deg=60.0, seed=4))
    removed = preprocess(dataset.space_a).removed_direction

    assert abs(float(dataset.w_a @ removed)) <= 1e-12
    assert abs(float(dataset.w_b @ removed)) <= 1e-12


def test_planted_directions_need_room():
    with pytest.raises(ConfigurationError):
        planted_directions(2, 45.0, np.random.default_rng(0), avoid=np.array([1.0, 0.0]))


def test_noiseless_gradient_is_recovered():
    dataset, sample_a, _ = synth_samples(d=20, N_a=2000, N_b=2000, vocab_size=2000, noise_sigma=0.0, seed=5)

    gradient = closed_form_pls1(sample_a.X, sample_a.y)

    assert float(gradient.direction @ dataset.w_a) >= 0.98


def test_recovery_at_acceptance_scale():
    dataset, sample_a, _ = synth_samples(d=50, N_a=2000, N_b=2000, vocab_size=2000, noise_sigma=0.1, seed=6)

    gradient, model = fit_pls(sample_a.X, sample_a.y, 1)

    assert float(gradient.direction @ dataset.w_a) >= 0.95
    assert r_squared(sample_a.y, model.predict(sample_a.X)) >= 0.9


def test_affine_labels_keep_the_direction():
    base = dict(d=10, N_a=300, N_b=300, vocab_size=300, noise_sigma=0.2, seed=7)
    _, plain, _ = synth_samples(**base)
    _, scaled, _ = synth_samples(label_scale=4.5, label_shift=-2.0, **base)

    cos = closed_form_pls1(plain.X, plain.y).direction @ closed_form_pls1(scaled.X, scaled.y).direction
    assert cos >= 1 - 1e-10


def test_generation_is_deterministic():
    spec = dict(d=6, N_a=40, N_b=30, vocab_size=50, angle_deg=45.0, seed=11)
    first, second = generate(SynthSpec(**spec)), generate(SynthSpec(**spec))

    np.testing.assert_array_equal(first.space_a.vectors, second.space_a.vectors)
    np.testing.assert_array_equal(first.w_b, second.w_b)
    assert first.lexicon_b.entries == second.lexicon_b.entries
    assert len(first.lexicon_a) == 40 and len(first.lexicon_b) == 30


def test_alignment_noise_gives_language_b_its_own_rows():
    dataset = generate(SynthSpec(d=6, N_a=40, N_b=40, vocab_size=50, alignment_noise=0.05, seed=12))

    assert not np.array_equal(dataset.space_a.vectors, dataset.space_b.vectors)
    assert dataset.space_a.vocab == dataset.space_b.vocab


def test_written_dataset_reloads_exactly(tmp_path):
    dataset = generate(SynthSpec(d=5, N_a=40, N_b=35, vocab_size=60, angle_deg=30.0, seed=13))

    paths = write_dataset(dataset, str(tmp_path / 'synth'))

    space = load_embeddings(paths['a_embeddings'], language='a')
    np.testing.assert_array_equal(space.vectors, dataset.space_a.vectors)
    assert space.vocab == dataset.space_a.vocab
    lexicon = load_lexicon(paths['b_lexicon'], 'b')
    assert lexicon.entries == dataset.lexicon_b.entries

    with open(paths['spec'], encoding='utf-8') as f:
        assert SynthSpec.from_dict(json.load(f)) == dataset.spec

    config = RunConfig.from_file(paths['config'])
    config.validate(require_pairs=True)
    assert config.language_pairs() == [('a', 'b')]
    assert config.model == 'synthetic'


def test_written_labels_match_preprocessed_rows(tmp_path):
    dataset = generate(SynthSpec(d=8, N_a=80, N_b=80, vocab_size=100, noise_sigma=0.0, seed=14))
    paths = write_dataset(dataset, str(tmp_path))

    space = preprocess(load_embeddings(paths['a_embeddings'], language='a'))
    sample = join(load_lexicon(paths['a_lexicon'], 'a'), space, 'valence', min_samples=10)

    expected = round_significant(math.sqrt(8) * (sample.X @ dataset.w_a))
    np.testing.assert_allclose(sample.y, expected, rtol=1e-8, atol=1e-9)


def test_round_significant():
    np.testing.assert_array_equal(round_significant(np.array([1.23456789012, -0.000123456789012])),
                                  [1.23456789, -0.000123456789])


@pytest.mark.parametrize('overrides', [
    {'d': 1},
    {'angle_deg': 181.0},
    {'noise_sigma': -0.1},
    {'N_a': 1},
    {'vocab_size': 100, 'N_a': 200},
    {'label_scale': 0.0},
    {'language_b': 'a'},
])
def test_invalid_specs_are_rejected(overrides):
    with pytest.raises(ConfigurationError):
        SynthSpec(**overrides)


def test_spec_rejects_unknown_keys(tmp_path):
    with pytest.raises(ConfigurationError) as excinfo:
        SynthSpec.from_dict({'d': 5, 'dims': 7})
    assert 'dims' in str(excinfo.value)

    path = tmp_path / 'spec.json'
    path.write_text('{not json', encoding='utf-8')
    with pytest.raises(ConfigurationError):
        SynthSpec.from_file(str(path))
    with pytest.raises(ConfigurationError):
        SynthSpec.from_file(str(tmp_path / 'missing.json'))


def test_blobs_layout():
    space, assignment = generate_blobs(n_per_blob=10, d=5, sigma=0.01, seed=0, k=3)

    assert space.size == 30
    assert space.vocab[0] == 'blob0_0000' and space.vocab[-1] == 'blob2_0009'
    np.testing.assert_array_equal(np.bincount(assignment), [10, 10, 10])
    assert np.linalg.norm(space.vectors[:10].mean(axis=0) - np.eye(5)[0]) < 0.05
    with pytest.raises(ConfigurationError):
        generate_blobs(n_per_blob=5, d=2, sigma=0.1, seed=0, k=3)
