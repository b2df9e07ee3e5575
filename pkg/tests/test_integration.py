"""
Real-data recipe: skipped unless SSD_INTEGRATION_CONFIG points at a run config.
"""
import json
from pathlib import Path

import pytest

from pipeline.runner import cmd_compare, cmd_fit
from utils.config import Config, RunConfig

EXPECTED = Path(__file__).resolve().parent.parent / 'integration' / 'expected_values.json'

pytestmark = [
    pytest.mark.integration,
    pytest.mark.skipif(not Config.INTEGRATION_CONFIG, reason='SSD_INTEGRATION_CONFIG not set'),
]


@pytest.fixture(scope='module')
def expected():
    with open(EXPECTED, encoding='utf-8') as f:
        return json.load(f)


@pytest.fixture(scope='module')
def config():
    return RunConfig.from_file(Config.INTEGRATION_CONFIG)


def test_fits_match_reference_r_squared(config, expected):
    records = {(r['language'], r['dimension']): r for r in cmd_fit(config, Config.WORKERS).records}
    tolerance = expected['tolerance']

    for row in expected['fits']:
        record = records[(row['language'], row['dimension'])]
        candidates = [record['r_squared'], record['in_sample_r_squared']]
        assert any(abs(value - row['r_squared']) <= tolerance for value in candidates), (
            f"{row['language']}/{row['dimension']}: R^2 {candidates} vs {row['r_squared']}"
        )
        assert record['p_value'] < 0.001


def test_intervals_match_reference_bounds(config, expected):
    result = cmd_compare(config, Config.WORKERS)
    records = {(tuple(r['pair']), r['dimension']): r for r in result.records}
    tolerance = expected['tolerance']

    for row in expected['intervals']:
        record = records[(tuple(row['pair']), row['dimension'])]
        low, high = record['bootstrap']['ci']
        assert abs(low - row['ci'][0]) <= tolerance
        assert abs(high - row['ci'][1]) <= tolerance
        assert record['alignment_test']['p_value'] < 0.05
