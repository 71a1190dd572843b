import json

import numpy as np
import pytest

from rfiforge.exceptions import ConfigurationError, ModelValidationError
from rfiforge.models.config import RfiDocument, RunConfig
from rfiforge.processing.scenario import synthesize

MINIMAL = {
    "seed": 5,
    "scenario": {
        "geometry": {"n_antennas": 4, "max_baseline": 10.0},
        "rfi": {"inr_db": 10.0},
        "sigma_n": 2.0,
        "N": 64,
    },
}


def test_minimal_document_builds_scenario():
    config = RunConfig.from_json(json.dumps(MINIMAL))
    scenario = config.require_scenario().build(config.seed)
    assert scenario.n_antennas == 4
    assert scenario.n_samples == 64
    assert scenario.geometry.max_baseline == pytest.approx(10.0)
    assert scenario.rfi.power == pytest.approx(40.0)
    assert scenario.rfi.is_stationary
    assert synthesize(scenario).data.shape == (4, 64)


def test_same_seed_builds_same_scenario():
    document = RunConfig.model_validate(MINIMAL).require_scenario()
    first, second = document.build(1), document.build(1)
    assert np.array_equal(first.geometry.positions, second.geometry.positions)
    assert np.array_equal(first.rfi.phis, second.rfi.phis)
    assert not np.array_equal(first.rfi.phis, document.build(2).rfi.phis)


def test_missing_sigma_n_names_the_field():
    document = json.loads(json.dumps(MINIMAL))
    del document["scenario"]["sigma_n"]
    text = json.dumps(document, indent=2)
    with pytest.raises(ModelValidationError) as excinfo:
        RunConfig.from_json(text)
    assert excinfo.value.field == "scenario.sigma_n"
    assert excinfo.value.line == 3


def test_invalid_json_reports_line():
    with pytest.raises(ConfigurationError) as excinfo:
        RunConfig.from_json('{\n  "seed": 1,\n  oops\n}')
    assert excinfo.value.line == 3


def test_unknown_fields_are_rejected():
    with pytest.raises(ModelValidationError):
        RunConfig.from_json('{"seeds": 1}')


def test_rfi_amplitude_is_exclusive():
    with pytest.raises(ValueError):
        RfiDocument(sigma_r=1.0, inr_db=0.0)
    with pytest.raises(ValueError):
        RfiDocument()
    assert RfiDocument(inr_db=20.0).amplitude(1.0) == pytest.approx(10.0)


def test_explicit_rfi_of_wrong_length():
    document = json.loads(json.dumps(MINIMAL))
    document["scenario"]["rfi"] = {"sigma_r": 1.0, "alphas": [0.0, 0.1], "phis": [0.0, 0.0]}
    config = RunConfig.model_validate(document)
    with pytest.raises(ModelValidationError) as excinfo:
        config.require_scenario().build(0)
    assert excinfo.value.field.startswith("scenario")


def test_sources_in_db():
    document = json.loads(json.dumps(MINIMAL))
    document["scenario"]["sources"] = [{"direction": [-0.3, -0.1], "snr_db": -5.0}]
    scenario = RunConfig.model_validate(document).require_scenario().build(0)
    assert scenario.sources[0].power == pytest.approx(4.0 * 10 ** -0.5)


def test_digest_ignores_key_order():
    shuffled = {"scenario": MINIMAL["scenario"], "seed": 5}
    assert RunConfig.model_validate(MINIMAL).digest() == RunConfig.model_validate(shuffled).digest()
    assert RunConfig.model_validate(MINIMAL).digest() != RunConfig().digest()


def test_scenario_section_is_required_when_used():
    with pytest.raises(ConfigurationError):
        RunConfig().require_scenario()


def test_defaults():
    config = RunConfig()
    assert config.gamma_study.trials == 512
    assert len(config.gamma_study.variants) == 4
    assert config.compare.tau == 1
    assert config.imaging.grid().shape == (129, 129)
