import pytest
from joblib import Parallel

from rfiforge.exceptions import ConfigurationError
from rfiforge.simulator import SEED_ENV_VAR, Simulator
from rfiforge.utils import MAP_BACKEND, derive_seed, map_ordered


def test_trial_seeds_are_derived_from_base_seed():
    simulator = Simulator(42)
    assert simulator.trial_seed(1, 2) == derive_seed(42, 1, 2)
    assert simulator.trial_seed(1, 2) != simulator.trial_seed(2, 1)
    assert Simulator(43).trial_seed(1, 2) != simulator.trial_seed(1, 2)
    assert 0 <= simulator.trial_seed(0) < 2**64


def test_rng_streams_are_reproducible():
    first = Simulator(1).rng(3, 4).standard_normal(5)
    second = Simulator(1).rng(3, 4).standard_normal(5)
    assert (first == second).all()


def test_map_keeps_input_order():
    with Simulator(0, workers=4) as simulator:
        assert isinstance(simulator.get_parallel(), Parallel)
        assert simulator.map(lambda x: x * x, range(20)) == [x * x for x in range(20)]
        # the pool is reused across calls
        assert simulator.map(str, range(3)) == ["0", "1", "2"]
    assert simulator.get_parallel() is None


def test_serial_simulator_has_no_pool():
    with Simulator(0) as simulator:
        assert simulator.get_parallel() is None
        assert simulator.map(str, [1, 2]) == ["1", "2"]


def test_no_pool_outlives_a_call_outside_a_context():
    simulator = Simulator(0, workers=3)
    assert simulator.map(lambda x: -x, range(10)) == [-x for x in range(10)]
    assert simulator.get_parallel() is None


def test_map_ordered_with_a_running_pool():
    with Parallel(n_jobs=2, backend=MAP_BACKEND) as parallel:
        assert map_ordered(abs, [-3, 2, -1], parallel=parallel) == [3, 2, 1]
    assert map_ordered(abs, [-3, 2, -1], workers=4) == [3, 2, 1]
    assert map_ordered(abs, [], workers=4) == []


def test_nested_context_is_rejected():
    with Simulator(0, workers=2) as simulator:
        with pytest.raises(RuntimeError):
            simulator.__enter__()


def test_invalid_arguments():
    with pytest.raises(ConfigurationError):
        Simulator(-1)
    with pytest.raises(ConfigurationError):
        Simulator(2**64)
    with pytest.raises(ConfigurationError) as excinfo:
        Simulator(0, workers=0)
    assert excinfo.value.field == "workers"


def test_from_env(monkeypatch):
    monkeypatch.delenv(SEED_ENV_VAR, raising=False)
    assert Simulator.from_env(7).base_seed == 7
    monkeypatch.setenv(SEED_ENV_VAR, "123")
    assert Simulator.from_env(7).base_seed == 123
    monkeypatch.setenv(SEED_ENV_VAR, "0x10")
    assert Simulator.from_env(workers=2).base_seed == 16
    monkeypatch.setenv(SEED_ENV_VAR, "abc")
    with pytest.raises(ConfigurationError):
        Simulator.from_env()


def test_studies_are_exposed():
    simulator = Simulator(0)
    assert simulator.gamma is simulator.gamma
    assert simulator.smearing._simulator is simulator
    assert simulator.comparison._simulator is simulator
