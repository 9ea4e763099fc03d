import pytest

from edgeworth.config import (
    MIN_PATHS,
    ComponentSpec,
    load_experiment_config,
    parse_experiment_config,
)
from edgeworth.errors import ConfigError

BASE = {
    "model": {"name": "exp_pair", "params": {"a": 0.5, "b": 0.0, "c": 0.5, "d": 0.0}},
    "test_function": {"id": "cos_shifted", "params": {"a": 1.0, "c": 1.0}},
    "n_list": [4, 16, 64],
}


class TestParse:
    def test_defaults(self):
        experiment = parse_experiment_config(BASE)
        assert experiment.model == ComponentSpec("exp_pair", {"a": 0.5, "b": 0.0, "c": 0.5, "d": 0.0})
        assert experiment.test_function == ComponentSpec("cos_shifted", {"a": 1.0, "c": 1.0})
        assert experiment.n_list == (4, 16, 64)
        assert (experiment.horizon, experiment.m, experiment.mode) == (1.0, "auto", "coupled")
        assert experiment.paths == 10_000
        assert not experiment.antithetic

    def test_bare_names(self):
        experiment = parse_experiment_config({**BASE, "model": "brownian_identity", "test_function": "logistic"})
        assert experiment.model == ComponentSpec("brownian_identity")
        assert experiment.test_function.params == {}

    def test_integer_horizon_is_float(self):
        assert parse_experiment_config({**BASE, "horizon": 2}).horizon == 2.0

    @pytest.mark.parametrize(
        "change,message",
        [
            ({"n_list": [16, 4]}, "strictly ascending"),
            ({"n_list": [4, 4]}, "strictly ascending"),
            ({"n_list": []}, "non-empty"),
            ({"n_list": [0, 4]}, "positive"),
            ({"n_list": [4, True]}, "positive"),
            ({"horizon": 0}, "horizon"),
            ({"horizon": "1"}, "horizon"),
            ({"m": 1}, "'m'"),
            ({"m": "fine"}, "'m'"),
            ({"paths": MIN_PATHS - 1}, "paths below minimum"),
            ({"paths": 1000.0}, "integer"),
            ({"seed": -1}, "seed"),
            ({"seed": 2**64}, "seed"),
            ({"mode": "paired"}, "mode"),
            ({"antithetic": "yes"}, "boolean"),
            ({"antithetic": True, "paths": 101}, "even"),
            ({"threads": 0}, "threads"),
            ({"quadrature_nodes": 1}, "quadrature_nodes"),
            ({"output": ""}, "output"),
            ({"model": {"params": {}}}, "'model'"),
            ({"model": {"name": "exp_pair", "params": [1, 2]}}, "params"),
            ({"test_function": {"name": "cos_shifted"}}, "'test_function'"),
        ],
    )
    def test_invalid(self, change, message):
        with pytest.raises(ConfigError, match=message):
            parse_experiment_config({**BASE, **change})

    @pytest.mark.parametrize("key", ["model", "test_function", "n_list"])
    def test_missing_keys(self, key):
        raw = {k: v for k, v in BASE.items() if k != key}
        with pytest.raises(ConfigError, match="missing key"):
            parse_experiment_config(raw)

    def test_not_an_object(self):
        with pytest.raises(ConfigError):
            parse_experiment_config([BASE])

    def test_test_function_optional_for_clt(self):
        raw = {k: v for k, v in BASE.items() if k != "test_function"}
        assert parse_experiment_config(raw, require_test_function=False).test_function is None
        # still validated when present
        with pytest.raises(ConfigError, match="'test_function'"):
            parse_experiment_config({**raw, "test_function": {"name": "x"}}, require_test_function=False)


class TestLoad:
    def test_reads_file(self, write_config):
        experiment = load_experiment_config(write_config(**BASE, seed=5, output="out.csv"))
        assert experiment.seed == 5
        assert experiment.output == "out.csv"

    def test_overrides(self, write_config):
        experiment = load_experiment_config(write_config(**BASE, seed=5), seed=9, threads=3, output="x.csv")
        assert (experiment.seed, experiment.threads, experiment.output) == (9, 3, "x.csv")

    def test_bad_override(self, write_config):
        with pytest.raises(ConfigError):
            load_experiment_config(write_config(**BASE), threads=0)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="not found"):
            load_experiment_config(str(tmp_path / "absent.json"))

    def test_parse_error(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"model": ', encoding="utf-8")
        with pytest.raises(ConfigError, match="parse error"):
            load_experiment_config(str(path))
