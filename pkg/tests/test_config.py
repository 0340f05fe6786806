import pytest

from GeneralizedCounters.config import ExperimentConfig, loads_configs, load_configs, parse_value
from GeneralizedCounters.exceptions import ConfigurationError

SWEEP = """
[DEFAULT]
environment = bridge
env.k = 5
agent = egreedy-bonus
trials = 3

[bonus-0.0]
gamma_e = 0.0

[bonus-0.9]
gamma_e = 0.9
alpha = 0.2
"""


class TestParseValue:

    @pytest.mark.parametrize("text, value", [("true", True), ("off", False), ("none", None), ("15", 15),
                                             ("0.99", 0.99), ("1e-3", 0.001), ("softmax", "softmax")])
    def test_literals(self, text, value):
        assert parse_value(text) == value


class TestLoadConfigs:

    def test_sections_inherit_defaults(self):
        configs = loads_configs(SWEEP)
        assert [c.label for c in configs] == ["bonus-0.0", "bonus-0.9"]
        assert all(c.environment == "bridge" and c.trials == 3 for c in configs)
        assert configs[0].env_params["k"] == 5
        assert configs[1].hyperparameters == {"gamma_e": 0.9, "alpha": 0.2}

    def test_agent_spec(self):
        spec = loads_configs(SWEEP)[1].agent_spec()
        assert spec.kind == "egreedy-bonus" and spec.alpha == 0.2 and spec.alpha_e == 0.2 and spec.gamma_e == 0.9

    def test_default_episodes(self):
        long_bridge = ExperimentConfig("a", "bridge", "egreedy", env_params={"k": 15})
        short_bridge = ExperimentConfig("b", "bridge", "egreedy", env_params={"k": 5})
        car = ExperimentConfig("c", "mountaincar", "softmax")
        assert (long_bridge.episodes, short_bridge.episodes, car.episodes) == (4000, 1000, 1000)

    def test_defaults(self):
        config = ExperimentConfig("a", "tree", "egreedy")
        assert (config.trials, config.seed, config.eval_every, config.snapshot_every) == (50, 0, 1, 0)
        assert config.agent_spec().gamma_e == 0.9

    def test_write_tables(self):
        config = loads_configs("[a]\nenvironment = bridge\nagent = egreedy\nwrite_tables = true\n")[0]
        assert config.write_tables is True
        assert ExperimentConfig("b", "tree", "egreedy").write_tables is False

    def test_gamma_sets_environment_discount(self):
        config = loads_configs("[a]\nenvironment = bridge\nagent = egreedy\ngamma = 0.95\n")[0]
        assert config.env_params["discount"] == 0.95

    def test_unknown_agent_lists_valid_names(self):
        with pytest.raises(ConfigurationError, match="ucb-evalue"):
            loads_configs("[a]\nenvironment = bridge\nagent = thompson\n")

    def test_tabular_only_agent_on_mountaincar(self):
        with pytest.raises(ConfigurationError):
            loads_configs("[a]\nenvironment = mountaincar\nagent = delayedq\n")

    def test_unknown_environment(self):
        with pytest.raises(ConfigurationError, match="mountaincar"):
            loads_configs("[a]\nenvironment = taxi\nagent = egreedy\n")

    def test_unknown_key(self):
        with pytest.raises(ConfigurationError, match="learning_rate"):
            loads_configs("[a]\nenvironment = bridge\nagent = egreedy\nlearning_rate = 0.1\n")

    def test_missing_agent(self):
        with pytest.raises(ConfigurationError, match="agent"):
            loads_configs("[a]\nenvironment = bridge\n")

    def test_trials_at_least_one(self):
        with pytest.raises(ConfigurationError):
            loads_configs("[a]\nenvironment = bridge\nagent = egreedy\ntrials = 0\n")

    def test_unreadable_file(self, tmp_path):
        with pytest.raises(ConfigurationError):
            load_configs(str(tmp_path / "missing.ini"))

    def test_file_without_sections(self, tmp_path):
        path = tmp_path / "empty.ini"
        path.write_text("[DEFAULT]\nenvironment = bridge\n")
        with pytest.raises(ConfigurationError):
            load_configs(str(path))

    def test_shipped_configs_parse(self):
        from pathlib import Path
        for path in sorted((Path(__file__).parent.parent / "configs").glob("*.ini")):
            assert load_configs(str(path))
