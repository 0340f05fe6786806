import logging
import numpy as np
import pandas as pd
import pytest

import GeneralizedCounters.train as train
from GeneralizedCounters.config import ExperimentConfig, loads_configs
from GeneralizedCounters.train import run, sweep, oracle_table, aggregate, episodes_to_threshold, RAW_COLUMNS
from GeneralizedCounters.plots import plot
from GeneralizedCounters.cli import main
from GeneralizedCounters.agents import TabularAgent
from GeneralizedCounters.exceptions import ConfigurationError, DivergenceError, SchemaError, UnsupportedOperation


def _bridge(agent="egreedy", trials=1, episodes=10, **kwargs):
    return ExperimentConfig(f"bridge-{agent}", "bridge", agent, env_params={"k": 5}, trials=trials,
                            episodes=episodes, seed=3, **kwargs)


class TestRun:

    def test_one_row_per_episode(self, tmp_path):
        result = run(_bridge(), tmp_path / "raw.csv")
        df = pd.read_csv(tmp_path / "raw.csv")
        assert list(df.columns) == RAW_COLUMNS
        assert len(df) == len(result.raw) == 10
        assert list(df["episode"]) == list(range(1, 11))
        assert (df["trial"] == 3).all()

    def test_byte_identical_reruns(self, tmp_path):
        config = _bridge("softmax-lll-evalue", trials=2, episodes=20)
        run(config, tmp_path / "a.csv")
        run(config, tmp_path / "b.csv")
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()

    def test_worker_count_does_not_change_output(self, tmp_path):
        config = _bridge("ucb-evalue", trials=3, episodes=15)
        run(config, tmp_path / "serial.csv", workers=1)
        run(config, tmp_path / "parallel.csv", workers=2)
        assert (tmp_path / "serial.csv").read_bytes() == (tmp_path / "parallel.csv").read_bytes()

    def test_zero_reward_tree_has_zero_error(self):
        config = ExperimentConfig("tree", "tree", "softmax-lll-evalue", env_params={"k": 4}, trials=2, episodes=10)
        assert (run(config).raw["metric"] == 0.0).all()

    def test_eval_cadence(self):
        assert len(run(_bridge(episodes=20, eval_every=5)).raw) == 4

    def test_diverged_trial_is_recorded(self, monkeypatch):
        original = train._run_tabular_trial

        def diverge_on_second(config, trial, seed, result):
            if trial == 1:
                raise DivergenceError("TD error inf")
            original(config, trial, seed, result)

        monkeypatch.setattr(train, "_run_tabular_trial", diverge_on_second)
        result = run(_bridge(trials=3, episodes=5))
        assert result.failed_trials == [1]
        assert sorted(result.raw["trial"].unique()) == [3, 5]

    def test_diverged_trial_keeps_earlier_rows(self, monkeypatch):
        original = TabularAgent.run_episode
        calls = []

        def diverge_on_third(agent, rng, max_steps=None):
            calls.append(1)
            if len(calls) == 3:
                raise DivergenceError("TD error inf")
            return original(agent, rng, max_steps)

        monkeypatch.setattr(TabularAgent, "run_episode", diverge_on_third)
        result = run(_bridge(trials=1, episodes=5))
        assert result.failed_trials == [0]
        assert list(result.raw["episode"]) == [1, 2]

    def test_table_snapshot_file(self, tmp_path):
        result = run(_bridge("egreedy-lll-evalue", episodes=5, write_tables=True), tmp_path / "raw.csv")
        df = pd.read_csv(tmp_path / "raw.tables.csv")
        assert list(df.columns) == ["s", "a", "q", "e", "c"]
        assert len(df) == 12
        assert df["c"].sum() == result.raw["steps"].sum()
        assert ((df["e"] > 0) & (df["e"] <= 1)).all()

    def test_no_table_snapshot_by_default(self, tmp_path):
        run(_bridge(episodes=2), tmp_path / "raw.csv")
        assert not (tmp_path / "raw.tables.csv").exists()

    def test_counter_table(self, tmp_path):
        run(_bridge("softmax-lll-evalue", episodes=5, trace_counters=True), tmp_path / "raw.csv")
        df = pd.read_csv(tmp_path / "raw.fig6.csv")
        assert list(df.columns) == ["pair", "episode", "c", "gc", "rel_err"]
        assert len(df) == 12 * 5

    def test_mountaincar_success_metric_and_snapshots(self, tmp_path):
        config = ExperimentConfig("car", "mountaincar", "egreedy", env_params={"step_cap": 40},
                                  hyperparameters={"gamma_e": 0.0}, trials=1, episodes=10,
                                  snapshot_every=2, snapshot_dir=str(tmp_path))
        result = run(config, tmp_path / "car.csv")
        assert set(result.raw["metric"]) <= {0.0, 1.0}
        assert (result.raw["steps"] <= 40).all()
        assert len(pd.read_csv(tmp_path / "car.correlation.csv")) == 200
        assert len(list(tmp_path.glob("car_0_*"))) == 5

        maps = pd.read_csv(tmp_path / "car.maps.csv")
        assert list(maps.columns) == ["map", "position_bin", "velocity_bin", "visits", "ce"]
        assert len(maps) == 3 * 20 * 20
        final = maps[maps["map"] == "final"]
        assert final["visits"].sum() == result.raw["steps"].sum()


class TestSweep:

    def test_aggregates_each_config(self, tmp_path):
        configs = loads_configs("""
[DEFAULT]
environment = bridge
env.k = 5
agent = egreedy-bonus
episodes = 8
trials = 3

[g0]
gamma_e = 0.0

[g5]
gamma_e = 0.5

[g9]
gamma_e = 0.9
""")
        table = sweep(configs, tmp_path)
        assert list(table.columns) == ["episode", "agent", "mean_metric"]
        assert list(table["agent"].unique()) == ["g0", "g5", "g9"]

        raw = pd.read_csv(tmp_path / "g5.raw.csv")
        expected = raw.groupby("episode")["metric"].mean().to_numpy()
        np.testing.assert_allclose(table[table["agent"] == "g5"]["mean_metric"], expected)
        assert (tmp_path / "aggregated.csv").exists()

    def test_failing_config_does_not_stop_the_sweep(self, tmp_path, caplog):
        configs = [_bridge("delayedq", episodes=3), _bridge("egreedy", episodes=3)]
        with caplog.at_level(logging.ERROR):
            table = sweep(configs, tmp_path)
        assert list(table["agent"].unique()) == ["bridge-egreedy"]
        assert "bridge-delayedq" in caplog.text

    def test_empty_sweep(self):
        with pytest.raises(ConfigurationError):
            sweep([])

    def test_aggregate(self):
        raw = pd.DataFrame({"trial": [0, 0, 1, 1], "episode": [1, 2, 1, 2], "metric": [1.0, 2.0, 3.0, 6.0], "steps": 1})
        np.testing.assert_allclose(aggregate(raw, "x")["mean_metric"], [2.0, 4.0])

    def test_episodes_to_threshold(self):
        curve = pd.DataFrame({"episode": [1, 2, 3, 4], "mean_metric": [10.0, 4.0, 0.9, 0.5]})
        assert episodes_to_threshold(curve, 0.1) == 3
        assert episodes_to_threshold(curve, 0.01) is None


class TestOracleTable:

    def test_bridge(self, tmp_path):
        table = oracle_table("bridge", {"k": 5}, tmp_path / "oracle.csv")
        assert len(table) == 12
        start_east = table[(table["state"] == 0) & (table["action"] == 0)].iloc[0]
        assert start_east["q_star"] == pytest.approx(5.9049, abs=1e-9)
        assert start_east["is_optimal"] == 1
        assert table["occupancy"].sum() == pytest.approx(1.0)
        assert list(pd.read_csv(tmp_path / "oracle.csv").columns) == ["state", "action", "q_star", "is_optimal", "occupancy"]

    def test_tree(self):
        assert (oracle_table("tree", {"k": 3})["q_star"] == 0.0).all()

    def test_mountaincar(self):
        with pytest.raises(UnsupportedOperation, match="oracle requires tabular environment"):
            oracle_table("mountaincar")


class TestPlot:

    def _aggregated(self, path):
        pd.DataFrame({"episode": [1, 2, 3] * 2, "agent": ["a"] * 3 + ["b"] * 3,
                      "mean_metric": [3.0, 2.0, 1.0, 3.0, 2.5, 2.0]}).to_csv(path, index=False)
        return path

    def test_curves(self, tmp_path):
        out = plot([self._aggregated(tmp_path / "agg.csv")], "curves", tmp_path / "curves.svg", log_abscissa=True)
        text = out.read_text()
        assert "<svg" in text and "<image" not in text

    def test_reproducible(self, tmp_path):
        source = self._aggregated(tmp_path / "agg.csv")
        plot([source], "curves", tmp_path / "a.svg")
        plot([source], "curves", tmp_path / "b.svg")
        assert (tmp_path / "a.svg").read_bytes() == (tmp_path / "b.svg").read_bytes()

    def test_fig6_and_histogram(self, tmp_path):
        pd.DataFrame({"pair": ["0:0", "0:0", "1:0"], "episode": [1, 2, 2], "c": [1, 2, 1],
                      "gc": [0.5, 1.2, 0.7], "rel_err": [0.9, 0.5, 0.8]}).to_csv(tmp_path / "f.csv", index=False)
        pd.DataFrame({"state_bin": ["0:0", "1:1"], "coefficient": [0.8, np.nan]}).to_csv(tmp_path / "h.csv", index=False)
        assert plot([tmp_path / "f.csv"], "fig6", tmp_path / "f.svg").exists()
        assert plot([tmp_path / "h.csv"], "histogram", tmp_path / "h.svg").exists()

    def test_maps(self, tmp_path):
        position, velocity = np.indices((4, 3))
        frames = [pd.DataFrame({"map": name, "position_bin": position.ravel(), "velocity_bin": velocity.ravel(),
                                "visits": np.arange(12), "ce": np.linspace(0.0, 5.0, 12)})
                  for name in ("final", "first", "last_difference")]
        pd.concat(frames).to_csv(tmp_path / "maps.csv", index=False)
        out = plot([tmp_path / "maps.csv"], "maps", tmp_path / "maps.svg")
        assert "<svg" in out.read_text()
        plot([tmp_path / "maps.csv"], "maps", tmp_path / "again.svg")
        assert out.read_bytes() == (tmp_path / "again.svg").read_bytes()

    def test_missing_column(self, tmp_path):
        pd.DataFrame({"episode": [1], "agent": ["a"]}).to_csv(tmp_path / "bad.csv", index=False)
        with pytest.raises(SchemaError, match="mean_metric"):
            plot([tmp_path / "bad.csv"], "curves", tmp_path / "bad.svg")

    def test_empty_csv(self, tmp_path):
        (tmp_path / "empty.csv").write_text("")
        with pytest.raises(SchemaError):
            plot([tmp_path / "empty.csv"], "curves", tmp_path / "empty.svg")
        (tmp_path / "header.csv").write_text("episode,agent,mean_metric\n")
        with pytest.raises(SchemaError):
            plot([tmp_path / "header.csv"], "curves", tmp_path / "header.svg")


class TestCli:

    def _config(self, tmp_path, agent="egreedy"):
        path = tmp_path / "exp.ini"
        path.write_text(f"[exp]\nenvironment = bridge\nenv.k = 5\nagent = {agent}\nepisodes = 5\ntrials = 2\n")
        return str(path)

    def test_run(self, tmp_path):
        assert main(["run", "--config", self._config(tmp_path), "--out", str(tmp_path / "raw.csv")]) == 0
        assert len(pd.read_csv(tmp_path / "raw.csv")) == 10

    def test_sweep_then_plot(self, tmp_path):
        assert main(["sweep", "--config", self._config(tmp_path), "--out", str(tmp_path / "sweep")]) == 0
        assert main(["plot", str(tmp_path / "sweep" / "aggregated.csv"), "--kind", "curves",
                     "--out", str(tmp_path / "curves.svg"), "--log-abscissa"]) == 0
        assert (tmp_path / "curves.svg").exists()

    def test_oracle(self, tmp_path):
        assert main(["oracle", "--config", self._config(tmp_path), "--out", str(tmp_path / "oracle.csv")]) == 0
        assert len(pd.read_csv(tmp_path / "oracle.csv")) == 12

    def test_bad_agent_exits_non_zero(self, tmp_path):
        assert main(["run", "--config", self._config(tmp_path, "thompson"), "--out", str(tmp_path / "raw.csv")]) == 1
