from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional
import logging
import pandas as pd

from GeneralizedCounters.SeededRng import SeededRng
from GeneralizedCounters.agents import TabularAgent
from GeneralizedCounters.LinearAgent import LinearAgent
from GeneralizedCounters.Statistics import Statistics
from GeneralizedCounters.checkpoints import save_snapshot
from GeneralizedCounters.config import ExperimentConfig
from GeneralizedCounters.environments import get_environment
from GeneralizedCounters.oracle import value_iteration, mse, convergence_vs_counter
from GeneralizedCounters.exceptions import ConfigurationError, DivergenceError, UnsupportedOperation

RAW_COLUMNS = ["trial", "episode", "metric", "steps"]
AGGREGATED_COLUMNS = ["episode", "agent", "mean_metric"]
ORACLE_COLUMNS = ["state", "action", "q_star", "is_optimal", "occupancy"]

CONTINUOUS_DISCOUNT = 0.99
LOG_EVERY = 100


@dataclass
class TrialResult:
    trial: int
    rows: List[tuple] = field(default_factory=list)
    counter_table: Optional[pd.DataFrame] = None
    correlations: Optional[pd.DataFrame] = None
    maps: Optional[pd.DataFrame] = None
    tables: Optional[pd.DataFrame] = None
    error: Optional[str] = None


@dataclass
class RunResult:
    raw: pd.DataFrame
    counter_table: Optional[pd.DataFrame] = None
    correlations: Optional[pd.DataFrame] = None
    maps: Optional[pd.DataFrame] = None
    tables: Optional[pd.DataFrame] = None
    failed_trials: List[int] = field(default_factory=list)


def _run_tabular_trial(config: ExperimentConfig, trial: int, seed: int, result: TrialResult):

    mdp = get_environment(config.environment, config.env_params)
    solution = value_iteration(mdp)
    spec = config.agent_spec(mdp.discount)
    agent = TabularAgent(spec, mdp)
    rng = SeededRng(seed)

    snapshots = []

    for episode in range(1, config.episodes + 1):

        trace = agent.run_episode(rng, config.max_steps)

        if episode % config.eval_every == 0:
            metric = mse(agent.q_values, solution)
            result.rows.append((seed, episode, metric, trace.steps))
            if episode % LOG_EVERY == 0:
                logging.info(f"Trial: {trial}, episode: {episode}, mse: {round(metric, 5)}")

        if config.trace_counters:
            snapshots.append(agent.counter_snapshot(episode))

    if config.trace_counters:
        result.counter_table = convergence_vs_counter(snapshots, solution, spec.alpha_e, mdp.action_mask)

    if config.write_tables:
        result.tables = agent.table_snapshot()


def _run_continuous_trial(config: ExperimentConfig, trial: int, seed: int, result: TrialResult):

    env = get_environment(config.environment, config.env_params)
    spec = config.agent_spec(CONTINUOUS_DISCOUNT)
    rng = SeededRng(seed)
    agent = LinearAgent(spec, env, rng)
    statistics = Statistics(agent.coder, spec.alpha_e) if config.snapshot_every > 0 else None

    successes = 0

    for episode in range(1, config.episodes + 1):

        visited = [] if statistics is not None else None
        episode_result = agent.run_episode(rng, visited)
        successes += episode_result.success

        if statistics is not None:
            statistics.record(visited)
            if episode % config.snapshot_every == 0:
                statistics.take_snapshot(episode, agent.e_head)
                if config.snapshot_dir:
                    save_snapshot(agent, episode, f"{config.snapshot_dir}/{config.label}_{trial}_{episode}", trial)

        if episode % config.eval_every == 0:
            result.rows.append((seed, episode, float(episode_result.success), episode_result.steps))

        if episode % LOG_EVERY == 0:
            logging.info(f"Trial: {trial}, episode: {episode}, goals reached: {successes}")

    if statistics is not None and statistics.snapshots:
        result.maps = statistics.maps()
        if len(statistics.snapshots) >= 2:
            result.correlations = statistics.correlations(rng)
        else:
            logging.warning(f"[{config.label}] one snapshot taken, correlations need at least two")


def run_trial(config: ExperimentConfig, trial: int) -> TrialResult:
    '''one seeded trial; a diverging learner ends the trial with the rows produced so far'''

    seed = config.seed + trial
    runner = _run_continuous_trial if config.is_continuous else _run_tabular_trial
    result = TrialResult(trial)

    try:
        runner(config, trial, seed, result)
    except DivergenceError as error:
        logging.error(f"[{config.label}] trial {trial} (seed {seed}) diverged after {len(result.rows)} rows: {error}")
        result.error = str(error)

    return result


def run(config: ExperimentConfig, out: str = None, workers: int = 1) -> RunResult:
    '''
    Runs all trials of one experiment. Trials are independent and may run in
    a process pool; rows are always written sorted by (trial, episode).
    '''

    logging.info(f"Run: {config.label}, environment: {config.environment}, agent: {config.agent}, "
                 f"trials: {config.trials}, episodes: {config.episodes}, workers: {workers}")

    trials = range(config.trials)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            results = list(executor.map(run_trial, [config] * config.trials, trials))
    else:
        results = [run_trial(config, trial) for trial in trials]

    results.sort(key=lambda result: result.trial)
    rows = [row for result in results for row in result.rows]
    raw = pd.DataFrame(rows, columns=RAW_COLUMNS).sort_values(["trial", "episode"], kind="stable", ignore_index=True)

    # per-pair, correlation, map and table outputs describe a single simulation: the first trial
    first = results[0]
    run_result = RunResult(raw, first.counter_table, first.correlations, first.maps, first.tables,
                           [result.trial for result in results if result.error is not None])

    if out is not None:
        write_run(run_result, out)

    return run_result


def write_run(run_result: RunResult, out: str):

    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    run_result.raw.to_csv(out, index=False)
    logging.info(f"Saved raw metrics to {out}")

    if run_result.counter_table is not None:
        path = out.with_suffix(".fig6.csv")
        run_result.counter_table.to_csv(path, index=False)
        logging.info(f"Saved per-pair counters to {path}")

    if run_result.correlations is not None:
        path = out.with_suffix(".correlation.csv")
        run_result.correlations.to_csv(path, index=False)
        logging.info(f"Saved visit/E-value correlations to {path}")

    if run_result.maps is not None:
        path = out.with_suffix(".maps.csv")
        run_result.maps.to_csv(path, index=False)
        logging.info(f"Saved visit and C_E maps to {path}")

    if run_result.tables is not None:
        path = out.with_suffix(".tables.csv")
        run_result.tables.to_csv(path, index=False)
        logging.info(f"Saved Q, E and visit tables to {path}")


def aggregate(raw: pd.DataFrame, label: str) -> pd.DataFrame:
    '''mean metric per episode across trials'''

    means = raw.groupby("episode", sort=True)["metric"].mean()
    return pd.DataFrame({"episode": means.index, "agent": label, "mean_metric": means.to_numpy()})


def episodes_to_threshold(curve: pd.DataFrame, fraction: float, column: str = "mean_metric") -> Optional[int]:
    '''first episode whose metric is at most fraction * the first recorded metric, None if never reached'''

    curve = curve.sort_values("episode")
    values = curve[column].to_numpy()
    reached = values <= fraction * values[0]
    if not reached.any():
        return None
    return int(curve["episode"].to_numpy()[reached.argmax()])


def sweep(configs: List[ExperimentConfig], out_dir: str = None, workers: int = 1) -> pd.DataFrame:
    '''runs every config, writes its raw file and one aggregated file; a failing config does not stop the others'''

    if not configs:
        raise ConfigurationError("sweep needs at least one experiment")

    aggregated = []
    for config in configs:

        out = None if out_dir is None else f"{out_dir}/{config.label}.raw.csv"
        try:
            run_result = run(config, out, workers)
        except Exception as error:
            logging.error(f"[{config.label}] run failed: {error}")
            continue

        aggregated.append(aggregate(run_result.raw, config.label))

    table = pd.concat(aggregated, ignore_index=True) if aggregated else pd.DataFrame(columns=AGGREGATED_COLUMNS)

    if out_dir is not None:
        Path(out_dir).mkdir(parents=True, exist_ok=True)
        table.to_csv(f"{out_dir}/aggregated.csv", index=False)
        logging.info(f"Saved aggregated metrics to {out_dir}/aggregated.csv")

    return table


def oracle_table(environment: str, env_params: dict = None, out: str = None) -> pd.DataFrame:
    '''Q*, optimal-action flag and optimal occupancy of every valid pair of a tabular environment'''

    if environment == "mountaincar":
        raise UnsupportedOperation("oracle requires tabular environment")

    mdp = get_environment(environment, env_params)
    solution = value_iteration(mdp)

    rows = []
    for s in range(mdp.num_states):
        for a in mdp.actions(s):
            rows.append((s, int(a), solution.q_star[s, a], int(solution.pi_star[s] == a), solution.occupancy[s, a]))

    table = pd.DataFrame(rows, columns=ORACLE_COLUMNS)
    if out is not None:
        table.to_csv(out, index=False)
        logging.info(f"Saved oracle of {mdp.name} to {out}")

    return table
