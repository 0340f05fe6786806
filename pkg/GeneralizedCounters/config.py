"""
Experiment configuration files.

INI format read with configparser, one experiment per section; the section
name is the experiment label. Values in [DEFAULT] are shared by all
sections. Environment parameters carry an ``env.`` prefix:

    [DEFAULT]
    environment = bridge
    env.k = 5
    episodes = 1000
    trials = 50

    [bonus-gamma_e-0.9]
    agent = egreedy-bonus
    gamma_e = 0.9
"""
from configparser import ConfigParser
from dataclasses import dataclass, field, fields
from typing import List, Optional

from GeneralizedCounters.agents import AgentSpec, TABULAR_AGENT_KINDS
from GeneralizedCounters.LinearAgent import CONTINUOUS_AGENT_KINDS
from GeneralizedCounters.environments import ENVIRONMENT_NAMES
from GeneralizedCounters.exceptions import ConfigurationError

AGENT_KEYS = {f.name for f in fields(AgentSpec)} - {"kind"}
RUN_KEYS = {"environment", "agent", "episodes", "trials", "seed", "eval_every", "snapshot_every",
            "trace_counters", "snapshot_dir", "max_steps", "write_tables"}


@dataclass
class ExperimentConfig:
    label: str
    environment: str
    agent: str
    env_params: dict = field(default_factory=dict)
    hyperparameters: dict = field(default_factory=dict)
    episodes: Optional[int] = None
    trials: int = 50
    seed: int = 0
    eval_every: int = 1
    snapshot_every: int = 0
    trace_counters: bool = False
    snapshot_dir: Optional[str] = None
    max_steps: Optional[int] = None
    write_tables: bool = False

    def __post_init__(self):

        if self.environment not in ENVIRONMENT_NAMES:
            raise ConfigurationError(f"[{self.label}] unknown environment '{self.environment}', valid names: {', '.join(ENVIRONMENT_NAMES)}")

        valid_agents = CONTINUOUS_AGENT_KINDS if self.is_continuous else TABULAR_AGENT_KINDS
        if self.agent not in valid_agents:
            raise ConfigurationError(f"[{self.label}] unknown agent '{self.agent}' for {self.environment}, valid names: {', '.join(valid_agents)}")

        unknown = set(self.hyperparameters) - AGENT_KEYS
        if unknown:
            raise ConfigurationError(f"[{self.label}] unknown hyperparameters: {sorted(unknown)}")

        if self.trials < 1:
            raise ConfigurationError(f"[{self.label}] trials must be >= 1, got {self.trials}")

        if self.episodes is None:
            long_bridge = self.environment == "bridge" and int(self.env_params.get("k", 5)) > 5
            self.episodes = 4000 if long_bridge else 1000
        if self.episodes < 1:
            raise ConfigurationError(f"[{self.label}] episodes must be >= 1, got {self.episodes}")

        if self.eval_every < 1:
            raise ConfigurationError(f"[{self.label}] eval_every must be >= 1, got {self.eval_every}")

        # the oracle and the learner must discount alike
        if not self.is_continuous and "gamma" in self.hyperparameters:
            self.env_params.setdefault("discount", self.hyperparameters["gamma"])

    @property
    def is_continuous(self) -> bool:
        return self.environment == "mountaincar"

    def agent_spec(self, discount: float = None) -> AgentSpec:
        hyperparameters = dict(self.hyperparameters)
        if discount is not None:
            hyperparameters.setdefault("gamma", discount)
        return AgentSpec(self.agent, **hyperparameters)


def parse_value(text: str):
    '''config literal -> bool, int, float or str'''

    lowered = text.strip().lower()
    if lowered in ("true", "yes", "on"):
        return True
    if lowered in ("false", "no", "off"):
        return False
    if lowered in ("none", ""):
        return None
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text.strip()


def config_from_section(label: str, section) -> ExperimentConfig:

    env_params, hyperparameters, run = {}, {}, {}

    for key, raw in section.items():
        value = parse_value(raw)
        if key.startswith("env."):
            env_params[key[len("env."):]] = value
        elif key in AGENT_KEYS:
            if value is not None:
                hyperparameters[key] = value
        elif key in RUN_KEYS:
            run[key] = value
        else:
            raise ConfigurationError(f"[{label}] unknown key '{key}'")

    for required in ("environment", "agent"):
        if run.get(required) is None:
            raise ConfigurationError(f"[{label}] missing required key '{required}'")

    return ExperimentConfig(label=label, env_params=env_params, hyperparameters=hyperparameters, **run)


def load_configs(path: str) -> List[ExperimentConfig]:

    parser = ConfigParser()
    if not parser.read(path):
        raise ConfigurationError(f"Cannot read config file {path}")

    configs = [config_from_section(label, parser[label]) for label in parser.sections()]
    if not configs:
        raise ConfigurationError(f"No experiment sections in {path}")
    return configs


def loads_configs(text: str) -> List[ExperimentConfig]:
    '''same as load_configs for config text held in memory'''

    parser = ConfigParser()
    parser.read_string(text)
    return [config_from_section(label, parser[label]) for label in parser.sections()]
