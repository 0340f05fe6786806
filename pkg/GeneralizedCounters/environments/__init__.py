import logging

from GeneralizedCounters.environments.tabular_envs import make_bridge, make_tree, make_cliff
from GeneralizedCounters.environments.mountain_car import MountainCarEnv
from GeneralizedCounters.exceptions import ConfigurationError

ENVIRONMENT_NAMES = ("bridge", "tree", "cliff", "mountaincar")


def get_environment(environment_name: str, params: dict = None):
    '''Builds a benchmark environment by name

    Available environments:
    - bridge (k, normalized, discount)
    - tree (k, discount)
    - cliff (height, width, discount)
    - mountaincar (step_cap)
    '''

    params = dict(params or {})

    if environment_name == "bridge":
        env = make_bridge(int(params.pop("k", 5)), bool(params.pop("normalized", False)),
                          float(params.pop("discount", 0.9)))

    elif environment_name == "tree":
        env = make_tree(int(params.pop("k", 4)), float(params.pop("discount", 0.9)))

    elif environment_name == "cliff":
        env = make_cliff(int(params.pop("height", 4)), int(params.pop("width", 12)),
                         float(params.pop("discount", 0.9)))

    elif environment_name == "mountaincar":
        env = MountainCarEnv(step_cap=int(params.pop("step_cap", 1000)))

    else:
        raise ConfigurationError(f"Unknown environment '{environment_name}', valid names: {', '.join(ENVIRONMENT_NAMES)}")

    if params:
        logging.warning(f"Ignored parameters for {environment_name}: {sorted(params)}")

    return env
