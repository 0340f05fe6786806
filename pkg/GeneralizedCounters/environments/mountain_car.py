from dataclasses import dataclass
from typing import Tuple
import math

from GeneralizedCounters.SeededRng import SeededRng
from GeneralizedCounters.exceptions import ConfigurationError, ContractViolation

REVERSE, NEUTRAL, FORWARD = 0, 1, 2


@dataclass(frozen=True)
class ContinuousState:
    position: float
    velocity: float


@dataclass(frozen=True)
class MountainCarEnv:
    '''
    Sparse-reward MountainCar: reward 1 on reaching the goal, 0 otherwise.
    The car state lives outside the env, so one instance can be shared.
    '''
    step_cap: int = 1000
    goal_position: float = 0.5
    num_actions: int = 3
    min_position: float = -1.2
    max_position: float = 0.6
    max_speed: float = 0.07
    force: float = 0.001
    gravity: float = 0.0025
    name: str = "mountaincar"

    def __post_init__(self):
        if self.step_cap < 1:
            raise ConfigurationError(f"mountaincar: step_cap must be >= 1, got {self.step_cap}")

    @property
    def low(self) -> Tuple[float, float]:
        return self.min_position, -self.max_speed

    @property
    def high(self) -> Tuple[float, float]:
        return self.max_position, self.max_speed


def mountain_car_reset(env: MountainCarEnv, rng: SeededRng) -> ContinuousState:
    return ContinuousState(rng.uniform(-0.6, -0.4), 0.0)


def mountain_car_step(env: MountainCarEnv, s: ContinuousState, a: int, t: int) -> Tuple[ContinuousState, float, bool]:
    '''
    Classical MountainCar dynamics. Returns (next state, reward, done);
    done on reaching the goal (reward 1) or when t + 1 hits the step cap.
    '''

    if t >= env.step_cap:
        raise ContractViolation(f"mountaincar: step called after the step cap (t={t}, step_cap={env.step_cap})")
    if a not in (REVERSE, NEUTRAL, FORWARD):
        raise ContractViolation(f"mountaincar: invalid action {a}")

    velocity = s.velocity + env.force * (a - 1) - env.gravity * math.cos(3 * s.position)
    velocity = min(max(velocity, -env.max_speed), env.max_speed)

    position = s.position + velocity
    position = min(max(position, env.min_position), env.max_position)

    # inelastic left wall
    if position == env.min_position and velocity < 0:
        velocity = 0.0

    if position >= env.goal_position:
        return ContinuousState(position, velocity), 1.0, True

    return ContinuousState(position, velocity), 0.0, t + 1 == env.step_cap
