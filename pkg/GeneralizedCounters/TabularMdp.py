from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, List, Tuple
import numpy as np

from GeneralizedCounters.SeededRng import SeededRng
from GeneralizedCounters.exceptions import ConfigurationError, ContractViolation

PROBABILITY_TOLERANCE = 1e-12

Kernel = Dict[Tuple[int, int], List[Tuple[int, float]]]
RewardKernel = Dict[Tuple[int, int], List[Tuple[float, float]]]


@dataclass(frozen=True)
class Transition:
    s: int
    a: int
    r: float
    s_next: int
    done: bool


@dataclass(frozen=True)
class TabularMdp:
    """
    Finite episodic MDP.

    Attributes
    ----------
    transition: dict
        (s, a) -> list of (next state, probability); only valid pairs are present
    reward: dict
        (s, a) -> list of (reward value, probability)
    terminal_states: frozenset
        entering one of them ends the episode; they have no outgoing pairs
    """
    num_states: int
    num_actions: int
    transition: Kernel
    reward: RewardKernel
    initial_state: int
    terminal_states: FrozenSet[int]
    discount: float
    name: str = "mdp"
    action_names: Tuple[str, ...] = field(default=())

    def __post_init__(self):

        if not 0 <= self.discount < 1:
            raise ConfigurationError(f"{self.name}: discount must lie in [0, 1), got {self.discount}")

        if not 0 <= self.initial_state < self.num_states:
            raise ConfigurationError(f"{self.name}: initial state {self.initial_state} out of range")

        if set(self.transition) != set(self.reward):
            raise ConfigurationError(f"{self.name}: transition and reward kernels cover different pairs")

        for (s, a), outcomes in self.transition.items():

            if s in self.terminal_states:
                raise ConfigurationError(f"{self.name}: terminal state {s} has an outgoing pair (action {a})")
            if not (0 <= s < self.num_states and 0 <= a < self.num_actions):
                raise ConfigurationError(f"{self.name}: pair ({s}, {a}) out of range")

            total = sum(p for _, p in outcomes)
            if abs(total - 1) > PROBABILITY_TOLERANCE:
                raise ConfigurationError(f"{self.name}: P(.|{s},{a}) sums to {total}")

            total = sum(p for _, p in self.reward[(s, a)])
            if abs(total - 1) > PROBABILITY_TOLERANCE:
                raise ConfigurationError(f"{self.name}: R(.|{s},{a}) sums to {total}")

    @cached_property
    def action_mask(self) -> np.ndarray:
        '''boolean (num_states, num_actions) array of valid pairs'''
        mask = np.zeros((self.num_states, self.num_actions), dtype=bool)
        for s, a in self.transition:
            mask[s, a] = True
        return mask

    def actions(self, s: int) -> np.ndarray:
        return np.flatnonzero(self.action_mask[s])

    def is_terminal(self, s: int) -> bool:
        return s in self.terminal_states

    @cached_property
    def transition_matrix(self) -> np.ndarray:
        '''dense P[s, a, s_next]; rows of invalid pairs are zero'''
        P = np.zeros((self.num_states, self.num_actions, self.num_states))
        for (s, a), outcomes in self.transition.items():
            for s_next, p in outcomes:
                P[s, a, s_next] += p
        return P

    @cached_property
    def expected_reward(self) -> np.ndarray:
        R = np.zeros((self.num_states, self.num_actions))
        for (s, a), outcomes in self.reward.items():
            R[s, a] = sum(r * p for r, p in outcomes)
        return R

    @property
    def max_abs_reward(self) -> float:
        return max(abs(r) for outcomes in self.reward.values() for r, _ in outcomes)


def reset(mdp: TabularMdp) -> int:
    return mdp.initial_state


def step(mdp: TabularMdp, s: int, a: int, rng: SeededRng) -> Transition:
    '''samples s_next ~ P(.|s,a) and r ~ R(.|s,a)'''

    if mdp.is_terminal(s):
        raise ContractViolation(f"{mdp.name}: step called from terminal state {s}")

    outcomes = mdp.transition.get((s, a))
    if outcomes is None:
        raise ContractViolation(f"{mdp.name}: action {a} is not valid in state {s}")

    # point masses consume no randomness
    if len(outcomes) == 1:
        s_next = outcomes[0][0]
    else:
        s_next = outcomes[rng.categorical([p for _, p in outcomes])][0]

    rewards = mdp.reward[(s, a)]
    if len(rewards) == 1:
        r = rewards[0][0]
    else:
        r = rewards[rng.categorical([p for _, p in rewards])][0]

    return Transition(s, a, float(r), s_next, mdp.is_terminal(s_next))
