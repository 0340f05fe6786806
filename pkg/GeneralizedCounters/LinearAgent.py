from dataclasses import dataclass
import numpy as np
import torch

from GeneralizedCounters.SeededRng import SeededRng
from GeneralizedCounters.TileCoder import TileCoder, SparseFeatures
from GeneralizedCounters.heads import LinearQHead, LogisticEHead, linear_q_step, logistic_e_step, e_predict
from GeneralizedCounters.environments.mountain_car import MountainCarEnv, mountain_car_reset, mountain_car_step
from GeneralizedCounters.action_selection import (BonusForm, action_distribution, sample_action, lll_select,
                                                  reward_bonus)
from GeneralizedCounters.agents import AgentSpec
from GeneralizedCounters.tables import counters_from_evalues
from GeneralizedCounters.exceptions import ConfigurationError

CONTINUOUS_AGENT_KINDS = ("egreedy", "softmax", "egreedy-lll-evalue", "softmax-lll-evalue", "egreedy-bonus")


@dataclass
class EpisodeResult:
    success: bool
    steps: int


class LinearAgent:
    '''
    Q and E learned in parallel with linear heads over tile-coding features.
    Only the *-lll-evalue and bonus kinds let E influence behaviour; the
    other kinds still learn E so visits and E can be compared.
    '''

    def __init__(self, spec: AgentSpec, env: MountainCarEnv, rng: SeededRng, coder: TileCoder = None):

        if spec.kind not in CONTINUOUS_AGENT_KINDS:
            raise ConfigurationError(f"Unknown agent '{spec.kind}' for {env.name}, valid names: {', '.join(CONTINUOUS_AGENT_KINDS)}")

        self.spec = spec
        self.env = env
        self.coder = coder if coder is not None else TileCoder(env.low, env.high, env.num_actions)
        self.rule = spec.rule
        self.bonus_form = BonusForm("inverse_sqrt_neglog", spec.beta) if spec.kind == "egreedy-bonus" else None

        self.q_head = LinearQHead(self.coder.num_features, rng)
        self.e_head = LogisticEHead(self.coder.num_features)

    def evaluate(self, state):
        '''active indices, Q-values and E-values of every action in one state'''

        indices = self.coder.all_action_indices((state.position, state.velocity))
        index_tensor = torch.from_numpy(indices)
        with torch.no_grad():
            q = self.q_head(index_tensor).numpy()
            e = self.e_head(index_tensor).numpy()
        return indices, q, e

    def select(self, q: np.ndarray, e: np.ndarray, rng: SeededRng) -> int:

        f = action_distribution(self.rule, q)
        if self.spec.kind.endswith("lll-evalue"):
            return lll_select(f, counters_from_evalues(e, self.spec.alpha_e))
        return sample_action(f, rng)

    def run_episode(self, rng: SeededRng, visited: list = None) -> EpisodeResult:
        '''one episode until the goal or the step cap; visited collects (position, velocity) of every acted-from state'''

        spec, env = self.spec, self.env

        state = mountain_car_reset(env, rng)
        indices, q, e = self.evaluate(state)
        a = self.select(q, e, rng)
        t = 0

        while True:

            if visited is not None:
                visited.append((state.position, state.velocity))

            state_next, r, done = mountain_car_step(env, state, a, t)
            t += 1
            reached = state_next.position >= env.goal_position

            # only the goal is terminal for the TD targets, the step cap is a time limit
            indices_next, q_next, e_next = self.evaluate(state_next)
            a_next = self.select(q_next, e_next, rng)

            phi = SparseFeatures(indices[a])
            logistic_e_step(self.e_head, phi, SparseFeatures(indices_next[a_next]), spec.gamma_e, spec.alpha_e, reached)

            if self.bonus_form is not None:
                gc_post = counters_from_evalues(e_predict(self.e_head, phi), spec.alpha_e).item()
                r = reward_bonus(r, gc_post, self.bonus_form, spec.alpha_e)

            greedy_next = int(np.argmax(q_next))
            linear_q_step(self.q_head, phi, r, SparseFeatures(indices_next[greedy_next]), spec.gamma, spec.alpha, reached)

            if done:
                return EpisodeResult(reached, t)

            state, a, indices = state_next, a_next, indices_next
