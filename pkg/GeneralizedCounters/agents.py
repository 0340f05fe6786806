from dataclasses import dataclass, field
from typing import List, Optional
import numpy as np

from GeneralizedCounters.SeededRng import SeededRng
from GeneralizedCounters.TabularMdp import TabularMdp, Transition, reset, step
from GeneralizedCounters.DelayedQ import DelayedQState, delayed_q_step
from GeneralizedCounters.tables import (ValueTable, ExplorationTable, VisitCounter, q_update, e_update,
                                        generalized_counter, counters_from_evalues, table_snapshot)
from GeneralizedCounters.action_selection import (StochasticRule, BonusForm, policy_distribution, sample_action,
                                                  lll_select, ucb_select, greedy_select, reward_bonus)
from GeneralizedCounters.exceptions import ConfigurationError

TABULAR_AGENT_KINDS = ("egreedy", "softmax", "egreedy-lll-counter", "egreedy-lll-evalue",
                       "softmax-lll-counter", "softmax-lll-evalue", "ucb-counter", "ucb-evalue",
                       "egreedy-bonus", "delayedq")


@dataclass(frozen=True)
class AgentSpec:
    '''Declarative description of one agent: learner rules, selection rule, bonus form and hyperparameters'''
    kind: str
    alpha: float = 0.1
    gamma: float = 0.9
    gamma_e: float = 0.9
    alpha_e: Optional[float] = None
    epsilon: float = 0.1
    temperature: float = 0.25
    beta: Optional[float] = None
    bonus: str = "inverse_gc"
    m: int = 10
    epsilon1: float = 0.01

    def __post_init__(self):
        if not 0 < self.alpha <= 1:
            raise ConfigurationError(f"alpha must lie in (0, 1], got {self.alpha}")
        if self.alpha_e is None:
            object.__setattr__(self, "alpha_e", self.alpha)

    @property
    def rule(self) -> StochasticRule:
        kind = "softmax" if self.kind.startswith("softmax") else "epsilon_greedy"
        return StochasticRule(kind, self.epsilon, self.temperature)

    @property
    def bonus_form(self) -> BonusForm:
        return BonusForm(self.bonus, self.beta)


@dataclass
class EpisodeTrace:
    transitions: List[Transition] = field(default_factory=list)

    @property
    def steps(self) -> int:
        return len(self.transitions)


@dataclass
class CounterSnapshot:
    '''per-pair tables at the end of one episode'''
    episode: int
    q: np.ndarray
    c: np.ndarray
    e: np.ndarray


def _generalized_counter_row(E: ExplorationTable, s: int) -> np.ndarray:
    return counters_from_evalues(E.e[s], E.alpha)


def dora_episode(mdp: TabularMdp, Q: ValueTable, E: ExplorationTable, rule: StochasticRule, alpha: float,
                 gamma: float, rng: SeededRng, gamma_e: float = None, counter: VisitCounter = None,
                 max_steps: int = None) -> EpisodeTrace:
    '''
    One episode of LLL action selection over generalized counters: at every
    step choose argmax_a log f_Q(a|s) - log log_{1-alpha} E(s,a), learn Q
    off-policy and E on-policy with the action actually taken next.
    '''

    if gamma_e is not None:
        E.gamma = gamma_e

    def choose(s):
        actions = mdp.actions(s)
        return lll_select(policy_distribution(rule, Q, s, actions), _generalized_counter_row(E, s))

    trace = EpisodeTrace()
    s = reset(mdp)
    a = choose(s)

    while True:

        tr = step(mdp, s, a, rng)
        trace.transitions.append(tr)
        if counter is not None:
            counter.visit(s, a)

        a_next = None if tr.done else choose(tr.s_next)

        q_update(Q, tr, alpha, gamma, None if tr.done else mdp.actions(tr.s_next))
        e_update(E, s, a, tr.s_next, 0 if a_next is None else a_next, tr.done)

        if tr.done or (max_steps is not None and trace.steps >= max_steps):
            return trace

        s, a = tr.s_next, a_next


class TabularAgent:
    '''
    Runs one of the tabular agent kinds on a TabularMdp. Every kind keeps
    visit counters and learns E-values in parallel, so counter analyses are
    available whichever rule drives action selection.
    '''

    def __init__(self, spec: AgentSpec, mdp: TabularMdp):

        if spec.kind not in TABULAR_AGENT_KINDS:
            raise ConfigurationError(f"Unknown agent '{spec.kind}', valid names: {', '.join(TABULAR_AGENT_KINDS)}")

        self.spec = spec
        self.mdp = mdp
        n_states, n_actions = mdp.num_states, mdp.num_actions

        self.Q = ValueTable(n_states, n_actions)
        self.E = ExplorationTable(n_states, n_actions, spec.alpha_e, spec.gamma_e)
        self.C = VisitCounter(n_states, n_actions)
        self.delayed = DelayedQState(n_states, n_actions, spec.gamma, spec.m, spec.epsilon1) if spec.kind == "delayedq" else None
        self.rule = spec.rule
        self.bonus_form = spec.bonus_form if spec.kind == "egreedy-bonus" else None

        # steps taken so far
        self.t = 0

    @property
    def q_values(self) -> np.ndarray:
        return self.delayed.q if self.delayed is not None else self.Q.q

    def select(self, s: int, rng: SeededRng) -> int:

        kind = self.spec.kind
        actions = self.mdp.actions(s)

        if kind == "delayedq":
            return greedy_select(self.delayed.q[s], actions)

        if kind.startswith("ucb"):
            counts = self.C.c[s] if kind == "ucb-counter" else _generalized_counter_row(self.E, s)
            return ucb_select(self.Q, counts, s, self.t + 1, actions)

        f = policy_distribution(self.rule, self.Q, s, actions)
        if kind.endswith("lll-counter"):
            return lll_select(f, self.C.c[s])
        if kind.endswith("lll-evalue"):
            return lll_select(f, _generalized_counter_row(self.E, s))

        return sample_action(f, rng)

    def learn(self, tr: Transition, a_next: Optional[int]):

        spec = self.spec
        next_actions = None if tr.done else self.mdp.actions(tr.s_next)

        # E first: the bonus needs the post-update counter of the visited pair
        e_update(self.E, tr.s, tr.a, tr.s_next, 0 if a_next is None else a_next, tr.done)

        if self.delayed is not None:
            delayed_q_step(self.delayed, tr, self.t, next_actions)
            return

        if self.bonus_form is not None:
            r = reward_bonus(tr.r, generalized_counter(self.E, tr.s, tr.a), self.bonus_form, spec.alpha_e)
            tr = Transition(tr.s, tr.a, r, tr.s_next, tr.done)

        q_update(self.Q, tr, spec.alpha, spec.gamma, next_actions)

    def run_episode(self, rng: SeededRng, max_steps: int = None) -> EpisodeTrace:

        if self.spec.kind.endswith("lll-evalue"):
            trace = dora_episode(self.mdp, self.Q, self.E, self.rule, self.spec.alpha, self.spec.gamma, rng,
                                 counter=self.C, max_steps=max_steps)
            self.t += trace.steps
            return trace

        trace = EpisodeTrace()
        s = reset(self.mdp)
        a = self.select(s, rng)

        while True:

            tr = step(self.mdp, s, a, rng)
            trace.transitions.append(tr)
            self.t += 1
            self.C.visit(s, a)

            a_next = None if tr.done else self.select(tr.s_next, rng)
            self.learn(tr, a_next)

            if tr.done or (max_steps is not None and trace.steps >= max_steps):
                return trace

            s, a = tr.s_next, a_next

    def counter_snapshot(self, episode: int) -> CounterSnapshot:
        return CounterSnapshot(episode, self.q_values.copy(), self.C.c.copy(), self.E.e.copy())

    def table_snapshot(self):
        Q = ValueTable(*self.q_values.shape)
        Q.q = self.q_values
        return table_snapshot(Q, self.E, self.C, self.mdp.action_mask)
