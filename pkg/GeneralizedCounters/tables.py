import math
import numpy as np
import pandas as pd

from GeneralizedCounters.TabularMdp import Transition
from GeneralizedCounters.exceptions import ConfigurationError, ContractViolation

# E-values are kept representable so the log-counter stays finite
E_FLOOR = np.finfo(float).tiny


class ValueTable:

    def __init__(self, num_states: int, num_actions: int, init_value: float = 0.0):
        self.init_value = init_value
        self.q = np.full((num_states, num_actions), init_value, dtype=float)


class ExplorationTable:
    '''
    E-values: action values of the reward-free copy of the MDP, learned
    on-policy. They start at 1 and decay toward 0 with every visit.
    '''

    def __init__(self, num_states: int, num_actions: int, alpha: float = 0.1, gamma: float = 0.9):

        if not 0 < alpha < 1:
            raise ConfigurationError(f"E-value learning rate must lie in (0, 1), got {alpha}")
        if not 0 <= gamma < 1:
            raise ConfigurationError(f"E-value discount must lie in [0, 1), got {gamma}")

        self.alpha = alpha
        self.gamma = gamma
        self.e = np.ones((num_states, num_actions), dtype=float)


class VisitCounter:

    def __init__(self, num_states: int, num_actions: int):
        self.c = np.zeros((num_states, num_actions), dtype=np.int64)

    def visit(self, s: int, a: int):
        self.c[s, a] += 1

    @property
    def total(self) -> int:
        return int(self.c.sum())


def q_update(Q: ValueTable, tr: Transition, alpha: float, gamma: float, next_actions=None) -> ValueTable:
    '''
    Q(s,a) <- (1-alpha) Q(s,a) + alpha (r + gamma max_a' Q(s',a'))

    The bootstrap term is 0 when tr.done. next_actions restricts the max
    to the actions valid in s' (all actions by default).
    '''

    if tr.done:
        bootstrap = 0.0
    elif next_actions is None:
        bootstrap = Q.q[tr.s_next].max()
    else:
        bootstrap = Q.q[tr.s_next, next_actions].max()

    Q.q[tr.s, tr.a] = (1 - alpha) * Q.q[tr.s, tr.a] + alpha * (tr.r + gamma * bootstrap)
    return Q


def e_update(E: ExplorationTable, s: int, a: int, s_next: int, a_next: int, done: bool) -> ExplorationTable:
    '''SARSA update with zero reward; a_next must be the action actually taken in s_next'''

    bootstrap = 0.0 if done else E.e[s_next, a_next]
    value = (1 - E.alpha) * E.e[s, a] + E.alpha * E.gamma * bootstrap
    E.e[s, a] = max(value, E_FLOOR)
    return E


def generalized_counter(E: ExplorationTable, s: int, a: int, alpha: float = None) -> float:
    '''log_{1-alpha} E(s,a); equals the visit count when gamma_E = 0'''

    alpha = E.alpha if alpha is None else alpha
    e = E.e[s, a]
    if not 0 < e <= 1:
        raise ContractViolation(f"E({s},{a}) = {e} outside (0, 1]")

    return math.log(e) / math.log(1 - alpha)


def generalized_counters(E: ExplorationTable, alpha: float = None) -> np.ndarray:
    '''vectorized generalized_counter over the whole table'''

    return counters_from_evalues(E.e, E.alpha if alpha is None else alpha)


def counters_from_evalues(e, alpha: float) -> np.ndarray:
    '''log_{1-alpha} e for any array of E-values in (0, 1]'''

    e = np.asarray(e, dtype=float)
    if np.any(e <= 0) or np.any(e > 1):
        raise ContractViolation("E-values outside (0, 1]")

    return np.log(e) / math.log(1 - alpha)


def table_snapshot(Q: ValueTable, E: ExplorationTable, C: VisitCounter, valid_mask: np.ndarray = None) -> pd.DataFrame:
    '''flat (s, a, q, e, c) records of the valid pairs'''

    num_states, num_actions = Q.q.shape
    s, a = np.meshgrid(np.arange(num_states), np.arange(num_actions), indexing="ij")
    keep = np.ones_like(Q.q, dtype=bool) if valid_mask is None else valid_mask

    return pd.DataFrame({
        "s": s[keep],
        "a": a[keep],
        "q": Q.q[keep],
        "e": E.e[keep],
        "c": C.c[keep],
        })
