import numpy as np

from GeneralizedCounters.TabularMdp import Transition
from GeneralizedCounters.exceptions import ConfigurationError


class DelayedQState:
    """
    Delayed Q-Learning (Strehl et al., 2006).

    Values start optimistic at 1/(1-gamma) and a pair is only updated
    after m samples were accumulated, and only if the batch target lowers
    the value by at least 2*epsilon1.

    Attributes
    ----------
    u: np.ndarray
        accumulated targets of the running batch per pair
    l: np.ndarray
        number of samples in the running batch per pair
    learn: np.ndarray
        LEARN flags per pair
    t_last_attempt: np.ndarray
        step of the last update attempt per pair
    t_star: int
        step of the last successful update
    """

    def __init__(self, num_states: int, num_actions: int, gamma: float, m: int = 10, epsilon1: float = 0.01):

        if not 0 < gamma < 1:
            raise ConfigurationError(f"Delayed Q-Learning needs 0 < gamma < 1, got {gamma}")
        if m < 1:
            raise ConfigurationError(f"Delayed Q-Learning needs m >= 1, got {m}")

        self.gamma = gamma
        self.m = m
        self.epsilon1 = epsilon1

        self.q = np.full((num_states, num_actions), 1 / (1 - gamma))
        self.u = np.zeros((num_states, num_actions))
        self.l = np.zeros((num_states, num_actions), dtype=np.int64)
        self.learn = np.ones((num_states, num_actions), dtype=bool)
        self.t_last_attempt = np.zeros((num_states, num_actions), dtype=np.int64)
        self.t_star = 0


def delayed_q_step(D: DelayedQState, tr: Transition, t: int, next_actions=None) -> DelayedQState:

    if not 0 <= tr.r <= 1:
        raise ConfigurationError(f"Delayed Q-Learning assumes rewards in [0, 1], got {tr.r} (use the normalized environment)")

    s, a = tr.s, tr.a

    if D.learn[s, a]:

        if tr.done:
            bootstrap = 0.0
        elif next_actions is None:
            bootstrap = D.q[tr.s_next].max()
        else:
            bootstrap = D.q[tr.s_next, next_actions].max()

        D.u[s, a] += tr.r + D.gamma * bootstrap
        D.l[s, a] += 1

        if D.l[s, a] == D.m:

            target = D.u[s, a] / D.m
            if D.q[s, a] - target >= 2 * D.epsilon1:
                D.q[s, a] = target + D.epsilon1
                D.t_star = t
            elif D.t_last_attempt[s, a] >= D.t_star:
                D.learn[s, a] = False

            D.t_last_attempt[s, a] = t
            D.u[s, a] = 0.0
            D.l[s, a] = 0

    elif D.t_last_attempt[s, a] < D.t_star:
        D.learn[s, a] = True

    return D
