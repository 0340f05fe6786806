from dataclasses import dataclass
from typing import List, Sequence
import logging
import numpy as np
import pandas as pd

from GeneralizedCounters.TabularMdp import TabularMdp
from GeneralizedCounters.tables import counters_from_evalues
from GeneralizedCounters.exceptions import OccupancyError

DEFAULT_TOLERANCE = 1e-10


@dataclass
class OptimalSolution:
    q_star: np.ndarray
    pi_star: np.ndarray
    occupancy: np.ndarray


def _state_values(q: np.ndarray, mdp: TabularMdp) -> np.ndarray:
    masked = np.where(mdp.action_mask, q, -np.inf)
    v = masked.max(axis=1)
    # terminal states (and states without actions) are worth 0
    v[~mdp.action_mask.any(axis=1)] = 0.0
    return v


def bellman_backup(q: np.ndarray, mdp: TabularMdp) -> np.ndarray:
    backup = mdp.expected_reward + mdp.discount * mdp.transition_matrix @ _state_values(q, mdp)
    return np.where(mdp.action_mask, backup, 0.0)


def greedy_policy(q: np.ndarray, mdp: TabularMdp) -> np.ndarray:
    '''argmax over valid actions with lowest-index ties; -1 for states without actions'''

    masked = np.where(mdp.action_mask, q, -np.inf)
    policy = masked.argmax(axis=1)
    policy[~mdp.action_mask.any(axis=1)] = -1
    return policy


def value_iteration(mdp: TabularMdp, tol: float = DEFAULT_TOLERANCE, with_occupancy: bool = True) -> OptimalSolution:
    '''
    Bellman optimality backups until the sup-norm change drops below
    tol * (1 - gamma) / gamma, which bounds the remaining error by tol.
    '''

    gamma = mdp.discount
    threshold = tol * (1 - gamma) / gamma if gamma > 0 else np.inf
    q = np.zeros((mdp.num_states, mdp.num_actions))

    iteration = 0
    while True:
        q_new = bellman_backup(q, mdp)
        change = np.abs(q_new - q).max()
        q = q_new
        iteration += 1
        if change < threshold or gamma == 0:
            break

    logging.info(f"Value iteration on {mdp.name}: {iteration} iterations, last change {change:.3e}")

    pi_star = greedy_policy(q, mdp)
    occupancy = optimal_occupancy(mdp, pi_star, allow_truncation=True) if with_occupancy else None
    return OptimalSolution(q, pi_star, occupancy)


def optimal_occupancy(mdp: TabularMdp, pi_star: Sequence[int], residual: float = 1e-9,
                      horizon: int = 10**6, allow_truncation: bool = False) -> np.ndarray:
    '''
    Normalized expected undiscounted visit frequency of every (s, a) when
    following pi_star from the initial state until absorption.
    '''

    pi_star = np.asarray(pi_star)
    acting = pi_star >= 0
    states = np.flatnonzero(acting)

    # state-to-state kernel under pi_star
    P_pi = np.zeros((mdp.num_states, mdp.num_states))
    P_pi[states] = mdp.transition_matrix[states, pi_star[states]]

    mass = np.zeros(mdp.num_states)
    mass[mdp.initial_state] = 1.0
    visits = np.zeros(mdp.num_states)

    exhausted = True
    for step in range(horizon):
        mass = np.where(acting, mass, 0.0)
        if mass.sum() < residual:
            exhausted = False
            break
        visits += mass
        next_mass = mass @ P_pi
        if np.array_equal(np.where(acting, next_mass, 0.0), mass):
            # stationary mass adds the same visits on every remaining step
            visits += mass * (horizon - step - 1)
            mass = next_mass
            break
        mass = next_mass

    if exhausted:
        message = f"{mdp.name}: optimal policy still holds {mass.sum():.3e} non-absorbed mass after {horizon} steps"
        if not allow_truncation:
            raise OccupancyError(message)
        logging.warning(message)

    occupancy = np.zeros((mdp.num_states, mdp.num_actions))
    occupancy[states, pi_star[states]] = visits[states]
    return occupancy / occupancy.sum()


def mse(Q, sol: OptimalSolution) -> float:
    '''occupancy-weighted squared error between Q and Q*'''

    q = Q.q if hasattr(Q, "q") else np.asarray(Q)
    return float(np.sum(sol.occupancy * (q - sol.q_star) ** 2))


def normalize_series(series: Sequence[float]) -> List[float]:

    values = np.asarray(series, dtype=float)
    peak = values.max() if len(values) else 0.0

    if peak <= 0:
        logging.warning("normalize_series: series has no positive values, returned unchanged")
        return values.tolist()

    return (values / peak).tolist()


def convergence_vs_counter(traces, sol: OptimalSolution, alpha: float, valid_mask: np.ndarray = None) -> pd.DataFrame:
    '''
    Rows (pair, episode, c, gc, rel_err) for every tracked pair at the end
    of every recorded episode, rel_err = |Q - Q*| / |Q*|. Pairs with
    Q* = 0 are excluded since the relative error is undefined.
    '''

    q_star = sol.q_star
    tracked = np.ones_like(q_star, dtype=bool) if valid_mask is None else valid_mask.copy()

    excluded = tracked & (q_star == 0)
    if excluded.any():
        logging.warning(f"convergence_vs_counter: {int(excluded.sum())} pairs with Q* = 0 excluded")
    tracked &= ~excluded

    states, actions = np.nonzero(tracked)
    pair_names = [f"{s}:{a}" for s, a in zip(states, actions)]

    frames = []
    for snapshot in traces:
        frames.append(pd.DataFrame({
            "pair": pair_names,
            "episode": snapshot.episode,
            "c": snapshot.c[states, actions],
            "gc": counters_from_evalues(snapshot.e[states, actions], alpha),
            "rel_err": np.abs(snapshot.q[states, actions] - q_star[states, actions]) / np.abs(q_star[states, actions]),
            }))

    if not frames:
        return pd.DataFrame(columns=["pair", "episode", "c", "gc", "rel_err"])
    return pd.concat(frames, ignore_index=True)
