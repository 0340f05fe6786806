from dataclasses import dataclass
from typing import Optional, Sequence, Tuple
import logging
import math
import numpy as np
import pandas as pd
import torch
from scipy import stats

from GeneralizedCounters.SeededRng import SeededRng
from GeneralizedCounters.TileCoder import TileCoder
from GeneralizedCounters.heads import LogisticEHead

MAP_COLUMNS = ["map", "position_bin", "velocity_bin", "visits", "ce"]


@dataclass
class VisitHistogram:
    counts: np.ndarray
    low: Tuple[float, float]
    high: Tuple[float, float]

    @property
    def bins(self) -> Tuple[int, int]:
        return self.counts.shape

    def bin_of(self, states) -> np.ndarray:
        '''(n, 2) bin coordinates; lower edges belong to the higher bin, the top edge to the last bin'''

        states = np.atleast_2d(np.asarray(states, dtype=float))
        low, high = np.asarray(self.low), np.asarray(self.high)
        bins = np.asarray(self.bins)
        coords = np.floor((states - low) / (high - low) * bins).astype(np.int64)
        return np.clip(coords, 0, bins - 1)

    def lookup(self, states) -> np.ndarray:
        coords = self.bin_of(states)
        return self.counts[coords[:, 0], coords[:, 1]]


def visit_histogram(states: Sequence, bins: Tuple[int, int], low: Sequence[float], high: Sequence[float]) -> VisitHistogram:

    states = np.asarray(states, dtype=float).reshape(-1, 2)
    counts, _, _ = np.histogram2d(states[:, 0], states[:, 1], bins=bins,
                                  range=[[low[0], high[0]], [low[1], high[1]]])
    return VisitHistogram(counts.astype(np.int64), tuple(low), tuple(high))


def bin_centers(bins: Tuple[int, int], low: Sequence[float], high: Sequence[float]) -> np.ndarray:
    '''(bins[0], bins[1], 2) array of bin-center states'''

    axes = [low[d] + (np.arange(bins[d]) + 0.5) * (high[d] - low[d]) / bins[d] for d in range(2)]
    grid = np.meshgrid(*axes, indexing="ij")
    return np.stack(grid, axis=-1)


def state_counters(weights: torch.Tensor, coder: TileCoder, states, alpha: float) -> np.ndarray:
    '''C_E(s) = sum_a log_{1-alpha} E(s,a) for every state, E from logistic-head weights'''

    states = np.asarray(states, dtype=float).reshape(-1, 2)
    indices = np.stack([coder.all_action_indices(state) for state in states])
    with torch.no_grad():
        e = torch.sigmoid(weights[torch.from_numpy(indices)].sum(dim=-1)).numpy()
    return np.log(e).sum(axis=-1) / math.log(1 - alpha)


def ce_map(e_head: LogisticEHead, coder: TileCoder, bins: Tuple[int, int], alpha: float) -> np.ndarray:
    '''C_E evaluated at every bin center of the coder's state box'''

    centers = bin_centers(bins, coder.low, coder.high)
    return state_counters(e_head.weights, coder, centers.reshape(-1, 2), alpha).reshape(bins)


def pearson_correlation(x: Sequence[float], y: Sequence[float]) -> Optional[float]:
    '''Pearson coefficient, None when either series has zero variance'''

    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    if len(x) != len(y) or len(x) < 2:
        raise ValueError(f"pearson_correlation needs two series of equal length >= 2, got {len(x)} and {len(y)}")

    if np.ptp(x) == 0 or np.ptp(y) == 0:
        return None

    return float(stats.pearsonr(x, y)[0])


def binned_dispersion(df: pd.DataFrame, by: str, bin_width: float = 1.0, value: str = "rel_err") -> float:
    '''
    Mean over bins of `by` of the coefficient of variation of `value`.
    Small values mean `value` is close to a function of `by` alone.
    '''

    bins = np.floor(df[by].to_numpy(dtype=float) / bin_width)
    grouped = df[value].groupby(bins)
    means, stds, sizes = grouped.mean(), grouped.std(ddof=0), grouped.size()

    usable = (sizes >= 2) & (means > 0)
    if not usable.any():
        return float("nan")
    return float((stds[usable] / means[usable]).mean())


class Statistics:
    '''
    Collects visited states and E-head snapshots during training and relates
    empirical visit counts to the generalized counters C_E.
    '''

    def __init__(self, coder: TileCoder, alpha: float, bins: Tuple[int, int] = (20, 20)):
        self.coder = coder
        self.alpha = alpha
        self.bins = bins
        self.visited = []
        self.snapshots = []

    def record(self, states: Sequence):
        self.visited.extend(states)

    def take_snapshot(self, episode: int, e_head: LogisticEHead):
        self.snapshots.append((episode, len(self.visited), e_head.weights.detach().clone()))

    def histogram(self, n_visits: int = None) -> VisitHistogram:
        states = self.visited if n_visits is None else self.visited[:n_visits]
        return visit_histogram(states, self.bins, self.coder.low, self.coder.high)

    def correlations(self, rng: SeededRng, n_states: int = 200) -> pd.DataFrame:
        '''
        Per sampled visited state, Pearson correlation across snapshots between
        the cumulative visit-histogram count of its bin and its C_E.
        '''

        if len(self.snapshots) < 2 or not self.visited:
            raise ValueError(f"correlations need >= 2 snapshots and recorded visits, got {len(self.snapshots)} snapshots")

        visited = np.asarray(self.visited)
        sampled = visited[rng.integers(0, len(visited), size=n_states)]

        visit_counts = np.stack([self.histogram(n_visits).lookup(sampled) for _, n_visits, _ in self.snapshots], axis=1)
        counters = np.stack([state_counters(weights, self.coder, sampled, self.alpha) for _, _, weights in self.snapshots], axis=1)

        coords = self.histogram().bin_of(sampled)
        coefficients = [pearson_correlation(visit_counts[i], counters[i]) for i in range(n_states)]
        missing = sum(c is None for c in coefficients)
        if missing:
            logging.warning(f"Statistics | {missing} of {n_states} sampled states have zero variance, reported as missing")

        return pd.DataFrame({
            "state_bin": [f"{i}:{j}" for i, j in coords],
            "coefficient": [np.nan if c is None else c for c in coefficients],
            })

    def window_difference(self, first: int, last: int) -> Tuple[np.ndarray, np.ndarray]:
        '''change of the visit histogram and of the C_E map between snapshots first and last'''

        _, visits_first, weights_first = self.snapshots[first]
        _, visits_last, weights_last = self.snapshots[last]

        centers = bin_centers(self.bins, self.coder.low, self.coder.high).reshape(-1, 2)
        ce_first = state_counters(weights_first, self.coder, centers, self.alpha).reshape(self.bins)
        ce_last = state_counters(weights_last, self.coder, centers, self.alpha).reshape(self.bins)

        return self.histogram(visits_last).counts - self.histogram(visits_first).counts, ce_last - ce_first

    def _grids(self, index: int) -> Tuple[np.ndarray, np.ndarray]:
        _, n_visits, weights = self.snapshots[index]
        centers = bin_centers(self.bins, self.coder.low, self.coder.high).reshape(-1, 2)
        return self.histogram(n_visits).counts, state_counters(weights, self.coder, centers, self.alpha).reshape(self.bins)

    def maps(self) -> pd.DataFrame:
        '''
        Visit histogram and C_E map per bin, in long format, for three views:
        "final" at the last snapshot, "first" at the first snapshot and
        "last_difference", the change over the last snapshot interval.
        '''

        if not self.snapshots:
            raise ValueError("maps need at least one snapshot")

        views = [("final", *self._grids(-1)), ("first", *self._grids(0))]
        if len(self.snapshots) >= 2:
            views.append(("last_difference", *self.window_difference(-2, -1)))

        position_bin, velocity_bin = np.indices(self.bins)
        frames = [pd.DataFrame({
            "map": name,
            "position_bin": position_bin.ravel(),
            "velocity_bin": velocity_bin.ravel(),
            "visits": visits.ravel(),
            "ce": ce.ravel(),
            }) for name, visits, ce in views]

        return pd.concat(frames, ignore_index=True)[MAP_COLUMNS]


def positive_fraction(correlations: pd.DataFrame) -> float:
    coefficients = correlations["coefficient"].dropna()
    return float((coefficients > 0).mean()) if len(coefficients) else float("nan")
