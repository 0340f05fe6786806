from dataclasses import dataclass
from typing import Sequence
import numpy as np

from GeneralizedCounters.exceptions import ConfigurationError


@dataclass(frozen=True)
class SparseFeatures:
    '''active binary features of one (state, action); each active value is 1'''
    active_indices: np.ndarray


class TileCoder:
    '''
    Tile coding over a box of continuous states.

    Tiling i is shifted by i/num_tilings of a tile width in every dimension.
    Tile width is range/(tiles_per_dim - 1), so every shifted grid still fits
    in tiles_per_dim tiles. Actions select disjoint blocks of the feature
    vector.
    '''

    def __init__(self, low: Sequence[float], high: Sequence[float], num_actions: int,
                 num_tilings: int = 8, tiles_per_dim: Sequence[int] = (8, 8)):

        if num_tilings < 1 or any(t < 2 for t in tiles_per_dim):
            raise ConfigurationError(f"TileCoder needs num_tilings >= 1 and >= 2 tiles per dimension, got {num_tilings}, {tiles_per_dim}")
        if not len(low) == len(high) == len(tiles_per_dim):
            raise ConfigurationError("TileCoder: low, high and tiles_per_dim must have the same length")

        self.low = np.asarray(low, dtype=float)
        self.high = np.asarray(high, dtype=float)
        self.num_actions = num_actions
        self.num_tilings = num_tilings
        self.tiles_per_dim = np.asarray(tiles_per_dim, dtype=np.int64)

        self.tile_width = (self.high - self.low) / (self.tiles_per_dim - 1)
        self.offsets = np.arange(num_tilings)[:, None] / num_tilings

        self.tiles_per_tiling = int(np.prod(self.tiles_per_dim))
        self.block_size = num_tilings * self.tiles_per_tiling
        self.num_features = self.block_size * num_actions

        # row-major strides of one tiling
        self._strides = np.cumprod(np.concatenate(([1], self.tiles_per_dim[::-1][:-1])))[::-1]

    def tile_indices(self, state: Sequence[float]) -> np.ndarray:
        '''feature indices of the state inside action block 0, one per tiling, increasing'''

        x = np.clip(np.asarray(state, dtype=float), self.low, self.high)
        scaled = (x - self.low) / self.tile_width
        coords = np.floor(scaled[None, :] + self.offsets).astype(np.int64)
        coords = np.minimum(coords, self.tiles_per_dim - 1)

        return np.arange(self.num_tilings) * self.tiles_per_tiling + coords @ self._strides

    def all_action_indices(self, state: Sequence[float]) -> np.ndarray:
        '''(num_actions, num_tilings) array of active indices for every action'''
        return self.tile_indices(state)[None, :] + np.arange(self.num_actions)[:, None] * self.block_size


def tile_features(coder: TileCoder, s, a: int) -> SparseFeatures:
    state = (s.position, s.velocity) if hasattr(s, "position") else s
    return SparseFeatures(coder.tile_indices(state) + a * coder.block_size)
