import numpy as np


class SeededRng:
    '''
    Single source of randomness for a simulation.

    Wraps numpy's PCG64 bit generator, so identical seeds and identical
    call sequences give bit-identical draws on every platform.
    '''

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._generator = np.random.Generator(np.random.PCG64(self.seed))

    def random(self) -> float:
        return float(self._generator.random())

    def uniform(self, low: float, high: float, size=None):
        if size is None:
            return float(self._generator.uniform(low, high))
        return self._generator.uniform(low, high, size)

    def integers(self, low: int, high: int, size=None):
        if size is None:
            return int(self._generator.integers(low, high))
        return self._generator.integers(low, high, size)

    def categorical(self, probabilities) -> int:
        '''inverse-CDF draw of an index from a discrete distribution'''

        cdf = np.cumsum(probabilities)
        u = self.random() * cdf[-1]
        index = int(np.searchsorted(cdf, u, side="right"))

        # rounding at the top of the cdf: fall back to the last index with mass
        if index >= len(cdf):
            index = int(np.flatnonzero(np.asarray(probabilities) > 0)[-1])
        return index
