"""Classes used to generate pseudo-random numbers.

Every stochastic part of a computation (Monte Carlo geometry, arrival times,
arrival locations, service times, admission coins) draws from its own stream.
Streams are derived from one master seed, so a run is reproduced exactly by
its seed.
"""

# This file is part of cdnsla.
# cdnsla Copyright (C) 2026 cdnsla developers
# See the "licenses" directory for full license information.


import numpy as np


__all__ = ['Random']


class Random(object):

    """Interface to the numpy pseudo-random number generator.

    Attributes:
        seed: The seed the stream was created from, or None for a child
            stream.
        rng: A numpy Generator.
        seedseq: The SeedSequence the generator was built from, used to
            spawn independent child streams.
    """

    def __init__(self, seed=12345, seedseq=None):
        """Initialises Random.

        Args:
            seed: An integer seed.
            seedseq: An optional SeedSequence, which takes precedence over
                the seed.
        """

        if seedseq is None:
            seedseq = np.random.SeedSequence(seed)
            self.seed = seed
        else:
            self.seed = None
        self.seedseq = seedseq
        self.rng = np.random.Generator(np.random.PCG64(seedseq))

    def split(self, n):
        """Returns n independent child streams.

        The children depend only on the parent's seed and on their position,
        not on how many numbers the parent has drawn.
        """

        return [Random(seedseq=s) for s in self.seedseq.spawn(n)]

    @property
    def u(self):
        """A pseudo-random number from a uniform distribution in [0,1)."""

        return self.rng.random()

    def uvec(self, shape):
        """An array of uniform pseudo-random numbers in [0,1).

        Args:
            shape: The shape of the array to be returned.
        """

        return self.rng.random(shape)

    def expvec(self, shape, scale=1.0):
        """An array of exponential pseudo-random numbers.

        Args:
            shape: The shape of the array to be returned.
            scale: The mean of the distribution.
        """

        return self.rng.exponential(scale, shape)

    def integers(self, high, shape=None):
        """Uniform integers in [0, high)."""

        return self.rng.integers(0, high, shape)
