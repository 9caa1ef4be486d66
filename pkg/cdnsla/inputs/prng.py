"""Creates the random number generator of a computation from its seed."""

# This file is part of cdnsla.
# cdnsla Copyright (C) 2026 cdnsla developers
# See the "licenses" directory for full license information.


from cdnsla.utils.prng import Random
from cdnsla.utils.inputvalue import *


__all__ = ['InputRandom']


class InputRandom(Input):

    """Random input class.

    Every stream used by a computation is derived from this one seed, so a
    run is reproduced by its seed alone.

    Fields:
       seed: An optional integer giving the master seed. Defaults to 12345.
    """

    fields = {"seed": (InputValue, {"dtype": int,
                                    "default": 12345,
                                    "help": "The master seed all the random streams of the computation are derived from."})}

    default_help = "Deals with the pseudo-random number generator."
    default_label = "PRNG"

    def store(self, prng):
        """Stores the seed of a Random object."""

        super(InputRandom, self).store(prng)
        self.seed.store(prng.seed)

    def fetch(self):
        """Creates a Random object from the seed."""

        super(InputRandom, self).fetch()
        seed = self.seed.fetch()
        if seed < 0:
            raise ConfigError("Seeds must be non-negative, got %d" % seed, "seed")
        return Random(seed=seed)
