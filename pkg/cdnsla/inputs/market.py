"""Creates the CDN market instances of the competition game."""

# This file is part of cdnsla.
# cdnsla Copyright (C) 2026 cdnsla developers
# See the "licenses" directory for full license information.


import numpy as np

from cdnsla.engine.competition import MarketInstance
from cdnsla.utils.inputvalue import *


__all__ = ['InputMarket']


class InputMarket(Input):

    """Market input class.

    Fields:
       betas: Performance parameters of the CDNs, each in (0,1).
       prices: Optional prices of the CDNs, used as the starting point of the
          best-response iteration.
       population: Mass of content providers, uniform in sensitivity.
    """

    fields = {"betas": (InputArray, {"dtype": float,
                                     "help": "Performance parameter beta of every CDN, the ratio of CDN to origin latency. Each in (0,1)."}),
              "prices": (InputArray, {"dtype": float,
                                      "default": input_default(factory=np.zeros, kwargs={'shape': (0,)}),
                                      "help": "Prices of the CDNs. Only used to start the best-response iteration."}),
              "population": (InputValue, {"dtype": float,
                                          "default": 1.0,
                                          "help": "Total mass Lambda of content providers."})}

    default_help = "Describes the competing CDNs."
    default_label = "MARKET"

    def fetch(self):
        """Creates a MarketInstance, CDNs sorted by beta.

        Raises:
           ConfigError: Raised if the betas or the prices are invalid.
        """

        super(InputMarket, self).fetch()
        betas = self.betas.fetch()
        prices = self.prices.fetch()
        if len(betas) == 0:
            raise ConfigError("At least one CDN is needed", "betas")
        if len(prices) not in (0, len(betas)):
            raise ConfigError("Got %d prices for %d CDNs" % (len(prices), len(betas)), "prices")
        if not self.population.fetch() > 0.0:
            raise ConfigError("Population must be positive", "population")
        try:
            return MarketInstance.from_betas(betas, prices if len(prices) > 0 else None, self.population.fetch())
        except ValueError as e:
            raise ConfigError(str(e), "betas")
