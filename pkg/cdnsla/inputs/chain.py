"""Creates the single-server chain and its scaling factors."""

# This file is part of cdnsla.
# cdnsla Copyright (C) 2026 cdnsla developers
# See the "licenses" directory for full license information.


from cdnsla.engine.queueing import BirthDeathChain
from cdnsla.utils.inputvalue import *


__all__ = ['InputChain']


class InputChain(Input):

    """Single-server chain input class.

    The arrival rate is given either as the rate lambda0 seen by the empty
    server, or as an areal rate.

    Fields:
       mu: Service rate.
       psi: Latency bound.
       empty_rate: lambda(0), the arrival rate of the empty server.
       areal_rate: Request rate per unit area, used if empty_rate is not given.
       speed: Distance covered per unit of transmission time.
    """

    fields = {"mu": (InputValue, {"dtype": float,
                                  "help": "Service rate of the server."}),
              "psi": (InputValue, {"dtype": float,
                                   "help": "Latency bound."}),
              "empty_rate": (InputValue, {"dtype": float,
                                          "default": -1.0,
                                          "help": "Arrival rate lambda(0) seen by the empty server."}),
              "areal_rate": (InputValue, {"dtype": float,
                                          "default": -1.0,
                                          "help": "Request rate per unit area. Ignored when empty_rate is given."}),
              "speed": (InputValue, {"dtype": float,
                                     "default": 1.0,
                                     "help": "Distance covered per unit of transmission time."})}

    default_help = "A single latency-bounded server."
    default_label = "CHAIN"

    def fetch(self):
        """Creates a BirthDeathChain.

        Raises:
           ConfigError: Raised if neither or both rates are given.
        """

        super(InputChain, self).fetch()
        if self.empty_rate._explicit == self.areal_rate._explicit:
            raise ConfigError("Exactly one of empty_rate and areal_rate must be given")
        try:
            if self.empty_rate._explicit:
                return BirthDeathChain.from_empty_rate(self.mu.fetch(), self.psi.fetch(), self.empty_rate.fetch())
            return BirthDeathChain(self.mu.fetch(), self.psi.fetch(), self.areal_rate.fetch(), self.speed.fetch())
        except ValueError as e:
            raise ConfigError(str(e))
