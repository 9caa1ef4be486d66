"""Creates the server layout of a CDN and the geometry settings."""

# This file is part of cdnsla.
# cdnsla Copyright (C) 2026 cdnsla developers
# See the "licenses" directory for full license information.


from cdnsla.engine.geometry import ServerLayout, DEFAULT_SAMPLES
from cdnsla.utils.inputvalue import *


__all__ = ['InputLayout', 'InputGeometry']


class InputLayout(Input):

    """Server layout input class.

    Fields:
       positions: Server coordinates, a list of [x, y] pairs.
       service_rates: Service rate of every server.
       psi: Latency bound.
       region: Service region [xmin, ymin, xmax, ymax].
       areal_rate: Request rate per unit area.
       speed_factor: Distance covered per unit of transmission time.
    """

    fields = {"positions": (InputArray, {"dtype": float,
                                         "help": "Coordinates of the servers, as a list of [x, y] pairs."}),
              "service_rates": (InputArray, {"dtype": float,
                                             "help": "Exponential service rate mu of every server."}),
              "psi": (InputValue, {"dtype": float,
                                   "help": "Latency bound a request must be served within."}),
              "region": (InputArray, {"dtype": float,
                                      "help": "The rectangle [xmin, ymin, xmax, ymax] requests originate from."}),
              "areal_rate": (InputValue, {"dtype": float,
                                          "help": "Request rate per unit area."}),
              "speed_factor": (InputValue, {"dtype": float,
                                            "default": 1.0,
                                            "help": "Distance covered per unit of transmission time."})}

    default_help = "Positions and rates of the surrogate servers."
    default_label = "LAYOUT"

    def store(self, layout):
        super(InputLayout, self).store(layout)
        self.positions.store(layout.positions)
        self.service_rates.store(layout.service_rates)
        self.psi.store(layout.psi)
        self.region.store(list(layout.region))
        self.areal_rate.store(layout.areal_rate)
        self.speed_factor.store(layout.speed_factor)

    def fetch(self):
        """Creates a ServerLayout.

        Raises:
           ConfigError: Raised if positions are not pairs, or the layout is
              invalid.
        """

        super(InputLayout, self).fetch()
        pos = self.positions.fetch()
        if pos.ndim != 2 or pos.shape[1] != 2:
            raise ConfigError("Positions must be a list of [x, y] pairs, got shape %s" % str(pos.shape), "positions")
        mu = self.service_rates.fetch()
        if len(mu) != len(pos):
            raise ConfigError("Got %d service rates for %d servers" % (len(mu), len(pos)), "service_rates")
        if not all(mu > 0.0):
            raise ConfigError("Service rates must be positive", "service_rates")
        if not self.psi.fetch() > 0.0:
            raise ConfigError("The latency bound must be positive", "psi")
        if len(self.region.fetch()) != 4:
            raise ConfigError("The region must be [xmin, ymin, xmax, ymax]", "region")
        return ServerLayout(pos, self.service_rates.fetch(), self.psi.fetch(), self.region.fetch(),
                            self.areal_rate.fetch(), self.speed_factor.fetch())


class InputGeometry(Input):

    """Geometry settings input class.

    Fields:
       mode: "exact" for at most three disks inside the region,
          "montecarlo" otherwise.
       samples: Number of Monte Carlo points.
       seed: Seed of the Monte Carlo point set.
    """

    fields = {"mode": (InputValue, {"dtype": str,
                                    "default": "exact",
                                    "options": ["exact", "montecarlo"],
                                    "help": "How areas are computed."}),
              "samples": (InputValue, {"dtype": int,
                                       "default": DEFAULT_SAMPLES,
                                       "help": "Number of stratified Monte Carlo points."}),
              "seed": (InputValue, {"dtype": int,
                                    "default": 0,
                                    "help": "Seed of the Monte Carlo point set."})}

    default_help = "How the areas of the elementary regions are computed."
    default_label = "GEOMETRY"

    def fetch(self):
        """Returns a dictionary with mode, samples and seed."""

        super(InputGeometry, self).fetch()
        if self.samples.fetch() < 1:
            raise ConfigError("Need at least one sample point", "samples")
        return {"mode": self.fetch_field("mode"), "nsamples": self.samples.fetch(), "seed": self.seed.fetch()}
