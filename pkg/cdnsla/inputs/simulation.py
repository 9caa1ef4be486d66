"""Creates the settings of simulation runs and of the routing solvers."""

# This file is part of cdnsla.
# cdnsla Copyright (C) 2026 cdnsla developers
# See the "licenses" directory for full license information.


import numpy as np

from cdnsla.engine.simulation import POLICIES
from cdnsla.engine.dynamic import STATE_CAP
from cdnsla.utils.inputvalue import *


__all__ = ['InputRun', 'InputMdp', 'InputScaling']


class InputRun(Input):

    """Simulation run input class.

    Fields:
       policy: Routing policy.
       horizon: Simulated time.
       warmup: Time excluded from the statistics, negative for the default.
       price: w1, earned per request served within psi.
       penalty: w1', paid per request sent to the origin.
       batches: Number of batches of the confidence intervals.
       trace: File receiving one line per event, empty for none.
    """

    fields = {"policy": (InputValue, {"dtype": str,
                                      "default": "static",
                                      "options": list(POLICIES),
                                      "help": "The routing policy."}),
              "horizon": (InputValue, {"dtype": float,
                                       "default": 1.0e4,
                                       "help": "Simulated time."}),
              "warmup": (InputValue, {"dtype": float,
                                      "default": -1.0,
                                      "help": "Time excluded from the statistics. Negative for 10*max(n_max)/min(mu)."}),
              "price": (InputValue, {"dtype": float,
                                     "default": 1.0,
                                     "help": "Price w1 per request served within psi."}),
              "penalty": (InputValue, {"dtype": float,
                                       "default": 0.0,
                                       "help": "Penalty w1' per request sent to the origin."}),
              "batches": (InputValue, {"dtype": int,
                                       "default": 20,
                                       "help": "Number of batches for the confidence intervals."}),
              "trace": (InputValue, {"dtype": str,
                                     "default": "",
                                     "help": "File the event trace is written to. Empty for no trace."})}

    default_help = "Settings of a simulation run."
    default_label = "RUN"

    def fetch(self):
        """Returns a dictionary of SimConfig keyword arguments and the trace file name."""

        super(InputRun, self).fetch()
        warmup = self.warmup.fetch()
        horizon = self.horizon.fetch()
        if not horizon > 0.0:
            raise ConfigError("Horizon must be positive", "horizon")
        if warmup >= 0.0 and not horizon > warmup:
            raise ConfigError("Horizon must exceed warmup", "warmup")
        return {"policy": self.fetch_field("policy"), "horizon": horizon,
                "warmup": None if warmup < 0.0 else warmup,
                "price": self.price.fetch(), "penalty": self.penalty.fetch(),
                "nbatch": self.batches.fetch(), "trace": self.trace.fetch()}


class InputMdp(Input):

    """Dynamic programming input class.

    Fields:
       tol: Span tolerance of relative value iteration.
       max_iter: Largest number of sweeps.
       reward: "departures" or "busy".
       allow_origin: Whether covered requests may be sent to the origin.
       cap: Largest number of states.
    """

    fields = {"tol": (InputValue, {"dtype": float,
                                   "default": 1.0e-9,
                                   "help": "Convergence threshold on the span of the value update."}),
              "max_iter": (InputValue, {"dtype": int,
                                        "default": 200000,
                                        "help": "Largest number of value iteration sweeps."}),
              "reward": (InputValue, {"dtype": str,
                                      "default": "departures",
                                      "options": ["departures", "busy"],
                                      "help": "Reward per uniformized step."}),
              "allow_origin": (InputValue, {"dtype": bool,
                                            "default": False,
                                            "help": "Whether sending a covered request to the origin is an action."}),
              "cap": (InputValue, {"dtype": int,
                                   "default": STATE_CAP,
                                   "help": "Largest number of states."})}

    default_help = "Settings of the dynamic routing solver."
    default_label = "MDP"

    def fetch(self):
        super(InputMdp, self).fetch()
        if not self.tol.fetch() > 0.0:
            raise ConfigError("Tolerance must be positive", "tol")
        return {"tol": self.tol.fetch(), "max_iter": self.max_iter.fetch(), "reward": self.fetch_field("reward"),
                "allow_origin": self.allow_origin.fetch(), "cap": self.cap.fetch()}


class InputScaling(Input):

    """Scaling factors input class.

    Fields:
       factors: Factors c by which arrival and service rates are multiplied.
       scale_horizon: Whether a simulated horizon is divided by c.
    """

    fields = {"factors": (InputArray, {"dtype": float,
                                       "help": "Scaling factors c >= 1."}),
              "scale_horizon": (InputValue, {"dtype": bool,
                                             "default": False,
                                             "help": "Divide the simulated horizon and warmup by c."})}

    default_help = "Scaling of arrival and service rates."
    default_label = "SCALING"

    def fetch(self):
        super(InputScaling, self).fetch()
        factors = self.factors.fetch()
        if len(factors) == 0 or np.any(factors < 1.0):
            raise ConfigError("Scaling factors must be a non-empty list of values >= 1", "factors")
        return {"factors": factors.tolist(), "scale_horizon": self.scale_horizon.fetch()}
