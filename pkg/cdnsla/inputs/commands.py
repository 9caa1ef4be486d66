"""Root configuration documents, one per command.

Every document carries a "schema_version" and an optional "prng" section.
The fetch() method of each class returns a dictionary of engine objects and
settings that the command line front end hands to the engines.
"""

# This file is part of cdnsla.
# cdnsla Copyright (C) 2026 cdnsla developers
# See the "licenses" directory for full license information.


from copy import copy

import numpy as np

from cdnsla.inputs.prng import InputRandom
from cdnsla.utils.prng import Random
from cdnsla.inputs.market import InputMarket
from cdnsla.inputs.layout import InputLayout, InputGeometry
from cdnsla.inputs.chain import InputChain
from cdnsla.inputs.simulation import InputRun, InputMdp, InputScaling
from cdnsla.engine.simulation import POLICIES
from cdnsla.utils.inputvalue import *
from cdnsla.utils.inputvalue import _guarded


__all__ = ['InputConfig', 'InputEquilibriumConfig', 'InputRatioSweepConfig', 'InputChainConfig',
           'InputScalingConfig', 'InputStaticConfig', 'InputDpConfig', 'InputSimulateConfig',
           'InputCompareConfig', 'CONFIGS', 'SCHEMA_VERSION']


SCHEMA_VERSION = 1


class InputConfig(Input):

    """Fields shared by every configuration document.

    Fields:
       schema_version: Version of the document layout, currently 1.
       prng: The random number generator.
    """

    fields = {"schema_version": (InputValue, {"dtype": int,
                                              "options": [SCHEMA_VERSION],
                                              "help": "Version of the configuration schema."}),
              "prng": (InputRandom, {"help": InputRandom.default_help,
                                     "default": input_default(factory=Random)})}

    default_help = "A configuration document."

    def fetch(self):
        super(InputConfig, self).fetch()
        self.fetch_field("schema_version")
        return {"seed": self.fetch_field("prng").seed}


class InputEquilibriumConfig(InputConfig):

    """Price competition among CDNs.

    Fields:
       table: "single" reports every CDN of every market; "duopoly" and
          "triopoly" report one row of revenue ratios per market.
       method: "closed" (closed forms, K = 2 or 3), "linear" (first-order
          conditions, any K) or "iteration" (best-response iteration).
       tol, max_iter, damping: Best-response iteration settings.

    Dynamic fields:
       market: One or more markets.
    """

    fields = copy(InputConfig.fields)
    fields.update({"table": (InputValue, {"dtype": str,
                                          "default": "single",
                                          "options": ["single", "duopoly", "triopoly"],
                                          "help": "Layout of the output rows."}),
                   "method": (InputValue, {"dtype": str,
                                           "default": "closed",
                                           "options": ["closed", "linear", "iteration"],
                                           "help": "How the equilibrium is computed."}),
                   "tol": (InputValue, {"dtype": float,
                                        "default": 1.0e-10,
                                        "help": "Convergence threshold of the best-response iteration."}),
                   "max_iter": (InputValue, {"dtype": int,
                                             "default": 10000,
                                             "help": "Largest number of best-response sweeps."}),
                   "damping": (InputValue, {"dtype": float,
                                            "default": 0.5,
                                            "help": "Step fraction of the best-response iteration."})})
    dynamic = {"market": (InputMarket, {"help": InputMarket.default_help})}

    def fetch(self):
        out = super(InputEquilibriumConfig, self).fetch()
        markets = [_guarded("market[%d]" % k, m.fetch) for k, m in enumerate(e for n, e in self.extra if n == "market")]
        if len(markets) == 0:
            raise ConfigError("At least one market is needed", "market")
        table = self.fetch_field("table")
        need = {"duopoly": 2, "triopoly": 3}.get(table)
        for k, m in enumerate(markets):
            if need is not None and m.ncdn != need:
                raise ConfigError("A %s table needs %d CDNs per market, got %d" % (table, need, m.ncdn), "market[%d].betas" % k)
        out.update({"markets": markets, "table": table, "method": self.fetch_field("method"),
                    "tol": self.tol.fetch(), "max_iter": self.max_iter.fetch(), "damping": self.damping.fetch()})
        return out


class InputRatioSweepConfig(InputConfig):

    """Duopoly revenue ratio over a range of betas.

    Fields:
       beta_fixed: The beta kept constant.
       beta_varying: Values of the other beta.
       which: 1 if beta1 varies, 2 if beta2 varies.
       population: Provider mass.
    """

    fields = copy(InputConfig.fields)
    fields.update({"beta_fixed": (InputValue, {"dtype": float,
                                               "help": "The beta kept constant."}),
                   "beta_varying": (InputArray, {"dtype": float,
                                                 "help": "Values taken by the varying beta."}),
                   "which": (InputValue, {"dtype": int,
                                          "default": 1,
                                          "options": [1, 2],
                                          "help": "Which beta varies."}),
                   "population": (InputValue, {"dtype": float,
                                               "default": 1.0,
                                               "help": "Provider mass."})})

    def fetch(self):
        out = super(InputRatioSweepConfig, self).fetch()
        out.update({"beta_fixed": self.beta_fixed.fetch(), "beta_varying": self.beta_varying.fetch().tolist(),
                    "which": self.fetch_field("which"), "population": self.population.fetch()})
        return out


class InputChainConfig(InputConfig):

    """Stationary analysis of one server."""

    fields = copy(InputConfig.fields)
    fields.update({"chain": (InputChain, {"help": InputChain.default_help})})

    def fetch(self):
        out = super(InputChainConfig, self).fetch()
        out["chain"] = self.fetch_field("chain")
        return out


class InputScalingConfig(InputChainConfig):

    """Throughput of one server as its rates are scaled."""

    fields = copy(InputChainConfig.fields)
    fields.update({"scaling": (InputScaling, {"help": InputScaling.default_help})})

    def fetch(self):
        out = super(InputScalingConfig, self).fetch()
        out.update(self.fetch_field("scaling"))
        return out


class InputStaticConfig(InputConfig):

    """Static routing policy of a layout."""

    fields = copy(InputConfig.fields)
    fields.update({"layout": (InputLayout, {"help": InputLayout.default_help}),
                   "geometry": (InputGeometry, {"help": InputGeometry.default_help,
                                                "default": input_default(factory=dict)})})

    def fetch(self):
        out = super(InputStaticConfig, self).fetch()
        out["layout"] = self.fetch_field("layout")
        out["geometry"] = self.fetch_field("geometry")
        return out


class InputDpConfig(InputStaticConfig):

    """Optimal dynamic routing policy of a layout."""

    fields = copy(InputStaticConfig.fields)
    fields.update({"mdp": (InputMdp, {"help": InputMdp.default_help,
                                      "default": input_default(factory=dict)})})

    def fetch(self):
        out = super(InputDpConfig, self).fetch()
        out["mdp"] = self.fetch_field("mdp")
        return out


class InputSimulateConfig(InputDpConfig):

    """Simulation of a layout under one policy.

    Dynamic fields:
       scaling: If given, the run is repeated on the scaled layouts.
    """

    fields = copy(InputDpConfig.fields)
    fields.update({"run": (InputRun, {"help": InputRun.default_help,
                                      "default": input_default(factory=dict)})})
    dynamic = {"scaling": (InputScaling, {"help": InputScaling.default_help})}

    def fetch(self):
        out = super(InputSimulateConfig, self).fetch()
        out["run"] = self.fetch_field("run")
        scaling = [e for n, e in self.extra if n == "scaling"]
        if len(scaling) > 1:
            raise ConfigError("At most one scaling section is allowed", "scaling")
        out["scaling"] = _guarded("scaling", scaling[0].fetch) if scaling else None
        if out["scaling"] is not None and out["run"]["policy"] == "dp":
            raise ConfigError("The dp policy cannot be scaled", "run.policy")
        return out


class InputCompareConfig(InputDpConfig):

    """Several policies simulated on common random numbers.

    Fields:
       policies: Policies to compare; differences refer to the first one.
    """

    fields = copy(InputDpConfig.fields)
    fields.update({"run": (InputRun, {"help": InputRun.default_help,
                                      "default": input_default(factory=dict)}),
                   "policies": (InputArray, {"dtype": str,
                                             "default": input_default(factory=np.array, args=(["static", "greedy", "exclusive"],)),
                                             "help": "Policies to compare."})})

    def fetch(self):
        out = super(InputCompareConfig, self).fetch()
        out["run"] = self.fetch_field("run")
        policies = [str(p) for p in self.policies.fetch()]
        for p in policies:
            if p not in POLICIES:
                raise ConfigError("%s is not a valid option (%s)" % (p, str(list(POLICIES))), "policies")
        if len(policies) == 0:
            raise ConfigError("At least one policy is needed", "policies")
        out["policies"] = policies
        return out


CONFIGS = {"equilibrium": InputEquilibriumConfig,
           "ratio-sweep": InputRatioSweepConfig,
           "chain": InputChainConfig,
           "scaling": InputScalingConfig,
           "static-solve": InputStaticConfig,
           "dp-solve": InputDpConfig,
           "simulate": InputSimulateConfig,
           "compare": InputCompareConfig}
