"""Command line front end.

Every subcommand reads one configuration document, runs the matching engine
and writes one artifact, as CSV rows or as a JSON document. Failures are
reported on standard error as a single JSON record, and through the exit
status: 0 on success, 2 for configuration errors, 3 for errors raised while
computing.

The only environment variable honoured is CDNSLA_OUTPUT_DIR, the base of
relative output paths.
"""

# This file is part of cdnsla.
# cdnsla Copyright (C) 2026 cdnsla developers
# See the "licenses" directory for full license information.


import os
import sys
import json
import argparse
from xml.sax import SAXParseException

from cdnsla.utils.messages import verbosity, info
from cdnsla.utils.inputvalue import ConfigError
from cdnsla.utils.io import print_file, read_config
from cdnsla.inputs.commands import CONFIGS
from cdnsla.engine import competition, queueing, static, dynamic, simulation
from cdnsla.engine.geometry import decompose


__all__ = ['Command', 'dispatch', 'main', 'build_parser', 'output_path',
           'EXIT_OK', 'EXIT_CONFIG', 'EXIT_COMPUTE', 'OUTPUT_DIR_VARIABLE']


EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_COMPUTE = 3
OUTPUT_DIR_VARIABLE = "CDNSLA_OUTPUT_DIR"

description = """
Price competition among CDNs and latency-bounded request routing: equilibria,
single-server chains, static and dynamic routing policies and simulations.
"""


class Command(object):

    """One invocation of the command line tool.

    Attributes:
       subcommand: One of the keys of CONFIGS.
       config: Path of the configuration document.
       out: Output path, "-" for standard output.
       format: "csv" or "json".
       seed: Seed overriding the one of the document, or None.
       verbosity: Verbosity level name.
    """

    def __init__(self, subcommand, config, out="-", format=None, seed=None, verbosity="low"):
        if subcommand not in CONFIGS:
            raise ValueError("Unknown subcommand '%s'" % str(subcommand))
        self.subcommand = subcommand
        self.config = config
        self.out = out
        if format is None:
            format = "csv" if str(out).endswith(".csv") else "json"
        if format not in ("csv", "json"):
            raise ValueError("Unknown format '%s'" % str(format))
        self.format = format
        self.seed = seed
        self.verbosity = verbosity

    @staticmethod
    def from_args(args):
        return Command(args.subcommand, args.config, args.out, args.format, args.seed, args.verbosity)


def output_path(out, environ=None):
    """Resolves a relative output path against CDNSLA_OUTPUT_DIR, if set."""

    if environ is None:
        environ = os.environ
    base = environ.get(OUTPUT_DIR_VARIABLE, "")
    if out == "-" or os.path.isabs(out) or base == "":
        return out
    return os.path.join(base, out)


def _equilibrium(market, s):
    method = s["method"]
    if method == "closed":
        if market.ncdn == 2:
            return competition.equilibrium_duopoly(market)
        if market.ncdn == 3:
            return competition.equilibrium_triopoly(market)
        raise ValueError("Closed forms exist for 2 or 3 CDNs, got %d; use the linear or iteration method" % market.ncdn)
    if method == "linear":
        return competition.equilibrium_linear(market)
    initial = market.prices if any(market.prices != 0.0) else None
    return competition.best_response_iteration(market, s["tol"], s["max_iter"], s["damping"], initial)


def run_equilibrium(s):
    results = [_equilibrium(m, s) for m in s["markets"]]
    rows = []
    for k, (m, r) in enumerate(zip(s["markets"], results)):
        b = m.betas
        if s["table"] == "duopoly":
            rows.append({"beta1": b[0], "beta2": b[1], "price1": r.prices[0], "price2": r.prices[1],
                         "revenue1": r.revenues[0], "revenue2": r.revenues[1], "ratio": r.ratio(0, 1)})
        elif s["table"] == "triopoly":
            table = competition.published_triopoly_ratios(m)
            rows.append({"beta1": b[0], "beta2": b[1], "beta3": b[2],
                         "ratio12": table[0], "ratio23": table[1], "ratio13": table[2],
                         "split_ratio12": r.ratio(0, 1), "split_ratio23": r.ratio(1, 2),
                         "split_ratio13": r.ratio(0, 2), "nash": r.nash})
        else:
            for row in r.rows(b):
                row["market"] = k
                row["converged"] = r.converged
                row["nash"] = r.nash
                rows.append(row)
    return {"rows": rows, "results": [r.to_dict() for r in results]}


def run_ratio_sweep(s):
    rows, skipped = competition.ratio_sweep(s["beta_fixed"], s["beta_varying"], s["which"], s["population"])
    return {"rows": rows, "skipped": [list(p) for p in skipped]}


def run_chain(s):
    chain = s["chain"]
    p = queueing.stationary_distribution(chain)
    return {"rows": [{"n": n, "probability": x} for n, x in enumerate(p)],
            "n_max": chain.n_max, "throughput": queueing.throughput(chain),
            "upper_bound": queueing.upper_bound(chain)}


def run_scaling(s):
    report = queueing.scaling_sweep(s["chain"], s["factors"])
    return {"rows": report.to_rows()}


def _static_policy(layout, g):
    decomp = decompose(layout, mode=g["mode"], seed=g["seed"], nsamples=g["nsamples"])
    gamma, plan = static.solve(decomp, layout.service_rates)
    assignment = static.materialize(plan, decomp, layout, seed=g["seed"], nsamples=g["nsamples"])
    return decomp, gamma, plan, assignment


def _dp_solution(layout, g, d):
    mdp = dynamic.build_mdp(layout, g["mode"], g["seed"], g["nsamples"], d["reward"], d["allow_origin"], d["cap"])
    return dynamic.solve(mdp, d["tol"], d["max_iter"])


def run_static(s):
    layout, g = s["layout"], s["geometry"]
    decomp, gamma, plan, assignment = _static_policy(layout, g)
    total, per = static.analytic_throughput(layout, assignment, plan, seed=g["seed"], nsamples=g["nsamples"])
    rates = plan.server_rates
    admit = plan.admit_fractions
    rows = [{"server": i, "service_rate": layout.service_rates[i], "exclusive_rate": plan.exclusive_rates[i],
             "server_rate": rates[i], "admit_fraction": admit[i], "throughput": per[i]} for i in range(layout.nserver)]
    return {"rows": rows, "gamma": gamma, "analytic_throughput": total, "plan": plan.to_dict(),
            "decomposition": decomp.to_dict()}


def run_dp(s):
    sol = _dp_solution(s["layout"], s["geometry"], s["mdp"])
    out = sol.to_dict()
    out["rows"] = out.pop("policy")
    return out


def _sim_config(s, policy, trace=None):
    layout, g, r = s["layout"], s["geometry"], s["run"]
    kwargs = {"assignment": None, "solution": None}
    if policy == "static":
        kwargs["assignment"] = _static_policy(layout, g)[3]
    elif policy == "dp":
        kwargs["solution"] = _dp_solution(layout, g, s["mdp"])
    return simulation.SimConfig(layout, policy, r["horizon"], r["warmup"], s["seed"], r["price"], r["penalty"],
                                nbatch=r["nbatch"], trace=trace, **kwargs)


def run_simulate(s):
    r = s["run"]
    trace = open(output_path(r["trace"]), "w") if r["trace"] else None
    try:
        config = _sim_config(s, r["policy"], trace)
        if s["scaling"] is not None:
            g = s["geometry"]
            report = simulation.scaling_experiment(config, s["scaling"]["factors"], g["mode"], g["seed"],
                                                   g["nsamples"], s["scaling"]["scale_horizon"])
            return {"rows": report.to_rows()}
        report = simulation.run(config)
    finally:
        if trace is not None:
            trace.close()
    return {"rows": [report.row()], "report": report.to_dict()}


def run_compare(s):
    table = simulation.compare_policies([_sim_config(s, p) for p in s["policies"]])
    return {"rows": table.rows, "ranking": table.ranking(), "reports": [r.to_dict() for r in table.reports]}


RUNNERS = {"equilibrium": run_equilibrium,
           "ratio-sweep": run_ratio_sweep,
           "chain": run_chain,
           "scaling": run_scaling,
           "static-solve": run_static,
           "dp-solve": run_dp,
           "simulate": run_simulate,
           "compare": run_compare}


def _error(kind, path, message):
    sys.stderr.write(json.dumps({"status": "error", "kind": kind, "path": path, "message": message}, sort_keys=True))
    sys.stderr.write("\n")


def load_settings(command):
    """Reads, validates and fetches the configuration of a command.

    Raises:
       ConfigError: Raised on any problem with the document.
    """

    try:
        root = read_config(command.config)
    except (IOError, OSError) as e:
        raise ConfigError("Cannot read configuration: %s" % str(e), command.config)
    except (ValueError, SAXParseException) as e:
        raise ConfigError("Malformed configuration document: %s" % str(e), command.config)

    nodes = [v for n, v in root.fields if n != "_text"]
    if len(nodes) != 1:
        raise ConfigError("Expected one configuration document, found %d" % len(nodes), command.config)
    config = CONFIGS[command.subcommand]()
    config.parse(nodes[0])
    settings = config.fetch()
    if command.seed is not None:
        settings["seed"] = command.seed
    return settings


def dispatch(command):
    """Runs a command and writes its artifact.

    Returns:
       The exit status.
    """

    verbosity.level = command.verbosity
    try:
        settings = load_settings(command)
    except ConfigError as e:
        _error("config", e.path, e.message)
        return EXIT_CONFIG
    except Exception as e:
        _error(type(e).__name__, command.subcommand, str(e))
        return EXIT_COMPUTE

    info(" @CLI: running %s on %s" % (command.subcommand, command.config), verbosity.medium)
    try:
        artifact = RUNNERS[command.subcommand](settings)
        out = output_path(command.out)
        if out == "-":
            print_file(command.format, artifact, sys.stdout)
        else:
            if os.path.dirname(out) != "":
                os.makedirs(os.path.dirname(out), exist_ok=True)
            with open(out, "w") as f:
                print_file(command.format, artifact, f)
            info(" @CLI: wrote %s" % out, verbosity.low)
    except ConfigError as e:
        _error("config", e.path, e.message)
        return EXIT_CONFIG
    except Exception as e:
        _error(type(e).__name__, command.subcommand, str(e))
        return EXIT_COMPUTE
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="cdnsla", description=description)
    sub = parser.add_subparsers(dest="subcommand")
    sub.required = True
    for name in CONFIGS:
        p = sub.add_parser(name, help=CONFIGS[name].__doc__.strip().splitlines()[0])
        p.add_argument("--config", required=True, help="Configuration document, JSON or XML.")
        p.add_argument("--out", default="-", help="Output file, '-' for standard output. Relative paths are taken from $%s if set." % OUTPUT_DIR_VARIABLE)
        p.add_argument("--format", choices=["csv", "json"], default=None, help="Output format, guessed from --out by default.")
        p.add_argument("--seed", type=int, default=None, help="Master seed, overriding the configuration.")
        p.add_argument("--verbosity", default="low", choices=["quiet", "low", "medium", "high", "debug", "trace"],
                       help="Amount of information printed on standard error.")
    return parser


def main(argv=None):
    """Entry point of the cdnsla script."""

    args = build_parser().parse_args(argv)
    verbosity.stream = sys.stderr
    return dispatch(Command.from_args(args))
