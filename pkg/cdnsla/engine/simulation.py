"""Discrete-event simulation of a CDN under a routing policy.

Requests arrive as a Poisson process of rate areal_rate*area, uniformly over
the region. A request at distance d of server i is feasible for it when
d/speed + (n_i+1)/mu_i <= psi, that is d <= r_i at the arrival instant. The
policy picks a feasible server or sends the request to the origin. Servers
are FCFS with exponential service.

A request is counted as served within psi when it is admitted under the
feasibility rule above; the realised transmission plus sojourn time is also
checked against psi and counted separately as the strict-deadline count.

Statistics are collected after a warmup and split into equal batches, from
which Student t confidence half-widths are computed.
"""

# This file is part of cdnsla.
# cdnsla Copyright (C) 2026 cdnsla developers
# See the "licenses" directory for full license information.


import heapq
from collections import deque

import numpy as np

from cdnsla.utils.messages import verbosity, info
from cdnsla.utils.mathtools import batch_means
from cdnsla.utils.prng import Random
from cdnsla.engine.geometry import decompose, sample_points, DEFAULT_SAMPLES
from cdnsla.engine.queueing import ScalingReport
from cdnsla.engine import static


__all__ = ['SimulationError', 'SimConfig', 'SimReport', 'ComparisonTable', 'run', 'compare_policies',
           'scaling_experiment', 'POLICIES']


POLICIES = ("static", "dp", "greedy", "random", "exclusive")
ARRIVAL = 0
DEPARTURE = 1
_KIND = {ARRIVAL: "arrival", DEPARTURE: "departure"}
_BLOCK = 8192


class SimulationError(RuntimeError):

    """Raised when a run breaks a model invariant, naming the event."""

    pass


class SimConfig(object):

    """Everything a simulation run needs.

    Attributes:
       layout: The ServerLayout.
       policy: One of POLICIES.
       horizon: Simulated time.
       warmup: Time excluded from the statistics; by default
          10*max(n_max)/min(mu), capped at horizon/10.
       seed: Master seed of all random streams.
       price: w1, earned per request served within psi.
       penalty: w1', paid per request sent to the origin.
       assignment: The RegionAssignment of the static policy.
       solution: The MdpSolution of the dp policy.
       nbatch: Number of batches for confidence intervals.
       trace: Optional file object receiving one line per event.
    """

    def __init__(self, layout, policy="greedy", horizon=1.0e4, warmup=None, seed=12345, price=1.0,
                 penalty=0.0, assignment=None, solution=None, nbatch=20, trace=None):
        if policy not in POLICIES:
            raise ValueError("Unknown policy '%s', expected one of %s" % (str(policy), str(POLICIES)))
        if policy == "static" and assignment is None:
            raise ValueError("The static policy needs a region assignment")
        if policy == "dp" and solution is None:
            raise ValueError("The dp policy needs an MDP solution")
        if warmup is None:
            warmup = min(10.0 * np.max(layout.queue_bounds) / np.min(layout.service_rates), 0.1 * horizon)
        if not horizon > warmup or warmup < 0.0:
            raise ValueError("Need horizon > warmup >= 0, got horizon %g, warmup %g" % (horizon, warmup))
        if price < 0.0 or penalty < 0.0:
            raise ValueError("Price and penalty must be non-negative")
        if nbatch < 2:
            raise ValueError("Need at least 2 batches, got %d" % nbatch)

        self.layout = layout
        self.policy = policy
        self.horizon = float(horizon)
        self.warmup = float(warmup)
        self.seed = int(seed)
        self.price = float(price)
        self.penalty = float(penalty)
        self.assignment = assignment
        self.solution = solution
        self.nbatch = int(nbatch)
        self.trace = trace

    def with_layout(self, layout, **kwargs):
        """A copy of the configuration on another layout."""

        args = dict(policy=self.policy, horizon=self.horizon, warmup=self.warmup, seed=self.seed,
                    price=self.price, penalty=self.penalty, assignment=self.assignment,
                    solution=self.solution, nbatch=self.nbatch, trace=self.trace)
        args.update(kwargs)
        return SimConfig(layout, **args)


class SimReport(object):

    """Counts and rates measured over [warmup, horizon].

    Attributes:
       policy: Name of the policy.
       seed: Master seed.
       duration: Length of the measured window.
       arrivals: Requests arriving in the window.
       served_within_psi: Requests admitted by a server.
       origin_served: Requests sent to the origin.
       strict_within_psi: Served requests whose transmission plus sojourn
          time did not exceed psi (counted at departure).
       throughput_rate, throughput_half_width: served_within_psi per unit
          time and its confidence half-width.
       revenue_rate, revenue_half_width: (w1 served - w1' origin)/time.
       arrival_rate: arrivals per unit time.
       utilizations: Busy fraction of every server.
       mean_queue: Time-averaged queue length of every server.
       max_queue: Largest queue length seen at every server.
       per_server_served: Admitted requests per server.
       batch_throughputs: Throughput of every batch.
       batch_revenues: Revenue rate of every batch.
    """

    fields = ("policy", "seed", "duration", "arrivals", "served_within_psi", "origin_served",
              "strict_within_psi", "throughput_rate", "throughput_half_width", "revenue_rate",
              "revenue_half_width", "arrival_rate", "utilizations", "mean_queue", "max_queue",
              "per_server_served", "batch_throughputs", "batch_revenues")

    def __init__(self, **kwargs):
        for f in self.fields:
            setattr(self, f, kwargs.get(f))

    def to_dict(self):
        out = {}
        for f in self.fields:
            v = getattr(self, f)
            out[f] = v.tolist() if isinstance(v, np.ndarray) else v
        return out

    @staticmethod
    def from_dict(d):
        return SimReport(**dict((f, d.get(f)) for f in SimReport.fields))

    def row(self):
        """Scalar columns of the report, for CSV output."""

        return dict((f, getattr(self, f)) for f in self.fields[:12])


class _Stream(object):

    """Buffered draws from one Random stream."""

    def __init__(self, prng, kind, scale=1.0):
        self.prng = prng
        self.kind = kind
        self.scale = scale
        self.pos = _BLOCK
        self.buf = None

    def next(self):
        if self.pos >= _BLOCK:
            if self.kind == "exp":
                self.buf = self.prng.expvec(_BLOCK, self.scale)
            elif self.kind == "xy":
                self.buf = self.prng.uvec((_BLOCK, 2))
            else:
                self.buf = self.prng.uvec(_BLOCK)
            self.pos = 0
        self.pos += 1
        return self.buf[self.pos - 1]


class _Router(object):

    """Picks the server of an arriving request, -1 for the origin."""

    def __init__(self, config, coins):
        self.config = config
        self.layout = config.layout
        self.coins = coins
        self.policy = config.policy
        if self.policy == "exclusive":
            self.empty_radii = self.layout.radii(np.zeros(self.layout.nserver))

    def __call__(self, xy, dist, queue, radii):
        feasible = (dist <= radii) & (radii > 0.0)
        if self.policy == "greedy":
            if not np.any(feasible):
                return -1
            return int(np.argmin(np.where(feasible, dist, np.inf)))
        if self.policy == "random":
            idx = np.nonzero(feasible)[0]
            if len(idx) == 0:
                return -1
            return int(idx[min(int(self.coins.next() * len(idx)), len(idx) - 1)])
        if self.policy == "exclusive":
            if np.count_nonzero((dist <= self.empty_radii) & (self.empty_radii > 0.0)) != 1:
                return -1
            i = int(np.argmax(dist <= self.empty_radii))
            return i if feasible[i] else -1
        if self.policy == "static":
            a = self.config.assignment
            i = int(a.server_for(xy)[0])
            u = self.coins.next()
            if i < 0 or not feasible[i] or u >= a.admit_fractions[i]:
                return -1
            return i
        mask = int(np.dot(feasible.astype(np.int64), 1 << np.arange(len(feasible), dtype=np.int64)))
        return self.config.solution.route(queue, mask)


def run(config):
    """Simulates one configuration.

    Raises:
       SimulationError: Raised if the policy routes a request to a server
          that cannot serve it within psi, or a queue exceeds its bound.

    Returns:
       A SimReport.
    """

    layout = config.layout
    m = layout.nserver
    xmin, ymin, xmax, ymax = layout.region
    width, height = xmax - xmin, ymax - ymin
    lam = layout.total_rate
    mu = layout.service_rates
    nmax = layout.queue_bounds
    psi = layout.psi

    s_arr, s_loc, s_srv, s_coin = Random(config.seed).split(4)
    arrivals = _Stream(s_arr, "exp", 1.0 / lam) if lam > 0.0 else None
    locations = _Stream(s_loc, "xy")
    services = [_Stream(r, "exp", 1.0 / mu[i]) for i, r in enumerate(s_srv.split(m))]
    router = _Router(config, _Stream(s_coin, "u"))

    t0, t1 = config.warmup, config.horizon
    blen = (t1 - t0) / config.nbatch
    b_served = np.zeros(config.nbatch)
    b_origin = np.zeros(config.nbatch)
    n_arr = n_srv = n_org = n_strict = 0
    per_server = np.zeros(m, dtype=int)
    queue = np.zeros(m, dtype=int)
    max_queue = np.zeros(m, dtype=int)
    busy_area = np.zeros(m)
    queue_area = np.zeros(m)
    waiting = [deque() for i in range(m)]

    events = []
    seq = 0
    if arrivals is not None:
        heapq.heappush(events, (arrivals.next(), seq, ARRIVAL, -1))
        seq += 1
    last = 0.0

    while events:
        t, _, kind, server = heapq.heappop(events)
        if t > t1:
            break
        if t > t0:
            dt = t - max(last, t0)
            queue_area += queue * dt
            busy_area += (queue > 0) * dt
        last = t

        if kind == ARRIVAL:
            heapq.heappush(events, (t + arrivals.next(), seq, ARRIVAL, -1))
            seq += 1
            u = locations.next()
            xy = np.array([xmin + u[0] * width, ymin + u[1] * height])
            dist = np.sqrt(np.sum((layout.positions - xy) ** 2, axis=1))
            radii = layout.radii(queue)
            i = router(xy, dist, queue, radii)
            if i >= 0 and not (dist[i] <= radii[i] and radii[i] > 0.0):
                raise SimulationError("Policy '%s' routed the arrival at t = %.9g, x = %s to server %d, "
                                      "which cannot serve it within psi (distance %g, radius %g)"
                                      % (config.policy, t, str(xy.tolist()), i, dist[i], radii[i]))
            measured = t > t0
            b = min(int((t - t0) / blen), config.nbatch - 1) if measured else -1
            if i >= 0:
                queue[i] += 1
                if queue[i] > nmax[i]:
                    raise SimulationError("Queue of server %d reached %d > %d at the arrival at t = %.9g"
                                          % (i, queue[i], nmax[i], t))
                max_queue[i] = max(max_queue[i], queue[i])
                waiting[i].append((t, dist[i] / layout.speed_factor, measured))
                if queue[i] == 1:
                    heapq.heappush(events, (t + services[i].next(), seq, DEPARTURE, i))
                    seq += 1
                if measured:
                    n_srv += 1
                    per_server[i] += 1
                    b_served[b] += 1
            elif measured:
                n_org += 1
                b_origin[b] += 1
            if measured:
                n_arr += 1
        else:
            i = server
            ta, transmission, measured = waiting[i].popleft()
            queue[i] -= 1
            if measured and transmission + (t - ta) <= psi:
                n_strict += 1
            if queue[i] > 0:
                heapq.heappush(events, (t + services[i].next(), seq, DEPARTURE, i))
                seq += 1

        if config.trace is not None:
            config.trace.write("%.9f %s %d %s\n" % (t, _KIND[kind], server if kind == DEPARTURE else i,
                                                    " ".join(str(q) for q in queue)))
        info(" @SIMULATION: t = %.6f %s server %d queues %s" % (t, _KIND[kind], server if kind == DEPARTURE else i, str(queue.tolist())), verbosity.trace)

    dt = t1 - max(last, t0)
    queue_area += queue * dt
    busy_area += (queue > 0) * dt

    if n_srv + n_org != n_arr:
        raise SimulationError("Lost requests: %d arrivals, %d served, %d to origin" % (n_arr, n_srv, n_org))

    duration = t1 - t0
    thr = b_served / blen
    rev = (config.price * b_served - config.penalty * b_origin) / blen
    tmean, thalf, tse = batch_means(thr)
    rmean, rhalf, rse = batch_means(rev)
    report = SimReport(policy=config.policy, seed=config.seed, duration=duration, arrivals=n_arr,
                       served_within_psi=n_srv, origin_served=n_org, strict_within_psi=n_strict,
                       throughput_rate=n_srv / duration, throughput_half_width=thalf,
                       revenue_rate=(config.price * n_srv - config.penalty * n_org) / duration,
                       revenue_half_width=rhalf, arrival_rate=n_arr / duration,
                       utilizations=(busy_area / duration).tolist(), mean_queue=(queue_area / duration).tolist(),
                       max_queue=max_queue.tolist(), per_server_served=per_server.tolist(),
                       batch_throughputs=thr.tolist(), batch_revenues=rev.tolist())
    info(" @SIMULATION: policy %s, throughput %.6f +/- %.6f, %d arrivals" % (config.policy, report.throughput_rate, thalf, n_arr), verbosity.medium)
    return report


class ComparisonTable(object):

    """Policies run on common random numbers, relative to the first one.

    Attributes:
       reports: The SimReport of every configuration.
       rows: One dictionary per configuration with throughput and revenue
          rates and the paired difference to the first configuration.
    """

    def __init__(self, reports):
        self.reports = reports
        base = reports[0]
        self.rows = []
        for r in reports:
            dt, ht, st = batch_means(np.array(r.batch_throughputs) - np.array(base.batch_throughputs))
            dr, hr, sr = batch_means(np.array(r.batch_revenues) - np.array(base.batch_revenues))
            self.rows.append({"policy": r.policy, "throughput_rate": r.throughput_rate,
                              "throughput_half_width": r.throughput_half_width,
                              "revenue_rate": r.revenue_rate, "revenue_half_width": r.revenue_half_width,
                              "throughput_difference": dt, "throughput_difference_half_width": ht if r is not base else 0.0,
                              "revenue_difference": dr, "revenue_difference_half_width": hr if r is not base else 0.0})

    def ranking(self):
        """Policies by decreasing throughput."""

        return [row["policy"] for row in sorted(self.rows, key=lambda row: -row["throughput_rate"])]


def compare_policies(configs):
    """Runs configurations sharing layout, seed and horizon.

    Raises:
       ValueError: Raised if the configurations differ in layout, seed,
          horizon, warmup or number of batches.
    """

    if len(configs) == 0:
        raise ValueError("Nothing to compare")
    ref = configs[0]
    for c in configs[1:]:
        if c.layout.to_dict() != ref.layout.to_dict():
            raise ValueError("Compared configurations must share one layout")
        if (c.seed, c.horizon, c.warmup, c.nbatch) != (ref.seed, ref.horizon, ref.warmup, ref.nbatch):
            raise ValueError("Compared configurations must share seed, horizon, warmup and batches")
    return ComparisonTable([run(c) for c in configs])


def scaling_experiment(base, factors, geometry_mode="exact", geometry_seed=0, nsamples=DEFAULT_SAMPLES,
                       scale_horizon=False):
    """Simulated throughput of the scaled system against its upper bound.

    For every factor c the layout's request and service rates are multiplied
    by c. The upper bound is the stage 1 optimum of the scaled layout; for
    the static policy the plan is recomputed on the scaled layout.

    Returns:
       A ScalingReport of (c, throughput, bound, ratio).
    """

    report = ScalingReport()
    for c in factors:
        if c < 1:
            raise ValueError("Scaling factors must be >= 1, got %g" % c)
        if base.policy == "dp":
            raise ValueError("The dp policy is solved for one layout and cannot be scaled")
        layout = base.layout.scaled(c)
        points = sample_points(layout.region, nsamples, geometry_seed) if geometry_mode == "montecarlo" else None
        decomp = decompose(layout, mode=geometry_mode, seed=geometry_seed, nsamples=nsamples, points=points)
        gamma, plan = static.solve(decomp, layout.service_rates)
        kwargs = {}
        if base.policy == "static":
            kwargs["assignment"] = static.materialize(plan, decomp, layout, seed=geometry_seed, nsamples=nsamples)
        if scale_horizon:
            kwargs["horizon"] = base.horizon / c
            kwargs["warmup"] = base.warmup / c
        res = run(base.with_layout(layout, **kwargs))
        ratio = res.throughput_rate / gamma if gamma > 0.0 else float("nan")
        info(" @SIMULATION: c = %g  throughput = %.6f  bound = %.6f  ratio = %.6f" % (c, res.throughput_rate, gamma, ratio), verbosity.medium)
        report.rows.append((c, res.throughput_rate, gamma, ratio))
    return report
