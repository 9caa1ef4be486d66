"""Exact analysis of a single latency-bounded server.

A single server of rate mu only admits a request if it can be answered within
psi, so its queue never exceeds n_max = ceil(psi*mu - 1) and the arrival rate
it sees shrinks with the queue: the serving disk radius at queue n is
speed*(psi - (n+1)/mu), and lambda(n) is the request rate falling in it.
The queue is a finite birth-death chain, solved here in the log domain so
that chains with millions of states are handled.
"""

# This file is part of cdnsla.
# cdnsla Copyright (C) 2026 cdnsla developers
# See the "licenses" directory for full license information.


import math

import numpy as np
from scipy.special import logsumexp

from cdnsla.utils.messages import verbosity, info, warning
from cdnsla.engine.geometry import queue_bound


__all__ = ['BirthDeathChain', 'ScalingReport', 'stationary_distribution', 'throughput',
           'upper_bound', 'scaling_sweep', 'chain_throughput_from_rates', 'generator_matrix']


TAIL_RTOL = 1.0e-17
FIRST_CHUNK = 4096
MAX_CHUNK = 1 << 22


class BirthDeathChain(object):

    """Queue of one server with a state-dependent arrival rate.

    Attributes:
       mu: Service rate.
       psi: Latency bound.
       areal_rate: Request rate per unit area.
       speed: Distance travelled per unit transmission time.
       ceded_rates: Optional per-state rates a_n subtracted from the disk rate,
          for requests in parts of the disk served by other servers.
       n_max: Largest admissible queue length.
       empty_rate: lambda(0) when the chain was built from it, otherwise None.
       rates: Explicit lambda(0..n_max-1), otherwise None.
    """

    def __init__(self, mu, psi, areal_rate, speed=1.0, ceded_rates=None):
        """Initialises BirthDeathChain.

        Raises:
           ValueError: Raised on non-positive mu, psi or speed, or on a
              negative areal rate.
        """

        if not mu > 0.0:
            raise ValueError("Service rate must be positive, got %g" % mu)
        if not psi > 0.0:
            raise ValueError("Latency bound must be positive, got %g" % psi)
        if areal_rate < 0.0:
            raise ValueError("Areal rate must be non-negative, got %g" % areal_rate)
        if not speed > 0.0:
            raise ValueError("Speed must be positive, got %g" % speed)

        self.mu = float(mu)
        self.psi = float(psi)
        self.areal_rate = float(areal_rate)
        self.speed = float(speed)
        self.ceded_rates = None if ceded_rates is None else np.asarray(ceded_rates, dtype=float)
        self.n_max = queue_bound(self.psi, self.mu)
        self.empty_rate = None
        self.rates = None

    @classmethod
    def from_empty_rate(cls, mu, psi, lambda0):
        """A chain with lambda(n) = lambda0*(1 - n/(psi*mu - 1))^2.

        This is the disk rate of the plain constructor, parametrised by the
        rate seen by the empty server.
        """

        if lambda0 < 0.0:
            raise ValueError("Empty-state arrival rate must be non-negative, got %g" % lambda0)
        r0 = psi - 1.0 / mu
        areal = lambda0 / (math.pi * r0 * r0) if r0 > 0.0 else 0.0
        chain = cls(mu, psi, areal)
        chain.empty_rate = float(lambda0)
        return chain

    @classmethod
    def from_rates(cls, mu, rates):
        """A chain with explicit arrival rates lambda(0..n-1) and n_max = n."""

        rates = np.asarray(rates, dtype=float).flatten()
        if np.any(rates < 0.0):
            raise ValueError("Arrival rates must be non-negative")
        chain = cls(mu, (len(rates) + 1.0) / mu, 0.0)
        chain.n_max = len(rates)
        chain.rates = rates
        return chain

    def arrival_rates(self, n):
        """lambda(n) for an array of queue lengths, floored at 0."""

        n = np.asarray(n)
        if self.rates is not None:
            out = np.zeros(n.shape)
            ok = n < len(self.rates)
            out[ok] = self.rates[n[ok]]
            return out
        if self.empty_rate is not None:
            span = self.psi * self.mu - 1.0
            if span <= 0.0:
                return np.where(n == 0, self.empty_rate, 0.0)
            return self.empty_rate * np.maximum(0.0, 1.0 - n / span) ** 2
        r = np.maximum(0.0, self.speed * (self.psi - (n + 1.0) / self.mu))
        lam = self.areal_rate * math.pi * r * r
        if self.ceded_rates is not None:
            a = np.zeros(n.shape)
            ok = n < len(self.ceded_rates)
            a[ok] = self.ceded_rates[n[ok]]
            lam = lam - a
        return np.maximum(0.0, lam)

    def scaled(self, c):
        """The chain with arrival and service rates multiplied by c, psi fixed."""

        if self.rates is not None:
            raise ValueError("A chain with explicit per-state rates cannot be scaled")
        chain = BirthDeathChain(self.mu * c, self.psi, self.areal_rate * c, self.speed,
                                None if self.ceded_rates is None else self.ceded_rates * c)
        if self.empty_rate is not None:
            chain.empty_rate = self.empty_rate * c
        return chain


def _log_weights(chain, keep=True):
    """Log of the unnormalised weights t_n = prod_{l<n} lambda(l)/mu.

    Weights are accumulated chunk by chunk. For chains built from a disk the
    increments log(lambda(n)/mu) are non-increasing, so once an increment d
    is negative the rest of the series is bounded by t_N/(1-exp(d)), and the
    summation stops when that bound falls below TAIL_RTOL of the sum.

    Returns:
       (log of the sum of all weights, array of log t_n or None, truncated)
    """

    concave = chain.rates is None
    logs = 0.0
    last = 0.0
    kept = [np.zeros(1)] if keep else None
    n = 0
    chunk = FIRST_CHUNK
    truncated = False
    while n < chain.n_max:
        hi = min(chain.n_max, n + chunk)
        with np.errstate(divide="ignore"):
            delta = np.log(chain.arrival_rates(np.arange(n, hi))) - math.log(chain.mu)
        lt = last + np.cumsum(delta)
        logs = logsumexp([logs, logsumexp(lt)])
        if keep:
            kept.append(lt)
        last = lt[-1]
        n = hi
        if last == -np.inf:
            break
        d = delta[-1]
        if concave and n < chain.n_max and d < 0.0:
            if last - math.log(-math.expm1(d)) < logs + math.log(TAIL_RTOL):
                truncated = True
                break
        chunk = min(2 * chunk, MAX_CHUNK)

    if truncated:
        info(" @CHAIN: weights summed up to n = %d of n_max = %d" % (n, chain.n_max), verbosity.debug)
    return logs, (np.concatenate(kept) if keep else None), truncated


def stationary_distribution(chain):
    """Stationary probabilities p_0, p_1, ... of the queue length.

    States beyond the truncation point of the log-domain summation are left
    out; together they carry less than 1e-17 of the mass.

    Returns:
       An array of probabilities, p_n lambda(n) = p_{n+1} mu.
    """

    logs, lt, truncated = _log_weights(chain, keep=True)
    return np.exp(lt - logs)


def throughput(chain):
    """Rate of served requests, mu*(1 - p_0)."""

    if chain.n_max == 0:
        return 0.0
    logs, _, _ = _log_weights(chain, keep=False)
    return -chain.mu * math.expm1(-logs)


def upper_bound(chain):
    """min(lambda(0), mu): no server serves more than it sees or than it can."""

    return min(float(chain.arrival_rates(np.zeros(1, dtype=int))[0]), chain.mu)


def chain_throughput_from_rates(mu, rates):
    """Throughput of a queue with explicit arrival rates lambda(0..n-1)."""

    return throughput(BirthDeathChain.from_rates(mu, rates))


def generator_matrix(chain):
    """Dense generator Q of the chain on states 0..n_max."""

    n = chain.n_max
    q = np.zeros((n + 1, n + 1))
    lam = chain.arrival_rates(np.arange(n))
    for k in range(n):
        q[k, k + 1] = lam[k]
        q[k + 1, k] = chain.mu
    q -= np.diag(q.sum(axis=1))
    return q


class ScalingReport(object):

    """Throughput of a chain scaled by several factors c.

    Attributes:
       rows: A list of (c, throughput, upper_bound, ratio) tuples.
    """

    columns = ("c", "throughput", "upper_bound", "ratio")

    def __init__(self, rows=None):
        self.rows = [] if rows is None else list(rows)

    @property
    def ratios(self):
        return np.array([r[3] for r in self.rows])

    def to_rows(self):
        """The rows as dictionaries, for the CSV and JSON writers."""

        return [dict(zip(self.columns, r)) for r in self.rows]


def scaling_sweep(chain, factors):
    """Solves the chain scaled by every factor c.

    The scaled chain has arrival and service rates multiplied by c and the
    same latency bound, so its state space grows like c.

    Raises:
       ValueError: Raised if a factor is below 1.
    """

    report = ScalingReport()
    for c in factors:
        if c < 1:
            raise ValueError("Scaling factors must be >= 1, got %g" % c)
        sc = chain.scaled(c)
        j = throughput(sc)
        ub = upper_bound(sc)
        if ub <= 0.0:
            warning(" @CHAIN: zero upper bound at c = %g, ratio undefined" % c, verbosity.low)
            ratio = float("nan")
        else:
            ratio = j / ub
        info(" @CHAIN: c = %g  throughput = %.6f  bound = %.6f  ratio = %.6f" % (c, j, ub, ratio), verbosity.medium)
        report.rows.append((c, j, ub, ratio))
    return report
