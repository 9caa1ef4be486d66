"""Optimal state-dependent routing by relative value iteration.

The state of an m-server CDN is the vector N of queue lengths, each bounded by
n_max_i. At state N the disks of the servers cut the region into elementary
regions; a policy decides, for each region, which of its participants serves
the requests arriving there. The continuous-time chain is uniformized with
nu = lambda_total + sum_i mu_i, and the average-reward Bellman equation

   g + h(N) = r(N) + sum_z (phi_z(N)/nu) max_{i in z} h(N + e_i)
                   + sum_i (mu_i I(n_i > 0)/nu) h(N - e_i) + (self loop) h(N)

is solved by relative value iteration with h(0) = 0.

Since the rate of each region goes entirely to the maximising participant,
the maximisation separates by region and no joint action set is enumerated.
"""

# This file is part of cdnsla.
# cdnsla Copyright (C) 2026 cdnsla developers
# See the "licenses" directory for full license information.


import numpy as np
from scipy import sparse
from scipy.sparse.linalg import spsolve

from cdnsla.utils.messages import verbosity, info, warning
from cdnsla.utils.mathtools import span, popcount
from cdnsla.engine.geometry import CoverageState, decompose, members, sample_points, DEFAULT_SAMPLES


__all__ = ['UniformizedMdp', 'MdpSolution', 'RoutingPolicy', 'build_mdp', 'solve', 'bellman_update',
           'evaluate_policy', 'policy_from_solution', 'policy_from_regions', 'policy_from_static',
           'policy_lowest_index', 'STATE_CAP']


STATE_CAP = 200000
ORIGIN = -1


class UniformizedMdp(object):

    """The uniformized routing problem on the finite state space.

    Attributes:
       layout: The ServerLayout.
       dims: Number of queue lengths of every server, n_max_i + 1.
       nstate: Number of states.
       nu: Uniformization constant.
       region_rates: (nstate, 2^m) array of the rate of every elementary region
          at every state; column 0 is the uncovered rate.
       up: (nstate, m) index of N + e_i, or of N itself if n_i = n_max_i.
       down: (nstate, m) index of N - e_i, or of N itself if n_i = 0.
       busy: (nstate, m) boolean, n_i > 0.
       reward: "departures" or "busy".
       allow_origin: Whether sending a covered request to the origin is an
          action.
       mode: Geometry mode the region rates were computed with.
    """

    def __init__(self, layout, region_rates, reward="departures", allow_origin=False, mode="exact"):
        if reward not in ("departures", "busy"):
            raise ValueError("Unknown reward '%s'" % str(reward))
        self.layout = layout
        self.dims = tuple(int(x) + 1 for x in layout.queue_bounds)
        self.nstate = int(np.prod(self.dims))
        self.nu = layout.total_rate + float(np.sum(layout.service_rates))
        self.region_rates = np.asarray(region_rates, dtype=float)
        self.reward = reward
        self.allow_origin = allow_origin
        self.mode = mode

        m = layout.nserver
        grid = np.array(np.unravel_index(np.arange(self.nstate), self.dims)).T
        self.states = grid
        self.up = np.zeros((self.nstate, m), dtype=int)
        self.down = np.zeros((self.nstate, m), dtype=int)
        for i in range(m):
            g = grid.copy()
            g[:, i] = np.minimum(grid[:, i] + 1, self.dims[i] - 1)
            self.up[:, i] = np.ravel_multi_index(g.T, self.dims)
            g[:, i] = np.maximum(grid[:, i] - 1, 0)
            self.down[:, i] = np.ravel_multi_index(g.T, self.dims)
        self.busy = grid > 0
        self.departure_rates = self.busy * layout.service_rates[np.newaxis, :]

        if self.reward == "departures":
            self.rewards = np.sum(self.departure_rates, axis=1) / self.nu
        else:
            self.rewards = np.sum(self.busy, axis=1).astype(float)

    @property
    def nserver(self):
        return self.layout.nserver

    @property
    def masks(self):
        """Bitmasks of the covered regions."""

        return list(range(1, 1 << self.nserver))

    def index(self, state):
        return int(np.ravel_multi_index(tuple(int(x) for x in state), self.dims))

    def gain_rate(self, gain):
        """Converts a per-step gain into a rate per unit time."""

        return gain * self.nu if self.reward == "departures" else gain


def build_mdp(layout, geometry_mode="exact", seed=0, nsamples=DEFAULT_SAMPLES, reward="departures",
              allow_origin=False, cap=STATE_CAP):
    """Builds the uniformized MDP of a layout.

    Region rates are computed once per distinct radius vector. Monte Carlo
    geometry uses one point set for all states.

    Raises:
       ValueError: Raised if the state space is larger than cap, or if the
          exact geometry cannot handle the layout.
    """

    dims = [int(x) + 1 for x in layout.queue_bounds]
    size = int(np.prod(np.array(dims, dtype=float)))
    if size > cap:
        raise ValueError("State space of %d states (dims %s) exceeds the cap of %d" % (size, str(dims), cap))

    m = layout.nserver
    points = sample_points(layout.region, nsamples, seed) if geometry_mode == "montecarlo" else None
    rates = np.zeros((size, 1 << m))
    cache = {}
    for s, n in enumerate(np.ndindex(*dims)):
        radii = layout.radii(n)
        key = tuple(radii)
        if key not in cache:
            d = decompose(layout, CoverageState(n, radii), geometry_mode, seed, nsamples, points)
            row = np.zeros(1 << m)
            for z in d.areas:
                row[z] = d.rate(z)
            row[0] = max(0.0, layout.total_rate - np.sum(row[1:]))
            cache[key] = row
        rates[s] = cache[key]
    info(" @RVI: built %d states, %d distinct geometries, nu = %g" % (size, len(cache), layout.total_rate + np.sum(layout.service_rates)), verbosity.medium)
    return UniformizedMdp(layout, rates, reward, allow_origin, geometry_mode)


def _choices(mdp, h):
    """Best participant and its value for every state and region.

    Ties go to the lowest server index; the origin, when allowed, is only
    chosen if strictly better.

    Returns:
       (best, value) arrays of shape (nstate, 2^m).
    """

    nmask = 1 << mdp.nserver
    best = np.full((mdp.nstate, nmask), ORIGIN, dtype=int)
    value = np.tile(h[:, np.newaxis], (1, nmask))
    scale = 1.0e-12 * (1.0 + span(h))
    for z in mdp.masks:
        idx = members(z)
        cand = np.stack([h[mdp.up[:, i]] for i in idx], axis=1)
        top = np.max(cand, axis=1)
        k = np.argmax(cand >= top[:, np.newaxis] - scale, axis=1)
        best[:, z] = np.array(idx)[k]
        value[:, z] = cand[np.arange(mdp.nstate), k]
        if mdp.allow_origin:
            worse = h > value[:, z] + scale
            best[worse, z] = ORIGIN
            value[worse, z] = h[worse]
    return best, value


def bellman_update(mdp, h):
    """One application of the Bellman operator T to the relative values h."""

    best, value = _choices(mdp, h)
    lam = mdp.region_rates
    inflow = np.sum(lam[:, 1:] * value[:, 1:], axis=1)
    outflow = np.sum(mdp.departure_rates * h[mdp.down], axis=1)
    stay = mdp.nu - np.sum(lam[:, 1:], axis=1) - np.sum(mdp.departure_rates, axis=1)
    return mdp.rewards + (inflow + outflow + stay * h) / mdp.nu


class MdpSolution(object):

    """Optimal gain, relative values and policy of an MDP.

    Attributes:
       mdp: The UniformizedMdp.
       gain: Optimal reward per uniformized step.
       values: Relative values h, h(0) = 0.
       policy: (nstate, 2^m) server routed to in every region, ORIGIN for -1.
       residual: Final span of the value update.
       iterations: Number of sweeps done.
       converged: Whether residual < tol was reached.
    """

    def __init__(self, mdp, gain, values, policy, residual, iterations, converged):
        self.mdp = mdp
        self.gain = gain
        self.values = values
        self.policy = policy
        self.residual = residual
        self.iterations = iterations
        self.converged = converged

    @property
    def gain_rate(self):
        return self.mdp.gain_rate(self.gain)

    def value(self, state):
        return self.values[self.mdp.index(state)]

    def route(self, state, mask):
        """Server serving a request of region mask at the given state, -1 for the origin."""

        if mask == 0:
            return ORIGIN
        return int(self.policy[self.mdp.index(state), mask])

    def to_dict(self):
        """Gain, residual and the routing of the common regions with positive rate."""

        entries = []
        for z in self.mdp.masks:
            if popcount(z) < 2:
                continue
            for s in np.nonzero(self.mdp.region_rates[:, z] > 0.0)[0]:
                entries.append({"state": self.mdp.states[s].tolist(), "mask": z, "server": int(self.policy[s, z])})
        return {"gain": self.gain, "gain_rate": self.gain_rate, "residual": self.residual,
                "iterations": self.iterations, "converged": self.converged,
                "reward": self.mdp.reward, "nu": self.mdp.nu, "policy": entries}


def solve(mdp, tol=1.0e-9, max_iter=200000):
    """Relative value iteration.

    Iterates h <- T h - (T h)(0) until the span of T h - h is below tol, then
    extracts the greedy policy of the final values.

    Returns:
       An MdpSolution; converged is False, with a warning, if max_iter
       sweeps were not enough.
    """

    h = np.zeros(mdp.nstate)
    res = np.inf
    gain = 0.0
    it = 0
    for it in range(1, max_iter + 1):
        th = bellman_update(mdp, h)
        res = span(th - h)
        gain = th[0]
        h = th - th[0]
        if it % 1000 == 0:
            info(" @RVI: iteration %d, span %.3e, gain %.12g" % (it, res, gain), verbosity.debug)
        if res < tol:
            break

    converged = res < tol
    if not converged:
        warning(" @RVI: no convergence after %d sweeps, span %.3e" % (max_iter, res), verbosity.low)
    else:
        info(" @RVI: converged in %d sweeps, gain rate %.9g" % (it, mdp.gain_rate(gain)), verbosity.medium)
    best, value = _choices(mdp, h)
    return MdpSolution(mdp, float(gain), h, best, float(res), it, converged)


class RoutingPolicy(object):

    """A stationary policy given by the arrival rate routed to each server.

    Attributes:
       rates: (nstate, m) array, lambda_i(N). What is left of the covered
          rate goes to the origin.
       name: A label for reports.
    """

    def __init__(self, rates, name="policy"):
        self.rates = np.asarray(rates, dtype=float)
        self.name = name


def policy_from_solution(solution):
    """The RoutingPolicy of an MdpSolution."""

    mdp = solution.mdp
    rates = np.zeros((mdp.nstate, mdp.nserver))
    for z in mdp.masks:
        for i in members(z):
            sel = solution.policy[:, z] == i
            rates[sel, i] += mdp.region_rates[sel, z]
    return RoutingPolicy(rates, "dp")


def policy_from_regions(mdp, choose, name="regions"):
    """Routes every region to choose(mask), a server of the mask or -1."""

    rates = np.zeros((mdp.nstate, mdp.nserver))
    for z in mdp.masks:
        i = choose(z)
        if i != ORIGIN:
            if not (z >> i) & 1:
                raise ValueError("Server %d does not reach region %s" % (i, str(members(z))))
            rates[:, i] += mdp.region_rates[:, z]
    return RoutingPolicy(rates, name)


def policy_lowest_index(mdp):
    """Routes every region to its lowest-index server."""

    return policy_from_regions(mdp, lambda z: members(z)[0], "lowest_index")


def policy_from_static(mdp, assignment, points=None, seed=0, nsamples=DEFAULT_SAMPLES):
    """Embeds a static RegionAssignment into the MDP.

    Server i receives the requests of its assigned area that lie within its
    current radius, thinned by its admission fraction, measured on the sample
    points.
    """

    layout = mdp.layout
    if points is None:
        points = sample_points(layout.region, nsamples, seed)
    owner = assignment.server_for(points)
    dist = points.distances(layout.positions)
    cell = points.area / points.npoint
    rates = np.zeros((mdp.nstate, mdp.nserver))
    for i in range(mdp.nserver):
        d = np.sort(dist[owner == i, i])
        r = layout.radii_of(i, np.arange(mdp.dims[i]))
        per_n = np.searchsorted(d, r, side="right") * cell * layout.areal_rate * assignment.admit_fractions[i]
        per_n[r <= 0.0] = 0.0
        rates[:, i] = per_n[mdp.states[:, i]]
    return RoutingPolicy(rates, "static")


def evaluate_policy(mdp, policy, values=False):
    """Gain rate of a fixed policy.

    Solves (I - P) h + g 1 = r with h(0) = 0 as one sparse linear system, the
    column of h(0) carrying the unknown g.

    Raises:
       ValueError: Raised if the policy is undefined at some state, or routes
          more than the covered rate.

    Returns:
       The gain rate, and the relative values if values is True.
    """

    lam = np.asarray(policy.rates, dtype=float)
    if lam.shape != (mdp.nstate, mdp.nserver):
        raise ValueError("Policy has shape %s, expected %s" % (str(lam.shape), str((mdp.nstate, mdp.nserver))))
    bad = np.nonzero(~np.all(np.isfinite(lam), axis=1))[0]
    if len(bad) > 0:
        raise ValueError("Policy undefined at state %s" % str(mdp.states[bad[0]].tolist()))
    over = np.nonzero(np.sum(lam, axis=1) > np.sum(mdp.region_rates[:, 1:], axis=1) * (1.0 + 1.0e-9) + 1.0e-12)[0]
    if len(over) > 0:
        raise ValueError("Policy routes more than the covered rate at state %s" % str(mdp.states[over[0]].tolist()))

    lam = lam * (~(mdp.up == np.arange(mdp.nstate)[:, np.newaxis]))
    n, m = mdp.nstate, mdp.nserver
    s = np.arange(n)
    rows = [s]
    cols = [s]
    data = [np.ones(n)]
    for i in range(m):
        rows += [s, s]
        cols += [mdp.up[:, i], mdp.down[:, i]]
        data += [-lam[:, i] / mdp.nu, -mdp.departure_rates[:, i] / mdp.nu]
    stay = 1.0 - (np.sum(lam, axis=1) + np.sum(mdp.departure_rates, axis=1)) / mdp.nu
    rows.append(s)
    cols.append(s)
    data.append(-stay)
    a = sparse.csr_matrix((np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)).tolil()
    a[:, 0] = np.ones((n, 1))
    x = spsolve(a.tocsc(), mdp.rewards)
    gain = float(x[0])
    h = x.copy()
    h[0] = 0.0
    info(" @RVI: policy '%s' gain rate %.9g" % (policy.name, mdp.gain_rate(gain)), verbosity.medium)
    if values:
        return mdp.gain_rate(gain), h
    return mdp.gain_rate(gain)
