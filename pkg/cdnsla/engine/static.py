"""Static routing policy for a multi-server CDN.

The static policy fixes, once and for all, which server answers requests from
each point of the covered region. It is computed at the empty state:

* Stage 1 maximises the rate served at the empty state, sum_i I_i lambda_i(0)
  with lambda_i(0) = Phi_i + sum_z P_iz phi_z, I_i lambda_i(0) <= mu_i. It is a
  linear program in the split fractions P and the served rates s.
* Stage 2 keeps the stage 1 optimum and, among the plans achieving it,
  minimises the load imbalance sum_z var_{i in z}(lambda_i(0)/mu_i).

The plan is then materialised into a geometric assignment by cutting each
common region with chords, one per participating server.
"""

# This file is part of cdnsla.
# cdnsla Copyright (C) 2026 cdnsla developers
# See the "licenses" directory for full license information.


import numpy as np
from scipy.optimize import linprog, minimize

from cdnsla.utils.messages import verbosity, info, warning
from cdnsla.utils.mathtools import popcount
from cdnsla.engine.geometry import members, membership, sample_points, coverage_state, SamplePoints, DEFAULT_SAMPLES
from cdnsla.engine.queueing import chain_throughput_from_rates


__all__ = ['AssignmentPlan', 'RegionAssignment', 'solve_stage1', 'solve_stage2', 'solve',
           'materialize', 'analytic_throughput', 'admit_fractions', 'load_variance']


RETENTION_RTOL = 1.0e-8
TIE_BAND = 1.0e-6


def admit_fractions(rates, mu):
    """I_i = min(1, mu_i/lambda_i), 1 for a server that sees no request."""

    rates = np.asarray(rates, dtype=float)
    mu = np.asarray(mu, dtype=float)
    out = np.ones(len(rates))
    busy = rates > 0.0
    out[busy] = np.minimum(1.0, mu[busy] / rates[busy])
    return out


def load_variance(rates, mu, regions):
    """Sum over common regions of the population variance of lambda_i/mu_i.

    Args:
       rates: Empty-state rates lambda_i(0).
       mu: Service rates.
       regions: Bitmasks of the common regions.
    """

    u = np.asarray(rates, dtype=float) / np.asarray(mu, dtype=float)
    return float(sum(np.var(u[list(members(z))]) for z in regions))


class AssignmentPlan(object):

    """Outcome of the static optimisation.

    Attributes:
       mu: Service rates.
       exclusive_rates: Phi_i.
       regions: List of (bitmask, phi_z) of the common regions.
       split_fractions: Dictionary (server, bitmask) -> P_iz.
       admit_fractions: I_i.
       server_rates: lambda_i(0) = Phi_i + sum_z P_iz phi_z.
       objective: gamma, the rate served at the empty state.
       variance_objective: The load imbalance of the plan.
       flagged: True if stage 2 could not certify that gamma was retained,
          in which case the plan is the stage 1 one.
    """

    def __init__(self, mu, exclusive_rates, regions, split_fractions, flagged=False):
        self.mu = np.asarray(mu, dtype=float)
        self.exclusive_rates = np.asarray(exclusive_rates, dtype=float)
        self.regions = [(int(z), float(phi)) for z, phi in regions]
        self.split_fractions = dict(((int(i), int(z)), float(p)) for (i, z), p in split_fractions.items())
        self.flagged = flagged

    @property
    def nserver(self):
        return len(self.mu)

    @property
    def server_rates(self):
        lam = self.exclusive_rates.copy()
        for (i, z), p in self.split_fractions.items():
            lam[i] += p * dict(self.regions)[z]
        return lam

    @property
    def admit_fractions(self):
        return admit_fractions(self.server_rates, self.mu)

    @property
    def objective(self):
        return float(np.sum(self.admit_fractions * self.server_rates))

    @property
    def variance_objective(self):
        return load_variance(self.server_rates, self.mu, [z for z, phi in self.regions])

    def fraction(self, server, mask):
        return self.split_fractions.get((server, mask), 0.0)

    def to_dict(self):
        return {"mu": self.mu.tolist(), "exclusive_rates": self.exclusive_rates.tolist(),
                "regions": [{"servers": list(members(z)), "mask": z, "rate": phi} for z, phi in self.regions],
                "split_fractions": [{"server": i, "mask": z, "fraction": p}
                                    for (i, z), p in sorted(self.split_fractions.items())],
                "admit_fractions": self.admit_fractions.tolist(),
                "server_rates": self.server_rates.tolist(),
                "objective": self.objective, "variance_objective": self.variance_objective,
                "flagged": self.flagged}

    @staticmethod
    def from_dict(d):
        return AssignmentPlan(d["mu"], d["exclusive_rates"], [(r["mask"], r["rate"]) for r in d["regions"]],
                              dict(((s["server"], s["mask"]), s["fraction"]) for s in d["split_fractions"]),
                              d.get("flagged", False))


def _problem(decomp, mu):
    """Unpacks a decomposition into the arrays of the two stages.

    Returns:
       (mu, Phi, regions, pairs, B) where pairs lists the (server, mask) of
       every split fraction and B[i, k] = phi_z if pair k is (i, z).
    """

    mu = np.asarray(mu, dtype=float)
    if len(mu) != decomp.nserver:
        raise ValueError("Got %d service rates for %d servers" % (len(mu), decomp.nserver))
    if np.any(mu <= 0.0):
        raise ValueError("Service rates must be positive")
    phi = decomp.exclusive_rates
    regions = [(z, decomp.rate(z)) for z in decomp.common_masks]
    if np.any(phi < 0.0) or any(r < 0.0 for z, r in regions):
        raise ValueError("Region rates must be non-negative")
    pairs = [(i, z) for z, r in regions for i in members(z)]
    b = np.zeros((len(mu), len(pairs)))
    for k, (i, z) in enumerate(pairs):
        b[i, k] = decomp.rate(z)
    return mu, phi, regions, pairs, b


def _region_rows(regions, pairs):
    a = np.zeros((len(regions), len(pairs)))
    for r, (z, phi) in enumerate(regions):
        for k, (i, zz) in enumerate(pairs):
            if zz == z:
                a[r, k] = 1.0
    return a


def solve_stage1(decomp, mu):
    """Maximises the rate served at the empty state.

    Solves max sum_i s_i subject to s_i <= Phi_i + sum_z P_iz phi_z,
    s_i <= mu_i and sum_i P_iz <= 1, with the HiGHS linear programming solver.

    Args:
       decomp: The AreaDecomposition at the empty state.
       mu: Service rates.

    Returns:
       (gamma, AssignmentPlan)

    Raises:
       ValueError: Raised on negative rates or an LP failure.
    """

    mu, phi, regions, pairs, b = _problem(decomp, mu)
    m, npair = len(mu), len(pairs)

    c = np.concatenate([np.zeros(npair), -np.ones(m)])
    a_ub = np.vstack([np.hstack([-b, np.eye(m)]),
                      np.hstack([_region_rows(regions, pairs), np.zeros((len(regions), m))])])
    b_ub = np.concatenate([phi, np.ones(len(regions))])
    bounds = [(0.0, 1.0)] * npair + [(0.0, x) for x in mu]

    res = linprog(c, A_ub=a_ub, b_ub=b_ub, bounds=bounds, method="highs")
    if not res.success:
        raise ValueError("Stage 1 linear program failed: %s" % res.message)

    p = np.clip(res.x[:npair], 0.0, 1.0)
    plan = AssignmentPlan(mu, phi, regions, dict(zip(pairs, p)))
    gamma = -float(res.fun)
    info(" @STATIC: stage 1 gamma = %.9g" % gamma, verbosity.medium)
    return gamma, plan


def _smallest_fractions(phi, b, rows, mu, q, gamma, x):
    """Lexicographically smallest split fractions among the optimal plans.

    A convex quadratic takes its minimum on a set where Q u is constant, so
    the optimal plans are those keeping Q u within TIE_BAND of its value at
    x and serving gamma. The fractions are then minimised one after the
    other with the HiGHS linear programming solver, each one fixed at its
    minimum before the next.

    Returns:
       The fractions, or None if a linear program fails.
    """

    m, npair = len(mu), b.shape[1]
    mq = np.dot(q, b / mu[:, np.newaxis])
    target = np.dot(mq, x)
    a_ub = np.vstack([np.hstack([-b, np.eye(m)]),
                      np.hstack([rows, np.zeros((len(rows), m))]),
                      np.concatenate([np.zeros(npair), -np.ones(m)])[np.newaxis, :],
                      np.hstack([mq, np.zeros((m, m))]),
                      np.hstack([-mq, np.zeros((m, m))])])
    b_ub = np.concatenate([phi, np.ones(len(rows)), [-(gamma - 0.1 * RETENTION_RTOL * max(1.0, abs(gamma)))],
                           target + TIE_BAND, -target + TIE_BAND])
    bounds = [(0.0, 1.0)] * npair + [(0.0, v) for v in mu]
    for k in range(npair):
        c = np.zeros(npair + m)
        c[k] = 1.0
        res = linprog(c, A_ub=a_ub, b_ub=b_ub, bounds=bounds, method="highs")
        if not res.success:
            info(" @STATIC: tie break stopped at fraction %d: %s" % (k, res.message), verbosity.debug)
            return None
        bounds[k] = (0.0, min(1.0, res.x[k] + 1.0e-9))
    return np.clip(res.x[:npair], 0.0, 1.0)


def solve_stage2(decomp, mu, gamma, start=None):
    """Balances server loads without losing the stage 1 optimum.

    Minimises sum_z var_{i in z}(lambda_i(0)/mu_i) over the plans with
    sum_i min(lambda_i(0), mu_i) >= gamma, starting from the stage 1 plan.
    The retention of gamma is checked after the solve; a plan that loses
    more than RETENTION_RTOL of it is discarded and the stage 1 plan is
    returned flagged. Ties among the optimal plans go to the
    lexicographically smallest vector of split fractions, ordered by region
    mask then server index.

    Args:
       decomp: The AreaDecomposition at the empty state.
       mu: Service rates.
       gamma: The stage 1 optimum.
       start: The stage 1 plan, recomputed if not given.

    Returns:
       An AssignmentPlan.
    """

    mu, phi, regions, pairs, b = _problem(decomp, mu)
    m, npair = len(mu), len(pairs)
    if start is None:
        gamma1, start = solve_stage1(decomp, mu)
    if npair == 0:
        return start

    nreg = len(regions)
    q = np.zeros((m, m))
    for z, r in regions:
        idx = list(members(z))
        k = len(idx)
        q[np.ix_(idx, idx)] += (np.eye(k) - np.ones((k, k)) / k) / k
    bm = b / mu[:, np.newaxis]
    rows = _region_rows(regions, pairs)

    def objective(x):
        u = (phi + np.dot(b, x[:npair])) / mu
        return float(np.dot(u, np.dot(q, u)))

    def gradient(x):
        u = (phi + np.dot(b, x[:npair])) / mu
        return np.concatenate([2.0 * np.dot(bm.T, np.dot(q, u)), np.zeros(m)])

    constraints = [
        {"type": "ineq", "fun": lambda x: phi + np.dot(b, x[:npair]) - x[npair:],
         "jac": lambda x: np.hstack([b, -np.eye(m)])},
        {"type": "ineq", "fun": lambda x: 1.0 - np.dot(rows, x[:npair]),
         "jac": lambda x: np.hstack([-rows, np.zeros((nreg, m))])},
        {"type": "ineq", "fun": lambda x: np.array([np.sum(x[npair:]) - gamma]),
         "jac": lambda x: np.concatenate([np.zeros(npair), np.ones(m)])[np.newaxis, :]},
    ]
    bounds = [(0.0, 1.0)] * npair + [(0.0, x) for x in mu]

    x0 = np.array([start.fraction(i, z) for i, z in pairs] + list(np.minimum(start.server_rates, mu)))
    res = minimize(objective, x0, jac=gradient, method="SLSQP", bounds=bounds,
                   constraints=constraints, options={"ftol": 1.0e-14, "maxiter": 1000})

    p = np.clip(res.x[:npair], 0.0, 1.0)
    if res.success:
        smallest = _smallest_fractions(phi, b, rows, mu, q, gamma, p)
        if smallest is not None and objective(np.concatenate([smallest, np.zeros(m)])) <= res.fun + 1.0e-9 * max(1.0, abs(res.fun)):
            p = smallest
    over = np.dot(rows, p)
    for r, (z, phi_z) in enumerate(regions):
        if over[r] > 1.0:
            p[rows[r] > 0] /= over[r]
    plan = AssignmentPlan(mu, phi, regions, dict(zip(pairs, p)))

    lost = gamma - float(np.sum(np.minimum(plan.server_rates, mu)))
    if not res.success or lost > RETENTION_RTOL * max(1.0, abs(gamma)):
        warning(" @STATIC: stage 2 could not retain gamma (%s, loss %.3g); keeping the stage 1 plan" % (res.message, lost), verbosity.low)
        start.flagged = True
        return start
    if plan.variance_objective > start.variance_objective:
        return start
    info(" @STATIC: stage 2 variance %.9g -> %.9g" % (start.variance_objective, plan.variance_objective), verbosity.medium)
    return plan


def solve(decomp, mu):
    """Runs both stages, returning (gamma, AssignmentPlan)."""

    gamma, start = solve_stage1(decomp, mu)
    return gamma, solve_stage2(decomp, mu, gamma, start)


class RegionAssignment(object):

    """Point to server map realising a plan.

    Points are labelled by the disks containing them at the empty state.
    A point reached by one server belongs to it. Inside a common region the
    participants are visited in index order and each one takes the points
    beyond its chord: the points with projection >= threshold on the unit
    vector from the region's centroid towards the server, among those not
    taken yet. Points of a region left over go to the origin.

    Attributes:
       layout: The ServerLayout.
       radii: Serving radii at the empty state.
       cuts: Dictionary bitmask -> (centroid, [(server, normal, threshold)]).
       admit_fractions: I_i, the probability that server i accepts a request
          it is assigned.
    """

    def __init__(self, layout, radii, cuts, admit_fractions):
        self.layout = layout
        self.radii = np.asarray(radii, dtype=float)
        self.cuts = cuts
        self.admit_fractions = np.asarray(admit_fractions, dtype=float)

    def server_for(self, points):
        """Assigned server of each point, -1 for the origin.

        Args:
           points: A SamplePoints object or an (N, 2) array.
        """

        xy = points.points if isinstance(points, SamplePoints) else np.asarray(points, dtype=float).reshape((-1, 2))
        masks = membership(self.layout, self.radii, points)
        out = -np.ones(len(masks), dtype=int)
        single = np.array([popcount(k) == 1 for k in range(1 << self.layout.nserver)])
        one = single[masks]
        out[one] = np.log2(masks[one]).round().astype(int)
        for z, (centroid, cuts) in self.cuts.items():
            inz = np.nonzero(masks == z)[0]
            if len(inz) == 0:
                continue
            free = np.ones(len(inz), dtype=bool)
            for i, normal, threshold in cuts:
                proj = np.dot(xy[inz] - centroid, normal)
                take = free & (proj >= threshold)
                out[inz[take]] = i
                free &= ~take
        return out

    def assigned_rates(self, points, areal_rate):
        """Request rate assigned to each server, measured on points."""

        counts = np.bincount(self.server_for(points) + 1, minlength=self.layout.nserver + 1)[1:]
        return counts * (points.area / points.npoint) * areal_rate


def materialize(plan, decomp, layout, points=None, seed=0, nsamples=DEFAULT_SAMPLES):
    """Cuts every common region into pieces of the planned rates.

    Args:
       plan: An AssignmentPlan.
       decomp: The AreaDecomposition the plan was solved on.
       layout: The ServerLayout.
       points: The SamplePoints the cuts are measured on; by default the
          shared point set of (seed, nsamples).

    Returns:
       A RegionAssignment.
    """

    if points is None:
        points = sample_points(layout.region, nsamples, seed)
    radii = coverage_state(layout).radii
    masks = membership(layout, radii, points)

    cuts = {}
    for z, phi_z in plan.regions:
        inz = np.nonzero(masks == z)[0]
        if len(inz) == 0:
            continue
        xy = points.points[inz]
        centroid = np.mean(xy, axis=0)
        free = np.ones(len(inz), dtype=bool)
        total = 0.0
        zcuts = []
        for i in members(z):
            p = plan.fraction(i, z)
            total += p
            normal = layout.positions[i] - centroid
            norm = np.linalg.norm(normal)
            normal = normal / norm if norm > 0.0 else np.array([1.0, 0.0])
            if total >= 1.0 - 1.0e-12:
                threshold = -np.inf
            else:
                ntake = int(round(p * len(inz)))
                proj = np.dot(xy - centroid, normal)
                if ntake <= 0 or not np.any(free):
                    threshold = np.inf
                else:
                    avail = np.sort(proj[free])[::-1]
                    threshold = avail[min(ntake, len(avail)) - 1]
                    free &= ~(proj >= threshold)
            zcuts.append((i, normal, threshold))
            if threshold == -np.inf:
                break
        cuts[z] = (centroid, zcuts)
        info(" @STATIC: region %s cut into %s" % (str(members(z)), str([(i, plan.fraction(i, z)) for i, n, t in zcuts])), verbosity.debug)

    return RegionAssignment(layout, radii, cuts, plan.admit_fractions)


def analytic_throughput(layout, assignment, plan=None, points=None, seed=0, nsamples=DEFAULT_SAMPLES):
    """Exact throughput of the static policy, on the sample point measure.

    Under a static policy every server is an independent queue: server i
    sees the requests of its assigned area R_i that fall within its current
    radius, thinned by I_i, so lambda_i(n) = I_i areal_rate |R_i & D(s_i, r_i(n))|.

    Returns:
       (total throughput, array of per-server throughputs)
    """

    if points is None:
        points = sample_points(layout.region, nsamples, seed)
    admit = assignment.admit_fractions if plan is None else plan.admit_fractions
    owner = assignment.server_for(points)
    dist = points.distances(layout.positions)
    cell = points.area / points.npoint
    per = np.zeros(layout.nserver)
    nmax = layout.queue_bounds
    for i in range(layout.nserver):
        if nmax[i] == 0:
            continue
        d = np.sort(dist[owner == i, i])
        r = layout.radii_of(i, np.arange(nmax[i]))
        counts = np.searchsorted(d, r, side="right")
        rates = admit[i] * layout.areal_rate * cell * counts
        per[i] = chain_throughput_from_rates(layout.service_rates[i], rates)
    return float(np.sum(per)), per
