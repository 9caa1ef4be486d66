"""Price competition between CDNs that differ in performance.

Content providers have a sensitivity theta, uniform on [0,1], and pick the
CDN k that maximizes their payoff theta*(1 - beta_k) - w_k, or no CDN when
every payoff is negative. A CDN's revenue is its price times the mass of
providers that choose it. This module computes market splits, best
responses and Nash equilibria, in closed form for two and three CDNs and
numerically for any number of them.
"""

# This file is part of cdnsla.
# cdnsla Copyright (C) 2026 cdnsla developers
# See the "licenses" directory for full license information.


import numpy as np

from cdnsla.utils.messages import verbosity, info, warning
from cdnsla.utils.mintools import max_golden


__all__ = ['CdnProfile', 'MarketInstance', 'EquilibriumResult', 'payoff',
           'market_split', 'revenue', 'price_breakpoints', 'best_response',
           'deviation_gains', 'best_response_duopoly', 'equilibrium_duopoly',
           'equilibrium_triopoly', 'published_triopoly_ratios',
           'equilibrium_linear', 'best_response_iteration',
           'duopoly_ratio', 'ratio_sweep', 'NASH_TOL']


# revenue gain, per unit population, below which a deviation is not profitable
NASH_TOL = 1.0e-8


class CdnProfile(object):

    """A CDN as seen by content providers.

    Attributes:
       beta: Performance parameter in (0,1), the ratio of the latency through
          the CDN to the latency from the origin. Lower is better.
       price: The price charged to a content provider, >= 0.
    """

    def __init__(self, beta, price=0.0):
        """Initialises CdnProfile.

        Raises:
           ValueError: Raised if beta is not in (0,1) or the price is negative.
        """

        beta = float(beta)
        price = float(price)
        if not (0.0 < beta < 1.0):
            raise ValueError("Performance parameter beta must lie in (0,1), got %g" % beta)
        if price < 0.0:
            raise ValueError("Price must be non-negative, got %g" % price)
        self.beta = beta
        self.price = price

    def __repr__(self):
        return "CdnProfile(beta=%r, price=%r)" % (self.beta, self.price)


class MarketInstance(object):

    """A set of competing CDNs and the mass of content providers.

    The CDNs are kept sorted by increasing beta, so index 0 is the best
    performing one.

    Attributes:
       cdns: List of CdnProfile, sorted by beta.
       population: Total provider mass Lambda, > 0.
    """

    def __init__(self, cdns, population=1.0):
        """Initialises MarketInstance.

        Args:
           cdns: A sequence of CdnProfile, in any order.
           population: The total provider mass.

        Raises:
           ValueError: Raised if there is no CDN or the population is not
              positive.
        """

        if len(cdns) == 0:
            raise ValueError("A market needs at least one CDN")
        if not population > 0.0:
            raise ValueError("Population must be positive, got %g" % population)
        self.cdns = sorted(cdns, key=lambda c: c.beta)
        self.population = float(population)

    @staticmethod
    def from_betas(betas, prices=None, population=1.0):
        """Builds a market from arrays of betas and (optional) prices."""

        if prices is None:
            prices = np.zeros(len(betas))
        return MarketInstance([CdnProfile(b, w) for b, w in zip(betas, prices)], population)

    @property
    def ncdn(self):
        return len(self.cdns)

    @property
    def betas(self):
        return np.array([c.beta for c in self.cdns])

    @property
    def prices(self):
        return np.array([c.price for c in self.cdns])

    def with_prices(self, prices):
        """Returns a copy of the market with the given prices (in beta order)."""

        return MarketInstance([CdnProfile(c.beta, w) for c, w in zip(self.cdns, prices)], self.population)

    def check_distinct(self):
        """Raises ValueError if two CDNs share the same beta."""

        b = self.betas
        if np.any(np.diff(b) <= 0.0):
            raise ValueError("CDNs with equal performance parameters %s have degenerate indifference thresholds" % str(b))


class EquilibriumResult(object):

    """Prices and market outcome at a (candidate) equilibrium.

    Attributes:
       prices: Prices w_k, in beta order.
       thresholds: Lower end of the sensitivity interval choosing each CDN.
          Descending, in [0,1].
       shares: Provider mass choosing each CDN.
       revenues: Revenue w_k * share_k of each CDN.
       converged: False when the solver did not reach its own fixed point.
       nash: True when no CDN gains more than NASH_TOL*population by a
          unilateral change of price, None when not checked.
       deviation_gains: Revenue each CDN would gain by its global best
          response, None when not checked.
       iterations: Number of iterations used (0 for closed forms).
       method: Name of the method that produced the result.
    """

    def __init__(self, prices, thresholds, shares, revenues, converged=True, iterations=0, method=""):
        self.prices = np.asarray(prices, dtype=float)
        self.thresholds = np.asarray(thresholds, dtype=float)
        self.shares = np.asarray(shares, dtype=float)
        self.revenues = np.asarray(revenues, dtype=float)
        self.converged = bool(converged)
        self.iterations = int(iterations)
        self.method = method
        self.nash = None
        self.deviation_gains = None

    @staticmethod
    def from_prices(market, prices, converged=True, iterations=0, method=""):
        """Evaluates the market split at the given prices."""

        priced = market.with_prices(prices)
        thresholds, shares = market_split(priced)
        return EquilibriumResult(prices, thresholds, shares, shares * priced.prices, converged, iterations, method)

    def ratio(self, i, j):
        """Revenue ratio J_i/J_j, zero-based indices."""

        return self.revenues[i] / self.revenues[j]

    def rows(self, betas):
        """Plain per-CDN records, for the tabular outputs."""

        return [{"k": k + 1, "beta": float(betas[k]), "price": float(self.prices[k]),
                 "threshold": float(self.thresholds[k]), "share": float(self.shares[k]),
                 "revenue": float(self.revenues[k])} for k in range(len(self.prices))]

    def to_dict(self):
        return {"prices": self.prices.tolist(), "thresholds": self.thresholds.tolist(),
                "shares": self.shares.tolist(), "revenues": self.revenues.tolist(),
                "converged": self.converged, "iterations": self.iterations, "method": self.method,
                "nash": self.nash}

    @staticmethod
    def from_dict(d):
        res = EquilibriumResult(d["prices"], d["thresholds"], d["shares"], d["revenues"],
                                d["converged"], d["iterations"], d.get("method", ""))
        res.nash = d.get("nash")
        return res


def payoff(theta, cdn):
    """Utility theta*(1 - beta) - w of a provider with sensitivity theta.

    Raises:
       ValueError: Raised if theta is outside [0,1].
    """

    if not (0.0 <= theta <= 1.0):
        raise ValueError("Sensitivity theta must lie in [0,1], got %g" % theta)
    return theta * (1.0 - cdn.beta) - cdn.price


def market_split(market):
    """Splits the providers among the CDNs at the current prices.

    Each provider picks the argmax of its payoff, with "no CDN" (payoff 0)
    as an extra option. Payoffs are lines in theta, so the choice follows the
    upper envelope of K+1 lines on [0,1]: the envelope is evaluated between
    consecutive crossing points, which gives each CDN one (possibly empty)
    interval. Ties on a set of zero measure go to the lower index.

    Args:
       market: A MarketInstance with distinct betas.

    Returns:
       (thresholds, shares): thresholds[k] is the lower end of CDN k's
       interval (an empty interval repeats the previous lower end, starting
       from 1), shares[k] is the interval length times the population.
    """

    market.check_distinct()
    slopes = np.append(1.0 - market.betas, 0.0)
    icepts = np.append(-market.prices, 0.0)
    nline = len(slopes)

    cuts = [0.0, 1.0]
    for i in range(nline):
        for j in range(i + 1, nline):
            x = (icepts[j] - icepts[i]) / (slopes[i] - slopes[j])
            if 0.0 < x < 1.0:
                cuts.append(x)
    cuts = np.unique(cuts)

    mids = 0.5 * (cuts[1:] + cuts[:-1])
    best = np.argmax(np.outer(mids, slopes) + icepts, axis=1)

    K = market.ncdn
    lengths = np.zeros(K)
    lower = np.ones(K)
    for s in range(len(mids)):
        k = best[s]
        if k < K:
            lengths[k] += cuts[s + 1] - cuts[s]
            lower[k] = min(lower[k], cuts[s])

    thresholds = np.zeros(K)
    prev = 1.0
    for k in range(K):
        thresholds[k] = lower[k] if lengths[k] > 0.0 else prev
        prev = thresholds[k]

    return thresholds, lengths * market.population


def revenue(market):
    """Revenue J_k = share_k * w_k of every CDN at the current prices."""

    thresholds, shares = market_split(market)
    return shares * market.prices


def _own_revenue(market, k, w):
    prices = market.prices
    prices[k] = w
    return revenue(market.with_prices(prices))[k]


def price_breakpoints(market, responder):
    """Own prices at which the revenue of one CDN changes its quadratic piece.

    The payoff lines of the other CDNs and of "no CDN" are fixed. The split,
    hence the revenue formula of the responder, changes only when its line
    passes through a crossing of two other lines inside [0,1], or meets
    another line at theta = 0 or theta = 1.

    Returns:
       Sorted distinct prices in [0, 1 - beta_k], end points included.
    """

    k = responder
    K = market.ncdn
    slopes = np.append(1.0 - market.betas, 0.0)
    icepts = np.append(-market.prices, 0.0)
    hi = slopes[k]
    others = [j for j in range(K + 1) if j != k]

    pts = [0.0, hi]
    for j in others:
        for theta in (0.0, 1.0):
            pts.append(theta * slopes[k] - (theta * slopes[j] + icepts[j]))
    for a, i in enumerate(others):
        for j in others[a + 1:]:
            if slopes[i] == slopes[j]:
                continue
            theta = (icepts[j] - icepts[i]) / (slopes[i] - slopes[j])
            if 0.0 <= theta <= 1.0:
                pts.append(theta * slopes[k] - (theta * slopes[i] + icepts[i]))
    pts = np.unique([p for p in pts if 0.0 <= p <= hi])
    return pts


def _parabolic(f, w, fw, lo, hi):
    """Moves w to the vertex of the parabola through three nearby points."""

    h = 1.0e-4 * (hi - lo)
    if h > 0.0 and lo + h < w < hi - h:
        fl, fr = f(w - h), f(w + h)
        curv = fl - 2.0 * fw + fr
        if curv < 0.0:
            wv = w + 0.5 * h * (fl - fr) / curv
            # equal up to rounding is accepted, a kink in the bracket is not
            if abs(wv - w) < h:
                fv = f(wv)
                if fv >= fw - 1.0e-12 * abs(fw):
                    return wv, fv
    return w, fw


def best_response(market, responder, tol=1.0e-12, search="global"):
    """Numerical best response of one CDN, all other prices held fixed.

    Revenue vanishes for w_k >= 1 - beta_k and is quadratic in w_k between
    consecutive price_breakpoints, but it is not unimodal in general: a CDN
    may gain by undercutting a neighbour out of the market.

    With search="global" every quadratic piece is maximized by golden-section
    search and the best piece wins, ties going to the lower price. With
    search="golden" a single golden-section search runs over the whole
    range; it finds the optimum when revenue is unimodal (always with two
    CDNs) and a local optimum otherwise. Either way a final parabolic step
    lands on the vertex of the piece the optimum lies on.

    Args:
       market: A MarketInstance.
       responder: Zero-based index of the responding CDN.
       tol: Tolerance on the price for the golden-section search.
       search: "global" or "golden".

    Returns:
       The revenue-maximizing price.

    Raises:
       ValueError: Raised on an unknown search.
    """

    k = responder
    hi = 1.0 - market.cdns[k].beta
    f = lambda w: _own_revenue(market, k, w)

    if search == "golden":
        w, fw = max_golden(f, 0.0, hi, tol)
        return _parabolic(f, w, fw, 0.0, hi)[0]
    if search != "global":
        raise ValueError("Unknown best response search '%s'" % str(search))

    pts = price_breakpoints(market, k)
    best, fbest = 0.0, f(0.0)
    for lo, up in zip(pts[:-1], pts[1:]):
        if up - lo <= tol:
            continue
        w, fw = max_golden(f, lo, up, tol)
        w, fw = _parabolic(f, w, fw, lo, up)
        if fw > fbest + 1.0e-15:
            best, fbest = w, fw
    return best


def deviation_gains(market, prices=None, tol=1.0e-12):
    """Revenue each CDN gains by its global best response, others held fixed.

    Args:
       market: A MarketInstance.
       prices: Prices to test, the market prices by default.

    Returns:
       Non-negative gains, in beta order.
    """

    priced = market if prices is None else market.with_prices(prices)
    now = revenue(priced)
    gains = np.zeros(market.ncdn)
    for k in range(market.ncdn):
        w = best_response(priced, k, tol)
        gains[k] = max(0.0, _own_revenue(priced, k, w) - now[k])
    return gains


def _certify(market, result):
    """Sets result.nash by checking unilateral deviations."""

    if not np.all(np.isfinite(result.prices)) or not np.all(np.isfinite(result.shares)):
        result.nash = False
        return result
    gains = deviation_gains(market, result.prices)
    result.deviation_gains = gains
    result.nash = bool(np.all(gains <= NASH_TOL * market.population))
    if not result.nash:
        k = int(np.argmax(gains))
        warning(" @EQUILIBRIUM: %s prices are not a Nash equilibrium, CDN %d gains %g by deviating" % (result.method, k + 1, gains[k]), verbosity.low)
    return result


def best_response_duopoly(opponent_price, market, responder):
    """Closed-form best response of one of two CDNs.

    CDN 1 (the better one) answers w1 = (beta2 - beta1 + w2)/2, CDN 2 answers
    w2 = w1*(1 - beta2)/(2*(1 - beta1)).

    Args:
       opponent_price: The price of the other CDN, >= 0.
       market: A two-CDN MarketInstance.
       responder: 1 or 2.

    Raises:
       ValueError: Raised on equal betas, on a market that is not a duopoly,
          on a negative opponent price or an invalid responder.
    """

    if market.ncdn != 2:
        raise ValueError("Duopoly best response needs exactly 2 CDNs, got %d" % market.ncdn)
    market.check_distinct()
    if opponent_price < 0.0:
        raise ValueError("Opponent price must be non-negative")
    b1, b2 = market.betas
    if responder == 1:
        return 0.5 * (b2 - b1 + opponent_price)
    elif responder == 2:
        return opponent_price * (1.0 - b2) / (2.0 * (1.0 - b1))
    raise ValueError("Responder must be 1 or 2, got %s" % str(responder))


def _from_shares(market, prices, shares, method):
    """Builds a result from closed-form prices and shares."""

    population = market.population
    thresholds = 1.0 - np.cumsum(shares) / population
    return EquilibriumResult(prices, thresholds, shares, prices * shares, True, 0, method)


def equilibrium_duopoly(market, certify=True):
    """Closed-form Nash equilibrium of two CDNs.

    With certify, unilateral deviations are checked and stored in the
    result (see EquilibriumResult.nash).

    Raises:
       ValueError: Raised if the market does not hold exactly 2 CDNs with
          distinct betas.
    """

    if market.ncdn != 2:
        raise ValueError("Duopoly equilibrium needs exactly 2 CDNs, got %d" % market.ncdn)
    market.check_distinct()
    b1, b2 = market.betas
    lam = market.population
    den = 4.0 * (1.0 - b1) - (1.0 - b2)
    prices = np.array([2.0 * (1.0 - b1) * (b2 - b1), (1.0 - b2) * (b2 - b1)]) / den
    shares = np.array([2.0 * (1.0 - b1), 1.0 - b1]) * lam / den
    result = _from_shares(market, prices, shares, "duopoly")
    return _certify(market, result) if certify else result


def _triopoly_prices(market):
    if market.ncdn != 3:
        raise ValueError("Triopoly equilibrium needs exactly 3 CDNs, got %d" % market.ncdn)
    market.check_distinct()
    b1, b2, b3 = market.betas
    d21, d31, d32 = b2 - b1, b3 - b1, b3 - b2
    den = 4.0 * (1.0 - b2) * d31 - (1.0 - b3) * d21 - (1.0 - b2) * d32
    prices = np.array([(4.0 * (1.0 - b2) * d21 * d31 - (1.0 - b3) * d21 ** 2) / (2.0 * den),
                       (1.0 - b2) * d21 * d32 / den,
                       (1.0 - b3) * d21 * d32 / (2.0 * den)])
    return prices, den


def equilibrium_triopoly(market, certify=True):
    """Closed-form equilibrium of three CDNs with all three in the market.

    The prices solve the first-order conditions of the three revenues. The
    shares are those of the split at these prices,
    ((4(1-b2)(b3-b1) - (1-b3)(b2-b1))/2, (1-b2)(b3-b1), (1-b2)(b2-b1)/2)
    times population/den. With certify, unilateral deviations are checked
    and stored in result.nash.

    Raises:
       ValueError: Raised if the market does not hold exactly 3 CDNs with
          distinct betas.
    """

    prices, den = _triopoly_prices(market)
    b1, b2, b3 = market.betas
    d21, d31 = b2 - b1, b3 - b1
    shares = np.array([2.0 * (1.0 - b2) * d31 - 0.5 * (1.0 - b3) * d21,
                       (1.0 - b2) * d31,
                       0.5 * (1.0 - b2) * d21]) * market.population / den
    result = _from_shares(market, prices, shares, "triopoly")
    return _certify(market, result) if certify else result


def published_triopoly_ratios(market):
    """Revenue ratios (J1/J2, J2/J3, J1/J3) of the published triopoly table.

    The table pairs the closed-form prices with share expressions for CDN 2
    and CDN 3, ((1-b2)(b3-b1) + (1-b3)(b2-b1)/2) and (b2-b1)(b3-b2)/2 over
    den, that differ from the split at those prices. Only the ratios of
    that table are reproduced here; equilibrium_triopoly gives the
    consistent outcome.
    """

    prices, den = _triopoly_prices(market)
    b1, b2, b3 = market.betas
    d21, d31, d32 = b2 - b1, b3 - b1, b3 - b2
    shares = np.array([2.0 * (1.0 - b2) * d31 - 0.5 * (1.0 - b3) * d21,
                       (1.0 - b2) * d31 + 0.5 * (1.0 - b3) * d21,
                       0.5 * d21 * d32]) / den
    j = prices * shares
    return j[0] / j[1], j[1] / j[2], j[0] / j[2]


def equilibrium_linear(market, certify=True):
    """Interior Nash equilibrium of K CDNs from the first-order conditions.

    When every CDN keeps a non-empty interval, CDN k only competes with its
    neighbours in beta order (the last one with "no CDN"), and setting the
    derivative of each revenue to zero gives a tridiagonal linear system in
    the prices. The solution is accepted only if every share is positive at
    those prices; otherwise the result is flagged as not converged.
    With certify, unilateral deviations are then checked as well.

    Raises:
       ValueError: Raised on equal betas.
    """

    market.check_distinct()
    b = market.betas
    K = market.ncdn
    # gap to the next line down; the last CDN faces the "no CDN" line
    dlow = np.append(np.diff(b), 1.0 - b[-1])

    A = np.zeros((K, K))
    rhs = np.zeros(K)
    for k in range(K):
        A[k, k] = 2.0 / dlow[k]
        if k + 1 < K:
            A[k, k + 1] = -1.0 / dlow[k]
        if k > 0:
            A[k, k] += 2.0 / dlow[k - 1]
            A[k, k - 1] = -1.0 / dlow[k - 1]
        else:
            rhs[k] = 1.0
    prices = np.linalg.solve(A, rhs)

    result = EquilibriumResult.from_prices(market, prices, method="linear")
    if np.any(prices < 0.0) or np.any(result.shares <= 0.0):
        warning(" @EQUILIBRIUM: linear first-order solution leaves a CDN without market, not an equilibrium", verbosity.low)
        result.converged = False
    return _certify(market, result) if certify else result


def best_response_iteration(market, tol=1.0e-10, max_iter=10000, damping=0.5, initial=None, search="golden"):
    """Nash equilibrium by damped Gauss-Seidel best-response iteration.

    Each sweep visits the CDNs in beta order and moves each price a fraction
    `damping` of the way to its numerical best response. Iteration stops when
    no price moves by more than tol in a sweep.

    Args:
       market: A MarketInstance with K >= 1.
       tol: Convergence threshold on the largest price change.
       max_iter: Maximum number of sweeps.
       damping: Step fraction in (0,1].
       initial: Optional initial prices; zeros by default.
       search: Best response search, see best_response. The default
          "golden" follows the interior first-order equilibrium; "global"
          may cycle when no pure equilibrium exists.

    Returns:
       An EquilibriumResult. On exact beta ties or non-convergence it has
       converged=False; in the latter case it holds the iterate with the
       smallest price change seen.
       Unilateral deviations from the returned prices are checked and
       stored in result.nash.
    """

    if not (0.0 < damping <= 1.0):
        raise ValueError("Damping must lie in (0,1], got %g" % damping)
    if not tol > 0.0:
        raise ValueError("Tolerance must be positive, got %g" % tol)

    K = market.ncdn
    prices = np.zeros(K) if initial is None else np.array(initial, dtype=float)

    try:
        market.check_distinct()
    except ValueError:
        warning(" @EQUILIBRIUM: CDNs with equal betas have no well defined split, best-response iteration not attempted", verbosity.low)
        nan = np.full(K, np.nan)
        result = EquilibriumResult(prices, nan, nan, nan, False, 0, "iteration")
        result.nash = False
        return result

    best, bestdelta = prices.copy(), np.inf
    for it in range(1, max_iter + 1):
        delta = 0.0
        for k in range(K):
            br = best_response(market.with_prices(prices), k, tol / 10.0, search)
            step = damping * (br - prices[k])
            prices[k] += step
            delta = max(delta, abs(step))
        info(" @EQUILIBRIUM: sweep %d, largest price change %g" % (it, delta), verbosity.debug)
        if delta < bestdelta:
            best, bestdelta = prices.copy(), delta
        if delta < tol:
            return _certify(market, EquilibriumResult.from_prices(market, prices, True, it, "iteration"))

    warning(" @EQUILIBRIUM: best-response iteration did not converge in %d sweeps (change %g)" % (max_iter, bestdelta), verbosity.low)
    return _certify(market, EquilibriumResult.from_prices(market, best, False, max_iter, "iteration"))


def duopoly_ratio(beta1, beta2):
    """Closed-form equilibrium revenue ratio 4*(1-beta1)/(1-beta2) of two CDNs."""

    return 4.0 * (1.0 - beta1) / (1.0 - beta2)


def ratio_sweep(beta_fixed, beta_varying, which=1, population=1.0):
    """Equilibrium revenue ratio J1/J2 of a duopoly over a range of betas.

    Args:
       beta_fixed: The beta that stays constant.
       beta_varying: The values taken by the other beta.
       which: 1 if beta1 varies (beta2 = beta_fixed), 2 if beta2 varies.
       population: Provider mass.

    Returns:
       (rows, skipped): rows are records (beta1, beta2, ratio, ...) for every
       valid pair, skipped lists the (beta1, beta2) pairs with beta1 >= beta2.
    """

    if which not in (1, 2):
        raise ValueError("Sweep variable must be 1 or 2, got %s" % str(which))
    rows = []
    skipped = []
    for bv in beta_varying:
        b1, b2 = (bv, beta_fixed) if which == 1 else (beta_fixed, bv)
        if not b1 < b2:
            skipped.append((float(b1), float(b2)))
            continue
        res = equilibrium_duopoly(MarketInstance.from_betas([b1, b2], population=population))
        rows.append({"beta1": float(b1), "beta2": float(b2),
                     "price1": float(res.prices[0]), "price2": float(res.prices[1]),
                     "revenue1": float(res.revenues[0]), "revenue2": float(res.revenues[1]),
                     "ratio": float(res.ratio(0, 1))})
    if len(skipped) > 0:
        warning(" @EQUILIBRIUM: skipped %d sweep rows with beta1 >= beta2: %s" % (len(skipped), str(skipped)), verbosity.low)
    return rows, skipped
