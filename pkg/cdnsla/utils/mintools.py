"""Contains simple helper algorithms for one-dimensional optimization.

Functions:
        min_golden: Golden-section minimization of a unimodal function on a
            closed interval, with the end points included as candidates.
        max_golden: The same, for maximization.
"""

# This file is part of cdnsla.
# cdnsla Copyright (C) 2026 cdnsla developers
# See the "licenses" directory for full license information.


__all__ = ["min_golden", "max_golden"]

import math

from cdnsla.utils.messages import verbosity, info


def min_golden(f, a, b, tol=1.0e-10, itmax=500):
    """Minimizes a unimodal function on [a, b] by golden-section search.

    Arguments:
            f: function to minimize
            a, b: interval end points, a <= b
            tol: absolute tolerance on the position of the minimum
            itmax: maximum allowed iterations

    Returns:
            (x, f(x)) at the best point found, end points included.
    """

    # Initializations and constants
    gold = 0.3819660  # 2 - golden ratio
    if b < a:
        raise ValueError("Invalid interval [%g, %g] for golden-section search" % (a, b))

    fa = f(a)
    fb = f(b)
    if b - a <= tol:
        return (a, fa) if fa <= fb else (b, fb)

    x1 = a + gold * (b - a)
    x2 = b - gold * (b - a)
    f1 = f(x1)
    f2 = f(x2)
    lo, hi = a, b
    it = 0
    while hi - lo > tol and it < itmax:
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = lo + gold * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = hi - gold * (hi - lo)
            f2 = f(x2)
        it += 1
    info(" @GOLDEN: %d iterations, bracket width %g" % (it, hi - lo), verbosity.trace)

    x, fx = (x1, f1) if f1 <= f2 else (x2, f2)
    xm = 0.5 * (lo + hi)
    fm = f(xm)
    if fm < fx:
        x, fx = xm, fm
    # the optimum of a monotone function sits on an end point
    if fa < fx:
        x, fx = a, fa
    if fb < fx:
        x, fx = b, fb
    return x, fx


def max_golden(f, a, b, tol=1.0e-10, itmax=500):
    """Maximizes a unimodal function on [a, b]. See min_golden."""

    x, fx = min_golden(lambda y: -f(y), a, b, tol, itmax)
    return x, -fx
