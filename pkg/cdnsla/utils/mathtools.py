"""Mathematical tools used in various parts of the code."""

# This file is part of cdnsla.
# cdnsla Copyright (C) 2026 cdnsla developers
# See the "licenses" directory for full license information.


import math

import numpy as np
from scipy import stats


__all__ = ['span', 'popcount', 'batch_means']


def span(x):
    """Span seminorm, max(x) - min(x)."""

    return float(np.max(x) - np.min(x))


def popcount(mask):
    """Number of set bits of a non-negative integer."""

    return bin(int(mask)).count("1")


def batch_means(samples, confidence=0.95):
    """Mean and confidence half-width from independent batch samples.

    Uses the Student t quantile with nbatch-1 degrees of freedom.

    Args:
       samples: One value per batch.
       confidence: Two-sided confidence level.

    Returns:
       (mean, half_width, standard_error)
    """

    samples = np.asarray(samples, dtype=float)
    nb = len(samples)
    mean = float(np.mean(samples)) if nb > 0 else 0.0
    if nb < 2:
        return mean, math.inf, math.inf
    se = float(np.std(samples, ddof=1)) / math.sqrt(nb)
    half = float(stats.t.ppf(0.5 + 0.5 * confidence, nb - 1)) * se
    return mean, half, se
