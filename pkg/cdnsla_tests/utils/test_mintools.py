"""Tests the golden-section search."""

# This file is part of cdnsla.
# cdnsla Copyright (C) 2026 cdnsla developers
# See the "licenses" directory for full license information.


import pytest

import numpy.testing as npt

from cdnsla.utils.mintools import *


test_golden_prms = [
    # centre, a, b, expected argmin
    (0.3, 0.0, 1.0, 0.3),
    (-0.5, 0.0, 1.0, 0.0),
    (2.0, 0.0, 1.0, 1.0),
    (0.5, 0.5, 0.5, 0.5),
]


@pytest.mark.parametrize("centre, a, b, x", test_golden_prms)
def test_min_golden(centre, a, b, x):
    xmin, fmin = min_golden(lambda y: (y - centre) ** 2, a, b, tol=1.0e-10)
    npt.assert_allclose(xmin, x, atol=1.0e-8)
    npt.assert_allclose(fmin, (x - centre) ** 2, atol=1.0e-12)


def test_max_golden():
    # revenue of a monopoly CDN with beta = 0.3
    x, fx = max_golden(lambda w: w * (1.0 - w / 0.7), 0.0, 0.7)
    npt.assert_allclose(x, 0.35, atol=1.0e-8)
    npt.assert_allclose(fx, 0.175, atol=1.0e-12)


def test_kink_at_end_point():
    x, fx = max_golden(lambda w: -abs(w - 1.0), 0.0, 1.0)
    assert x == 1.0 and fx == 0.0


def test_invalid_interval():
    with pytest.raises(ValueError):
        min_golden(lambda y: y, 1.0, 0.0)
