"""Common helper functions for running the tests."""

# This file is part of cdnsla.
# cdnsla Copyright (C) 2026 cdnsla developers
# See the "licenses" directory for full license information.


import os

from cdnsla.engine.geometry import ServerLayout


def local(file=None):
    """Returns local folder of the tests directory.

    Args:
        - file: Append file to the local folder
    """
    if file is None:
        return os.path.dirname(__file__)
    else:
        return os.path.join(os.path.dirname(__file__), file)


def single_server(lambda0, mu=1.0, psi=1000.0, half=None):
    """One server at the origin whose empty disk sees the rate lambda0.

    The region is the square of half side `half`, by default just large
    enough to hold the empty disk.
    """

    r0 = psi - 1.0 / mu
    if half is None:
        half = r0 + 1.0
    areal = lambda0 / (3.141592653589793 * r0 * r0)
    return ServerLayout([[0.0, 0.0]], [mu], psi, (-half, -half, half, half), areal)


def lens(distance=1.0, mu=(1.0, 1.0), psi=2.0, areal=1.0, half=4.0):
    """Two servers on the x axis, `distance` apart and centred on the origin."""

    return ServerLayout([[-0.5 * distance, 0.0], [0.5 * distance, 0.0]], list(mu), psi,
                        (-half, -half, half, half), areal)
