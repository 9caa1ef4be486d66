"""
Modules that compute equilibria, queue statistics and routing policies.
"""

# This file is part of cdnsla.
# cdnsla Copyright (C) 2026 cdnsla developers
# See the "licenses" directory for full license information.


__all__ = ["competition", "geometry", "queueing", "static", "dynamic", "simulation"]
