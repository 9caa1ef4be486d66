"""
Utility functions used throughout the code.
"""

# This file is part of cdnsla.
# cdnsla Copyright (C) 2026 cdnsla developers
# See the "licenses" directory for full license information.


__all__ = ["io", "messages", "prng", "inputvalue", "mathtools", "mintools"]
