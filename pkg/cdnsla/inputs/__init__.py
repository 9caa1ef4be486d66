"""Classes that read configuration documents into engine objects."""

# This file is part of cdnsla.
# cdnsla Copyright (C) 2026 cdnsla developers
# See the "licenses" directory for full license information.


__all__ = ['prng', 'market', 'layout', 'chain', 'simulation', 'commands']
