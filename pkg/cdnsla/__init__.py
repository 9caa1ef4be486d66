"""
The cdnsla package.
"""

__all__ = ["engine", "inputs", "utils", "cli"]
