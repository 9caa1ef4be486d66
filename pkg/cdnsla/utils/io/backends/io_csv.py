"""Functions used to write and read artifacts in the CSV format.

Only the "rows" of an artifact are written. Floating point numbers are
written with 6 decimals.
"""

# This file is part of cdnsla.
# cdnsla Copyright (C) 2026 cdnsla developers
# See the "licenses" directory for full license information.


import sys
import csv

import numpy as np


__all__ = ['print_csv', 'read_csv', 'write_cell']


def write_cell(value):
    """Formats one CSV cell."""

    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "%.6f" % value
    if isinstance(value, (list, tuple, np.ndarray)):
        return " ".join(write_cell(v) for v in value)
    return str(value)


def print_csv(artifact, filedesc=sys.stdout):
    """Prints the rows of an artifact as CSV with a header line.

    Args:
        artifact: A dictionary with a "rows" list of records sharing keys.
        filedesc: An open writable file object. Defaults to standard output.
    """

    rows = artifact["rows"]
    writer = csv.writer(filedesc, lineterminator="\n")
    if len(rows) == 0:
        return
    header = list(rows[0].keys())
    writer.writerow(header)
    for r in rows:
        writer.writerow([write_cell(r.get(k, "")) for k in header])


def read_csv(filedesc):
    """Reads CSV rows back as dictionaries of strings."""

    return {"rows": [dict(r) for r in csv.DictReader(filedesc)]}
