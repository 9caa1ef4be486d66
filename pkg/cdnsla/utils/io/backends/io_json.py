"""Functions used to write and read artifacts in the JSON format.

Numbers keep full precision. Keys are sorted so that identical artifacts
give identical bytes.
"""

# This file is part of cdnsla.
# cdnsla Copyright (C) 2026 cdnsla developers
# See the "licenses" directory for full license information.


import sys
import json

import numpy as np


__all__ = ['print_json', 'read_json', 'to_plain']


def to_plain(data):
    """Recursively converts numpy containers and scalars to plain Python."""

    if isinstance(data, dict):
        return dict((str(k), to_plain(v)) for k, v in data.items())
    if isinstance(data, (list, tuple)):
        return [to_plain(v) for v in data]
    if isinstance(data, np.ndarray):
        return to_plain(data.tolist())
    if isinstance(data, np.bool_):
        return bool(data)
    if isinstance(data, np.integer):
        return int(data)
    if isinstance(data, np.floating):
        return float(data)
    return data


def print_json(artifact, filedesc=sys.stdout):
    """Prints an artifact as one JSON document.

    Args:
        artifact: A dictionary, normally with a "rows" list of records.
        filedesc: An open writable file object. Defaults to standard output.
    """

    filedesc.write(json.dumps(to_plain(artifact), sort_keys=True, indent=1))
    filedesc.write("\n")


def read_json(filedesc):
    """Reads an artifact written by print_json.

    Raises:
        EOFError: Raised if the file holds no JSON document.
    """

    text = filedesc.read()
    if text.strip() == "":
        raise EOFError("The file descriptor hit EOF.")
    return json.loads(text)
