"""Package with functions for reading configurations and writing artifacts.

Artifacts are dictionaries with a "rows" entry holding a list of plain
records. The writer for a format is looked up on the fly among the
cdnsla/utils/io/backends/io_*.py backends.
"""

# This file is part of cdnsla.
# cdnsla Copyright (C) 2026 cdnsla developers
# See the "licenses" directory for full license information.


import os
import sys
import functools
import importlib

from cdnsla.utils.io.inputs.io_xml import xml_parse_file, json_parse_file


__all__ = ["print_file", "read_file", "read_config"]


io_map = {
    "print": "print_%s",
    "read": "read_%s",
}


@functools.lru_cache(maxsize=None)
def _get_io_function(mode, io):
    """Returns io function with specified mode.

    Args:
        mode: Which format has the file? e.g. "csv" or "json". A file name
            extension such as ".csv" is accepted as well.
        io: One of "print" or "read".

    Raises:
        ValueError: Raised if the mode or the io operation is not supported.
    """

    mode = mode[mode.find(".") + 1:]
    try:
        module = importlib.import_module("cdnsla.utils.io.backends.io_%s" % mode)
    except ImportError:
        raise ValueError("Output format '%s' is not supported" % mode)

    try:
        func = getattr(module, io_map[io] % mode)
    except (KeyError, AttributeError):
        raise ValueError("io %s is not supported with mode %s" % (io, mode))

    return func


def print_file(mode, artifact, filedesc=sys.stdout):
    """Writes an artifact in the `mode` format.

    Args:
        mode: I/O file format, "csv" or "json".
        artifact: A dictionary with a "rows" list of records.
        filedesc: An open writable file object. Defaults to standard output.
    """

    return _get_io_function(mode, "print")(artifact=artifact, filedesc=filedesc)


def read_file(mode, filedesc):
    """Reads an artifact written by print_file."""

    return _get_io_function(mode, "read")(filedesc=filedesc)


def read_config(filename):
    """Reads a configuration document, guessing its format from the extension.

    Files ending in .xml are parsed as XML; anything else is read as JSON.

    Args:
        filename: Name of the configuration file.

    Returns:
        The root xml_node of the document.

    Raises:
        IOError: Raised if the file cannot be opened.
    """

    with open(filename, "r") as stream:
        if os.path.splitext(filename)[1].lower() == ".xml":
            return xml_parse_file(stream)
        return json_parse_file(stream)
