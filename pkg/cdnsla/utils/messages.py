"""Functions to print info and warnings during a computation."""

# This file is part of cdnsla.
# cdnsla Copyright (C) 2026 cdnsla developers
# See the "licenses" directory for full license information.


import traceback
import sys


__all__ = ['Verbosity', 'verbosity', 'info', 'warning']


VERB_QUIET = 0
VERB_LOW = 1
VERB_MEDIUM = 2
VERB_HIGH = 3
VERB_DEBUG = 4
VERB_TRACE = 5

_LEVELS = {"quiet": VERB_QUIET,
           "low": VERB_LOW,
           "medium": VERB_MEDIUM,
           "high": VERB_HIGH,
           "debug": VERB_DEBUG,
           "trace": VERB_TRACE}


class Verbosity(object):

    """Decides what gets printed.

    Reading an attribute named after a level (e.g. `verbosity.debug`) returns
    True when the stored level is at least that high, so that calls read as
    `info(text, verbosity.debug)`.

    Attributes:
        level: The numeric verbosity level.
        lock: When True, further changes to the level are ignored.
        stream: The file object messages are written to.
    """

    lock = False
    level = VERB_LOW
    stream = None

    def __getattr__(self, name):
        """Compares the stored level with the level called `name`.

        Args:
            name: The verbosity level at which the message will be output.
        """

        if name in _LEVELS:
            return self.level >= _LEVELS[name]
        raise AttributeError("Verbosity has no attribute '" + name + "'")

    def __setattr__(self, name, value):
        """Sets the verbosity level from its name.

        Args:
            name: The name of what to set, normally 'level'.
            value: The value to set.

        Raises:
            ValueError: Raised if the level is not a valid option.
        """

        if name == "level":
            if self.lock:
                return
            if value not in _LEVELS:
                raise ValueError("Invalid verbosity level " + str(value) + " specified.")
            super(Verbosity, self).__setattr__("level", _LEVELS[value])
        else:
            super(Verbosity, self).__setattr__(name, value)

    def out(self):
        """Returns the stream messages go to, standard output by default."""

        if self.stream is None:
            return sys.stdout
        return self.stream


verbosity = Verbosity()


def info(text="", show=True):
    """Prints a message.

    Args:
        text: The text of the information message.
        show: Whether or not the message should be printed.
    """

    if not show:
        return
    print(text, file=verbosity.out())


def warning(text="", show=True):
    """Prints a warning message.

    Same as info, but with a "!W!" prefix and a stack trace at trace level.

    Args:
        text: The text of the warning.
        show: Whether or not the message should be printed.
    """

    if not show:
        return
    if verbosity.trace:
        traceback.print_stack(file=verbosity.out())
    print(" !W! " + text, file=verbosity.out())
