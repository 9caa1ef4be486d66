"""Declarative classes that read and validate configuration documents.

Every section of a configuration is an Input subclass listing the fields,
attributes and repeatable (dynamic) tags it accepts, with their data type,
default and allowed options. parse() fills an instance from an xml_node tree
(built from JSON or XML), check() enforces the declared constraints and
fetch() turns the section into engine objects.

Misspelt tags, missing mandatory fields, values that cannot be read and
values outside their options all raise a ConfigError that names the dotted
path of the offending field.
"""

# This file is part of cdnsla.
# cdnsla Copyright (C) 2026 cdnsla developers
# See the "licenses" directory for full license information.


from copy import copy

import numpy as np

from cdnsla.utils.io.inputs.io_xml import *


__all__ = ['ConfigError', 'Input', 'InputValue', 'InputAttribute', 'InputArray', 'input_default']


class ConfigError(ValueError):

    """A configuration schema violation.

    Attributes:
       path: Dotted path of the offending field, e.g. "layout.service_rates".
       message: The bare error message.
    """

    def __init__(self, message, path=""):
        self.message = message
        self.path = path
        super(ConfigError, self).__init__(self.__str__())

    def __str__(self):
        if self.path:
            return "%s: %s" % (self.path, self.message)
        return self.message

    def prefixed(self, name):
        """Returns the same error seen from the parent of `name`."""

        return ConfigError(self.message, name + "." + self.path if self.path else name)


def _guarded(name, func, *args, **kwargs):
    """Calls func, converting errors into a ConfigError located at name."""

    try:
        return func(*args, **kwargs)
    except ConfigError as e:
        raise e.prefixed(name)
    except (ValueError, TypeError, NameError) as e:
        raise ConfigError(str(e), name)


class input_default(object):

    """Recipe for a default value that is built anew for every instance.

    Mutable defaults (arrays, dictionaries, Random objects) must not be
    shared between two sections, so they are given as a factory and its
    arguments rather than as a value.

    Attributes:
       factory: Callable building the default.
       args: Positional arguments of the factory.
       kwargs: Keyword arguments of the factory.
    """

    def __init__(self, factory, args=None, kwargs=None):

        if args is None:
            args = ()
        if kwargs is None:
            kwargs = {}
        self.factory = factory
        self.args = args
        self.kwargs = kwargs


class Input(object):

    """Base class of every configuration section.

    Attributes:
       fields: Class-level table {"name": (Input subclass, {"dtype", "default",
          "options", "help"})} of the tags the section accepts once.
       attribs: The same, for attributes of the tag.
       dynamic: The same, for tags that may be repeated.
       extra: ("name", Input) pairs of the parsed dynamic tags, in order.
       default_help: Help string used when none is given.
       _help: Help string of this instance.
       _default: Default value, None for a mandatory section.
       _optional: True when a default exists.
       _explicit: True once a value was parsed or stored.
       _text: Text found between the tags.
    """

    fields = {}
    attribs = {}
    dynamic = {}

    default_help = "Generic input value"

    def __init__(self, help=None, default=None):
        """Initialises Input, building one child section per declared field and attribute.

        Args:
           help: A help string.
           default: A default value, or an input_default recipe.
        """

        self.extra = []

        if help is None:
            self._help = self.default_help
        else:
            self._help = help

        if isinstance(default, input_default):
            self._default = default.factory(*default.args, **default.kwargs)
        else:
            self._default = default

        self._optional = not (self._default is None)

        if not hasattr(self, "instancefields"):
            self.instancefields = {}
        self.instancefields.update(self.fields)

        for f, v in self.instancefields.items():
            self.__dict__[f] = v[0](**v[1])

        for a, v in self.attribs.items():
            self.__dict__[a] = v[0](**v[1])

        self.set_default()

        self._text = ""

    def set_default(self):
        """Sets the default value of the object."""

        if not self._default is None:
            self.store(self._default)
        elif not hasattr(self, 'value'):
            self.value = None

        self._explicit = False

    def store(self, value=None):
        """Base function for storing data"""

        self._explicit = True

    def fetch(self):
        """Base function to build the object described by the input."""

        self.check()

    def check(self):
        """Base function to check for input errors.

        Raises:
           ConfigError: Raised if the user does not specify a required field.
        """

        if not (self._explicit or self._optional):
            raise ConfigError("Uninitialized Input value of type " + type(self).__name__)

    def extend(self, name, xml):
        """Dynamically adds an element to the 'extra' list.

        Args:
           name: The tag name of the dynamically stored tag.
           xml: The xml_node object used to parse the data stored in the tags.
        """

        newfield = self.dynamic[name][0](**self.dynamic[name][1])
        _guarded("%s[%d]" % (name, len([e for e in self.extra if e[0] == name])), newfield.parse, xml)
        self.extra.append((name, newfield))

    def parse(self, xml=None, text=""):
        """Parses an xml_node tree.

        Gives the data in each child node to the input object registered
        for its tag, recursively, until all the information is read or an
        input error is found.

        Args:
           xml: An xml_node object containing all the data for the parent
              tag.
           text: The data held between the start and end tags.

        Raises:
           ConfigError: Raised if a tag is not recognized, or a required
              field is missing, or a value cannot be read.
        """

        for a in self.attribs:
            self.__dict__[a].set_default()
        for f in self.instancefields:
            self.__dict__[f].set_default()

        self.extra = []
        self._explicit = True
        if xml is None:
            self._text = text
        else:
            for a, v in xml.attribs.items():
                if a in self.attribs:
                    _guarded(a, self.__dict__[a].parse, text=v)
                elif a == "_text":
                    pass
                else:
                    raise ConfigError("Attribute name '" + a + "' is not a recognized property of '" + xml.name + "' objects", a)

            for (f, v) in xml.fields:
                if f in self.instancefields:
                    _guarded(f, self.__dict__[f].parse, xml=v)
                elif f == "_text":
                    self._text = v
                elif f in self.dynamic:
                    self.extend(f, v)
                else:
                    raise ConfigError("Tag name '" + f + "' is not a recognized property of '" + xml.name + "' objects", f)

            for a in self.attribs:
                va = self.__dict__[a]
                if not (va._explicit or va._optional):
                    raise ConfigError("Attribute name '" + a + "' is mandatory and was not found in the input for the property " + xml.name, a)
            for f in self.instancefields:
                vf = self.__dict__[f]
                if not (vf._explicit or vf._optional):
                    raise ConfigError("Field name '" + f + "' is mandatory and was not found in the input for the property " + xml.name, f)

    def fetch_field(self, name):
        """Fetches a field, locating any error at its name."""

        return _guarded(name, self.__dict__[name].fetch)


class InputAttribute(Input):

    """Class for handling attribute data.

    Has the methods for dealing with attribute data of the form:
    <tag_name attrib='data'> ..., where data is just a value. Takes the data and
    converts it to the required data_type.

    Attributes:
       type: Data type of the data.
       value: Value of data.
       _valid: An optional list of valid options.
    """

    def __init__(self, help=None, default=None, dtype=None, options=None):
        """Initialises InputAttribute.

        Args:
           help: A help string.
           default: A default value.
           dtype: The data type.
           options: An optional list of valid options.
        """

        if not dtype is None:
            self.type = dtype
        else:
            raise TypeError("You must provide dtype")

        super(InputAttribute, self).__init__(help, default)

        if options is not None:
            self._valid = options
            if not default is None and not self._default in self._valid:
                raise ValueError("Default value '" + str(self._default) + "' not in option list " + str(self._valid) + "\n" + self._help)
        else:
            self._valid = None

    def parse(self, text=""):
        """Reads the data for a single attribute value."""

        super(InputAttribute, self).parse(text=text)

        self.value = read_type(self.type, self._text)

    def store(self, value):
        """Stores the input data."""

        super(InputAttribute, self).store(value)
        self.value = value

    def fetch(self):
        """Returns the stored data."""

        super(InputAttribute, self).fetch()
        return self.value

    def check(self):
        """Function to check for input errors.

        Raises:
           ConfigError: Raised if the value chosen is not one of the valid options.
        """

        super(InputAttribute, self).check()
        if not (self._valid is None or self.value in self._valid):
            raise ConfigError(str(self.value) + " is not a valid option (" + str(self._valid) + ")")


class InputValue(InputAttribute):

    """Class for handling scalar input.

    Has the methods for dealing with simple data tags of the form:
    <tag_name> data </tag_name>, or "tag_name": data in JSON, where data is
    just a value.
    """

    def parse(self, xml=None, text=""):
        """Reads the data for a single value.

        Args:
           xml: An xml_node object containing the all the data for the parent
              tag.
           text: The data held between the start and end tags.
        """

        Input.parse(self, xml=xml, text=text)
        self.value = read_type(self.type, self._text)


class InputArray(InputValue):

    """Class for handling array input.

    Has the methods for dealing with simple data tags of the form:
    <tag_name shape="(shape)"> data </tag_name>, where data is an array
    of the form [data[0], data[1], ... , data[length]]. A nested JSON list
    arrives flattened with its shape set.

    Attributes:
       shape: The shape of the array.
    """

    attribs = copy(InputValue.attribs)
    attribs["shape"] = (InputAttribute, {"dtype": tuple, "help": "The shape of the array.", "default": (0,)})

    def store(self, value):
        """Stores the data as a flat array and records its shape."""

        value = np.asarray(value, dtype=self.type)
        super(InputArray, self).store(value=value.flatten().copy())
        self.shape.store(value.shape)

        if self.shape.fetch() == (0,):
            self.shape.store((len(self.value),))

    def fetch(self):
        """Returns the stored data with its shape."""

        value = super(InputArray, self).fetch()

        if self.shape.fetch() == (0,):
            value = np.resize(self.value, 0).copy()
        else:
            value = self.value.reshape(self.shape.fetch()).copy()

        return value

    def parse(self, xml=None, text=""):
        """Reads the data for an array.

        Args:
           xml: An xml_node object containing the all the data for the parent
              tag.
           text: The data held between the start and end tags.
        """

        Input.parse(self, xml=xml, text=text)

        self.value = read_array(self.type, self._text)

        if self.shape.fetch() == (0,):
            self.shape.store((len(self.value),))
        elif int(np.prod(self.shape.fetch())) != len(self.value):
            raise ConfigError("Array of %d elements does not match shape %s" % (len(self.value), str(self.shape.fetch())))
