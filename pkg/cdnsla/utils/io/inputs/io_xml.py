"""Functions used to read configuration documents.

Configuration is read either from XML or from JSON. Both are turned into the
same tree of xml_node objects, which the input classes in
cdnsla.utils.inputvalue then validate and convert.
"""

# This file is part of cdnsla.
# cdnsla Copyright (C) 2026 cdnsla developers
# See the "licenses" directory for full license information.


import json
from xml.sax import parseString, parse
from xml.sax.handler import ContentHandler

import numpy as np


__all__ = ['xml_node', 'xml_handler', 'xml_parse_string', 'xml_parse_file',
           'json_to_node', 'json_parse_string', 'json_parse_file',
           'read_type', 'read_float', 'read_int', 'read_bool', 'read_list',
           'read_array', 'read_tuple']


class xml_node(object):

    """One section of a configuration document.

    An XML tag and a JSON object both map onto a node: its name, its
    attributes and the ordered list of what it contains.

    Attributes:
        attribs: The attribute data for the tag.
        fields: A list of (name, data) pairs, the data being either a child
            xml_node or, for the name "_text", the text between the tags.
        name: The tag name.
    """

    def __init__(self, attribs=None, name="", fields=None):
        """Initialises xml_node.

        Args:
            attribs: Attribute strings keyed by name. Defaults to {}.
            fields: (name, content) pairs in document order. Defaults to [].
            name: The section name. Defaults to ''.
        """

        if attribs is None:
            attribs = {}
        if fields is None:
            fields = []

        self.attribs = attribs
        self.name = name
        self.fields = fields


class xml_handler(ContentHandler):

    """SAX handler that builds an xml_node tree.

    Attributes:
        root: An xml_node object for the root node.
        open: The list of the tags that the parser is currently between the start
            and end tags of.
        level: The level of nesting that the parser is currently at.
        buffer: A list of the data found between the tags at the different levels
            of nesting.
    """

    def __init__(self):
        """Initialises xml_handler."""

        super(xml_handler, self).__init__()
        self.root = xml_node(name="root", fields=[])
        self.open = [self.root]
        self.level = 0
        self.buffer = [[""]]

    def startElement(self, name, attrs):
        """Opens a new node and attaches it to its parent."""

        newnode = xml_node(attribs=dict((k, attrs[k]) for k in attrs.keys()), name=name, fields=[])
        self.open.append(newnode)
        self.open[self.level].fields.append((name, newnode))
        self.buffer.append([""])
        self.level += 1

    def characters(self, data):
        """Collects text at the current level."""

        self.buffer[self.level].append(data)

    def endElement(self, name):
        """Closes the current node, storing its text as the "_text" field."""

        self.buffer[self.level] = ''.join(self.buffer[self.level])
        self.open[self.level].fields.append(("_text", self.buffer[self.level]))
        self.buffer.pop(self.level)
        self.open.pop(self.level)
        self.level -= 1


def xml_parse_string(buf):
    """Parses a string in xml format and returns the root xml_node."""

    myhandle = xml_handler()
    parseString(buf, myhandle)
    return myhandle.root


def xml_parse_file(stream):
    """Parses an xml file and returns the root xml_node."""

    myhandle = xml_handler()
    parse(stream, myhandle)
    return myhandle.root


def _json_text(value):
    """Converts a JSON scalar or list into the text form read_type expects."""

    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, list):
        flat = np.asarray(value, dtype=object).flatten()
        return "[" + ", ".join(_json_text(v) for v in flat) + "]"
    return str(value)


def json_to_node(value, name="root"):
    """Converts a decoded JSON value into an xml_node tree.

    Objects become nodes whose keys are fields. A list of objects becomes a
    repeated field, in the way several identical tags would appear in XML.
    A list of scalars becomes the bracketed text read_array expects, and a
    nested list also records its shape in the "shape" attribute. A JSON null
    is dropped, so the field takes its default.

    Args:
        value: The decoded JSON value.
        name: The tag name of the node to create.

    Returns:
        An xml_node.
    """

    if isinstance(value, dict):
        node = xml_node(name=name, fields=[])
        for k, v in value.items():
            if v is None:
                continue
            if isinstance(v, list) and len(v) > 0 and all(isinstance(x, dict) for x in v):
                for x in v:
                    node.fields.append((k, json_to_node(x, k)))
            else:
                node.fields.append((k, json_to_node(v, k)))
        node.fields.append(("_text", ""))
        return node

    attribs = {}
    if isinstance(value, list):
        shape = np.shape(np.asarray(value, dtype=object))
        if len(shape) > 1:
            attribs["shape"] = "(" + ", ".join(str(s) for s in shape) + ")"
    return xml_node(attribs=attribs, name=name, fields=[("_text", _json_text(value))])


def json_parse_string(buf, name="config"):
    """Parses a JSON string and returns a root node holding one field."""

    return xml_node(name="root", fields=[(name, json_to_node(json.loads(buf), name))])


def json_parse_file(stream, name="config"):
    """Parses a JSON file and returns a root node holding one field."""

    return xml_node(name="root", fields=[(name, json_to_node(json.load(stream), name))])


def read_type(type, data):
    """Reads a string and outputs data of a specified type.

    Args:
        type: The data type of the target container.
        data: The string to be read in.

    Raises:
        TypeError: Raised if it tries to read into a data type that has not been
            implemented.

    Returns:
        An object of type type.
    """

    if not type in readtype_funcs:
        raise TypeError("Conversion not available for given type")
    return type(readtype_funcs[type](data))


def read_float(data):
    """Reads a string and outputs a float."""

    return float(data)


def read_int(data):
    """Reads a string and outputs an integer.

    Accepts integral floats such as "1e6", which JSON writers produce.
    """

    try:
        return int(data)
    except ValueError:
        f = float(data)
        if f != int(f):
            raise ValueError(data + " does not represent an integer value")
        return int(f)


def read_bool(data):
    """Reads 'true' or 'false' (any case) and outputs a boolean.

    Raises:
        ValueError: Raised if the string is not 'true' or 'false'.
    """

    if data.strip().upper() == "TRUE":
        return True
    elif data.strip().upper() == "FALSE":
        return False
    else:
        raise ValueError(data + " does not represent a bool value")


def read_str(data):
    """Reads a string, removing surrounding blanks."""

    return data.strip()


def read_list(data, delims="[]", split=",", strip=" \n\t'\""):
    """Reads a formatted string and outputs a list of strings.

    The standard list format is '[array[0], array[1],..., array[n]]'.
    Other delimiters are used for tuples.

    Args:
        data: The string to be read in.
        delims: The first and last character of the list format.
        split: The character between different elements.
        strip: Characters removed from both ends of each element.

    Raises:
        ValueError: Raised if the input data is not of the correct format.

    Returns:
        A list of strings.
    """

    try:
        begin = data.index(delims[0])
        end = data.rindex(delims[1])
    except ValueError:
        raise ValueError("Error in list syntax: could not locate delimiters")

    rlist = data[begin + 1:end].split(split)
    for i in range(len(rlist)):
        rlist[i] = rlist[i].strip(strip)

    if len(rlist) == 1 and rlist[0] == "":
        rlist = []

    return rlist


def read_array(dtype, data):
    """Reads '[a, b, ...]' into a numpy array of the given element type."""

    rlist = read_list(data)
    for i in range(len(rlist)):
        rlist[i] = read_type(dtype, rlist[i])

    return np.array(rlist, dtype)


def read_tuple(data, delims="()", split=",", strip=" \n\t'", arg_type=int):
    """Reads '(a, b, ...)' into a tuple of arg_type."""

    rlist = read_list(data, delims=delims, split=split, strip=strip)
    return tuple([arg_type(i) for i in rlist])


readtype_funcs = {
    np.ndarray: read_array,
    float: read_float,
    int: read_int,
    bool: read_bool,
    str: read_str,
    tuple: read_tuple,
}
