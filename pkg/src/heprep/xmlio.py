"""Persistent XML format: streaming writer back end and strict parser.

The writer is a Builder back end that never materializes the tree: it
holds only the open-element stack plus a bounded output buffer, so an
arbitrarily large instance tree streams through constant memory. The
parser is the exact inverse and rejects anything outside the dialect
(unknown elements or attributes, bad tokens, non-finite numbers).

Dialect (all scalar data in XML attributes, UTF-8, version "2.0"):

    <?xml version="1.0" encoding="UTF-8"?>
    <heprep version="2.0">
      <typetree name="N" version="V">
        <type name="N">
          <attdef name="N" desc="D" category="Draw" kind="real" units="U"/>
          <attvalue name="N" kind="real" value="1.5"/>
          <type .../>
        </type>
      </typetree>
      <instancetree name="N" version="V" typetreename="N" typetreeversion="V">
        <instance type="FULL/NAME">
          <attvalue .../>
          <point x="X" y="Y" z="Z"><attvalue .../></point>
          <instance .../>
        </instance>
      </instancetree>
    </heprep>

Reals use shortest-round-trip formatting; bool is "true"/"false"; color
is "r,g,b". Empty desc/units attributes are omitted. Identical documents
and writer configuration produce byte-identical output.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import BinaryIO, Optional, Union
from xml.etree import ElementTree
from xml.sax.saxutils import escape

from .builder import Builder
from .errors import SchemaError, SinkIOError, VersionError, XmlSyntaxError
from .model import (
    AttDef,
    AttributeCategory,
    AttValue,
    AttValueKind,
    Color,
    HepRepDocument,
    HepRepInstance,
    HepRepPoint,
    HepRepType,
    InstanceTree,
    TypeTree,
    check_att_value,
)

FILE_SUFFIX = ".heprep.xml"
FORMAT_VERSION = "2.0"

_ATTR_ESCAPES = {'"': "&quot;", "\n": "&#10;", "\r": "&#13;", "\t": "&#9;"}


def format_real(value: float) -> str:
    """Shortest decimal string that parses back to exactly ``value``.

    Integer-valued reals drop the fractional part ("0", not "0.0"), and
    exponents lose their sign padding ("1e21", not "1e+21").
    """
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"cannot format non-finite real {value!r}")
    text = repr(value)
    if "e" in text:
        mantissa, exponent = text.split("e")
        if mantissa.endswith(".0"):
            mantissa = mantissa[:-2]
        return f"{mantissa}e{int(exponent)}"
    if text.endswith(".0"):
        return text[:-2]
    return text


def _format_value(att: AttValue) -> str:
    kind, value = att.kind, att.value
    if kind is AttValueKind.TEXT:
        return value
    if kind is AttValueKind.INTEGER:
        return str(value)
    if kind is AttValueKind.REAL:
        return format_real(value)
    if kind is AttValueKind.BOOLEAN:
        return "true" if value else "false"
    return ",".join(format_real(c) for c in value)  # color


@dataclass
class XmlWriterConfig:
    """indent: two spaces per depth; max_buffered_bytes caps unflushed output."""

    indent: bool = True
    max_buffered_bytes: int = 65536


class _Sink:
    """Bounded write buffer in front of a byte sink; poisoned on I/O failure."""

    def __init__(self, stream: BinaryIO, limit: int):
        self._stream = stream
        self._limit = max(1, limit)
        self._chunks = []
        self._size = 0
        self.poisoned = False
        self.peak_buffered_bytes = 0
        self.bytes_written = 0

    @property
    def buffered_bytes(self) -> int:
        return self._size

    def write(self, text: str):
        data = text.encode("utf-8")
        if self._size + len(data) > self._limit:
            self.flush()
        if len(data) > self._limit:
            self._write_out(data)
            return
        self._chunks.append(data)
        self._size += len(data)
        self.peak_buffered_bytes = max(self.peak_buffered_bytes, self._size)

    def flush(self):
        if self._chunks:
            data = b"".join(self._chunks)
            self._chunks = []
            self._size = 0
            self._write_out(data)

    def _write_out(self, data: bytes):
        try:
            self._stream.write(data)
        except Exception as exc:
            self.poisoned = True
            raise SinkIOError(f"sink write failed: {exc}") from exc
        self.bytes_written += len(data)


class XmlBuilder(Builder):
    """Streaming XML back end; state is the open-element stack only."""

    def __init__(self, stream: BinaryIO, config: Optional[XmlWriterConfig] = None):
        super().__init__()
        self._config = config or XmlWriterConfig()
        self._sink = _Sink(stream, self._config.max_buffered_bytes)
        self._stack = []  # open element tags
        self._tag_open = False  # last start tag not yet '>'-terminated

    @property
    def peak_buffered_bytes(self) -> int:
        return self._sink.peak_buffered_bytes

    @property
    def buffered_bytes(self) -> int:
        return self._sink.buffered_bytes

    def _guard(self):
        if self._sink.poisoned:
            raise SinkIOError("builder is poisoned after a sink failure")

    def _write(self, text: str):
        self._guard()
        self._sink.write(text)

    def _nl(self) -> str:
        return "\n" if self._config.indent else ""

    def _pad(self) -> str:
        return "  " * len(self._stack) if self._config.indent else ""

    def _start(self, tag: str, attrs):
        self._close_pending()
        parts = [self._pad(), "<", tag]
        for key, value in attrs:
            parts.append(f' {key}="{_escape_attr(value)}"')
        self._write("".join(parts))
        self._stack.append(tag)
        self._tag_open = True

    def _leaf(self, tag: str, attrs):
        self._close_pending()
        parts = [self._pad(), "<", tag]
        for key, value in attrs:
            parts.append(f' {key}="{_escape_attr(value)}"')
        parts.append("/>")
        parts.append(self._nl())
        self._write("".join(parts))

    def _close_pending(self):
        if self._tag_open:
            self._write(">" + self._nl())
            self._tag_open = False

    def _end(self):
        tag = self._stack.pop()
        if self._tag_open:
            self._write("/>" + self._nl())
            self._tag_open = False
        else:
            self._write(f"{self._pad()}</{tag}>{self._nl()}")

    # -- builder hooks -------------------------------------------------------

    def _on_open_type_tree(self, name, version):
        self._write('<?xml version="1.0" encoding="UTF-8"?>\n')
        self._start("heprep", [("version", FORMAT_VERSION)])
        self._start("typetree", [("name", name), ("version", version)])

    def _on_open_type(self, name, full):
        self._start("type", [("name", name)])

    def _on_att_def(self, definition: AttDef):
        attrs = [("name", definition.name)]
        if definition.description:
            attrs.append(("desc", definition.description))
        attrs.append(("category", definition.category.value))
        attrs.append(("kind", definition.kind.value))
        if definition.units:
            attrs.append(("units", definition.units))
        self._leaf("attdef", attrs)

    def _att_value(self, att: AttValue):
        self._leaf(
            "attvalue",
            [("name", att.name), ("kind", att.kind.value), ("value", _format_value(att))],
        )

    def _on_type_att_value(self, att):
        self._att_value(att)

    def _on_close_type(self):
        self._end()

    def _on_close_type_tree(self):
        self._end()

    def _on_open_instance_tree(self, name, version, type_tree_name, type_tree_version):
        self._start(
            "instancetree",
            [
                ("name", name),
                ("version", version),
                ("typetreename", type_tree_name),
                ("typetreeversion", type_tree_version),
            ],
        )

    def _on_open_instance(self, type_full_name):
        self._start("instance", [("type", type_full_name)])

    def _on_instance_att_value(self, att):
        self._att_value(att)

    def _on_point(self, x, y, z):
        self._start(
            "point", [("x", format_real(x)), ("y", format_real(y)), ("z", format_real(z))]
        )

    def _on_point_att_value(self, att):
        self._att_value(att)

    def _on_seal_point(self):
        self._end()

    def _on_close_instance(self):
        self._end()

    def _on_close_instance_tree(self):
        self._end()

    def _on_finish(self):
        self._end()  # </heprep>
        if not self._config.indent:
            self._write("\n")
        self._sink.flush()


def xml_builder(stream: BinaryIO, config: Optional[XmlWriterConfig] = None) -> XmlBuilder:
    """Builder back end streaming the document into ``stream`` as XML."""
    return XmlBuilder(stream, config)


def write_document(doc: HepRepDocument, stream: BinaryIO, config=None):
    """Serialize an in-memory document (convenience traversal over xml_builder)."""
    b = xml_builder(stream, config)
    b.open_type_tree(doc.type_tree.name, doc.type_tree.version)

    def emit_type(node: HepRepType):
        b.open_type(node.name)
        for d in node.att_defs:
            b.att_def(d)
        for att in node.att_values:
            b.type_att_value(att)
        for sub in node.sub_types:
            emit_type(sub)
        b.close_type()

    for root in doc.type_tree.root_types:
        emit_type(root)
    b.close_type_tree()
    itree = doc.instance_tree
    b.open_instance_tree(itree.name, itree.version, itree.type_tree_name, itree.type_tree_version)

    def emit_instance(node: HepRepInstance):
        b.open_instance(node.type_full_name)
        for att in node.att_values:
            b.instance_att_value(att)
        for point in node.points:
            b.point(point.x, point.y, point.z)
            for att in point.att_values:
                b.point_att_value(att)
        for sub in node.sub_instances:
            emit_instance(sub)
        b.close_instance()

    for root in itree.root_instances:
        emit_instance(root)
    b.close_instance_tree()
    b.finish()


def _escape_attr(value: str) -> str:
    return escape(value, _ATTR_ESCAPES)


# --- parsing ----------------------------------------------------------------

_REAL_RE = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")
_INT_RE = re.compile(r"^[+-]?\d+$")

_CATEGORIES = {c.value: c for c in AttributeCategory}
_KINDS = {k.value: k for k in AttValueKind}


def parse_document(source: Union[BinaryIO, bytes]) -> HepRepDocument:
    """Parse writer output back into a document; strict about the dialect."""
    if isinstance(source, (bytes, bytearray)):
        data = bytes(source)
    else:
        data = source.read()
    try:
        root = ElementTree.fromstring(data)
    except ElementTree.ParseError as exc:
        raise XmlSyntaxError(f"malformed XML: {exc}") from exc

    if root.tag != "heprep":
        raise SchemaError(f"root element is {root.tag!r}, expected 'heprep'")
    version = _required(root, "version", {"version"})
    if version != FORMAT_VERSION:
        raise VersionError(f"unsupported format version {version!r}")
    _no_text(root)
    children = list(root)
    if len(children) != 2 or children[0].tag != "typetree" or children[1].tag != "instancetree":
        raise SchemaError("document must contain one typetree followed by one instancetree")
    return HepRepDocument(_parse_type_tree(children[0]), _parse_instance_tree(children[1]))


def _required(el, name, allowed):
    for key in el.attrib:
        if key not in allowed:
            raise SchemaError(f"unknown attribute {key!r} on <{el.tag}>")
    if name not in el.attrib:
        raise SchemaError(f"<{el.tag}> is missing required attribute {name!r}")
    return el.attrib[name]


def _check_attrs(el, required, optional=()):
    allowed = set(required) | set(optional)
    for key in el.attrib:
        if key not in allowed:
            raise SchemaError(f"unknown attribute {key!r} on <{el.tag}>")
    for key in required:
        if key not in el.attrib:
            raise SchemaError(f"<{el.tag}> is missing required attribute {key!r}")


def _no_text(el):
    if (el.text and el.text.strip()) or (el.tail and el.tail.strip()):
        raise SchemaError(f"unexpected text content in <{el.tag}>")


def _parse_real(el, text: str) -> float:
    if not _REAL_RE.match(text):
        raise SchemaError(f"bad real {text!r} in <{el.tag}>")
    value = float(text)
    if not math.isfinite(value):
        raise SchemaError(f"non-finite real {text!r} in <{el.tag}>")
    return value


def _parse_att_value(el) -> AttValue:
    _check_attrs(el, ("name", "kind", "value"))
    _no_text(el)
    if len(el):
        raise SchemaError("<attvalue> must be empty")
    kind = _KINDS.get(el.attrib["kind"])
    if kind is None:
        raise SchemaError(f"unknown attvalue kind {el.attrib['kind']!r}")
    raw = el.attrib["value"]
    if kind is AttValueKind.TEXT:
        value = raw
    elif kind is AttValueKind.INTEGER:
        if not _INT_RE.match(raw):
            raise SchemaError(f"bad integer {raw!r}")
        value = int(raw)
    elif kind is AttValueKind.REAL:
        value = _parse_real(el, raw)
    elif kind is AttValueKind.BOOLEAN:
        if raw == "true":
            value = True
        elif raw == "false":
            value = False
        else:
            raise SchemaError(f"bad boolean {raw!r}")
    else:
        parts = raw.split(",")
        if len(parts) != 3:
            raise SchemaError(f"bad color {raw!r}")
        value = Color(*(_parse_real(el, p) for p in parts))
    att = AttValue(el.attrib["name"], kind, value)
    problem = check_att_value(att)
    if problem is not None:
        raise SchemaError(f"attvalue {att.name!r}: {problem}")
    return att


def _parse_att_def(el) -> AttDef:
    _check_attrs(el, ("name", "category", "kind"), ("desc", "units"))
    _no_text(el)
    if len(el):
        raise SchemaError("<attdef> must be empty")
    category = _CATEGORIES.get(el.attrib["category"])
    if category is None:
        raise SchemaError(f"unknown attdef category {el.attrib['category']!r}")
    kind = _KINDS.get(el.attrib["kind"])
    if kind is None:
        raise SchemaError(f"unknown attdef kind {el.attrib['kind']!r}")
    return AttDef(
        el.attrib["name"],
        category,
        kind,
        el.attrib.get("desc", ""),
        el.attrib.get("units", ""),
    )


def _parse_type(el) -> HepRepType:
    _check_attrs(el, ("name",))
    _no_text(el)
    att_defs, att_values, sub_types = [], [], []
    for child in el:
        if child.tag == "attdef":
            att_defs.append(_parse_att_def(child))
        elif child.tag == "attvalue":
            att_values.append(_parse_att_value(child))
        elif child.tag == "type":
            sub_types.append(_parse_type(child))
        else:
            raise SchemaError(f"unknown element <{child.tag}> inside <type>")
    return HepRepType(el.attrib["name"], att_defs, att_values, sub_types)


def _parse_type_tree(el) -> TypeTree:
    _check_attrs(el, ("name", "version"))
    _no_text(el)
    roots = []
    for child in el:
        if child.tag != "type":
            raise SchemaError(f"unknown element <{child.tag}> inside <typetree>")
        roots.append(_parse_type(child))
    return TypeTree(el.attrib["name"], el.attrib["version"], roots)


def _parse_point(el) -> HepRepPoint:
    _check_attrs(el, ("x", "y", "z"))
    _no_text(el)
    atts = []
    for child in el:
        if child.tag != "attvalue":
            raise SchemaError(f"unknown element <{child.tag}> inside <point>")
        atts.append(_parse_att_value(child))
    return HepRepPoint(
        _parse_real(el, el.attrib["x"]),
        _parse_real(el, el.attrib["y"]),
        _parse_real(el, el.attrib["z"]),
        atts,
    )


def _parse_instance(el) -> HepRepInstance:
    _check_attrs(el, ("type",))
    _no_text(el)
    att_values, points, subs = [], [], []
    for child in el:
        if child.tag == "attvalue":
            att_values.append(_parse_att_value(child))
        elif child.tag == "point":
            points.append(_parse_point(child))
        elif child.tag == "instance":
            subs.append(_parse_instance(child))
        else:
            raise SchemaError(f"unknown element <{child.tag}> inside <instance>")
    return HepRepInstance(el.attrib["type"], att_values, points, subs)


def _parse_instance_tree(el) -> InstanceTree:
    _check_attrs(el, ("name", "version", "typetreename", "typetreeversion"))
    _no_text(el)
    roots = []
    for child in el:
        if child.tag != "instance":
            raise SchemaError(f"unknown element <{child.tag}> inside <instancetree>")
        roots.append(_parse_instance(child))
    return InstanceTree(
        el.attrib["name"],
        el.attrib["version"],
        el.attrib["typetreename"],
        el.attrib["typetreeversion"],
        roots,
    )
