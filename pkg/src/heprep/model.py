"""Hierarchical representable data model.

A document pairs one type tree (shared characteristics: attribute
definitions and defaults) with one instance tree (per-event content:
attribute values, space points). Attribute lookup walks outward from the
most specific scope: point, then instance, then the instance's type and
its ancestor types. All name comparisons (type names, attribute names)
are case-insensitive; stored spelling is preserved.

Documents are immutable after construction; nothing here mutates shared
state, so a document can be read concurrently.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Optional, Sequence, Union

from .errors import InvalidPathError

INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1


class AttributeCategory(enum.Enum):
    """The four attribute categories; .value is the serialized name."""

    DRAW = "Draw"
    PHYSICS = "Physics"
    PICK_ACTION = "PickAction"
    ASSOCIATION = "Association"


class AttValueKind(enum.Enum):
    """Payload kinds for attribute values; .value is the serialized token."""

    TEXT = "text"
    INTEGER = "int"
    REAL = "real"
    BOOLEAN = "bool"
    COLOR = "color"


class Color(NamedTuple):
    r: float
    g: float
    b: float


@dataclass(frozen=True)
class AttDef:
    """Attribute definition: name, category, payload kind, free-text units."""

    name: str
    category: AttributeCategory
    kind: AttValueKind
    description: str = ""
    units: str = ""


@dataclass(frozen=True)
class AttValue:
    """A named, typed attribute value.

    ``value`` must match ``kind``: str for TEXT, int for INTEGER, float
    for REAL, bool for BOOLEAN, Color for COLOR.
    """

    name: str
    kind: AttValueKind
    value: object

    @staticmethod
    def text(name: str, value: str) -> "AttValue":
        return AttValue(name, AttValueKind.TEXT, value)

    @staticmethod
    def integer(name: str, value: int) -> "AttValue":
        return AttValue(name, AttValueKind.INTEGER, int(value))

    @staticmethod
    def real(name: str, value: float) -> "AttValue":
        return AttValue(name, AttValueKind.REAL, float(value))

    @staticmethod
    def boolean(name: str, value: bool) -> "AttValue":
        return AttValue(name, AttValueKind.BOOLEAN, bool(value))

    @staticmethod
    def color(name: str, r: float, g: float, b: float) -> "AttValue":
        return AttValue(name, AttValueKind.COLOR, Color(float(r), float(g), float(b)))


def check_att_value(att: AttValue) -> Optional[str]:
    """Return a problem description if the payload is invalid, else None.

    Integers must fit a signed 64-bit range; reals must be finite; color
    components must each lie in [0, 1].
    """
    kind, value = att.kind, att.value
    if kind is AttValueKind.TEXT:
        if not isinstance(value, str):
            return "text payload must be a string"
    elif kind is AttValueKind.INTEGER:
        if not isinstance(value, int) or isinstance(value, bool):
            return "integer payload must be an int"
        if not INT64_MIN <= value <= INT64_MAX:
            return "integer payload outside signed 64-bit range"
    elif kind is AttValueKind.REAL:
        if not isinstance(value, float):
            return "real payload must be a float"
        if not math.isfinite(value):
            return "real payload must be finite"
    elif kind is AttValueKind.BOOLEAN:
        if not isinstance(value, bool):
            return "boolean payload must be a bool"
    elif kind is AttValueKind.COLOR:
        if not isinstance(value, Color):
            return "color payload must be a Color"
        for component in value:
            if not isinstance(component, float) or not math.isfinite(component):
                return "color components must be finite floats"
            if not 0.0 <= component <= 1.0:
                return "color components must lie in [0, 1]"
    return None


@dataclass
class HepRepPoint:
    """A space point in millimetres with optional per-point attributes."""

    x: float
    y: float
    z: float
    att_values: tuple = ()

    def __post_init__(self):
        self.att_values = tuple(self.att_values)


@dataclass
class HepRepType:
    """A node of the type tree; ``name`` must not contain '/'."""

    name: str
    att_defs: tuple = ()
    att_values: tuple = ()
    sub_types: tuple = ()

    def __post_init__(self):
        self.att_defs = tuple(self.att_defs)
        self.att_values = tuple(self.att_values)
        self.sub_types = tuple(self.sub_types)


@dataclass
class TypeTree:
    name: str
    version: str
    root_types: tuple = ()

    def __post_init__(self):
        self.root_types = tuple(self.root_types)


@dataclass
class HepRepInstance:
    """A node of the instance tree, referencing a type by full name."""

    type_full_name: str
    att_values: tuple = ()
    points: tuple = ()
    sub_instances: tuple = ()

    def __post_init__(self):
        self.att_values = tuple(self.att_values)
        self.points = tuple(self.points)
        self.sub_instances = tuple(self.sub_instances)


@dataclass
class InstanceTree:
    name: str
    version: str
    type_tree_name: str
    type_tree_version: str
    root_instances: tuple = ()

    def __post_init__(self):
        self.root_instances = tuple(self.root_instances)


@dataclass
class HepRepDocument:
    type_tree: TypeTree
    instance_tree: InstanceTree


# --- instance paths -------------------------------------------------------

InstancePath = tuple  # tuple[int, ...]; rendered as "0/3"


def parse_instance_path(text: str) -> tuple:
    """Parse "0/3" into (0, 3). Empty or non-numeric paths are invalid."""
    if not isinstance(text, str) or text == "":
        raise InvalidPathError("empty instance path")
    indices = []
    for segment in text.split("/"):
        if not segment.isdigit():
            raise InvalidPathError(f"bad path segment {segment!r} in {text!r}")
        indices.append(int(segment))
    return tuple(indices)


def format_instance_path(indices: Sequence[int]) -> str:
    return "/".join(str(i) for i in indices)


def _as_path(path: Union[str, Sequence[int]]) -> tuple:
    if isinstance(path, str):
        return parse_instance_path(path)
    path = tuple(path)
    if not path:
        raise InvalidPathError("empty instance path")
    for i in path:
        if not isinstance(i, int) or i < 0:
            raise InvalidPathError(f"bad path index {i!r}")
    return path


def instance_at(doc: HepRepDocument, path: Union[str, Sequence[int]]) -> HepRepInstance:
    """Return the instance addressed by ``path`` (root instances are "0".."n-1")."""
    indices = _as_path(path)
    siblings = doc.instance_tree.root_instances
    node = None
    for index in indices:
        if index >= len(siblings):
            raise InvalidPathError(
                f"path {format_instance_path(indices)} leaves the tree at index {index}"
            )
        node = siblings[index]
        siblings = node.sub_instances
    return node


def iter_instances(tree: InstanceTree) -> Iterator[tuple]:
    """Yield (path, instance) pairs in depth-first order."""

    def walk(nodes, prefix):
        for i, node in enumerate(nodes):
            path = prefix + (i,)
            yield path, node
            yield from walk(node.sub_instances, path)

    yield from walk(tree.root_instances, ())


# --- type tree traversal --------------------------------------------------


def iter_types(tree: TypeTree) -> Iterator[tuple]:
    """Yield (full_name, type, chain) with chain ordered root -> node."""

    def walk(nodes, prefix, chain):
        for node in nodes:
            full = f"{prefix}/{node.name}" if prefix else node.name
            node_chain = chain + (node,)
            yield full, node, node_chain
            yield from walk(node.sub_types, full, node_chain)

    yield from walk(tree.root_types, "", ())


def find_type(tree: TypeTree, full_name: str) -> Optional[HepRepType]:
    """Case-insensitive lookup of a type by full name."""
    chain = type_chain(tree, full_name)
    return chain[-1] if chain else None


def type_chain(tree: TypeTree, full_name: str) -> Optional[tuple]:
    """Return the (root, ..., node) chain for ``full_name``, or None."""
    wanted = full_name.lower()
    for full, _node, chain in iter_types(tree):
        if full.lower() == wanted:
            return chain
    return None


# --- attribute resolution -------------------------------------------------


def _last_match(att_values: Sequence[AttValue], low_name: str) -> Optional[AttValue]:
    # Duplicate names within one node: last one wins.
    found = None
    for att in att_values:
        if att.name.lower() == low_name:
            found = att
    return found


def resolve_in_scope(
    instance: HepRepInstance,
    chain: Optional[Sequence[HepRepType]],
    name: str,
    point: Optional[HepRepPoint] = None,
) -> Optional[AttValue]:
    """Resolve a name given an instance and its type chain (root -> type)."""
    low = name.lower()
    if point is not None:
        match = _last_match(point.att_values, low)
        if match is not None:
            return match
    match = _last_match(instance.att_values, low)
    if match is not None:
        return match
    if chain:
        for node in reversed(chain):  # own type first, then ancestors
            match = _last_match(node.att_values, low)
            if match is not None:
                return match
    return None


def resolve_attribute(
    doc: HepRepDocument,
    path: Union[str, Sequence[int]],
    name: str,
    point_index: Optional[int] = None,
) -> Optional[AttValue]:
    """Resolve an attribute name for the instance at ``path``.

    Lookup order: point attvalues (when ``point_index`` is given), the
    instance's own attvalues, the instance's type defaults, then each
    ancestor type's defaults walking toward the root type. Returns None
    when the name is defined nowhere in scope.
    """
    instance = instance_at(doc, path)
    point = None
    if point_index is not None:
        if not 0 <= point_index < len(instance.points):
            raise InvalidPathError(
                f"point index {point_index} out of range for instance at "
                f"{format_instance_path(_as_path(path))}"
            )
        point = instance.points[point_index]
    chain = type_chain(doc.type_tree, instance.type_full_name)
    return resolve_in_scope(instance, chain, name, point)


def find_att_def(chain: Optional[Sequence[HepRepType]], name: str) -> Optional[AttDef]:
    """Find the in-scope AttDef for ``name`` (own type first, then ancestors)."""
    if not chain:
        return None
    low = name.lower()
    for node in reversed(chain):
        for d in node.att_defs:
            if d.name.lower() == low:
                return d
    return None


# --- structural validation ------------------------------------------------


class ViolationKind(enum.Enum):
    TYPE_NOT_FOUND = "TYPE_NOT_FOUND"
    BAD_SUBTYPE = "BAD_SUBTYPE"
    TREE_MISMATCH = "TREE_MISMATCH"
    DUP_TYPE_NAME = "DUP_TYPE_NAME"
    DUP_ATTDEF = "DUP_ATTDEF"
    KIND_MISMATCH = "KIND_MISMATCH"
    NONFINITE_POINT = "NONFINITE_POINT"


@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    where: str
    detail: str

    def __str__(self):
        return f"{self.kind.value}\t{self.where}\t{self.detail}"


def validate_document(doc: HepRepDocument) -> list:
    """Return one Violation per structural breach (empty for conforming docs)."""
    violations = []
    tree, itree = doc.type_tree, doc.instance_tree

    seen_full = {}
    chains = {}
    for full, node, chain in iter_types(tree):
        low = full.lower()
        if low in seen_full:
            violations.append(
                Violation(ViolationKind.DUP_TYPE_NAME, full, f"also defined as {seen_full[low]}")
            )
        else:
            seen_full[low] = full
            chains[low] = chain
        seen_defs = set()
        for d in node.att_defs:
            dlow = d.name.lower()
            if dlow in seen_defs:
                violations.append(Violation(ViolationKind.DUP_ATTDEF, full, f"attdef {d.name!r}"))
            seen_defs.add(dlow)
        for att in node.att_values:
            _check_kind(violations, chain, att, f"type {full}")

    if (itree.type_tree_name, itree.type_tree_version) != (tree.name, tree.version):
        violations.append(
            Violation(
                ViolationKind.TREE_MISMATCH,
                itree.name,
                f"instance tree references ({itree.type_tree_name!r}, "
                f"{itree.type_tree_version!r}) but type tree is "
                f"({tree.name!r}, {tree.version!r})",
            )
        )

    for path, inst in iter_instances(itree):
        where = format_instance_path(path)
        chain = chains.get(inst.type_full_name.lower())
        if chain is None:
            violations.append(
                Violation(ViolationKind.TYPE_NOT_FOUND, where, inst.type_full_name)
            )
        if len(path) > 1:
            parent = instance_at(doc, path[:-1])
            plow = parent.type_full_name.lower()
            clow = inst.type_full_name.lower()
            direct_child = clow.startswith(plow + "/") and "/" not in clow[len(plow) + 1 :]
            if not direct_child:
                violations.append(
                    Violation(
                        ViolationKind.BAD_SUBTYPE,
                        where,
                        f"{inst.type_full_name!r} is not a subtype of {parent.type_full_name!r}",
                    )
                )
        for att in inst.att_values:
            _check_kind(violations, chain, att, f"instance {where}")
        for pi, point in enumerate(inst.points):
            for coord in (point.x, point.y, point.z):
                if not isinstance(coord, float) or not math.isfinite(coord):
                    violations.append(
                        Violation(ViolationKind.NONFINITE_POINT, where, f"point {pi}")
                    )
                    break
            for att in point.att_values:
                _check_kind(violations, chain, att, f"instance {where} point {pi}")
    return violations


def _check_kind(violations, chain, att, where):
    definition = find_att_def(chain, att.name)
    if definition is not None and definition.kind is not att.kind:
        violations.append(
            Violation(
                ViolationKind.KIND_MISMATCH,
                where,
                f"{att.name!r} is {att.kind.value} but attdef says {definition.kind.value}",
            )
        )


# --- predefined draw attributes -------------------------------------------

DRAW_AS_SHAPES = ("Point", "Line", "Polygon", "Prism")

_DRAW_DEFINITIONS = (
    AttDef(
        "DrawAs",
        AttributeCategory.DRAW,
        AttValueKind.TEXT,
        "Shape drawn from the instance points: Point, Line, Polygon or Prism",
    ),
    AttDef("Color", AttributeCategory.DRAW, AttValueKind.COLOR, "RGB, components in [0,1]"),
    AttDef("LineWidth", AttributeCategory.DRAW, AttValueKind.REAL, "Line width", "pixels"),
    AttDef("MarkerSize", AttributeCategory.DRAW, AttValueKind.REAL, "Marker size", "pixels"),
    AttDef("Visibility", AttributeCategory.DRAW, AttValueKind.BOOLEAN, "Draw this instance"),
)


def default_draw_definitions() -> tuple:
    """The fixed registry of predefined drawing attribute definitions."""
    return _DRAW_DEFINITIONS


def draw_definition(name: str) -> Optional[AttDef]:
    """Case-insensitive lookup into the predefined draw registry."""
    low = name.lower()
    for d in _DRAW_DEFINITIONS:
        if d.name.lower() == low:
            return d
    return None
