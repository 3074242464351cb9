"""JSON document shapes mirroring the XML dialect field-for-field.

Elements become objects, nested element kinds become the arrays "types",
"instances", "points", "attvalues", "attdefs"; attribute names match the
XML ones. Scalar payloads use native JSON types (numbers, booleans),
which round-trip losslessly; colors keep the "r,g,b" string form. Arrays
and strings that the XML form omits when empty are omitted here too.
"""

from __future__ import annotations

from ..model import (
    AttDef,
    AttributeCategory,
    AttValue,
    AttValueKind,
    Color,
    HepRepInstance,
    HepRepPoint,
    HepRepType,
    InstanceTree,
    TypeTree,
)
from ..query import InstanceTreeTop, RootSummary
from ..xmlio import format_real

_CATEGORIES = {c.value: c for c in AttributeCategory}
_KINDS = {k.value: k for k in AttValueKind}


def att_value_to_json(att: AttValue) -> dict:
    if att.kind is AttValueKind.COLOR:
        value = ",".join(format_real(c) for c in att.value)
    else:
        value = att.value
    return {"name": att.name, "kind": att.kind.value, "value": value}


def att_value_from_json(payload: dict) -> AttValue:
    kind = _KINDS[payload["kind"]]
    value = payload["value"]
    if kind is AttValueKind.COLOR:
        value = Color(*(float(part) for part in value.split(",")))
    elif kind is AttValueKind.REAL:
        value = float(value)
    return AttValue(payload["name"], kind, value)


def att_def_to_json(definition: AttDef) -> dict:
    payload = {"name": definition.name}
    if definition.description:
        payload["desc"] = definition.description
    payload["category"] = definition.category.value
    payload["kind"] = definition.kind.value
    if definition.units:
        payload["units"] = definition.units
    return payload


def att_def_from_json(payload: dict) -> AttDef:
    return AttDef(
        payload["name"],
        _CATEGORIES[payload["category"]],
        _KINDS[payload["kind"]],
        payload.get("desc", ""),
        payload.get("units", ""),
    )


def type_to_json(node: HepRepType) -> dict:
    payload = {"name": node.name}
    if node.att_defs:
        payload["attdefs"] = [att_def_to_json(d) for d in node.att_defs]
    if node.att_values:
        payload["attvalues"] = [att_value_to_json(a) for a in node.att_values]
    if node.sub_types:
        payload["types"] = [type_to_json(t) for t in node.sub_types]
    return payload


def type_from_json(payload: dict) -> HepRepType:
    return HepRepType(
        payload["name"],
        [att_def_from_json(d) for d in payload.get("attdefs", ())],
        [att_value_from_json(a) for a in payload.get("attvalues", ())],
        [type_from_json(t) for t in payload.get("types", ())],
    )


def type_tree_to_json(tree: TypeTree) -> dict:
    payload = {"name": tree.name, "version": tree.version}
    if tree.root_types:
        payload["types"] = [type_to_json(t) for t in tree.root_types]
    return payload


def type_tree_from_json(payload: dict) -> TypeTree:
    return TypeTree(
        payload["name"],
        payload["version"],
        [type_from_json(t) for t in payload.get("types", ())],
    )


def point_to_json(point: HepRepPoint) -> dict:
    payload = {"x": point.x, "y": point.y, "z": point.z}
    if point.att_values:
        payload["attvalues"] = [att_value_to_json(a) for a in point.att_values]
    return payload


def point_from_json(payload: dict) -> HepRepPoint:
    return HepRepPoint(
        float(payload["x"]),
        float(payload["y"]),
        float(payload["z"]),
        [att_value_from_json(a) for a in payload.get("attvalues", ())],
    )


def instance_to_json(node: HepRepInstance) -> dict:
    payload = {"type": node.type_full_name}
    if node.att_values:
        payload["attvalues"] = [att_value_to_json(a) for a in node.att_values]
    if node.points:
        payload["points"] = [point_to_json(p) for p in node.points]
    if node.sub_instances:
        payload["instances"] = [instance_to_json(i) for i in node.sub_instances]
    return payload


def instance_from_json(payload: dict) -> HepRepInstance:
    return HepRepInstance(
        payload["type"],
        [att_value_from_json(a) for a in payload.get("attvalues", ())],
        [point_from_json(p) for p in payload.get("points", ())],
        [instance_from_json(i) for i in payload.get("instances", ())],
    )


def instance_tree_to_json(tree: InstanceTree) -> dict:
    payload = {
        "name": tree.name,
        "version": tree.version,
        "typetreename": tree.type_tree_name,
        "typetreeversion": tree.type_tree_version,
    }
    if tree.root_instances:
        payload["instances"] = [instance_to_json(i) for i in tree.root_instances]
    return payload


def instance_tree_from_json(payload: dict) -> InstanceTree:
    return InstanceTree(
        payload["name"],
        payload["version"],
        payload["typetreename"],
        payload["typetreeversion"],
        [instance_from_json(i) for i in payload.get("instances", ())],
    )


def tree_top_to_json(top: InstanceTreeTop) -> dict:
    return {
        "name": top.name,
        "version": top.version,
        "typetreename": top.type_tree_name,
        "typetreeversion": top.type_tree_version,
        "roots": [
            {"type": r.type_full_name, "descendants": r.descendant_count} for r in top.roots
        ],
    }


def tree_top_from_json(payload: dict) -> InstanceTreeTop:
    return InstanceTreeTop(
        payload["name"],
        payload["version"],
        payload["typetreename"],
        payload["typetreeversion"],
        tuple(RootSummary(r["type"], r["descendants"]) for r in payload.get("roots", ())),
    )
