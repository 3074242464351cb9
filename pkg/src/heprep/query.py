"""The four access methods and incremental-download filter semantics.

get_instances returns a filtered copy of the instance tree: instances
whose type is selected and whose resolved attributes satisfy every
predicate survive with points and (include/exclude-filtered) attvalues;
unselected ancestors of survivors remain as bare skeletons so tree paths
stay meaningful; everything else is pruned. Every surviving instance
carries an ``origPath`` attvalue giving its path in the input tree, since
the result is reindexed.

Selecting a type does not select its subtypes: requesting "Track" yields
tracks without their hits unless "Track/TrackHit" is also requested.
Predicates evaluate on resolved attributes, so type-level defaults count.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Optional

from .errors import BadRequestError
from .model import (
    AttValue,
    AttValueKind,
    HepRepDocument,
    HepRepInstance,
    HepRepPoint,
    InstanceTree,
    TypeTree,
    format_instance_path,
    iter_types,
    resolve_in_scope,
)

ORIG_PATH = "origPath"


class PredicateOp(enum.Enum):
    EXISTS = "exists"
    EQ = "="
    NE = "!="
    LT = "<"
    LE = "<="
    GT = ">"
    GE = ">="

_ORDERING_OPS = (PredicateOp.LT, PredicateOp.LE, PredicateOp.GT, PredicateOp.GE)
_NUMERIC_KINDS = (AttValueKind.INTEGER, AttValueKind.REAL)


@dataclass(frozen=True)
class Predicate:
    """One conjunct: attribute name, operator, typed operand (absent for exists)."""

    att_name: str
    op: PredicateOp
    operand_kind: Optional[AttValueKind] = None
    operand: object = None

    def __str__(self):
        if self.op is PredicateOp.EXISTS:
            return f"{self.att_name} exists"
        if self.operand_kind is AttValueKind.BOOLEAN:
            literal = "true" if self.operand else "false"
        else:
            literal = str(self.operand)
        return f"{self.att_name}{self.op.value}{literal}"


_NAME = r"[A-Za-z_][A-Za-z0-9_.:-]*"
_EXISTS_RE = re.compile(rf"^\s*({_NAME})\s+exists\s*$")
_COMPARE_RE = re.compile(rf"^\s*({_NAME})\s*(<=|>=|!=|=|<|>)\s*(\S(?:.*\S)?)\s*$")
_INT_LITERAL = re.compile(r"^[+-]?\d+$")
_REAL_LITERAL = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")


def parse_predicate(text: str) -> Predicate:
    """Parse the text syntax NAME OP LITERAL, OP in {exists,=,!=,<,<=,>,>=}.

    Literal kind is inferred: integer syntax -> Integer, real syntax ->
    Real, true/false -> Boolean, anything else -> Text; surrounding
    double quotes force Text.
    """
    match = _EXISTS_RE.match(text)
    if match:
        return Predicate(match.group(1), PredicateOp.EXISTS)
    match = _COMPARE_RE.match(text)
    if not match:
        raise BadRequestError(f"malformed predicate {text!r}")
    name, op_text, literal = match.groups()
    if literal[0] in "<>=":
        raise BadRequestError(f"malformed predicate {text!r}")
    op = PredicateOp(op_text)
    if len(literal) >= 2 and literal[0] == '"' and literal[-1] == '"':
        kind, value = AttValueKind.TEXT, literal[1:-1]
    elif _INT_LITERAL.match(literal):
        kind, value = AttValueKind.INTEGER, int(literal)
    elif _REAL_LITERAL.match(literal):
        kind, value = AttValueKind.REAL, float(literal)
    elif literal in ("true", "false"):
        kind, value = AttValueKind.BOOLEAN, literal == "true"
    else:
        kind, value = AttValueKind.TEXT, literal
    return Predicate(name, op, kind, value)


@dataclass(frozen=True)
class InstanceRequest:
    """Incremental-download filter; empty fields mean "no constraint"."""

    type_names: tuple = ()
    att_includes: tuple = ()
    att_excludes: tuple = ()
    predicates: tuple = ()
    max_depth: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "type_names", tuple(self.type_names))
        object.__setattr__(self, "att_includes", tuple(self.att_includes))
        object.__setattr__(self, "att_excludes", tuple(self.att_excludes))
        predicates = tuple(
            parse_predicate(p) if isinstance(p, str) else p for p in self.predicates
        )
        object.__setattr__(self, "predicates", predicates)


def validate_request(request: InstanceRequest):
    """Raise BadRequestError for structurally invalid requests."""
    includes = {n.lower() for n in request.att_includes}
    excludes = {n.lower() for n in request.att_excludes}
    overlap = includes & excludes
    if overlap:
        raise BadRequestError(f"attIncludes and attExcludes overlap on {sorted(overlap)}")
    for predicate in request.predicates:
        if predicate.op in _ORDERING_OPS and predicate.operand_kind not in _NUMERIC_KINDS:
            raise BadRequestError(
                f"ordering predicate on {predicate.att_name!r} requires a numeric operand"
            )
    if request.max_depth is not None and request.max_depth < 1:
        raise BadRequestError("maxDepth must be >= 1")


def request_wants_type(request: InstanceRequest, full_name: str) -> bool:
    """True when instances of ``full_name`` are worth emitting for the request.

    Used by fillers: a type is wanted when the selection is empty, names
    the type itself, or names one of its descendants (whose instances
    need this type's instances as structural parents).
    """
    if not request.type_names:
        return True
    low = full_name.lower()
    for requested in request.type_names:
        rlow = requested.lower()
        if rlow == low or rlow.startswith(low + "/"):
            return True
    return False


def _predicate_holds(predicate: Predicate, resolved: Optional[AttValue]) -> bool:
    if predicate.op is PredicateOp.EXISTS:
        return resolved is not None
    if resolved is None:
        return False
    kind, value = resolved.kind, resolved.value
    okind, operand = predicate.operand_kind, predicate.operand
    numeric = kind in _NUMERIC_KINDS and okind in _NUMERIC_KINDS
    if predicate.op is PredicateOp.EQ or predicate.op is PredicateOp.NE:
        if not numeric and kind is not okind:
            return False  # mismatched kinds compare false, for != too
        equal = value == operand  # int/float equality in Python is exact
        return equal if predicate.op is PredicateOp.EQ else not equal
    if not numeric:
        return False
    a, b = value, operand
    if predicate.op is PredicateOp.LT:
        return a < b
    if predicate.op is PredicateOp.LE:
        return a <= b
    if predicate.op is PredicateOp.GT:
        return a > b
    return a >= b


def _type_chains(tree: TypeTree) -> dict:
    return {full.lower(): chain for full, _node, chain in iter_types(tree)}


def get_type_tree(doc: HepRepDocument) -> TypeTree:
    """The complete type tree; never filtered, independent of any request."""
    return doc.type_tree


@dataclass(frozen=True)
class RootSummary:
    type_full_name: str
    descendant_count: int


@dataclass(frozen=True)
class InstanceTreeTop:
    """Instance tree identity plus per-root summaries (no points, no attvalues)."""

    name: str
    version: str
    type_tree_name: str
    type_tree_version: str
    roots: tuple = ()


def _descendants(instance: HepRepInstance) -> int:
    return sum(1 + _descendants(sub) for sub in instance.sub_instances)


def get_instance_tree_top(doc: HepRepDocument) -> InstanceTreeTop:
    """Identity and root summaries, for browsing before downloading."""
    tree = doc.instance_tree
    return InstanceTreeTop(
        tree.name,
        tree.version,
        tree.type_tree_name,
        tree.type_tree_version,
        tuple(
            RootSummary(root.type_full_name, _descendants(root))
            for root in tree.root_instances
        ),
    )


def get_instances(doc: HepRepDocument, request: InstanceRequest) -> InstanceTree:
    """Filtered copy of the instance tree; see the module docstring."""
    validate_request(request)
    wanted = {n.lower() for n in request.type_names}
    includes = {n.lower() for n in request.att_includes}
    excludes = {n.lower() for n in request.att_excludes}
    chains = _type_chains(doc.type_tree)
    predicates = request.predicates
    max_depth = request.max_depth

    def keep_att(att: AttValue) -> bool:
        low = att.name.lower()
        if includes and low not in includes:
            return False
        return low not in excludes

    def visit(instance: HepRepInstance, path: tuple, depth: int):
        kept_children = []
        for i, sub in enumerate(instance.sub_instances):
            child = visit(sub, path + (i,), depth + 1)
            if child is not None:
                kept_children.append(child)

        selected = not wanted or instance.type_full_name.lower() in wanted
        if selected and max_depth is not None and depth > max_depth:
            selected = False
        if selected and predicates:
            chain = chains.get(instance.type_full_name.lower())
            for predicate in predicates:
                resolved = resolve_in_scope(instance, chain, predicate.att_name)
                if not _predicate_holds(predicate, resolved):
                    selected = False
                    break

        orig = AttValue.text(ORIG_PATH, format_instance_path(path))
        if selected:
            atts = [a for a in instance.att_values if keep_att(a)]
            atts.append(orig)
            points = [
                HepRepPoint(p.x, p.y, p.z, [a for a in p.att_values if keep_att(a)])
                for p in instance.points
            ]
            return HepRepInstance(instance.type_full_name, atts, points, kept_children)
        if kept_children:
            return HepRepInstance(instance.type_full_name, [orig], [], kept_children)
        return None

    roots = []
    for i, root in enumerate(doc.instance_tree.root_instances):
        result = visit(root, (i,), 1)
        if result is not None:
            roots.append(result)
    tree = doc.instance_tree
    return InstanceTree(
        tree.name, tree.version, tree.type_tree_name, tree.type_tree_version, roots
    )


def get_instances_after_action(session, action, request: InstanceRequest) -> InstanceTree:
    """Apply a pick action to the session's current event, then query.

    Action application is transactional: on any error the event is
    unchanged. The action's target path is resolved against the document
    scoped to this request's type selection, which is where the caller's
    origPath values came from.
    """
    validate_request(request)
    session.apply_action(action, context_request=request)
    return get_instances(session.document_for(request), request)
