"""Builder interface, call grammar, in-memory back end, and filler registry.

Content is emitted through a Builder as a flat call sequence:

    open_type_tree (open_type (att_def|type_att_value)* ... close_type)*
    close_type_tree
    open_instance_tree (open_instance (instance_att_value|point
        point_att_value*|<nested instance>)* close_instance)*
    close_instance_tree finish

Every back end (in-memory, streaming XML, wire) shares one state machine,
so a call sequence is accepted or rejected identically everywhere. The
machine also rejects semantically broken emissions (unknown instance
types, non-subtype nesting, duplicate names, kind mismatches, non-finite
numbers): a sequence that passes always yields a document with zero
validation violations.

A point stays "open" only until the next call that is not
point_att_value; a streaming writer cannot reopen a closed element, so
late point attributes are a grammar error everywhere.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from typing import Optional, Sequence

from .errors import BuilderStateError, DuplicateTypeOwnerError, EmptyOwnershipError
from .model import (
    AttDef,
    AttributeCategory,
    AttValue,
    AttValueKind,
    HepRepDocument,
    HepRepInstance,
    HepRepPoint,
    HepRepType,
    InstanceTree,
    TypeTree,
    check_att_value,
)

TYPE_TREE_NAME = "types"
TYPE_TREE_VERSION = "1.0"
INSTANCE_TREE_VERSION = "1.0"

_START = "start"
_TYPES = "type tree"
_BETWEEN = "between trees"
_INSTANCES = "instance tree"
_DONE = "trees closed"
_FINISHED = "finished"


class _TypeRecord:
    __slots__ = ("full", "parent_low", "att_kinds")

    def __init__(self, full: str, parent_low: Optional[str]):
        self.full = full
        self.parent_low = parent_low
        self.att_kinds = {}


class BuilderState:
    """Validates the builder call grammar plus emission semantics."""

    def __init__(self):
        self._phase = _START
        self._types = {}  # lowercased full name -> _TypeRecord
        self._type_stack = []
        self._instance_stack = []  # lowercased type full names
        self._point_open = False
        self._tree_identity = None

    @property
    def type_depth(self) -> int:
        return len(self._type_stack)

    @property
    def instance_depth(self) -> int:
        return len(self._instance_stack)

    @property
    def point_open(self) -> bool:
        return self._point_open

    def _fail(self, call: str, reason: str):
        raise BuilderStateError(f"{call}: {reason}")

    def _require_phase(self, call: str, phase: str):
        if self._phase != phase:
            self._fail(call, f"not allowed while in {self._phase!r}")

    def open_type_tree(self, name: str, version: str):
        self._require_phase("open_type_tree", _START)
        self._tree_identity = (name, version)
        self._phase = _TYPES

    def open_type(self, name: str):
        self._require_phase("open_type", _TYPES)
        if not name:
            self._fail("open_type", "type name must be non-empty")
        if "/" in name:
            self._fail("open_type", f"type name {name!r} must not contain '/'")
        parent = self._type_stack[-1] if self._type_stack else None
        full = f"{parent.full}/{name}" if parent else name
        low = full.lower()
        if low in self._types:
            self._fail("open_type", f"duplicate type full name {full!r}")
        record = _TypeRecord(full, parent.full.lower() if parent else None)
        self._types[low] = record
        self._type_stack.append(record)
        return full

    def att_def(self, definition: AttDef):
        self._require_phase("att_def", _TYPES)
        if not self._type_stack:
            self._fail("att_def", "no type is open")
        if not isinstance(definition, AttDef):
            self._fail("att_def", "expected an AttDef")
        if not definition.name:
            self._fail("att_def", "attdef name must be non-empty")
        if not isinstance(definition.category, AttributeCategory):
            self._fail("att_def", "bad category")
        if not isinstance(definition.kind, AttValueKind):
            self._fail("att_def", "bad kind")
        record = self._type_stack[-1]
        low = definition.name.lower()
        if low in record.att_kinds:
            self._fail("att_def", f"duplicate attdef {definition.name!r} on {record.full!r}")
        record.att_kinds[low] = definition.kind

    def type_att_value(self, att: AttValue):
        self._require_phase("type_att_value", _TYPES)
        if not self._type_stack:
            self._fail("type_att_value", "no type is open")
        self._check_att("type_att_value", att, self._type_stack[-1].full.lower())

    def close_type(self):
        self._require_phase("close_type", _TYPES)
        if not self._type_stack:
            self._fail("close_type", "no type is open")
        self._type_stack.pop()

    def close_type_tree(self):
        self._require_phase("close_type_tree", _TYPES)
        if self._type_stack:
            self._fail("close_type_tree", f"{len(self._type_stack)} type(s) still open")
        self._phase = _BETWEEN

    def open_instance_tree(self, name, version, type_tree_name, type_tree_version):
        self._require_phase("open_instance_tree", _BETWEEN)
        if (type_tree_name, type_tree_version) != self._tree_identity:
            self._fail(
                "open_instance_tree",
                f"references type tree ({type_tree_name!r}, {type_tree_version!r}) "
                f"but this document's is {self._tree_identity!r}",
            )
        self._phase = _INSTANCES

    def open_instance(self, type_full_name: str):
        self._require_phase("open_instance", _INSTANCES)
        low = type_full_name.lower()
        record = self._types.get(low)
        if record is None:
            self._fail("open_instance", f"unknown type {type_full_name!r}")
        if self._instance_stack:
            parent_low = self._instance_stack[-1]
            if record.parent_low != parent_low:
                self._fail(
                    "open_instance",
                    f"{type_full_name!r} is not a subtype of the open instance's "
                    f"type {self._types[parent_low].full!r}",
                )
        self._instance_stack.append(low)
        self._point_open = False

    def instance_att_value(self, att: AttValue):
        self._require_phase("instance_att_value", _INSTANCES)
        if not self._instance_stack:
            self._fail("instance_att_value", "no instance is open")
        self._check_att("instance_att_value", att, self._instance_stack[-1])
        self._point_open = False

    def point(self, x, y, z):
        self._require_phase("point", _INSTANCES)
        if not self._instance_stack:
            self._fail("point", "no instance is open")
        for coord in (x, y, z):
            if not isinstance(coord, (int, float)) or isinstance(coord, bool):
                self._fail("point", f"coordinate {coord!r} is not a number")
            if not math.isfinite(coord):
                self._fail("point", "coordinates must be finite")
        self._point_open = True

    def point_att_value(self, att: AttValue):
        self._require_phase("point_att_value", _INSTANCES)
        if not self._point_open:
            self._fail("point_att_value", "no point is open on the current instance")
        self._check_att("point_att_value", att, self._instance_stack[-1])

    def close_instance(self):
        self._require_phase("close_instance", _INSTANCES)
        if not self._instance_stack:
            self._fail("close_instance", "no instance is open")
        self._instance_stack.pop()
        self._point_open = False

    def close_instance_tree(self):
        self._require_phase("close_instance_tree", _INSTANCES)
        if self._instance_stack:
            self._fail("close_instance_tree", f"{len(self._instance_stack)} instance(s) still open")
        self._phase = _DONE
        self._point_open = False

    def finish(self):
        self._require_phase("finish", _DONE)
        self._phase = _FINISHED

    def _check_att(self, call: str, att: AttValue, type_low: str):
        if not isinstance(att, AttValue):
            self._fail(call, "expected an AttValue")
        if not att.name:
            self._fail(call, "attvalue name must be non-empty")
        if not isinstance(att.kind, AttValueKind):
            self._fail(call, "bad attvalue kind")
        problem = check_att_value(att)
        if problem is not None:
            self._fail(call, f"{att.name!r}: {problem}")
        declared = self._lookup_kind(type_low, att.name.lower())
        if declared is not None and declared is not att.kind:
            self._fail(
                call,
                f"{att.name!r} is {att.kind.value} but the in-scope attdef "
                f"says {declared.value}",
            )

    def _lookup_kind(self, type_low: Optional[str], att_low: str):
        while type_low is not None:
            record = self._types[type_low]
            kind = record.att_kinds.get(att_low)
            if kind is not None:
                return kind
            type_low = record.parent_low
        return None


class Builder(ABC):
    """Abstract factory receiving tree-construction calls.

    Subclasses implement the ``_on_*`` hooks; grammar checking and point
    sealing are handled here so every back end accepts exactly the same
    call sequences.
    """

    def __init__(self):
        self._state = BuilderState()
        self._pending_point = False

    # -- public call surface ------------------------------------------------

    def open_type_tree(self, name: str, version: str):
        self._state.open_type_tree(name, version)
        self._on_open_type_tree(name, version)

    def open_type(self, name: str):
        full = self._state.open_type(name)
        self._on_open_type(name, full)

    def att_def(self, definition: AttDef):
        self._state.att_def(definition)
        self._on_att_def(definition)

    def type_att_value(self, att: AttValue):
        self._state.type_att_value(att)
        self._on_type_att_value(att)

    def close_type(self):
        self._state.close_type()
        self._on_close_type()

    def close_type_tree(self):
        self._state.close_type_tree()
        self._on_close_type_tree()

    def open_instance_tree(self, name, version, type_tree_name, type_tree_version):
        self._state.open_instance_tree(name, version, type_tree_name, type_tree_version)
        self._on_open_instance_tree(name, version, type_tree_name, type_tree_version)

    def open_instance(self, type_full_name: str):
        self._state.open_instance(type_full_name)
        self._seal_point()
        self._on_open_instance(type_full_name)

    def instance_att_value(self, att: AttValue):
        self._state.instance_att_value(att)
        self._seal_point()
        self._on_instance_att_value(att)

    def point(self, x: float, y: float, z: float):
        self._state.point(x, y, z)
        self._seal_point()
        self._on_point(float(x), float(y), float(z))
        self._pending_point = True

    def point_att_value(self, att: AttValue):
        self._state.point_att_value(att)
        self._on_point_att_value(att)

    def close_instance(self):
        self._state.close_instance()
        self._seal_point()
        self._on_close_instance()

    def close_instance_tree(self):
        self._state.close_instance_tree()
        self._on_close_instance_tree()

    def finish(self):
        self._state.finish()
        return self._on_finish()

    def _seal_point(self):
        if self._pending_point:
            self._pending_point = False
            self._on_seal_point()

    # -- back-end hooks ------------------------------------------------------

    @abstractmethod
    def _on_open_type_tree(self, name, version): ...

    @abstractmethod
    def _on_open_type(self, name, full): ...

    @abstractmethod
    def _on_att_def(self, definition): ...

    @abstractmethod
    def _on_type_att_value(self, att): ...

    @abstractmethod
    def _on_close_type(self): ...

    @abstractmethod
    def _on_close_type_tree(self): ...

    @abstractmethod
    def _on_open_instance_tree(self, name, version, type_tree_name, type_tree_version): ...

    @abstractmethod
    def _on_open_instance(self, type_full_name): ...

    @abstractmethod
    def _on_instance_att_value(self, att): ...

    @abstractmethod
    def _on_point(self, x, y, z): ...

    @abstractmethod
    def _on_point_att_value(self, att): ...

    @abstractmethod
    def _on_seal_point(self): ...

    @abstractmethod
    def _on_close_instance(self): ...

    @abstractmethod
    def _on_close_instance_tree(self): ...

    @abstractmethod
    def _on_finish(self): ...


class MemoryBuilder(Builder):
    """Builder back end producing a HepRepDocument on finish."""

    def __init__(self):
        super().__init__()
        self._tree_name = self._tree_version = None
        self._root_types = []
        self._type_frames = []  # [name, att_defs, att_values, sub_types]
        self._itree_header = None
        self._root_instances = []
        self._instance_frames = []  # [type_full, att_values, points, subs]
        self._point_frame = None  # [x, y, z, att_values]

    def _on_open_type_tree(self, name, version):
        self._tree_name, self._tree_version = name, version

    def _on_open_type(self, name, full):
        self._type_frames.append([name, [], [], []])

    def _on_att_def(self, definition):
        self._type_frames[-1][1].append(definition)

    def _on_type_att_value(self, att):
        self._type_frames[-1][2].append(att)

    def _on_close_type(self):
        name, defs, values, subs = self._type_frames.pop()
        node = HepRepType(name, defs, values, subs)
        target = self._type_frames[-1][3] if self._type_frames else self._root_types
        target.append(node)

    def _on_close_type_tree(self):
        pass

    def _on_open_instance_tree(self, name, version, type_tree_name, type_tree_version):
        self._itree_header = (name, version, type_tree_name, type_tree_version)

    def _on_open_instance(self, type_full_name):
        self._instance_frames.append([type_full_name, [], [], []])

    def _on_instance_att_value(self, att):
        self._instance_frames[-1][1].append(att)

    def _on_point(self, x, y, z):
        self._point_frame = [x, y, z, []]

    def _on_point_att_value(self, att):
        self._point_frame[3].append(att)

    def _on_seal_point(self):
        x, y, z, atts = self._point_frame
        self._instance_frames[-1][2].append(HepRepPoint(x, y, z, atts))
        self._point_frame = None

    def _on_close_instance(self):
        full, values, points, subs = self._instance_frames.pop()
        node = HepRepInstance(full, values, points, subs)
        target = self._instance_frames[-1][3] if self._instance_frames else self._root_instances
        target.append(node)

    def _on_close_instance_tree(self):
        pass

    def _on_finish(self):
        name, version, tt_name, tt_version = self._itree_header
        return HepRepDocument(
            TypeTree(self._tree_name, self._tree_version, self._root_types),
            InstanceTree(name, version, tt_name, tt_version, self._root_instances),
        )


def memory_builder() -> MemoryBuilder:
    """Builder whose finish() yields an in-memory HepRepDocument."""
    return MemoryBuilder()


# --- fillers ----------------------------------------------------------------


class Filler(ABC):
    """Experiment-side component emitting one subsystem's types and instances."""

    @abstractmethod
    def type_names(self) -> Sequence[str]:
        """Type full names this filler owns."""

    @abstractmethod
    def fill_types(self, builder: Builder):
        """Emit this filler's type subtree(s)."""

    @abstractmethod
    def fill_instances(self, builder: Builder, event, request):
        """Emit instances for ``event``, honoring the request's type selection."""


class FillerRegistry:
    """Ordered filler register; each type full name has exactly one owner."""

    def __init__(self):
        self._entries = []  # (filler, [owned full names])
        self._owners = {}  # lowercased full name -> filler

    @property
    def fillers(self) -> tuple:
        return tuple(filler for filler, _ in self._entries)

    @property
    def entries(self) -> tuple:
        return tuple(self._entries)

    def register(self, filler: Filler):
        names = list(filler.type_names())
        if not names:
            raise EmptyOwnershipError(f"{_filler_label(filler)} declares no type names")
        lows = set()
        for name in names:
            low = name.lower()
            if low in self._owners or low in lows:
                owner = self._owners.get(low, filler)
                raise DuplicateTypeOwnerError(
                    f"type {name!r} already owned by {_filler_label(owner)}"
                )
            lows.add(low)
        for name in names:
            self._owners[name.lower()] = filler
        self._entries.append((filler, names))


def register_filler(registry: FillerRegistry, filler: Filler):
    """Append a filler to the registry; registration order drives emission order."""
    registry.register(filler)


def _related(owned_low: str, requested_low: str) -> bool:
    return (
        owned_low == requested_low
        or requested_low.startswith(owned_low + "/")
        or owned_low.startswith(requested_low + "/")
    )


def fillers_for_request(registry: FillerRegistry, request) -> list:
    """Fillers relevant to the request's type selection.

    An empty selection means everything. A filler is relevant when it owns
    a requested name, or an ancestor or descendant of one (requesting
    "Track/TrackHit" invokes the owner of "Track"). Unknown names select
    nothing.
    """
    requested = [name.lower() for name in getattr(request, "type_names", ())]
    if not requested:
        return list(registry.fillers)
    out = []
    for filler, names in registry.entries:
        if any(_related(n.lower(), r) for n in names for r in requested):
            out.append(filler)
    return out


def _filler_label(filler) -> str:
    return type(filler).__name__


class _FillerGuard:
    """Builder proxy enforcing that a filler stays under its owned names."""

    def __init__(self, builder: Builder, filler: Filler, owned: Sequence[str]):
        self._builder = builder
        self._label = _filler_label(filler)
        self._owned = [n.lower() for n in owned]
        self._type_stack = []

    def _check_owned(self, call: str, full: str):
        low = full.lower()
        if not any(_related(owned, low) for owned in self._owned):
            raise BuilderStateError(
                f"{call}: {full!r} is outside this filler's owned type names"
            )

    def open_type(self, name):
        full = f"{self._type_stack[-1]}/{name}" if self._type_stack else name
        self._check_owned("open_type", full)
        self._builder.open_type(name)
        self._type_stack.append(full)

    def close_type(self):
        self._builder.close_type()
        if self._type_stack:
            self._type_stack.pop()

    def open_instance(self, type_full_name):
        self._check_owned("open_instance", type_full_name)
        self._builder.open_instance(type_full_name)

    def att_def(self, definition):
        self._builder.att_def(definition)

    def type_att_value(self, att):
        self._builder.type_att_value(att)

    def instance_att_value(self, att):
        self._builder.instance_att_value(att)

    def point(self, x, y, z):
        self._builder.point(x, y, z)

    def point_att_value(self, att):
        self._builder.point_att_value(att)

    def close_instance(self):
        self._builder.close_instance()

    def __getattr__(self, name):
        # Tree-level calls are reserved for build_event itself.
        if name in (
            "open_type_tree",
            "close_type_tree",
            "open_instance_tree",
            "close_instance_tree",
            "finish",
        ):
            raise BuilderStateError(f"{name}: fillers may not open or close trees")
        raise AttributeError(name)


def _run_filler(filler, call):
    try:
        call()
    except BuilderStateError as exc:
        raise BuilderStateError(f"filler {_filler_label(filler)}: {exc}") from exc


def build_event(registry: FillerRegistry, event, request, builder: Builder):
    """Emit one complete document for ``event`` through ``builder``.

    The type catalog is always complete (every registered filler's
    fill_types runs) so clients can discover all types; instances are
    emitted only by the fillers relevant to the request.
    """
    builder.open_type_tree(TYPE_TREE_NAME, TYPE_TREE_VERSION)
    for filler, names in registry.entries:
        guard = _FillerGuard(builder, filler, names)
        _run_filler(filler, lambda: filler.fill_types(guard))
        if builder._state.type_depth != 0:
            raise BuilderStateError(
                f"filler {_filler_label(filler)}: left {builder._state.type_depth} type(s) open"
            )
    builder.close_type_tree()
    event_id = getattr(event, "event_id", 0)
    builder.open_instance_tree(
        f"event-{event_id}", INSTANCE_TREE_VERSION, TYPE_TREE_NAME, TYPE_TREE_VERSION
    )
    for filler in fillers_for_request(registry, request):
        names = dict(registry.entries)[filler]
        guard = _FillerGuard(builder, filler, names)
        _run_filler(filler, lambda: filler.fill_instances(guard, event, request))
        if builder._state.instance_depth != 0:
            raise BuilderStateError(
                f"filler {_filler_label(filler)}: left "
                f"{builder._state.instance_depth} instance(s) open"
            )
    builder.close_instance_tree()
    return builder.finish()


def build_type_catalog(registry: FillerRegistry, builder: Builder):
    """Emit the complete type catalog with an empty instance tree."""
    builder.open_type_tree(TYPE_TREE_NAME, TYPE_TREE_VERSION)
    for filler, names in registry.entries:
        guard = _FillerGuard(builder, filler, names)
        _run_filler(filler, lambda: filler.fill_types(guard))
    builder.close_type_tree()
    builder.open_instance_tree("catalog", INSTANCE_TREE_VERSION, TYPE_TREE_NAME, TYPE_TREE_VERSION)
    builder.close_instance_tree()
    return builder.finish()
