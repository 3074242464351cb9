import io
import random

import pytest

from heprep.builder import (
    FillerRegistry,
    Filler,
    build_event,
    build_type_catalog,
    fillers_for_request,
    memory_builder,
    register_filler,
)
from heprep.errors import BuilderStateError, DuplicateTypeOwnerError, EmptyOwnershipError
from heprep.model import AttDef, AttributeCategory, AttValue, AttValueKind, validate_document
from heprep.query import InstanceRequest
from heprep.xmlio import xml_builder

from gen import make_document, emit_document


def minimal_sequence(b):
    b.open_type_tree("t", "1")
    b.open_type("Track")
    b.close_type()
    b.close_type_tree()
    b.open_instance_tree("e", "1", "t", "1")
    b.open_instance("Track")
    b.point(0.0, 0.0, 0.0)
    b.point(1.0, 1.0, 1.0)
    b.close_instance()
    b.close_instance_tree()
    return b.finish()


class TestMemoryBuilder:
    def test_minimal_document(self):
        doc = minimal_sequence(memory_builder())
        assert len(doc.type_tree.root_types) == 1
        assert len(doc.instance_tree.root_instances) == 1
        assert len(doc.instance_tree.root_instances[0].points) == 2
        assert validate_document(doc) == []

    def test_open_instance_before_tree(self):
        b = memory_builder()
        b.open_type_tree("t", "1")
        b.open_type("Track")
        b.close_type()
        b.close_type_tree()
        with pytest.raises(BuilderStateError, match="open_instance"):
            b.open_instance("Track")

    def test_finish_before_close(self):
        b = memory_builder()
        b.open_type_tree("t", "1")
        b.open_type("Track")
        b.close_type()
        b.close_type_tree()
        b.open_instance_tree("e", "1", "t", "1")
        with pytest.raises(BuilderStateError, match="finish"):
            b.finish()

    @pytest.mark.parametrize("seed", range(25))
    def test_random_emissions_validate_clean(self, seed):
        rng = random.Random(seed)
        doc = make_document(rng)
        built = emit_document(memory_builder(), doc, random.Random(seed + 1))
        assert built == doc
        assert validate_document(built) == []


# --- grammar soundness: enumerate single-step violations per state ---------

ATT_DEF = AttDef("Depth", AttributeCategory.PHYSICS, AttValueKind.REAL)
ATT_VAL = AttValue.real("Depth", 1.5)

CALLS = {
    "open_type_tree": lambda b: b.open_type_tree("t", "1"),
    "open_type": lambda b: b.open_type("Fresh"),
    "att_def": lambda b: b.att_def(ATT_DEF),
    "type_att_value": lambda b: b.type_att_value(ATT_VAL),
    "close_type": lambda b: b.close_type(),
    "close_type_tree": lambda b: b.close_type_tree(),
    "open_instance_tree": lambda b: b.open_instance_tree("e", "1", "t", "1"),
    "open_instance_root": lambda b: b.open_instance("T"),
    "open_instance_sub": lambda b: b.open_instance("T/S"),
    "instance_att_value": lambda b: b.instance_att_value(ATT_VAL),
    "point": lambda b: b.point(0.0, 0.0, 0.0),
    "point_att_value": lambda b: b.point_att_value(ATT_VAL),
    "close_instance": lambda b: b.close_instance(),
    "close_instance_tree": lambda b: b.close_instance_tree(),
    "finish": lambda b: b.finish(),
}


def _types_section(b):
    b.open_type_tree("t", "1")
    b.open_type("T")
    b.att_def(ATT_DEF)
    b.open_type("S")
    b.close_type()
    b.close_type()


def _to_instances(b):
    _types_section(b)
    b.close_type_tree()
    b.open_instance_tree("e", "1", "t", "1")


STATES = {
    "start": (lambda b: None, {"open_type_tree"}),
    "type_tree_top": (
        lambda b: b.open_type_tree("t", "1"),
        {"open_type", "close_type_tree"},
    ),
    "type_open": (
        lambda b: (b.open_type_tree("t", "1"), b.open_type("T")),
        {"open_type", "att_def", "type_att_value", "close_type"},
    ),
    "between_trees": (
        lambda b: (_types_section(b), b.close_type_tree()),
        {"open_instance_tree"},
    ),
    "instance_tree_top": (
        _to_instances,
        # Root instances may be of any type, nested ones included; the
        # subtype rule constrains only nesting below a parent instance.
        {"open_instance_root", "open_instance_sub", "close_instance_tree"},
    ),
    "instance_open": (
        lambda b: (_to_instances(b), b.open_instance("T")),
        {"open_instance_sub", "instance_att_value", "point", "close_instance"},
    ),
    "point_open": (
        lambda b: (_to_instances(b), b.open_instance("T"), b.point(0.0, 0.0, 0.0)),
        {
            "open_instance_sub",
            "instance_att_value",
            "point",
            "point_att_value",
            "close_instance",
        },
    ),
    "instances_closed": (
        lambda b: (_to_instances(b), b.close_instance_tree()),
        {"finish"},
    ),
    "finished": (
        lambda b: (_to_instances(b), b.close_instance_tree(), b.finish()),
        set(),
    ),
}


@pytest.mark.parametrize("backend", ["memory", "xml"])
@pytest.mark.parametrize("state", sorted(STATES))
def test_grammar_single_step_soundness(backend, state):
    setup, legal = STATES[state]
    for call_name, call in CALLS.items():
        if backend == "memory":
            b = memory_builder()
        else:
            b = xml_builder(io.BytesIO())
        setup(b)
        if call_name in legal:
            call(b)  # must not raise
        else:
            with pytest.raises(BuilderStateError):
                call(b)


class TestSemanticRejections:
    def _instances(self):
        b = memory_builder()
        _to_instances(b)
        return b

    def test_unknown_instance_type(self):
        b = self._instances()
        with pytest.raises(BuilderStateError, match="unknown type"):
            b.open_instance("Ghost")

    def test_non_subtype_nesting(self):
        b = self._instances()
        b.open_instance("T")
        with pytest.raises(BuilderStateError, match="not a subtype"):
            b.open_instance("T")

    def test_duplicate_type_name_case_insensitive(self):
        b = memory_builder()
        b.open_type_tree("t", "1")
        b.open_type("T")
        b.close_type()
        with pytest.raises(BuilderStateError, match="duplicate type"):
            b.open_type("t")

    def test_duplicate_att_def(self):
        b = memory_builder()
        b.open_type_tree("t", "1")
        b.open_type("T")
        b.att_def(ATT_DEF)
        with pytest.raises(BuilderStateError, match="duplicate attdef"):
            b.att_def(AttDef("DEPTH", AttributeCategory.DRAW, AttValueKind.TEXT))

    def test_kind_mismatch_against_attdef(self):
        b = memory_builder()
        b.open_type_tree("t", "1")
        b.open_type("T")
        b.att_def(ATT_DEF)
        with pytest.raises(BuilderStateError, match="in-scope attdef"):
            b.type_att_value(AttValue.text("Depth", "deep"))

    def test_kind_mismatch_against_ancestor_attdef(self):
        b = self._instances()
        b.open_instance("T")
        b.open_instance("T/S")
        with pytest.raises(BuilderStateError, match="in-scope attdef"):
            b.instance_att_value(AttValue.text("Depth", "deep"))

    def test_nonfinite_point(self):
        b = self._instances()
        b.open_instance("T")
        with pytest.raises(BuilderStateError, match="finite"):
            b.point(float("inf"), 0.0, 0.0)

    def test_color_out_of_range(self):
        b = self._instances()
        b.open_instance("T")
        with pytest.raises(BuilderStateError, match="color"):
            b.instance_att_value(AttValue.color("Shade", 1.5, 0.0, 0.0))

    def test_int64_overflow(self):
        b = self._instances()
        b.open_instance("T")
        with pytest.raises(BuilderStateError, match="64-bit"):
            b.instance_att_value(AttValue.integer("Count", 2**63))

    def test_tree_identity_mismatch(self):
        b = memory_builder()
        _types_section(b)
        b.close_type_tree()
        with pytest.raises(BuilderStateError, match="open_instance_tree"):
            b.open_instance_tree("e", "1", "t", "2")

    def test_slash_in_type_name(self):
        b = memory_builder()
        b.open_type_tree("t", "1")
        with pytest.raises(BuilderStateError, match="'/'"):
            b.open_type("a/b")


# --- filler registry ---------------------------------------------------------


class StubFiller(Filler):
    def __init__(self, names, instances_per_event=1):
        self._names = list(names)
        self.instances_per_event = instances_per_event
        self.fill_instances_calls = 0

    def type_names(self):
        return self._names

    def fill_types(self, builder):
        for name in self._names:
            if "/" in name:
                continue  # subtypes are nested under their root below
            builder.open_type(name)
            for sub in self._names:
                if sub.startswith(name + "/"):
                    builder.open_type(sub.split("/", 1)[1])
                    builder.close_type()
            builder.close_type()

    def fill_instances(self, builder, event, request):
        self.fill_instances_calls += 1
        for _ in range(self.instances_per_event):
            builder.open_instance(self._names[0])
            builder.point(0.0, 0.0, 0.0)
            builder.close_instance()


class MisbehavingFiller(StubFiller):
    def fill_instances(self, builder, event, request):
        builder.point(1.0, 2.0, 3.0)  # outside any instance


class TestRegistry:
    def test_registration_order_preserved(self):
        registry = FillerRegistry()
        track, cal = StubFiller(["Track"]), StubFiller(["CalCrystal"])
        register_filler(registry, track)
        register_filler(registry, cal)
        assert registry.fillers == (track, cal)

    def test_duplicate_owner_rejected(self):
        registry = FillerRegistry()
        register_filler(registry, StubFiller(["Track"]))
        with pytest.raises(DuplicateTypeOwnerError):
            register_filler(registry, StubFiller(["track"]))

    def test_empty_ownership_rejected(self):
        with pytest.raises(EmptyOwnershipError):
            register_filler(FillerRegistry(), StubFiller([]))

    def _registry(self):
        registry = FillerRegistry()
        self.track = StubFiller(["Track", "Track/TrackHit"])
        self.cal = StubFiller(["CalCrystal"])
        register_filler(registry, self.track)
        register_filler(registry, self.cal)
        return registry

    def test_request_selects_owner(self):
        registry = self._registry()
        assert fillers_for_request(registry, InstanceRequest(type_names=("Track",))) == [
            self.track
        ]

    def test_empty_request_selects_all(self):
        registry = self._registry()
        assert fillers_for_request(registry, InstanceRequest()) == [self.track, self.cal]

    def test_unknown_name_selects_nothing(self):
        registry = self._registry()
        assert fillers_for_request(registry, InstanceRequest(type_names=("Foo",))) == []

    def test_descendant_name_selects_ancestor_owner(self):
        registry = FillerRegistry()
        track = StubFiller(["Track"])
        register_filler(registry, track)
        selected = fillers_for_request(
            registry, InstanceRequest(type_names=("Track/TrackHit",))
        )
        assert selected == [track]


class TestBuildEvent:
    def _registry(self):
        registry = FillerRegistry()
        self.track = StubFiller(["Track"], instances_per_event=2)
        self.cal = StubFiller(["CalCrystal"], instances_per_event=3)
        register_filler(registry, self.track)
        register_filler(registry, self.cal)
        return registry

    def test_types_complete_instances_filtered(self):
        registry = self._registry()
        doc = build_event(
            registry, object(), InstanceRequest(type_names=("Track",)), memory_builder()
        )
        names = {t.name for t in doc.type_tree.root_types}
        assert names == {"Track", "CalCrystal"}
        assert [i.type_full_name for i in doc.instance_tree.root_instances] == ["Track"] * 2
        assert self.track.fill_instances_calls == 1
        assert self.cal.fill_instances_calls == 0

    def test_empty_request_full_content(self):
        registry = self._registry()
        doc = build_event(registry, object(), InstanceRequest(), memory_builder())
        assert len(doc.instance_tree.root_instances) == 5
        assert validate_document(doc) == []

    def test_misbehaving_filler_is_named(self):
        registry = FillerRegistry()
        register_filler(registry, MisbehavingFiller(["Track"]))
        with pytest.raises(BuilderStateError, match="MisbehavingFiller"):
            build_event(registry, object(), InstanceRequest(), memory_builder())

    def test_filler_cannot_emit_outside_ownership(self):
        class Trespasser(StubFiller):
            def fill_types(self, builder):
                builder.open_type("Elsewhere")
                builder.close_type()

        registry = FillerRegistry()
        register_filler(registry, Trespasser(["Track"]))
        with pytest.raises(BuilderStateError, match="owned type names"):
            build_event(registry, object(), InstanceRequest(), memory_builder())

    def test_filler_isolation(self):
        registry_full = self._registry()
        full = build_event(registry_full, object(), InstanceRequest(), memory_builder())

        registry_small = FillerRegistry()
        register_filler(registry_small, StubFiller(["Track"], instances_per_event=2))
        small = build_event(registry_small, object(), InstanceRequest(), memory_builder())

        full_tracks = [
            i for i in full.instance_tree.root_instances if i.type_full_name == "Track"
        ]
        assert full_tracks == list(small.instance_tree.root_instances)
        assert {t.name for t in full.type_tree.root_types} - {
            t.name for t in small.type_tree.root_types
        } == {"CalCrystal"}

    def test_type_catalog_builder(self):
        registry = self._registry()
        doc = build_type_catalog(registry, memory_builder())
        assert {t.name for t in doc.type_tree.root_types} == {"Track", "CalCrystal"}
        assert doc.instance_tree.root_instances == ()
        assert self.track.fill_instances_calls == 0
        assert self.cal.fill_instances_calls == 0
