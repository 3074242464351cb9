"""Standard fillers: geometry volumes, tracks with hits, calorimeter, ACD.

Each filler owns its type full names, declares the attribute definitions
its instances rely on (including the draw defaults it sets and the
``origPath`` association the query layer fills in), and emits instances
only for types the request actually wants.
"""

from __future__ import annotations

from ..builder import Filler
from ..model import AttDef, AttributeCategory, AttValue, AttValueKind, draw_definition
from ..query import ORIG_PATH, request_wants_type
from .detector import DetectorModel, N_CRYSTALS, N_TOWERS

_ORIG_PATH_DEF = AttDef(
    ORIG_PATH,
    AttributeCategory.ASSOCIATION,
    AttValueKind.TEXT,
    "Path of this instance in the tree it was filtered from",
)

REMOVE_HIT_ACTION = "removeHitAndRefit"


def _draw_defs(*names):
    return [draw_definition(name) for name in names]


def _emit_box(builder, corners):
    for x, y, z in corners:
        builder.point(x, y, z)


class GeometryFiller(Filler):
    """One prism instance per tower, crystal, and tile volume."""

    def __init__(self, detector: DetectorModel = None):
        self.detector = detector or DetectorModel()

    def type_names(self):
        return ["Geometry"]

    def fill_types(self, builder):
        builder.open_type("Geometry")
        for d in _draw_defs("DrawAs", "Color", "LineWidth", "Visibility"):
            builder.att_def(d)
        builder.att_def(
            AttDef("Volume", AttributeCategory.PHYSICS, AttValueKind.TEXT, "Volume label")
        )
        builder.att_def(_ORIG_PATH_DEF)
        builder.type_att_value(AttValue.text("DrawAs", "Prism"))
        builder.type_att_value(AttValue.color("Color", 0.55, 0.55, 0.55))
        builder.type_att_value(AttValue.real("LineWidth", 1.0))
        builder.type_att_value(AttValue.boolean("Visibility", True))
        builder.close_type()

    def fill_instances(self, builder, event, request):
        if not request_wants_type(request, "Geometry"):
            return
        det = self.detector
        for tower in range(N_TOWERS):
            self._volume(builder, f"Tower{tower:02d}", det.tower_box(tower))
        for crystal in range(N_CRYSTALS):
            self._volume(builder, f"Crystal{crystal:03d}", det.crystal_box(crystal))
        for tower in range(N_TOWERS):
            self._volume(builder, f"Tile{tower:02d}", det.tile_box(tower))

    def _volume(self, builder, label, corners):
        builder.open_instance("Geometry")
        builder.instance_att_value(AttValue.text("Volume", label))
        _emit_box(builder, corners)
        builder.close_instance()


class TrackFiller(Filler):
    """Tracks as polylines through their measured hits, hits as point markers."""

    def type_names(self):
        return ["Track", "Track/TrackHit"]

    def fill_types(self, builder):
        builder.open_type("Track")
        for d in _draw_defs("DrawAs", "Color", "LineWidth", "Visibility"):
            builder.att_def(d)
        builder.att_def(
            AttDef(
                "Momentum",
                AttributeCategory.PHYSICS,
                AttValueKind.REAL,
                "Track momentum",
                "MeV",
            )
        )
        builder.att_def(
            AttDef("ParticleID", AttributeCategory.PHYSICS, AttValueKind.TEXT, "Particle species")
        )
        builder.att_def(
            AttDef(
                "Chi2",
                AttributeCategory.PHYSICS,
                AttValueKind.REAL,
                "Summed squared fit residuals",
            )
        )
        builder.att_def(
            AttDef(
                "TrackIndex",
                AttributeCategory.ASSOCIATION,
                AttValueKind.INTEGER,
                "Index of the track in the event store",
            )
        )
        builder.att_def(
            AttDef(
                REMOVE_HIT_ACTION,
                AttributeCategory.PICK_ACTION,
                AttValueKind.TEXT,
                "Remove one hit and refit the track",
            )
        )
        builder.att_def(_ORIG_PATH_DEF)
        builder.type_att_value(AttValue.text("DrawAs", "Line"))
        builder.type_att_value(AttValue.color("Color", 0.0, 0.9, 0.9))
        builder.type_att_value(AttValue.real("LineWidth", 2.0))
        builder.type_att_value(AttValue.text(REMOVE_HIT_ACTION, "hitIndex:int"))

        builder.open_type("TrackHit")
        for d in _draw_defs("DrawAs", "Color", "MarkerSize"):
            builder.att_def(d)
        builder.att_def(
            AttDef(
                "HitIndex",
                AttributeCategory.ASSOCIATION,
                AttValueKind.INTEGER,
                "Index of the hit on its track",
            )
        )
        builder.type_att_value(AttValue.text("DrawAs", "Point"))
        builder.type_att_value(AttValue.color("Color", 1.0, 0.85, 0.1))
        builder.type_att_value(AttValue.real("MarkerSize", 4.0))
        builder.close_type()
        builder.close_type()

    def fill_instances(self, builder, event, request):
        if not request_wants_type(request, "Track"):
            return
        emit_hits = request_wants_type(request, "Track/TrackHit")
        for index, track in enumerate(event.tracks):
            builder.open_instance("Track")
            builder.instance_att_value(AttValue.real("Momentum", track.energy))
            builder.instance_att_value(AttValue.text("ParticleID", track.particle_id))
            builder.instance_att_value(AttValue.real("Chi2", track.fit.chi2))
            builder.instance_att_value(AttValue.integer("TrackIndex", index))
            for hit in track.hits:  # stored in increasing z: the swim polyline
                builder.point(hit.x, hit.y, hit.z)
            if emit_hits:
                for hit_index, hit in enumerate(track.hits):
                    builder.open_instance("Track/TrackHit")
                    builder.instance_att_value(AttValue.integer("HitIndex", hit_index))
                    builder.point(hit.x, hit.y, hit.z)
                    builder.close_instance()
            builder.close_instance()


class CalFiller(Filler):
    """One prism per crystal that took a deposit, sized like the real crystal."""

    def __init__(self, detector: DetectorModel = None):
        self.detector = detector or DetectorModel()

    def type_names(self):
        return ["CalCrystal"]

    def fill_types(self, builder):
        builder.open_type("CalCrystal")
        for d in _draw_defs("DrawAs", "Color", "LineWidth", "Visibility"):
            builder.att_def(d)
        builder.att_def(
            AttDef(
                "Energy",
                AttributeCategory.PHYSICS,
                AttValueKind.REAL,
                "Deposited energy",
                "MeV",
            )
        )
        builder.att_def(
            AttDef(
                "CrystalID",
                AttributeCategory.ASSOCIATION,
                AttValueKind.INTEGER,
                "Crystal identifier",
            )
        )
        builder.att_def(_ORIG_PATH_DEF)
        builder.type_att_value(AttValue.text("DrawAs", "Prism"))
        builder.type_att_value(AttValue.color("Color", 1.0, 0.55, 0.1))
        builder.close_type()

    def fill_instances(self, builder, event, request):
        if not request_wants_type(request, "CalCrystal"):
            return
        for deposit in event.cal_deposits:
            builder.open_instance("CalCrystal")
            builder.instance_att_value(AttValue.real("Energy", deposit.energy))
            builder.instance_att_value(AttValue.integer("CrystalID", deposit.crystal_id))
            _emit_box(builder, self.detector.crystal_box(deposit.crystal_id))
            builder.close_instance()


class AcdFiller(Filler):
    """One 4-corner polygon per anti-coincidence tile that fired."""

    def __init__(self, detector: DetectorModel = None):
        self.detector = detector or DetectorModel()

    def type_names(self):
        return ["AcdTile"]

    def fill_types(self, builder):
        builder.open_type("AcdTile")
        for d in _draw_defs("DrawAs", "Color", "LineWidth", "Visibility"):
            builder.att_def(d)
        builder.att_def(
            AttDef(
                "Energy",
                AttributeCategory.PHYSICS,
                AttValueKind.REAL,
                "Deposited energy",
                "MeV",
            )
        )
        builder.att_def(
            AttDef(
                "TileID",
                AttributeCategory.ASSOCIATION,
                AttValueKind.INTEGER,
                "Tile identifier",
            )
        )
        builder.att_def(_ORIG_PATH_DEF)
        builder.type_att_value(AttValue.text("DrawAs", "Polygon"))
        builder.type_att_value(AttValue.color("Color", 0.9, 0.15, 0.15))
        builder.close_type()

    def fill_instances(self, builder, event, request):
        if not request_wants_type(request, "AcdTile"):
            return
        for hit in event.acd_hits:
            builder.open_instance("AcdTile")
            builder.instance_att_value(AttValue.real("Energy", hit.energy))
            builder.instance_att_value(AttValue.integer("TileID", hit.tile_id))
            for x, y, z in self.detector.tile_quad(hit.tile_id):
                builder.point(x, y, z)
            builder.close_instance()


def standard_fillers(detector: DetectorModel = None) -> list:
    """The four standard fillers in registration (and emission) order."""
    detector = detector or DetectorModel()
    return [
        GeometryFiller(detector),
        TrackFiller(),
        CalFiller(detector),
        AcdFiller(detector),
    ]
