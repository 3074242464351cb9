"""Per-event transient data: what fillers read and pick actions mutate."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Optional


@dataclass
class TrackHit:
    """Measured crossing of a tracker plane."""

    z: float
    x: float
    y: float


@dataclass
class TrackFit:
    """Independent least-squares lines x(z) and y(z); chi2 is their summed
    squared residuals (unweighted)."""

    slope_x: float
    intercept_x: float
    slope_y: float
    intercept_y: float
    chi2: float


@dataclass
class McTrack:
    particle_id: str  # "e-" or "e+"
    energy: float  # MeV, after deposits are subtracted
    direction: tuple  # unit 3-vector
    hits: list  # TrackHit, ordered by increasing z, >= 2 entries
    fit: Optional[TrackFit] = None


class CalDeposit(NamedTuple):
    crystal_id: int
    energy: float


class AcdHit(NamedTuple):
    tile_id: int
    energy: float


class OutlierTag(NamedTuple):
    track_index: int
    hit_index: int


@dataclass
class Event:
    """One generated event; energies partition gamma_energy exactly."""

    event_id: int
    gamma_energy: float
    vertex: tuple
    tracks: list = field(default_factory=list)
    cal_deposits: list = field(default_factory=list)
    acd_hits: list = field(default_factory=list)
    outlier: Optional[OutlierTag] = None  # generator bookkeeping, not serialized


def energy_total(event: Event) -> float:
    """The bookkeeping sum; generate_event defines gamma_energy as exactly this."""
    return (
        sum(t.energy for t in event.tracks)
        + sum(d.energy for d in event.cal_deposits)
        + sum(a.energy for a in event.acd_hits)
    )
