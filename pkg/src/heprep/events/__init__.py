"""Toy experiment: detector model, event generation, fit, fillers, session."""

from .data import AcdHit, CalDeposit, Event, McTrack, TrackFit, TrackHit, energy_total
from .detector import DetectorModel
from .fitting import fit_track
from .generate import GeneratorConfig, generate_event
from .fillers import AcdFiller, CalFiller, GeometryFiller, TrackFiller, standard_fillers
from .session import ActionInvocation, AlgorithmReport, Session

__all__ = [
    "AcdHit",
    "ActionInvocation",
    "AcdFiller",
    "AlgorithmReport",
    "CalDeposit",
    "CalFiller",
    "DetectorModel",
    "Event",
    "GeneratorConfig",
    "GeometryFiller",
    "McTrack",
    "Session",
    "TrackFiller",
    "TrackFit",
    "TrackHit",
    "energy_total",
    "fit_track",
    "generate_event",
    "standard_fillers",
]
