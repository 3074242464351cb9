"""Server-side session: current event, drivable event loop, pick actions,
algorithms, and per-request document builds.

A fresh session holds no event; the first operation that needs one
materializes event 1, and next_event then advances 2, 3, ... Documents
are built lazily per request scope (only the fillers relevant to the
requested types run) and cached until the event mutates.

A session is single-writer: callers (the wire server) serialize mutation.
"""

from __future__ import annotations

import secrets
from dataclasses import dataclass, field
from typing import Optional

from ..builder import FillerRegistry, build_event, build_type_catalog, memory_builder
from ..errors import (
    ActionArgError,
    ActionPreconditionError,
    BadTargetError,
    UnknownActionError,
    UnknownAlgorithmError,
)
from ..model import HepRepDocument, TypeTree, instance_at, resolve_attribute
from ..query import InstanceRequest
from .data import Event, energy_total
from .fillers import REMOVE_HIT_ACTION, standard_fillers
from .fitting import fit_track
from .generate import GeneratorConfig, generate_event


@dataclass(frozen=True)
class ActionInvocation:
    """A pick action fired from a client: name, target instance, arguments."""

    action_name: str
    target_path: str
    args: dict = field(default_factory=dict)


@dataclass(frozen=True)
class AlgorithmReport:
    name: str
    status: str
    summary: str


MIN_HITS_AFTER_REMOVAL = 2


def _remove_hit_and_refit(session: "Session", invocation: ActionInvocation, doc: HepRepDocument):
    instance = instance_at(doc, invocation.target_path)  # InvalidPathError propagates
    if instance.type_full_name.lower() != "track":
        raise BadTargetError(
            f"path {invocation.target_path!r} addresses {instance.type_full_name!r}, not a Track"
        )
    index_att = resolve_attribute(doc, invocation.target_path, "TrackIndex")
    if index_att is None:
        raise BadTargetError(f"instance at {invocation.target_path!r} carries no TrackIndex")
    track = session.current_event.tracks[index_att.value]

    if "hitIndex" not in invocation.args:
        raise ActionArgError("missing argument hitIndex")
    hit_index = invocation.args["hitIndex"]
    if not isinstance(hit_index, int) or isinstance(hit_index, bool):
        raise ActionArgError(f"hitIndex must be an integer, got {hit_index!r}")
    if not 0 <= hit_index < len(track.hits):
        raise ActionArgError(
            f"hitIndex {hit_index} out of range for a {len(track.hits)}-hit track"
        )
    if len(track.hits) - 1 < MIN_HITS_AFTER_REMOVAL:
        raise ActionPreconditionError("removing a hit would leave fewer than 2 hits")

    remaining = [h for i, h in enumerate(track.hits) if i != hit_index]
    new_fit = fit_track(remaining)  # computed before any mutation
    track.hits = remaining
    track.fit = new_fit


_ACTIONS = {
    REMOVE_HIT_ACTION: ({"hitIndex": "int"}, _remove_hit_and_refit),
}


def _refit_all(session: "Session") -> str:
    event = session.current_event
    for track in event.tracks:
        track.fit = fit_track(track.hits)
    return f"refitted {len(event.tracks)} track(s)"


def _summarize(session: "Session") -> str:
    event = session.current_event
    return (
        f"eventId={event.event_id} nTracks={len(event.tracks)} "
        f"nCalDeposits={len(event.cal_deposits)} nAcdHits={len(event.acd_hits)} "
        f"energySum={energy_total(event)} gammaEnergy={event.gamma_energy}"
    )


_ALGORITHMS = {
    "refitAll": (_refit_all, True),  # (handler, mutates event)
    "summarize": (_summarize, False),
}


class Session:
    """Holds the current event, the filler registry, and document caches."""

    def __init__(
        self,
        seed: Optional[int] = None,
        registry: Optional[FillerRegistry] = None,
        config: GeneratorConfig = GeneratorConfig(),
    ):
        if seed is None:
            seed = secrets.randbits(48)
        self.seed = seed
        self.config = config
        if registry is None:
            registry = FillerRegistry()
            for filler in standard_fillers():
                registry.register(filler)
        self.registry = registry
        self.event_id = 0
        self._event: Optional[Event] = None
        self._documents = {}
        self._type_tree: Optional[TypeTree] = None

    # -- event loop -----------------------------------------------------------

    @property
    def current_event(self) -> Event:
        self.ensure_event()
        return self._event

    def ensure_event(self):
        if self._event is None:
            self.event_id = 1
            self._generate()

    def next_event(self) -> int:
        """Advance the loop; a fresh session's first event is 1."""
        self.event_id = 1 if self._event is None else self.event_id + 1
        self._generate()
        return self.event_id

    def _generate(self):
        self._event = generate_event(self.seed, self.event_id, self.config)
        self._documents.clear()

    # -- documents ------------------------------------------------------------

    def document_for(self, request: Optional[InstanceRequest] = None) -> HepRepDocument:
        """Build (or reuse) the document scoped to the request's type selection."""
        self.ensure_event()
        if request is None:
            request = InstanceRequest()
        scope = frozenset(n.lower() for n in request.type_names)
        cached = self._documents.get(scope)
        if cached is not None:
            return cached
        scoped = InstanceRequest(type_names=tuple(request.type_names))
        doc = build_event(self.registry, self._event, scoped, memory_builder())
        self._documents[scope] = doc
        return doc

    def type_tree(self) -> TypeTree:
        """The complete type catalog; no filler fill_instances runs for this."""
        self.ensure_event()
        if self._type_tree is None:
            doc = build_type_catalog(self.registry, memory_builder())
            self._type_tree = doc.type_tree
        return self._type_tree

    # -- actions and algorithms -----------------------------------------------

    def apply_action(self, invocation: ActionInvocation, context_request=None):
        """Apply a pick action to the current event, transactionally.

        The target path is resolved against the document scoped to
        ``context_request`` (the scope the caller's origPath came from).
        """
        self.ensure_event()
        entry = _ACTIONS.get(invocation.action_name)
        if entry is None:
            raise UnknownActionError(f"unknown action {invocation.action_name!r}")
        _, handler = entry
        doc = self.document_for(context_request)
        handler(self, invocation, doc)
        self._documents.clear()

    def run_algorithm(self, name: str) -> AlgorithmReport:
        self.ensure_event()
        entry = _ALGORITHMS.get(name)
        if entry is None:
            raise UnknownAlgorithmError(f"unknown algorithm {name!r}")
        handler, mutates = entry
        summary = handler(self)
        if mutates:
            self._documents.clear()
        return AlgorithmReport(name, "ok", summary)

    def list_actions(self) -> list:
        return [
            {"name": name, "args": dict(schema)} for name, (schema, _) in _ACTIONS.items()
        ]

    def list_algorithms(self) -> list:
        return list(_ALGORITHMS)
