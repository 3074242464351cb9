"""Method dispatch: wire params in, session calls, JSON results out.

Params are validated by pydantic models with unknown fields forbidden, so
protocol drift surfaces as BAD_PARAMS instead of being ignored silently.
"""

from __future__ import annotations

import logging
from typing import Any, Optional

from pydantic import BaseModel, ConfigDict, ValidationError

from ..errors import (
    ActionArgError,
    ActionPreconditionError,
    BadRequestError,
    BadTargetError,
    InvalidPathError,
    UnknownActionError,
    UnknownAlgorithmError,
)
from ..query import (
    InstanceRequest,
    get_instance_tree_top,
    get_instances,
    get_instances_after_action,
    parse_predicate,
)
from ..events.session import ActionInvocation, Session
from . import jsoncodec
from .frames import (
    ERR_ACTION_FAILED,
    ERR_BAD_PARAMS,
    ERR_INTERNAL,
    ERR_INVALID_PATH,
    ERR_PARSE,
    ERR_UNKNOWN_ACTION,
    ERR_UNKNOWN_METHOD,
    PROTOCOL_VERSION,
    WireError,
    _IdentifiedWireError,
    decode_request,
    error_frame,
    result_frame,
)

log = logging.getLogger("heprep.wire")


class _Params(BaseModel):
    model_config = ConfigDict(extra="forbid")


class EmptyParams(_Params):
    pass


class RequestParams(_Params):
    typeNames: list[str] = []
    attIncludes: list[str] = []
    attExcludes: list[str] = []
    predicates: list[str] = []
    maxDepth: Optional[int] = None

    def to_request(self) -> InstanceRequest:
        try:
            predicates = tuple(parse_predicate(p) for p in self.predicates)
        except BadRequestError as exc:
            raise WireError(ERR_BAD_PARAMS, str(exc)) from exc
        return InstanceRequest(
            type_names=tuple(self.typeNames),
            att_includes=tuple(self.attIncludes),
            att_excludes=tuple(self.attExcludes),
            predicates=predicates,
            max_depth=self.maxDepth,
        )


class ActionSpec(_Params):
    name: str
    targetPath: str
    args: dict[str, Any] = {}


class AfterActionParams(RequestParams):
    action: ActionSpec


class RunAlgorithmParams(_Params):
    name: str


class Dispatcher:
    """Routes wire methods to one shared session."""

    def __init__(self, session: Session):
        self.session = session

    MUTATING = frozenset(
        {"control.nextEvent", "control.runAlgorithm", "heprep.getInstancesAfterAction"}
    )

    def is_mutating(self, method: str) -> bool:
        return method in self.MUTATING

    def handle_line(self, line) -> dict:
        """Decode one request line and produce a response frame (never raises)."""
        try:
            request_id, method, params = decode_request(line)
        except _IdentifiedWireError as exc:
            return error_frame(exc.request_id, exc.code, exc.message)
        except WireError as exc:
            return error_frame(None, exc.code, exc.message)
        try:
            return result_frame(request_id, self.handle(method, params))
        except WireError as exc:
            return error_frame(request_id, exc.code, exc.message)

    def handle(self, method: str, params: dict) -> dict:
        """Run one method; raises WireError with the mapped protocol code."""
        handler = self._METHODS.get(method)
        if handler is None:
            raise WireError(ERR_UNKNOWN_METHOD, f"unknown method {method!r}")
        try:
            return handler(self, params)
        except WireError:
            raise
        except ValidationError as exc:
            raise WireError(ERR_BAD_PARAMS, _validation_message(exc)) from exc
        except BadRequestError as exc:
            raise WireError(ERR_BAD_PARAMS, str(exc)) from exc
        except InvalidPathError as exc:
            raise WireError(ERR_INVALID_PATH, str(exc)) from exc
        except UnknownActionError as exc:
            raise WireError(ERR_UNKNOWN_ACTION, str(exc)) from exc
        except (
            BadTargetError,
            ActionArgError,
            ActionPreconditionError,
            UnknownAlgorithmError,
        ) as exc:
            raise WireError(ERR_ACTION_FAILED, str(exc)) from exc
        except Exception as exc:  # pragma: no cover - defensive
            log.exception("internal error in %s", method)
            raise WireError(ERR_INTERNAL, f"internal error: {exc}") from exc

    # -- methods ---------------------------------------------------------------

    def _get_type_tree(self, params):
        EmptyParams(**params)
        return jsoncodec.type_tree_to_json(self.session.type_tree())

    def _get_instance_tree_top(self, params):
        request = RequestParams(**params).to_request()
        doc = self.session.document_for(request)
        return jsoncodec.tree_top_to_json(get_instance_tree_top(doc))

    def _get_instances(self, params):
        request = RequestParams(**params).to_request()
        doc = self.session.document_for(request)
        return jsoncodec.instance_tree_to_json(get_instances(doc, request))

    def _get_instances_after_action(self, params):
        parsed = AfterActionParams(**params)
        request = parsed.to_request()
        invocation = ActionInvocation(
            parsed.action.name, parsed.action.targetPath, dict(parsed.action.args)
        )
        tree = get_instances_after_action(self.session, invocation, request)
        return jsoncodec.instance_tree_to_json(tree)

    def _next_event(self, params):
        EmptyParams(**params)
        return {"eventId": self.session.next_event()}

    def _run_algorithm(self, params):
        parsed = RunAlgorithmParams(**params)
        report = self.session.run_algorithm(parsed.name)
        return {"name": report.name, "status": report.status, "report": report.summary}

    def _list_actions(self, params):
        EmptyParams(**params)
        return {"actions": self.session.list_actions()}

    def _list_algorithms(self, params):
        EmptyParams(**params)
        return {"algorithms": self.session.list_algorithms()}

    def _status(self, params):
        EmptyParams(**params)
        self.session.ensure_event()
        return {
            "eventId": self.session.event_id,
            "seed": self.session.seed,
            "protocolVersion": PROTOCOL_VERSION,
        }

    _METHODS = {
        "heprep.getTypeTree": _get_type_tree,
        "heprep.getInstanceTreeTop": _get_instance_tree_top,
        "heprep.getInstances": _get_instances,
        "heprep.getInstancesAfterAction": _get_instances_after_action,
        "control.nextEvent": _next_event,
        "control.runAlgorithm": _run_algorithm,
        "control.listActions": _list_actions,
        "control.listAlgorithms": _list_algorithms,
        "control.status": _status,
    }


def _validation_message(exc: ValidationError) -> str:
    problems = []
    for error in exc.errors():
        location = ".".join(str(part) for part in error["loc"]) or "params"
        problems.append(f"{location}: {error['msg']}")
    return "bad params: " + "; ".join(problems)
