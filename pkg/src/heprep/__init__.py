"""Client-server event display protocol suite.

Core pieces: a hierarchical representable document model (`model`), an
abstract builder with in-memory and streaming-XML back ends (`builder`,
`xmlio`), incremental-download queries (`query`), a toy experiment with a
drivable event loop (`events`), a framed JSON wire protocol over TCP and
WebSocket (`wire`), and operator tooling (`cli`).
"""

from .builder import (
    Builder,
    Filler,
    FillerRegistry,
    build_event,
    build_type_catalog,
    fillers_for_request,
    memory_builder,
    register_filler,
)
from .model import (
    AttDef,
    AttributeCategory,
    AttValue,
    AttValueKind,
    Color,
    HepRepDocument,
    HepRepInstance,
    HepRepPoint,
    HepRepType,
    InstanceTree,
    TypeTree,
    Violation,
    ViolationKind,
    default_draw_definitions,
    draw_definition,
    find_type,
    format_instance_path,
    instance_at,
    parse_instance_path,
    resolve_attribute,
    validate_document,
)
from .query import (
    InstanceRequest,
    InstanceTreeTop,
    Predicate,
    PredicateOp,
    get_instance_tree_top,
    get_instances,
    get_instances_after_action,
    get_type_tree,
    parse_predicate,
)
from .xmlio import XmlWriterConfig, format_real, parse_document, write_document, xml_builder

__version__ = "0.1.0"
