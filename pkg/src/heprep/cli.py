"""Operator tooling: run the server, export events to XML, validate and
query exported files.

Exit codes: 0 success, 1 usage error, 2 validation violations found,
3 I/O or parse failure. Diagnostics go to stderr; query output is
tab-separated on stdout.
"""

from __future__ import annotations

import logging
import sys
from pathlib import Path

import click

from .errors import BadRequestError, HepRepError
from .events.generate import GeneratorConfig, generate_event
from .events.session import Session
from .builder import FillerRegistry, build_event
from .events.fillers import standard_fillers
from .model import (
    AttributeCategory,
    AttValueKind,
    HepRepDocument,
    iter_instances,
    resolve_in_scope,
    type_chain,
    validate_document,
)
from .query import ORIG_PATH, InstanceRequest, get_instances
from .xmlio import FILE_SUFFIX, XmlWriterConfig, format_real, parse_document, xml_builder
from .wire.server import DEFAULT_PORT, serve as serve_wire

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VIOLATIONS = 2
EXIT_IO = 3


def _standard_registry() -> FillerRegistry:
    registry = FillerRegistry()
    for filler in standard_fillers():
        registry.register(filler)
    return registry


@click.group()
def cli():
    """Event display server and XML tooling."""


@cli.command()
@click.option("--port", default=DEFAULT_PORT, show_default=True, help="TCP port; WebSocket uses port+1.")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--seed", type=int, default=None, help="Event generator seed (default: entropy).")
@click.option("--smear", default=0.2, show_default=True, help="Hit smearing sigma in mm.")
@click.option("--outlier", default=0.1, show_default=True, help="Outlier injection probability.")
def serve(port, host, seed, smear, outlier):
    """Serve the live protocol until interrupted."""
    logging.basicConfig(level=logging.INFO, stream=sys.stderr, format="%(name)s: %(message)s")
    session = Session(seed=seed, config=GeneratorConfig(smear_sigma=smear, outlier_prob=outlier))
    logging.getLogger("heprep.cli").info(
        "serving on %s:%d (ws :%d) seed=%d", host, port, port + 1, session.seed
    )
    try:
        serve_wire(session, host=host, port=port)
    except KeyboardInterrupt:
        pass
    except OSError as exc:
        click.echo(f"cannot bind {host}:{port}: {exc}", err=True)
        sys.exit(EXIT_IO)


@cli.command()
@click.option("--seed", type=int, required=True)
@click.option("--events", "n_events", type=int, required=True)
@click.option("--out", "out_dir", type=click.Path(path_type=Path), required=True)
@click.option("--types", default="", help="Comma-separated type full names to fill (default: all).")
@click.option("--smear", default=0.2, show_default=True)
@click.option("--outlier", default=0.1, show_default=True)
def export(seed, n_events, out_dir, types, smear, outlier):
    """Write event_NNNNNN files into OUT via the streaming XML builder."""
    if n_events < 1:
        raise click.UsageError("--events must be >= 1")
    type_names = tuple(t.strip() for t in types.split(",") if t.strip())
    request = InstanceRequest(type_names=type_names)
    registry = _standard_registry()
    config = GeneratorConfig(smear_sigma=smear, outlier_prob=outlier)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        click.echo(f"cannot create {out_dir}: {exc}", err=True)
        sys.exit(EXIT_IO)
    for event_id in range(1, n_events + 1):
        event = generate_event(seed, event_id, config)
        path = out_dir / f"event_{event_id:06d}{FILE_SUFFIX}"
        try:
            with open(path, "wb") as stream:
                build_event(registry, event, request, xml_builder(stream, XmlWriterConfig()))
        except OSError as exc:
            click.echo(f"cannot write {path}: {exc}", err=True)
            sys.exit(EXIT_IO)
    click.echo(f"wrote {n_events} file(s) to {out_dir}", err=True)


def _load_document(path: Path) -> HepRepDocument:
    try:
        with open(path, "rb") as stream:
            return parse_document(stream)
    except OSError as exc:
        click.echo(f"cannot read {path}: {exc}", err=True)
        sys.exit(EXIT_IO)
    except HepRepError as exc:
        click.echo(f"{path}: {exc}", err=True)
        sys.exit(EXIT_IO)


@cli.command()
@click.argument("file", type=click.Path(path_type=Path))
def validate(file):
    """Parse FILE and report structural violations."""
    doc = _load_document(file)
    violations = validate_document(doc)
    for violation in violations:
        click.echo(str(violation))
    sys.exit(EXIT_VIOLATIONS if violations else EXIT_OK)


@cli.command()
@click.argument("file", type=click.Path(path_type=Path))
@click.option("--type", "type_names", multiple=True, help="Select a type full name (repeatable).")
@click.option("--where", "predicates", multiple=True, help='Predicate, e.g. "Momentum>1.0".')
@click.option("--exclude-att", "excludes", multiple=True, help="Attribute name to drop (repeatable).")
def query(file, type_names, predicates, excludes):
    """Filter FILE's instances; one tab-separated line per selected instance."""
    try:
        request = InstanceRequest(
            type_names=type_names, att_excludes=excludes, predicates=predicates
        )
    except BadRequestError as exc:
        raise click.UsageError(str(exc))
    doc = _load_document(file)
    try:
        tree = get_instances(doc, request)
    except BadRequestError as exc:
        raise click.UsageError(str(exc))
    for line in render_query_lines(HepRepDocument(doc.type_tree, tree)):
        click.echo(line)


def render_query_lines(doc: HepRepDocument):
    """Lines for instances that carry more than a bare origPath skeleton.

    Columns: source-tree path, type full name, then resolved Physics and
    Association attvalues (name=value) in attdef declaration order.
    """
    for _path, instance in iter_instances(doc.instance_tree):
        atts = {a.name.lower() for a in instance.att_values}
        if atts == {ORIG_PATH.lower()} and not instance.points:
            continue  # skeleton ancestor, not selected
        chain = type_chain(doc.type_tree, instance.type_full_name)
        orig = resolve_in_scope(instance, chain, ORIG_PATH)
        columns = [orig.value if orig else "", instance.type_full_name]
        for definition in _chain_defs(chain):
            if definition.category not in (
                AttributeCategory.PHYSICS,
                AttributeCategory.ASSOCIATION,
            ):
                continue
            if definition.name.lower() == ORIG_PATH.lower():
                continue
            resolved = resolve_in_scope(instance, chain, definition.name)
            if resolved is not None:
                columns.append(f"{definition.name}={_render_value(resolved)}")
        yield "\t".join(columns)


def _chain_defs(chain):
    seen = set()
    for node in chain or ():
        for definition in node.att_defs:
            low = definition.name.lower()
            if low not in seen:
                seen.add(low)
                yield definition


def _render_value(att) -> str:
    if att.kind is AttValueKind.REAL:
        return format_real(att.value)
    if att.kind is AttValueKind.BOOLEAN:
        return "true" if att.value else "false"
    if att.kind is AttValueKind.COLOR:
        return ",".join(format_real(c) for c in att.value)
    return str(att.value)


def main():
    try:
        cli(standalone_mode=False)
    except click.exceptions.Exit as exc:
        sys.exit(exc.exit_code)
    except click.UsageError as exc:
        click.echo(f"usage error: {exc.format_message()}", err=True)
        sys.exit(EXIT_USAGE)
    except click.ClickException as exc:
        exc.show()
        sys.exit(EXIT_USAGE)
    except KeyboardInterrupt:
        sys.exit(130)


if __name__ == "__main__":
    main()
