"""Exception types shared across the package.

Each class corresponds to one named error condition in the public
contracts; code that can fail in several distinct ways raises distinct
classes so callers (CLI exit codes, wire error codes) can map them
without string matching.
"""


class HepRepError(Exception):
    """Base class for all errors raised by this package."""


class InvalidPathError(HepRepError):
    """An instance path does not address an instance (or point) in the tree."""


class BuilderStateError(HepRepError):
    """A builder call violated the call grammar or emitted invalid content."""


class SinkIOError(HepRepError):
    """The streaming writer's sink failed; the builder is poisoned."""


class XmlSyntaxError(HepRepError):
    """Input is not well-formed XML."""


class SchemaError(HepRepError):
    """Well-formed XML that does not conform to the document schema."""


class VersionError(HepRepError):
    """Document declares an unsupported format version."""


class BadRequestError(HepRepError):
    """An instance request is malformed (overlapping filters, bad predicate)."""


class DuplicateTypeOwnerError(HepRepError):
    """A filler claims a type full name already owned by another filler."""


class EmptyOwnershipError(HepRepError):
    """A filler declares no owned type names."""


class UnknownActionError(HepRepError):
    """Pick action name is not registered."""


class BadTargetError(HepRepError):
    """Pick action target path does not address an instance the action accepts."""


class ActionArgError(HepRepError):
    """Pick action arguments are missing, mistyped, or out of range."""


class ActionPreconditionError(HepRepError):
    """Pick action arguments are valid but the action would corrupt the event."""


class UnknownAlgorithmError(HepRepError):
    """Algorithm name is not registered."""


class DegenerateFitError(HepRepError):
    """Track fit is underdetermined (fewer than 2 distinct plane coordinates)."""
