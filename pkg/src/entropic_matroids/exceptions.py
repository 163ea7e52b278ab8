"""Exception hierarchy shared by all modules."""


class EntropicMatroidError(Exception):
    """Base class for all errors raised by this package."""


class FormatError(EntropicMatroidError, ValueError):
    """Malformed input: wrong table length, bad JSON schema, symbols out of range."""


class PreconditionError(EntropicMatroidError, ValueError):
    """An operation was called with arguments violating its precondition."""


class CapabilityError(EntropicMatroidError, RuntimeError):
    """The instance exceeds the size caps of an exhaustive routine."""
