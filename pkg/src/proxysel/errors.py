"""Exception hierarchy shared by all modules.

Every rejected input names the violated rule in the message, so callers
(and the CLI diagnostic stream) never have to guess what went wrong.
"""


class ToolkitError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(ToolkitError):
    """An input violates a documented invariant or precondition."""


class CapacityError(ToolkitError):
    """A requested budget exceeds what the inputs can supply (e.g. k > n)."""


class ConsistencyError(ToolkitError):
    """Two inputs that must describe the same data do not line up."""
