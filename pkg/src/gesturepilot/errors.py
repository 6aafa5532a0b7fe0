"""Exception hierarchy shared across the package.

Every error raised on a contract violation derives from PilotError so
callers can catch one base type at the CLI / service boundary.
"""


class PilotError(Exception):
    """Base class for all errors raised by this package."""


class FormatError(PilotError):
    """Malformed input bytes: image files, wire frames, model files, cascade XML."""


class ContractError(PilotError):
    """A function was called with arguments that violate its preconditions."""


class InputError(PilotError):
    """A referenced input (directory, file, endpoint) is missing or unusable."""


class InitializationError(PilotError):
    """The pipeline could not lock onto a user within the detection budget."""


class TrackingLostError(PilotError):
    """The tracked box degenerated below the minimum usable size."""


class FrustumError(PilotError):
    """The synthetic scene cannot be rendered from the requested camera pose."""
