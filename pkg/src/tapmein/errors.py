"""Base error type shared by the engine modules.

Every domain-level failure raised by this package derives from
``TapmeinError`` so callers (and the CLI) can separate data problems from
programming errors.
"""


class TapmeinError(Exception):
    """Base class for all domain errors raised by tapmein."""
