"""Exception types raised across the package."""


class InvalidInputError(ValueError):
    """An argument violates a documented precondition."""


class DegenerateSeedingError(ValueError):
    """The cloud has too few distinct colors to seed the requested palette."""


class ImageIOError(OSError):
    """An image could not be read or written."""
