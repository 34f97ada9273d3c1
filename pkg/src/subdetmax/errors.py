"""Exception types shared across the package."""


class SubdetError(Exception):
    """Base class for errors raised by this package."""


class DimensionError(SubdetError, ValueError):
    """Operands have incompatible or unsupported dimensions."""


class NotPSDError(SubdetError, ValueError):
    """A kernel matrix has an eigenvalue below the PSD tolerance."""


class EnumerationCapError(SubdetError, RuntimeError):
    """An exact enumeration would exceed the configured work cap."""


class InstanceFormatError(SubdetError, ValueError):
    """An instance or report file failed schema validation.

    ``field`` names the offending entry so CLI messages can point at it.
    """

    def __init__(self, field: str, message: str):
        super().__init__(f"field '{field}': {message}")
        self.field = field
