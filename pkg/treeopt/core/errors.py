"""Exception types shared by the services and the command-line layer."""


class TreeOptError(Exception):
    """Base class for all solver errors."""


class InstanceFormatError(TreeOptError, ValueError):
    """Syntax error in an instance or ordering file."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        self.message = message
        super().__init__(f"line {line}: {message}" if line is not None else message)


class InstanceValidationError(TreeOptError, ValueError):
    """Structurally invalid instance, assignment or generator parameters."""


class DecompositionError(TreeOptError):
    """A decomposition artefact violates its certificate."""

    def __init__(self, message: str, witness: tuple | None = None):
        self.witness = witness
        super().__init__(message)


class OracleLimitError(TreeOptError):
    """Brute force refused because the instance is too large."""
