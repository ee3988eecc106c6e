"""Exception types shared across the package."""


class DomainError(ValueError):
    """Input is well-formed but outside the operation's domain."""


class ContractError(ValueError):
    """Caller violated a precondition (empty row, mismatched inputs...)."""


class FormatError(ValueError):
    """Malformed file contents. ``offset`` is the byte position of the fault."""

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (at byte {offset})"
        super().__init__(message)
        self.offset = offset
