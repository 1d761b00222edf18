"""Domain error type carrying a machine-readable code."""

from __future__ import annotations


class DomainError(Exception):
    """Raised when a domain operation violates its contract.

    ``code`` is a stable SCREAMING_SNAKE identifier (e.g. ``FORBIDDEN``,
    ``DUPLICATE_PATH``); ``message`` is human-readable detail. The HTTP
    layer maps codes to status lines; the domain layer never cares.
    """

    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message
