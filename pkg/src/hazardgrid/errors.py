"""Exception hierarchy shared by all hazardgrid modules."""

from __future__ import annotations


class HazardGridError(Exception):
    """Base class for every error raised by this package."""


class SchemaError(HazardGridError, ValueError):
    """Input document does not match its schema.

    ``locator`` points at the offending record (``"lines[3]"``, ``"row 12"``)
    and ``entity`` names the id involved, when there is one.
    """

    def __init__(self, message: str, *, locator: str | None = None, entity: str | None = None):
        self.locator = locator
        self.entity = entity
        parts = [p for p in (locator, f"id {entity!r}" if entity is not None else None) if p]
        prefix = f"{', '.join(parts)}: " if parts else ""
        super().__init__(prefix + message)
        self.message = message


class ReferenceIntegrityError(SchemaError):
    """A record refers to an id that does not exist."""


class DuplicateIdError(SchemaError):
    """Two records share an id that must be unique."""


class DataRangeError(SchemaError):
    """A value lies outside its permitted range."""


class UnknownDayError(HazardGridError, LookupError):
    """A requested day is missing from a demand profile."""


class SolveFailure(HazardGridError):
    """An LP solve did not reach an optimal solution.

    Carries the :class:`~hazardgrid.dcopf.SolveReport` and whatever context
    (day, hour, scenario key) was known where the failure surfaced.
    """

    def __init__(self, message: str, report=None, **context):
        self.message = message
        self.report = report
        self.context = context
        tags = " ".join(f"{k}={v}" for k, v in context.items())
        super().__init__(f"{message} [{tags}]" if tags else message)
