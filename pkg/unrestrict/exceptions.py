"""Exceptions raised by the unrestrict toolkit."""

from __future__ import annotations


class UnrestrictError(Exception):
    """Base error for every failure the toolkit reports."""


class NegativeValuation(UnrestrictError):
    """Error to indicate a series has no limit at t = 0."""


class ShapeMismatch(UnrestrictError):
    """Error to indicate operands have incompatible shapes."""


class NotGenericallyConcise(UnrestrictError):
    """Error to indicate the generic member is not concise on a coordinate."""

    def __init__(self, coordinate: int, message: str | None = None) -> None:
        """Store the offending coordinate."""
        self.coordinate = coordinate
        super().__init__(
            message or f"generic member is not concise on coordinate {coordinate + 1}"
        )


class NotJointlyConcise(UnrestrictError):
    """Error to indicate a polynomial family is not jointly concise."""


class BasisExtractionFailure(UnrestrictError):
    """Error to indicate no series basis with independent limits was found."""


class InputMismatch(UnrestrictError):
    """Error to indicate certificates stem from different inputs."""


class UnsupportedField(UnrestrictError):
    """Error to indicate the base field is not supported by an operation."""


class UnsupportedSize(UnrestrictError):
    """Error to indicate a size outside the decidable range."""


class NotConcise(UnrestrictError):
    """Error to indicate a tensor is not concise."""


class ClosureFailure(UnrestrictError):
    """Error to indicate a linear span is not closed under composition."""


class PreconditionFailure(UnrestrictError):
    """Error to indicate an operation's input condition does not hold."""


class Not1Generic(UnrestrictError):
    """Error to indicate a tensor is not 1-generic."""


class NotRegular(UnrestrictError):
    """Error to indicate a restriction map is not regular."""

    def __init__(self, coordinate: int, message: str | None = None) -> None:
        """Store the offending coordinate."""
        self.coordinate = coordinate
        super().__init__(
            message or f"map on coordinate {coordinate + 1} is not regular"
        )


class DegenerateOnePS(UnrestrictError):
    """Error to indicate a one-parameter subgroup kills a tangent weight."""


class TooLarge(UnrestrictError):
    """Error to indicate a scan exceeds the enumeration limit."""


class SchemaError(UnrestrictError, ValueError):
    """Error to indicate an invalid JSON document."""

    def __init__(self, path: str, message: str) -> None:
        """Store the JSON pointer of the offending value."""
        self.path = path
        super().__init__(f"{path or '/'}: {message}")


class UnknownExample(UnrestrictError):
    """Error to indicate an unregistered reproduction name."""
