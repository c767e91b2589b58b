"""Shared exception types."""


class EtaAtlasError(Exception):
    """Base class for all package errors."""


class PoleError(EtaAtlasError):
    """Evaluation requested at (or too close to) a pole of the function."""


class AccuracyError(EtaAtlasError):
    """Evaluation parameters violate a stated accuracy precondition."""


class CountMismatchError(EtaAtlasError):
    """Argument-change bookkeeping disagrees with the number of zeros found."""


class EdgeProximityError(EtaAtlasError):
    """A contour edge passes too close to a zero for reliable phase tracking."""


class MultipleZeroError(EtaAtlasError):
    """Rectangle subdivision stalled on what looks like a multiple zero."""


class BracketError(EtaAtlasError):
    """A root bracket predicted by theory could not be established."""


class UnresolvedTraceError(EtaAtlasError):
    """A level-curve trace ended without a usable termination event."""


class BijectivityError(EtaAtlasError):
    """Trace-to-zero matching failed to be one-to-one and onto."""


class TheoremViolationError(EtaAtlasError):
    """A numerically exact identity failed; indicates a bug, not rounding."""


class CatalogError(EtaAtlasError):
    """Catalog is incomplete, malformed, or has a version mismatch."""


class SeedPointError(EtaAtlasError):
    """A trace seed point does not have the sign structure it should."""


class ExtrapolationError(EtaAtlasError):
    """A one-sided limit extrapolation did not behave like one."""


class GeometryError(EtaAtlasError):
    """Requested geometric quantity does not exist (negative radicand)."""
