"""Exception hierarchy shared by every subpackage."""

from __future__ import annotations


class PlaneHomeoError(Exception):
    """Base class for all library errors."""


# geometry ---------------------------------------------------------------

class InvalidGeometry(PlaneHomeoError, ValueError):
    pass


class SelfIntersection(InvalidGeometry):
    def __init__(self, message: str, witness: tuple[int, int] | None = None):
        super().__init__(message)
        self.witness = witness


class DegenerateArea(InvalidGeometry):
    pass


class NonGenericContact(PlaneHomeoError):
    """Boundary contact that cannot be resolved within tolerance; perturb and retry."""


class NonPositiveEpsilon(InvalidGeometry):
    pass


class InvalidInput(PlaneHomeoError, ValueError):
    pass


# piecewise-linear maps --------------------------------------------------

class FlippedTriangle(InvalidGeometry):
    def __init__(self, message: str, index: int):
        super().__init__(message)
        self.index = index


class TargetBoundaryNotSimple(InvalidGeometry):
    pass


class OutsideDomain(PlaneHomeoError, ValueError):
    pass


class OutsideImage(PlaneHomeoError, ValueError):
    pass


class GenerationFailed(PlaneHomeoError):
    pass


# extension --------------------------------------------------------------

class MeshRefinementExceeded(PlaneHomeoError):
    pass


class NotConnectedIntersection(PlaneHomeoError):
    pass


class ContainmentViolation(PlaneHomeoError):
    pass


class PartitionFailure(PlaneHomeoError):
    pass


class InsideIntersection(PlaneHomeoError, ValueError):
    pass


class OutsideTruncation(PlaneHomeoError, ValueError):
    pass


class PreconditionViolation(PlaneHomeoError):
    pass


class DegenerateGamma(PlaneHomeoError):
    pass


# dynamics ---------------------------------------------------------------

class MarginTooSmall(PlaneHomeoError):
    pass


class BudgetExceeded(PlaneHomeoError):
    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial


# scenarios --------------------------------------------------------------

class SchemaError(PlaneHomeoError):
    def __init__(self, message: str, pointer: str = ""):
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer = pointer or "/"


class VersionError(SchemaError):
    pass
