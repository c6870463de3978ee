"""Exception hierarchy shared by all modules."""


class ArborError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(ArborError):
    """A parameter lies outside the domain of a constructor or formula."""


class GenericityError(ArborError):
    """An input hits an excluded (non-generic) locus."""


class ClassificationError(ArborError):
    """A matrix product does not match any canonical form."""


class StructureError(ArborError):
    """A closure does not have the expected top-level composition."""


class WrongEngineError(ArborError):
    """Multi-component input fed to the knot engine (or vice versa)."""


class UnsupportedShapeError(ArborError):
    """A link shape outside the implemented two-trace patterns."""


class InconsistencyError(ArborError):
    """Numeric data violates a solvability condition (e.g. a nonzero
    determinant that must vanish)."""


class ConditioningError(ArborError):
    """A denominator is too close to zero for a reliable double-precision
    evaluation; callers should resample rather than abort."""


class TangleParseError(ArborError):
    """Malformed tangle expression text."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position
