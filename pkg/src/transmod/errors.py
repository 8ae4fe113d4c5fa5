"""Exception types shared across the package."""


class TransmodError(Exception):
    """Base class for all package errors."""


class DegenerateContinuum(TransmodError):
    """A set with empty diameter was used where a nondegenerate continuum is required."""


class NotDisjoint(TransmodError):
    """Two sets that must be disjoint intersect or touch."""


class EmptyInterior(TransmodError):
    """A set with empty interior was used where an inscribed ball is required."""


class OverlappingDisks(TransmodError):
    """A disk family that must be pairwise disjoint has an intersecting pair."""


class PreconditionViolated(TransmodError):
    """A counting-bound hypothesis (diameter or disjointness) does not hold."""


class SpacingTooCoarse(TransmodError):
    """Grid spacing too large to separate or resolve the continua."""


class DisconnectedComplement(TransmodError):
    """The free region of a discretized domain is not connected."""


class EmptyEndpointSet(TransmodError):
    """A curve-family endpoint set maps to no usable grid cells."""


class InvalidDomain(TransmodError):
    """A domain description violates its structural invariants.

    Carries ``field``, a dotted path naming the offending entry, so CLI
    diagnostics can point at the exact input field.
    """

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class NotApplicable(TransmodError):
    """Inputs are outside the regime an estimate is stated for."""


class DomainError(TransmodError):
    """Argument outside the mathematical domain of a scalar function."""


class PackingFailed(TransmodError):
    """Rejection sampling could not place the requested configuration."""
