"""Exception types shared across the package, one per failure contract."""


class GagliardoFlowError(Exception):
    """Base class for all package errors."""


class OutsideTubularNeighbourhood(GagliardoFlowError):
    """Point too far from the target manifold for nearest-point projection."""


class InvalidGeometry(GagliardoFlowError):
    """Grid construction produced an unusable discretization."""


class InvalidExponent(GagliardoFlowError):
    """Kernel exponents outside s in (0,1), p in (1,inf)."""


class DimensionMismatch(GagliardoFlowError):
    """Field shape incompatible with the grid or kernel table."""


class DegenerateIncrement(GagliardoFlowError):
    """Gradient undefined: p < 2 with a vanishing pairwise increment."""


class InnerSolverStalled(GagliardoFlowError):
    """Inner solver exhausted its iteration budget without a usable point."""


class OutOfRange(GagliardoFlowError):
    """Time argument outside the trajectory's covered span."""


class UnsupportedAmbientDim(GagliardoFlowError):
    """Cross-product formulation requires ambient dimension 3."""


class SupportViolation(GagliardoFlowError):
    """Test function does not vanish on the collar."""


class NotTangent(GagliardoFlowError):
    """Vector field is not tangent where tangency is required."""


class IndexOutOfRange(GagliardoFlowError):
    """Generator-field index outside the manifold's frame."""


class PresetUnavailable(GagliardoFlowError):
    """Initial-data preset undefined for the requested target or domain."""


class ParseError(GagliardoFlowError):
    """Config file is not valid JSON."""


class ValidationError(GagliardoFlowError):
    """Config value missing or outside its admissible range."""

    def __init__(self, field, message=None):
        self.field = field
        super().__init__(message or f"invalid config field: {field}")
