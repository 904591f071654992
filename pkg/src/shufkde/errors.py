"""Exception types shared across the library."""


class ShufkdeError(Exception):
    """Base class for all library errors."""


class NonUnitInput(ShufkdeError):
    """Input vector is not unit-length within the accepted tolerance."""


class InvalidParam(ShufkdeError):
    """A parameter is outside its valid range."""


class DegenerateConfig(ShufkdeError):
    """A protocol configuration has no usable parameterization."""


class TagOutOfRange(ShufkdeError):
    """An envelope tag falls outside the declared instance grid."""


class UserCountMismatch(ShufkdeError):
    """Declared user count differs from the number of actual senders."""


class Infeasible(ShufkdeError):
    """No per-instance budget achieves the requested privacy target."""


class EmptyClass(ShufkdeError):
    """A reported class ended up with zero users."""


class InfeasibleSeparation(ShufkdeError):
    """Synthetic center placement failed to satisfy the separation constraint."""


class FormatError(ShufkdeError):
    """A dataset, vocabulary or model file does not parse or validate."""
