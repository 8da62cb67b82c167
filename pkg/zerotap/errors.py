"""Exception hierarchy for zerotap."""


class ZeroTapError(Exception):
    """Base class for all zerotap failures."""


class InvalidArgumentError(ZeroTapError, ValueError):
    """An argument is outside the supported domain."""


class EmptySeriesError(ZeroTapError):
    """Every coefficient of a series is zero."""


class LogOfZeroError(ZeroTapError, ArithmeticError):
    """Logarithm of an extended zero was requested."""


class ProfileNotResolvedError(ZeroTapError):
    """The sandwich gap of a profile exceeds the detector tolerance."""


class ConvexityError(ZeroTapError):
    """Detected slopes decrease, which a convex profile cannot do."""


class UnconvergedRootsError(ZeroTapError):
    """A measure was requested from a root set that did not converge."""


class MassMismatchError(ZeroTapError):
    """Two measures compared by transport have different total mass."""


class InputFormatError(ZeroTapError):
    """An input file is malformed. The message names the line or field."""
