"""Exception types."""


class ParleyError(Exception):
    """Base class for all errors raised by this package."""


class RationalParseError(ParleyError, ValueError):
    """Error raised when text cannot be parsed as an exact rational."""


class DistributionError(ParleyError, ValueError):
    """Error raised when weights do not form a probability distribution."""


class MeanConditionError(DistributionError):
    """Error raised when posteriors do not average back to the prior."""


class ZeroProbabilityError(ParleyError, ValueError):
    """Error raised when conditioning on an event with zero probability."""


class ProtocolError(ParleyError, ValueError):
    """Error raised when a protocol is malformed or not total."""


class WitnessError(ParleyError, ValueError):
    """Error raised when a split witness tree is structurally malformed."""


class BudgetExceededError(ParleyError, RuntimeError):
    """Error raised when an enumeration exceeds its configured budget."""


class DesignError(ParleyError, RuntimeError):
    """Error raised when a design program violates its own invariants."""


class DocumentError(ParleyError, ValueError):
    """Error raised when a JSON document does not match its schema."""
