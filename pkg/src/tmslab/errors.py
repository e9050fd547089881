"""Exception hierarchy shared by all tmslab modules."""


class TmsLabError(Exception):
    """Base class for every error raised by tmslab."""


class InvalidPoint(TmsLabError, ValueError):
    pass


class InvalidSpace(TmsLabError, ValueError):
    pass


class InvalidScale(TmsLabError, ValueError):
    pass


class UnsupportedShape(TmsLabError, ValueError):
    pass


class UnsupportedMeasure(TmsLabError, ValueError):
    pass


class NotConnected(TmsLabError, ValueError):
    pass


class NotSeparated(TmsLabError, ValueError):
    pass


class DomainError(TmsLabError, ValueError):
    pass


class RuleDisabled(TmsLabError):
    """The constancy rule needs a C-outer regular measure."""


class RuleNotApplicable(TmsLabError):
    """The precondition of an analytic rule does not hold for this input."""


class InvalidPartition(TmsLabError, ValueError):
    pass


class InsufficientHypotheses(TmsLabError, ValueError):
    pass


class InvalidComposition(TmsLabError, ValueError):
    pass


class SpecError(TmsLabError, ValueError):
    """A JSON document does not match its schema."""
