"""Exception hierarchy shared by every module."""


class CodesignError(ValueError):
    """Base class for all domain errors raised by this package."""


class ObjectMismatch(CodesignError):
    pass


class MonadMismatch(CodesignError):
    pass


class NotMonotone(CodesignError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class ElementNotInPoset(CodesignError):
    pass


class CarrierTooLarge(CodesignError):
    pass


class IntervalOrderError(CodesignError):
    pass


class UnboundName(CodesignError):
    pass


class LoopFactorMissing(CodesignError):
    pass


class ObjectiveMonadMismatch(CodesignError):
    pass


class NoFeasibleParameter(CodesignError):
    pass


class NoFeasibleTheta(CodesignError):
    pass


class ZeroEvidence(CodesignError):
    pass


class ModelError(CodesignError):
    """Raised while loading or validating a model file."""

    def __init__(self, message, problems=None):
        super().__init__(message)
        self.problems = list(problems or [message])
