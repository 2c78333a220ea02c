"""Exception types shared across the package."""


class ParameterError(ValueError):
    """A parameter violates a documented precondition."""


class ProtocolViolation(RuntimeError):
    """A party or oracle stepped outside what the protocol permits."""


class ConstructionError(RuntimeError):
    """A randomized construction exhausted its retry budget."""


class Refusal(RuntimeError):
    """An experiment declined to run because its preconditions do not hold."""
