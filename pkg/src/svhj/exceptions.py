"""Exception types shared across the package."""


class SVHJError(Exception):
    """Base class for all errors raised by svhj."""


class HorizonExceededError(SVHJError, ArithmeticError):
    """The flow map is not invertible: the requested time is past T*.

    ``direction`` holds the scalarization direction when known.
    """

    def __init__(self, message, direction=None):
        super().__init__(message)
        self.direction = direction


class ConvergenceError(SVHJError, RuntimeError):
    """An iterative solver did not reach its tolerance."""

    def __init__(self, message, direction=None):
        super().__init__(message)
        self.direction = direction


class SingularHessianError(SVHJError, ArithmeticError):
    """A Hessian that must be invertible was found singular."""


class ConfigError(SVHJError, ValueError):
    """Invalid run configuration. ``problems`` lists every issue found."""

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))
