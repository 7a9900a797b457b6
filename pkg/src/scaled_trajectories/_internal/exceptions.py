from __future__ import annotations

from collections.abc import Mapping


class ScaledTrajectoriesException(Exception):
    pass


class InvalidParameterException(ScaledTrajectoriesException, ValueError):
    pass


class GridMismatchException(InvalidParameterException):
    pass


class ArrivalConditionException(InvalidParameterException):
    pass


class IntegrationAbortedException(ScaledTrajectoriesException, ArithmeticError):
    """
    Raised when an integrator cannot continue.

    :param time: time of the last accepted step
    :param state: named state values at that time
    """

    def __init__(self, message: str, *, time: float, state: Mapping[str, float]):
        self.time = time
        self.state = dict(state)
        details = ", ".join(f"{name}={value!r}" for name, value in self.state.items())
        super().__init__(f"{message} at t={time!r} ({details})")


class NonFiniteStateException(IntegrationAbortedException):
    pass


class WidthCollapseException(IntegrationAbortedException):
    pass


class SingularCoefficientException(IntegrationAbortedException):
    pass


class ConfigException(ScaledTrajectoriesException, ValueError):
    pass
