"""Exception types raised by blendkit."""


class BlendError(Exception):
    """Base class for all blendkit errors."""


class SingularMatrix(BlendError, ArithmeticError):
    pass


class InvalidSpec(BlendError, ValueError):
    pass


class EmptyInput(InvalidSpec):
    pass


class NotIncreasing(InvalidSpec):
    pass


class DegreeOrder(BlendError, ValueError):
    pass


class IntervalMismatch(BlendError, ValueError):
    pass


class NotInGrid(BlendError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class NonFiniteSample(BlendError, ValueError):
    pass


class InsufficientData(BlendError, ValueError):
    pass
