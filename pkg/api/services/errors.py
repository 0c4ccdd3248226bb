"""
Exceptions raised by the calculus services.

Views and the ``nc`` management command translate these into HTTP errors
and exit codes; nothing in ``api.services`` knows about either.
"""


class CalculusError(Exception):
    """Root of every error raised by ``api.services``."""


class SizeMismatch(CalculusError, ValueError):
    pass


class CrossingPartition(CalculusError, ValueError):
    pass


class NotAPairing(CalculusError, ValueError):
    pass


class NotEvenBlocks(CalculusError, ValueError):
    pass


class SingularGram(CalculusError, ArithmeticError):
    """The Gram matrix of a category is not invertible at this dimension."""

    def __init__(self, group, k, n):
        self.group = group
        self.k = k
        self.n = n
        super().__init__(f"Gram matrix of {group} on {k} points is singular at n={n}")


class TruncationExceeded(CalculusError):
    """A word longer than the truncation order was queried."""

    def __init__(self, length, order):
        self.length = length
        self.order = order
        super().__init__(f"word of length {length} exceeds truncation order {order}")


class IncompleteMoments(CalculusError):
    pass


class NotRCyclic(CalculusError):
    pass


class MalformedInput(CalculusError, ValueError):
    pass


class BoundExceeded(CalculusError):
    """A request is larger than the configured desk-scale bound."""

    def __init__(self, name, value, bound):
        self.name = name
        self.value = value
        self.bound = bound
        super().__init__(f"{name}={value} exceeds the configured bound {bound}")


class UnknownSuite(CalculusError, KeyError):
    def __str__(self):
        return f"unknown suite {self.args[0]!r}"
