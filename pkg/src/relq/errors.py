"""Exception hierarchy shared by every relq module."""


class RelqError(Exception):
    """Base class for all library errors."""


class InvalidValue(RelqError, ValueError):
    pass


class UnknownRegister(RelqError, KeyError):
    def __str__(self) -> str:  # KeyError quotes its argument otherwise
        return str(self.args[0]) if self.args else "unknown register"


class InvalidBit(RelqError, IndexError):
    pass


class IncompleteOracle(RelqError, ValueError):
    pass


class NotNormalized(RelqError, ValueError):
    pass


class InvalidHiddenString(RelqError, ValueError):
    pass


class ContradictorySystem(RelqError, ValueError):
    """A GF(2) system of full rank n: only the zero vector is orthogonal to it."""


class ContradictoryAdvance(RelqError, ValueError):
    pass


class InvalidN(RelqError, ValueError):
    pass


class Jammed(RelqError):
    """The constraint network has no solution, so the machine cannot move."""


class NetworkFormatError(RelqError, ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message
