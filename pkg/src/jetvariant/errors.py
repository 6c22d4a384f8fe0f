"""Exception types shared across the engine."""


class JetError(Exception):
    """Base class for engine errors."""


class DivisionByZero(JetError, ZeroDivisionError):
    pass


class DenominatorVanishes(JetError, ZeroDivisionError):
    """A denominator evaluates to zero at a sample point."""


class UnboundVariable(JetError, KeyError):
    def __str__(self) -> str:  # KeyError quotes its argument otherwise
        return str(self.args[0]) if self.args else "unbound variable"


class UnknownVariable(JetError, NameError):
    pass


class NonIntegerExponent(JetError, ValueError):
    pass


class ExpressionSyntaxError(JetError, SyntaxError):
    """Malformed expression text; ``pos`` is the 0-based character offset."""

    def __init__(self, msg: str, src: str = "", pos: int = 0):
        super().__init__(f"{msg} at position {pos}")
        self.msg = msg
        self.text = src
        self.pos = pos
        self.offset = pos + 1


class OrderMismatch(JetError, ValueError):
    pass


class InconsistentSystem(JetError):
    pass


class DenominatorCollapse(JetError, ZeroDivisionError):
    """A denominator reduces to zero modulo the equation."""


class OrthonomicityError(JetError, ValueError):
    pass


class SingularJacobian(JetError):
    pass


class DegenerateJacobian(JetError):
    pass


class NotASymmetry(JetError):
    pass


class ExhaustedRetries(JetError):
    pass


class SchemaError(JetError, ValueError):
    pass
