"""Exception hierarchy shared by all qslkit modules."""


class QslError(Exception):
    """Base class for every error raised by qslkit."""


class NotHermitian(QslError, ValueError):
    pass


class NotPSD(QslError, ValueError):
    pass


class BlochOutOfBall(QslError, ValueError):
    pass


class BadIndex(QslError, ValueError):
    pass


class BadStateSpec(QslError, ValueError):
    pass


class TooManyQubits(QslError, ValueError):
    pass


class RatePole(QslError, ArithmeticError):
    """The decoherence rate is undefined because p_t vanishes at this time."""

    def __init__(self, t, p):
        super().__init__(f"decoherence rate has a pole at t={t!r} (p_t={p!r})")
        self.t = t
        self.p = p


class DegenerateDenominator(QslError, ArithmeticError):
    pass


class MixedFactorSingular(QslError, ArithmeticError):
    pass


class ComplexRadicand(QslError, ArithmeticError):
    pass


class QuadratureError(QslError, ArithmeticError):
    pass


class UnknownFigure(QslError, KeyError):
    pass
