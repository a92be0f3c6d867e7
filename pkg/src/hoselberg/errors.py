"""Exception types raised by the library."""


class HoselbergError(ValueError):
    """Base class for all library errors."""


class InvalidRankError(HoselbergError):
    pass


class DimensionMismatchError(HoselbergError):
    pass


class PoleError(HoselbergError):
    """Gamma function evaluated at a nonpositive integer."""

    def __init__(self, pole, message=None):
        self.pole = pole
        super().__init__(message or f"log_gamma has a pole at z = {pole}")


class DegenerateParameterError(HoselbergError):
    """Spectral parameter or multiplicity hits a Gamma pole or a sine zero."""

    def __init__(self, message, root=None):
        self.root = root
        super().__init__(message)


class ResonanceError(HoselbergError):
    """A recursion denominator (mu, mu + 2 lambda) vanishes."""

    def __init__(self, message, index=None, denominator=None):
        self.index = index
        self.denominator = denominator
        super().__init__(message)


class OutsideChamberError(HoselbergError):
    pass


class ConvergenceError(HoselbergError):
    """An extrapolated limit did not reach the requested tolerance."""

    def __init__(self, message, value=None, error=None):
        self.value = value
        self.error = error
        super().__init__(message)


class DivergentWeightError(HoselbergError):
    pass


class AccuracyError(HoselbergError):
    """Quadrature tolerance not met; carries the best available estimate."""

    def __init__(self, message, value=None, error=None):
        self.value = value
        self.error = error
        super().__init__(message)


class EmptyDomainError(HoselbergError):
    pass


class DivergentIntegralError(HoselbergError):
    """A declared integrand exponent is not integrable on some face."""

    def __init__(self, message, face=None):
        self.face = face
        super().__init__(message)
