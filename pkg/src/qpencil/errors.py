"""Exception and warning types raised across the package."""


class PencilError(Exception):
    """Base class for all errors raised by qpencil."""


class InvalidPotential(PencilError, ValueError):
    pass


class NonPositiveBeta(InvalidPotential):
    pass


class NonFiniteCoefficient(InvalidPotential):
    pass


class DivergenceSuspected(RuntimeWarning):
    """Coefficient tables grow or fail to settle by the truncation order."""


class TableError(PencilError):
    pass


class IncompleteTable(TableError):
    pass


class ConsistencyMismatch(TableError):
    pass


class NearPole(PencilError):
    """Evaluation too close to a pole of a series solution."""

    def __init__(self, n, denominator, kind=None):
        self.n = n
        self.denominator = denominator
        self.kind = kind
        where = f" ({kind})" if kind else ""
        super().__init__(f"denominator for n={n}{where} is {abs(denominator):.3e}")


class OutOfRange(PencilError, IndexError):
    pass


class LambdaZero(PencilError, ValueError):
    pass


class ContourThroughPole(PencilError):
    def __init__(self, location, message=None):
        self.location = location
        super().__init__(message or f"contour cannot avoid pole near {location}")


class NonConvergence(PencilError):
    def __init__(self, rectangle, message=None):
        self.rectangle = rectangle
        super().__init__(message or f"root polishing failed in rectangle {rectangle}")


class RadiusConflict(PencilError):
    def __init__(self, n, center):
        self.n = n
        self.center = center
        super().__init__(f"no admissible circle radius around {center} (n={n})")


class SpectralDataError(PencilError, ValueError):
    """Spectral data are malformed or incomplete."""


class MissingCircle(SpectralDataError):
    pass


class IllConditionedRatio(PencilError):
    pass


class GenericityFailure(PencilError):
    """A diagonal coefficient vanishes, so the inverse procedure is undefined."""

    def __init__(self, index, value=0.0, sign=None):
        self.index = index
        self.value = value
        self.sign = sign
        label = f"v_{index}{index}^{sign}" if sign else f"v_{index}{index}"
        super().__init__(
            f"{label} = {abs(value):.3e} is below the genericity threshold; "
            "the spectral data are degenerate (e.g. a zero potential) and "
            "do not determine the coefficients"
        )


class NoBetaSource(PencilError):
    pass


class NonPhysicalBeta(PencilError):
    pass


class StepSizeUnderflow(PencilError):
    pass
