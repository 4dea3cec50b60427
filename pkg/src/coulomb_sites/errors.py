"""Exception hierarchy shared by all modules."""


class SiteModelError(ValueError):
    """Base class for invalid inputs to the site model."""


class CoincidentSites(SiteModelError):
    pass


class DegenerateGeometry(CoincidentSites):
    pass


class CardinalityOutOfRange(SiteModelError):
    pass


class UnnormalizedEnsemble(SiteModelError):
    pass


class InfeasibleDensity(SiteModelError):
    """The density cannot be represented by the requested kind of state (F = +inf)."""


class MassOutOfRange(SiteModelError):
    pass


class BadRange(SiteModelError):
    pass


class NonAttractivePotential(SiteModelError):
    pass


class ProblemTooLarge(SiteModelError):
    pass


class NumericalBreakdown(ArithmeticError):
    """A simplex pivot below the breakdown threshold would have been required."""
