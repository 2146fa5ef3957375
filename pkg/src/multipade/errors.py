"""Exception types shared across the package."""


class MultipadeError(Exception):
    """Base class for all errors raised by this package."""


class InteriorPointError(MultipadeError):
    """A point that must lie strictly outside the compact set is inside it."""


class UnitDiskError(MultipadeError):
    """An inverse-map argument lies inside the closed unit disk."""


class SingularityError(MultipadeError):
    """Evaluation was requested too close to a declared singularity."""


class BranchCutError(MultipadeError):
    """Evaluation was requested on (or too close to) a branch cut ray."""


class UnsupportedModelError(MultipadeError):
    """The function model falls outside the analytically supported class."""


class QuadratureError(MultipadeError):
    """Contour quadrature failed to converge within the sample cap."""

    def __init__(self, message, value=None, est_error=None, samples_used=None):
        super().__init__(message)
        self.value = value
        self.est_error = est_error
        self.samples_used = samples_used


class RootSolveError(MultipadeError):
    """Simultaneous root iteration failed to converge.

    Carries the best iterate found so callers can inspect or reuse it.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class CurveSeparationError(MultipadeError):
    """No quadrature curve can separate the nodes from the singularities."""


class DegenerateSystemError(MultipadeError):
    """The detected pole structure is too degenerate for the requested output."""


class IncompletePoleCountError(DegenerateSystemError):
    """The system carries fewer detected poles than its multi-index requires."""


class NearPoleError(MultipadeError):
    """Approximant evaluation was requested at a near-zero of the denominator."""


class FitWindowError(MultipadeError):
    """Too few usable data points remain for a rate fit."""


class ConfigError(MultipadeError):
    """An experiment configuration file is malformed or inconsistent.

    ``location`` identifies the offending field (dotted path) or file line.
    """

    def __init__(self, message, location=None):
        if location:
            message = "%s: %s" % (location, message)
        super().__init__(message)
        self.location = location
