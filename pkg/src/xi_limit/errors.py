"""Exception hierarchy for xi_limit."""


class XiLimitError(Exception):
    """Base class for all errors raised by this package."""


class DegenerateTarget(XiLimitError):
    """Sphere sample numerically equal to the last basis vector."""


class NumericalDriftFailure(XiLimitError):
    """Unitarity of a grown matrix drifted beyond tolerance."""


class SolverFailure(XiLimitError):
    """Eigenvalues of a unitary matrix were found off the unit circle."""


class NearUnityEigenvalue(XiLimitError):
    """An eigenangle is too close to 0 for Z_n(1) to be usable."""


class NearDegenerateSpectrum(XiLimitError):
    """Two eigenangles coincide within the tie tolerance."""

    def __init__(self, message, min_gap):
        super().__init__(message)
        self.min_gap = min_gap


class InvalidPoints(XiLimitError):
    pass


class OnBranchCut(XiLimitError):
    """Evaluation point lies on a ray of the cut plane."""


class FormulaInconsistency(XiLimitError):
    """Counting formula returned a non-integer value."""


class WindowTooSmall(XiLimitError):
    pass


class InsufficientReplicas(XiLimitError):
    pass


class NotCoupled(XiLimitError):
    """Two spectra do not come from the same coupled chain."""


class PoleProximity(XiLimitError):
    pass


class ManifestError(XiLimitError):
    pass


class IncompleteRun(XiLimitError):
    pass
