"""Exception types shared across the package."""


class EntdepthError(Exception):
    """Base class for all package-specific errors."""


class BranchDegeneracyError(EntdepthError):
    """Seed group with b = 0 or c = 0: the stationarity system collapses."""


class InfeasibleError(EntdepthError):
    """Requested constraint cannot be met by any admissible state."""


class UndeterminedRegionError(EntdepthError):
    """Data point lies above the separable frontier; no separability bound applies."""

    def __init__(self, message, frontier_p2=None):
        super().__init__(message)
        self.frontier_p2 = frontier_p2


class ConsistencyError(EntdepthError):
    """Internal consistency check failed (signals a minimizer failure)."""


class UnphysicalChainError(EntdepthError):
    """Efficiency-chain correction produced a probability above 1."""


class FitDegenerateError(EntdepthError):
    """Fit data carry no usable information about the fitted parameter."""


class DataInconsistentError(EntdepthError):
    """Too many Monte Carlo samples fell outside the certifiable region."""
