"""
Exception hierarchy for rank2sim.

Every error raised by the package derives from Rank2SimError so callers (and the
CLI) can catch package failures in one place. Validation failures also derive
from ValueError.
"""


class Rank2SimError(Exception):
    """Base class for all rank2sim errors."""


# =============================================================================
# PARAMETER / REGIME ERRORS
# =============================================================================

class PFNotCritical(Rank2SimError, ValueError):
    """Perron-Frobenius root of the kernel deviates from 1."""


class NonPositiveKernel(Rank2SimError, ValueError):
    """A kernel entry (or PF eigenvector entry) is not strictly positive."""


class NotInteracting(Rank2SimError, ValueError):
    """Kernel/Lambda do not satisfy the interacting-regime preconditions."""


class NotBipartite(Rank2SimError, ValueError):
    """Kernel/Lambda do not satisfy the nearly-bipartite-regime preconditions."""


class NotCriticalSBM(Rank2SimError, ValueError):
    """SBM kernel K~ diag(mu) does not have PF root 1."""


class DegenerateDiagonal(Rank2SimError, ValueError):
    """A diagonal kernel entry vanishes and no perturbation was supplied."""


class ZeroDiagonal(Rank2SimError, ValueError):
    """Exploration requires q11, q22 > 0."""


class WrongRegime(Rank2SimError, ValueError):
    """A limit constructor received parameters for another regime."""


# =============================================================================
# PATH ERRORS
# =============================================================================

class OutOfDomain(Rank2SimError, ValueError):
    """Path evaluated outside [0, horizon]."""


class HorizonMismatch(Rank2SimError, ValueError):
    """Two paths combined pointwise have different horizons."""


class DownwardJump(Rank2SimError, ValueError):
    """An operation would create a downward jump, which paths never have."""


# =============================================================================
# SAMPLING / STATISTICS ERRORS
# =============================================================================

class AllZero(Rank2SimError, ValueError):
    """Size-biased sampling needs at least one positive size."""


class EmptySample(Rank2SimError, ValueError):
    """A two-sample statistic received an empty sample."""


# =============================================================================
# CONFIG / ORCHESTRATION ERRORS
# =============================================================================

class ConfigError(Rank2SimError, ValueError):
    """Invalid configuration value (file, CLI flag, or environment)."""


class ExperimentError(Rank2SimError, RuntimeError):
    """An experiment rung failed; partial results were persisted."""

    def __init__(self, message: str, rung: int, partial_report: str | None = None):
        super().__init__(message)
        self.rung = rung
        self.partial_report = partial_report
