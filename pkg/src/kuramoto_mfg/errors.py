"""Exception types shared across the package."""


class KuramotoMfgError(Exception):
    """Base class for all package errors."""


class InvalidParams(KuramotoMfgError, ValueError):
    """Model or physical parameters outside their admissible range."""


class InvalidInput(KuramotoMfgError, ValueError):
    """An operation was called on data it cannot meaningfully process."""


class InvalidConfig(KuramotoMfgError, ValueError):
    """Simulation configuration violates its invariants."""


class InvalidDensity(KuramotoMfgError, ValueError):
    """A sampled density is negative or not normalized."""


class NonConvergence(KuramotoMfgError, RuntimeError):
    """Newton continuation stalled at the minimal step size.

    Usually signals a grid that is too coarse for the requested
    parameters, or an unreachable tolerance.
    """


class SingularSystem(KuramotoMfgError, RuntimeError):
    """A linearized solve failed; the base solution is suspect."""


class DegenerateEndpoint(KuramotoMfgError, RuntimeError):
    """The endpoint slope -u_x(pi) is numerically zero for zeta > 0."""


class DegenerateIncrement(KuramotoMfgError, RuntimeError):
    """The total increment a(pi) - a(0) is numerically zero."""


class DegeneratePushforward(KuramotoMfgError, RuntimeError):
    """The change of variables C = cos(theta) is flat on the interior."""


class BracketFailure(KuramotoMfgError, RuntimeError):
    """Root bracketing for the fixed-point equation failed.

    Concavity of the self-consistency map makes this impossible for a
    converged solver, so it is treated as a bug signal.
    """
