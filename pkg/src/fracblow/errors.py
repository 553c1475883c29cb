"""Exception types raised across the package.

Every failure mode that callers are expected to handle gets its own class,
so scripts can branch on the *kind* of failure (bad configuration vs. a
numerical breakdown vs. a regime guard) without parsing messages.
"""


class FracblowError(Exception):
    """Base class for all package-specific errors."""


class BadConfig(FracblowError):
    """A parameter is outside its documented domain."""


class OutOfDomain(FracblowError):
    """A coordinate query lies outside the open interval (-1, 1)."""


class NonIntegrable(FracblowError):
    """Declared integrand orders imply a divergent integral."""


class NoConvergence(FracblowError):
    """Adaptive refinement exhausted its subdivision budget above tolerance."""


class BracketFailure(FracblowError):
    """A sign-changing bracket could not be established for a root."""


class RegimeError(FracblowError):
    """The requested operation is undefined in the given parameter regime."""


class GridMismatch(FracblowError):
    """Two objects built on different grids (or exterior extensions) were mixed."""


class SingularSystem(FracblowError):
    """A dense linear system was singular or numerically unusable."""


class NoAdmissiblePair(FracblowError):
    """The scaling search for an ordered sub/super-solution pair failed."""


class NewtonStall(FracblowError):
    """Damped Newton hit its damping floor without reducing the residual."""


class MonotoneViolation(FracblowError):
    """An exhaustion iterate decreased somewhere it must not."""


class AuditFail(FracblowError):
    """A nonexistence audit could not certify the required residual signs."""


class TooFewPoints(FracblowError):
    """A fit or band check was asked to run on too small a node set."""
