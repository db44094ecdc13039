"""Exception hierarchy.

Every failure mode of the library raises a subclass of NlslabError, so
callers (and the CLI) can catch one type and still tell the cases apart.
"""


class NlslabError(Exception):
    """Base class for all nlslab errors."""


class DegenerateFieldError(NlslabError):
    """Field contains NaN/Inf samples where finite data is required."""


class UndefinedRatioError(NlslabError):
    """A scale-invariant ratio was requested for the zero field."""


class SolverFailureError(NlslabError):
    """Shooting solver could not bracket or converge."""


class CertificationError(NlslabError):
    """Ground-state identities violated beyond the certification tolerance."""


class DomainTooSmallError(NlslabError):
    """Sampled profile does not decay below tolerance inside the box."""


class BoundaryExcludedError(NlslabError):
    """Mass-energy ratio sits on the excluded threshold line."""


class UndefinedTransformError(NlslabError):
    """Galilean reduction of a zero-mass field."""


class UntrustedVarianceError(NlslabError):
    """Too much mass near the box boundary for a meaningful variance."""


class NotApplicableError(NlslabError):
    """A blow-up bound's hypothesis fails; the message names which one."""


class ModeError(NlslabError):
    """Operation requires the other grid kind (periodic vs radial)."""


class NonConvergedError(NlslabError):
    """Iterative fit stalled; partial result may still be usable."""


class ConfigError(NlslabError):
    """Config file rejected; message carries the offending line number."""


class FormatError(NlslabError):
    """Snapshot/profile file has bad magic, version, or length."""
