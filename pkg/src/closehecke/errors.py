"""Exception hierarchy shared across the package.

The CLI maps these onto its exit codes: guard violations exit 2, audit
failures exit 3, transfer mismatches exit 4.
"""


class CloseHeckeError(Exception):
    """Base class for all package errors."""


class RingMismatch(CloseHeckeError):
    """Operands belong to different rings."""


class NotAUnit(CloseHeckeError):
    """Inversion of an element of positive valuation."""


class NotEisenstein(CloseHeckeError):
    """Polynomial fails the Eisenstein shape checks."""


class NotAnIsomorphism(CloseHeckeError):
    """A generator-image map failed its ring-isomorphism audit."""


class NotCloseEnough(CloseHeckeError):
    """Stabilizer transfer audit failed; the two backends do not match at
    the requested closeness level.  An expected outcome for small levels."""


class PrecisionExhausted(CloseHeckeError):
    """An exact answer cannot be certified at the working level."""


class SizeGuardExceeded(CloseHeckeError):
    """An enumeration would exceed a configured size guard."""


class AuditFailure(CloseHeckeError):
    """A runtime self-check (internal consistency identity) failed."""
