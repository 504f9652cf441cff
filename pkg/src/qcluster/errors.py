"""Exception hierarchy shared by the library and the CLI."""


class QClusterError(Exception):
    """Base class for all errors raised by qcluster."""

    exit_code = 2


class InputError(QClusterError, ValueError):
    """Malformed input: bad quiver file, bad word, bad vector."""


class LaurentViolation(QClusterError, ArithmeticError):
    """A division that the Laurent phenomenon guarantees to be exact was not."""

    exit_code = 1


class NotPolynomialCount(QClusterError, ValueError):
    """Point counts do not come from an integer polynomial in q."""

    exit_code = 1

    def __init__(self, kind, message=None):
        self.kind = kind
        super().__init__(message or f"not polynomial-count ({kind})")


class RigiditySamplingError(QClusterError, RuntimeError):
    exit_code = 1


class ResourceCeiling(QClusterError, RuntimeError):
    """Enumeration work estimate exceeds the configured ceiling."""

    exit_code = 3
