"""Exception hierarchy shared by every module of the package."""


class CRGateError(Exception):
    """Base class for all library errors."""


class InvalidDimensionError(CRGateError, ValueError):
    pass


class NotHermitianError(CRGateError, ValueError):
    pass


class PoleError(CRGateError, ZeroDivisionError):
    """A closed-form expression or the perturbative solve hit a resonance."""

    def __init__(self, message, pole=None):
        super().__init__(message)
        self.pole = pole


class DomainError(CRGateError, ValueError):
    pass


class DegenerateAssignmentError(CRGateError):
    """Eigenvectors cannot be attributed to blocks unambiguously.

    ``overlaps`` is the (n_eigenvectors, n_blocks) table of squared
    projections that triggered the failure.
    """

    def __init__(self, message, overlaps=None):
        super().__init__(message)
        self.overlaps = overlaps


class IllConditionedPartitionError(CRGateError):
    pass


class SmallDenominatorError(PoleError):
    def __init__(self, message, p=None, q=None, e_p=None, e_q=None):
        super().__init__(message)
        self.p, self.q, self.e_p, self.e_q = p, q, e_p, e_q


class ConfigError(CRGateError, ValueError):
    def __init__(self, message, line=None, field=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        prefix = f"[{', '.join(where)}] " if where else ""
        super().__init__(prefix + message)
        self.line = line
        self.field = field


class OutputError(CRGateError, OSError):
    def __init__(self, message, path=None):
        super().__init__(f"{path}: {message}" if path is not None else message)
        self.path = path
