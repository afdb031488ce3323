"""Exception hierarchy shared by all modules."""


class VCSPError(Exception):
    """Base class for every error raised by this package."""


class InputError(VCSPError):
    """Malformed input: bad file contents, arity mismatches, bad indices."""

    def __init__(self, message, location=None):
        self.location = location
        if location is not None:
            message = f"{location}: {message}"
        super().__init__(message)


class ParseError(InputError):
    pass


class MalformedSystem(InputError):
    pass


class BudgetExceeded(VCSPError):
    """A search or enumeration would exceed its configured cap."""


class NotAPolymorphism(VCSPError):
    pass


class ImproperSuperposition(VCSPError):
    """Superposition put negative weight on a non-projection.

    The raw (invalid) weight map is kept in ``weights``.
    """

    def __init__(self, message, weights=None):
        super().__init__(message)
        self.weights = weights or {}


class CoreRequired(VCSPError):
    pass


class NotACore(CoreRequired):
    pass


class IncompatibleCongruence(VCSPError):
    pass


class NotASubuniverse(VCSPError):
    pass


class ConservativityRequired(VCSPError):
    pass


class DomainSizeError(VCSPError):
    pass


class CertificateRequired(VCSPError):
    pass


class InternalContradiction(VCSPError):
    """An LP outcome that the theory rules out; indicates a bug upstream."""
