"""Exception taxonomy shared by the library and the CLI exit-code contract."""


class GtreesError(Exception):
    """Base class for all library errors."""


class InputError(GtreesError):
    """Malformed input data (bad JSON, bad word syntax, bad tables). CLI exit 2."""


class PreconditionError(GtreesError):
    """An operation precondition does not hold for the given arguments. CLI exit 3."""


class AlphabetMismatch(PreconditionError):
    """Words over different alphabets were mixed."""


class InternalCheckError(GtreesError):
    """A consistency check that should never fail did fail. CLI exit 4."""


class VerificationMismatch(GtreesError):
    """A computed value contradicts the documented expectation. CLI exit 1."""
