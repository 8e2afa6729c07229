"""Exception hierarchy shared by every module of the package."""


class IsorankError(Exception):
    """Base class for all errors raised by isorank."""


class SingularModel(IsorankError):
    pass


class ZeroTwist(IsorankError):
    pass


class PointNotOnCurve(IsorankError):
    pass


class BadReduction(IsorankError):
    """Raised when a good-reduction-only routine meets a prime dividing the discriminant."""

    def __init__(self, p, msg=None):
        self.p = p
        super().__init__(msg or f"bad reduction at p={p}")


class NonMinimalModel(IsorankError):
    def __init__(self, p, msg=None):
        self.p = p
        super().__init__(msg or f"model is not minimal at p={p}")


class TransferNotApplicable(IsorankError):
    pass


class InsufficientTable(IsorankError):
    pass


class ZeroInput(IsorankError):
    pass


class FactorizationIncomplete(IsorankError):
    """The factoring budget ran out.

    ``partial`` is the squarefree part accumulated so far and ``cofactor`` the
    unfactored remainder; the true squarefree class is
    ``partial * squarefree_part(cofactor)`` up to squares.
    """

    def __init__(self, value, partial, cofactor):
        self.value = value
        self.partial = partial
        self.cofactor = cofactor
        super().__init__(f"could not factor {cofactor} (from {value})")


class PrecisionUnreachable(IsorankError):
    pass


class PoleOfMap(IsorankError):
    pass


class ParseError(IsorankError):
    pass


class DegenerateMap(IsorankError):
    pass


class FixtureError(IsorankError):
    """Embedded table data failed to load or failed its checksum."""


class SnapshotMismatch(IsorankError):
    """A checkpoint belongs to a different scan configuration."""


class ScanInterrupted(IsorankError):
    """A chunked scan stopped early; its checkpoint is valid for resuming."""

    def __init__(self, done, total):
        self.done = done
        self.total = total
        super().__init__(f"scan stopped after {done}/{total} chunks")
