"""Exception hierarchy.

Every domain failure derives from :class:`DomainError`; the CLI maps these to
exit code 1 and everything else (bad flags, unparsable input) to exit code 2.
"""


class DomainError(Exception):
    """Base class for mathematical preconditions that do not hold."""


# residue_groups
class InvalidGenerator(DomainError, ValueError):
    pass


class NotASubgroup(DomainError, ValueError):
    pass


class NotAUnit(DomainError, ValueError):
    pass


# extensions
class CompositionMismatch(DomainError, ValueError):
    pass


class NotAnInclusion(DomainError, ValueError):
    """Raised when a morphism L1 -> L2 is requested but L1 is not a subfield of L2."""


# frobenius_covers
class RamifiedPrime(DomainError, ValueError):
    pass


class ArchimedeanZeroUnsupported(DomainError, ValueError):
    pass


class MissingArchimedeanPlace(DomainError, ValueError):
    pass


# profinite
class SelfLinkingUndefined(DomainError, ValueError):
    pass


class InvalidScale(DomainError, ValueError):
    pass


# semilocal
class NotOnOrbitCp(DomainError, ValueError):
    pass


class NotInGammaS(DomainError, ValueError):
    pass


# schwartz
class PlaceNotPresent(DomainError, KeyError):
    pass


class PlaceAlreadyPresent(DomainError, ValueError):
    pass


class NotFactorable(DomainError, ValueError):
    pass


# ktheory
class InvalidHexagon(DomainError, ValueError):
    pass
