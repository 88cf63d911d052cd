"""Exception taxonomy for the paris package.

Every domain failure raises a subclass of ParisError so callers (CLI,
service) can map failures to exit codes / HTTP statuses in one place.
"""


class ParisError(Exception):
    """Base class for all domain errors."""


# -- ingest ------------------------------------------------------------------

class MalformedHeader(ParisError):
    pass


class NonMonotonicTimestamp(ParisError):
    pass


class WindowInverted(ParisError):
    pass


class NoBedInterval(ParisError):
    pass


# -- metrics -----------------------------------------------------------------

class LengthMismatch(ParisError):
    pass


class EmptyInput(ParisError):
    pass


class BandInfeasible(ParisError):
    pass


class NotADistribution(ParisError):
    pass


class BadComponentCount(ParisError):
    pass


# -- clustering --------------------------------------------------------------

class TooFewPoints(ParisError):
    pass


class SingleCluster(ParisError):
    pass


class EmptyGrid(ParisError):
    pass


# -- modes / recipes ---------------------------------------------------------

class FrequencyDomainUnsupported(ParisError):
    pass


class BadWindow(ParisError):
    pass


class MissingAssignments(ParisError):
    pass


class TooFewDays(ParisError):
    pass


# -- recommendation ----------------------------------------------------------

class NoRecipesForMode(ParisError):
    pass


class UnknownMetadataField(ParisError):
    pass


class EmptyCohort(ParisError):
    pass


# -- bundle / synth / service ------------------------------------------------

class UnknownSubject(ParisError):
    pass


class EmptyBundle(ParisError):
    pass


class SpecInvalid(ParisError):
    pass


class BundleNotLoaded(ParisError):
    pass
