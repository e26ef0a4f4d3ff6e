"""Exception and warning types shared across the package."""


class EsmSpotsError(Exception):
    """Base class for all errors raised by esmspots."""


class EmptyDataset(EsmSpotsError):
    """No usable records in the input.

    Carries any row rejections gathered before the dataset turned out to be
    empty, so callers can still write a rejection report.
    """

    def __init__(self, message: str = "", rejections: tuple = ()):
        super().__init__(message)
        self.rejections = tuple(rejections)


class SchemaError(EsmSpotsError):
    """Input table does not match the expected header."""


class IdOutOfRange(EsmSpotsError, IndexError):
    """Point id does not exist in the index."""


class InsufficientPoints(EsmSpotsError):
    """Operation needs more points than were supplied."""


class InvalidBand(EsmSpotsError):
    """Distance band must be positive."""


class DegenerateValues(EsmSpotsError):
    """Values have zero variance; the statistic is undefined."""


class DegenerateMarginals(EsmSpotsError):
    """All rating mass sits in one category; chance agreement is 1."""


class NoNeighbors(EsmSpotsError):
    """Every neighbor list is empty at the given band."""


class InvalidPValue(EsmSpotsError):
    """p-values must lie in [0, 1]."""


class InputMismatch(EsmSpotsError):
    """Inputs that must be aligned (by length or point id) are not."""


class InvalidConfig(EsmSpotsError):
    """A configuration value is out of its allowed range."""


class AllNeighborsWarning(UserWarning):
    """A point's neighborhood covered the whole dataset; its z was set to 0."""


class MonotoneCurveWarning(UserWarning):
    """The autocorrelation curve never peaked; the last distance was used."""


class NoSignificantPeakWarning(UserWarning):
    """No significant peak in the curve; fell back to the global maximum."""


class SmallSampleWarning(UserWarning):
    """Fewer points than recommended for a stable analysis."""
