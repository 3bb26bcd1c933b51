"""
Error types raised across the vibration diagnosis pipeline
"""


class VibrodiagError(ValueError):
    """Base class for every data or configuration error the pipeline raises"""


class ManifestError(VibrodiagError):
    pass


class MissingConditionDir(VibrodiagError):
    pass


class EmptyConditionDir(VibrodiagError):
    pass


class MalformedCsv(VibrodiagError):
    pass


class NonMonotonicTime(MalformedCsv):
    pass


class TooShort(VibrodiagError):
    pass


class NonFiniteInput(VibrodiagError):
    pass


class DegenerateSignal(VibrodiagError):
    pass


class ZeroMean(VibrodiagError):
    pass


class EmptyMatrix(VibrodiagError):
    pass


class AllRowsDropped(VibrodiagError):
    pass


class SingleClass(VibrodiagError):
    pass


class KTooLarge(VibrodiagError):
    pass


class DimensionMismatch(VibrodiagError):
    pass


class WrongModelKind(VibrodiagError):
    pass


class ModelFormatError(VibrodiagError):
    pass


class TooFewRows(VibrodiagError):
    pass


class ClassBelowFoldCount(VibrodiagError):
    pass


class EmptyGrid(VibrodiagError):
    pass


class InvalidConfig(VibrodiagError):
    pass


class ConvergenceWarning(UserWarning):
    """SMO stopped at its iteration cap before meeting the KKT tolerance"""
