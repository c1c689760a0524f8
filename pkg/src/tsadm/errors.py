"""Exception hierarchy. Each class carries the CLI exit code for its category."""


class TsadmError(Exception):
    exit_code = 1


class ParseError(TsadmError):
    exit_code = 2


class InvalidParameter(TsadmError, ValueError):
    exit_code = 2


class DataShapeError(TsadmError, ValueError):
    exit_code = 3


class LengthMismatch(DataShapeError):
    pass


class SegmentOutOfRange(DataShapeError):
    pass


class NoGroundTruthSegments(DataShapeError):
    pass


class NoAnomalies(NoGroundTruthSegments):
    pass


class NoPositives(NoGroundTruthSegments):
    pass


class SingleClass(DataShapeError):
    pass


class SeriesTooShort(DataShapeError):
    pass


class TooFewLevels(DataShapeError):
    pass


class DegenerateVariance(DataShapeError):
    pass


class EmptyGrid(InvalidParameter):
    pass


class InvalidK(InvalidParameter):
    pass


class InvalidAlpha(InvalidParameter):
    pass


class BudgetInfeasible(TsadmError):
    exit_code = 4


class UnknownMetric(TsadmError, KeyError):
    exit_code = 5

    def __str__(self):
        return Exception.__str__(self)


class MissingMetric(UnknownMetric):
    pass
