"""Exception hierarchy.

Every error raised by the package derives from :class:`VadWindowError`.
``ConfigError`` subclasses map to CLI exit code 1, ``DataError`` subclasses
to exit code 2.
"""


class VadWindowError(Exception):
    exit_code = 2


class ConfigError(VadWindowError):
    exit_code = 1


class DataError(VadWindowError):
    exit_code = 2


# audio ingest
class NotRiffWav(DataError):
    pass


class UnsupportedFormat(DataError):
    pass


class EmptyAudio(DataError):
    pass


class IoFailure(DataError):
    pass


# framing
class WindowTooSmall(ConfigError):
    pass


class WindowTooLarge(ConfigError):
    pass


class NonIntegralWindow(ConfigError):
    pass


class NativeLargerThanWindow(ConfigError):
    pass


class ClipShorterThanWindow(DataError):
    pass


# scoring / traces
class EmptyWindow(DataError):
    pass


class EmptyInput(DataError):
    pass


class MalformedTraceFile(DataError):
    pass


class ScoreOutOfRange(DataError):
    pass


class FrameCountMismatch(DataError):
    pass


# labels
class MalformedLabelFile(DataError):
    pass


class NegativeTime(DataError):
    pass


class EndBeforeStart(DataError):
    pass


class EmptyTrack(DataError):
    pass


# hysteresis / metrics
class InvalidStep(ConfigError):
    pass


class AlignmentMismatch(DataError):
    pass


class LengthMismatch(DataError):
    pass


class EmptyCounts(DataError):
    pass


class SingleClassInput(DataError):
    pass


class NoPositives(DataError):
    pass


# fixtures
class InvalidSpec(ConfigError):
    pass
