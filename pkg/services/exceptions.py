"""
Pipeline Exceptions

Each error carries the exit status `doa` reports for it
"""


class DOAError(Exception):
    """Base class for all pipeline errors"""
    exit_code = 1


class FormatError(DOAError, ValueError):
    """Malformed or missing input file"""
    exit_code = 3


class ConfigError(FormatError):
    """Unknown key or out-of-range value in a config file"""


class DimensionMismatchError(DOAError, ValueError):
    """Rasters that must share a size do not"""
    exit_code = 4


class NoForegroundFound(DOAError):
    """No first-frame proposal overlaps the motion mask enough"""
    exit_code = 2


class EmptyMaskError(DOAError, ValueError):
    """Operation needs at least one foreground pixel"""


class SelectionError(DOAError, ValueError):
    """Inputs to a selection or loss step violate its preconditions"""
