"""Exception hierarchy shared by all modules."""


class SvdGcnError(Exception):
    """Base class for every error raised by this package."""


class GraphFormatError(SvdGcnError, ValueError):
    """An edge-list file could not be parsed."""

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class GraphBoundsError(SvdGcnError, IndexError):
    """A node id lies outside ``[0, num_nodes)``."""


class DimensionError(SvdGcnError, ValueError):
    """Array shapes do not agree."""


class SpectralError(SvdGcnError, ArithmeticError):
    """A numerical routine (SVD, power iteration) failed to converge."""


class ConfigError(SvdGcnError, ValueError):
    """Invalid configuration or degenerate dataset for the requested run."""


class VariantError(SvdGcnError, TypeError):
    """An operation was given an operator bank of the wrong variant."""


class DatasetError(SvdGcnError, ValueError):
    """On-disk dataset files are inconsistent with one another."""
