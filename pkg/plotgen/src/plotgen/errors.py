"""Error types raised while locating and validating input CSVs."""


class PlotgenError(Exception):
    """Base class for renderer failures."""


class SchemaError(PlotgenError):
    """A CSV does not carry the exact simulator column header."""


class MissingFile(PlotgenError):
    """No CSV matching the figure's naming convention was found."""
