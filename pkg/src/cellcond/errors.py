"""Exception hierarchy shared across the package.

Everything raised on purpose derives from CellcondError so callers (and the
command-line driver) can distinguish data problems from genuine bugs.
"""


class CellcondError(Exception):
    """Base class for all errors raised by this package."""


class NonpositiveTimeConstant(CellcondError):
    """A time-constant map evaluated to a value <= 0 at the requested SOC."""


class NonFiniteBracket(CellcondError):
    """An iterated bracket evaluation produced NaN or infinity."""


class DegenerateCv(CellcondError):
    """The constant-voltage current is ill-posed for a zero-resistance cell."""


class CountExceedsPopulation(CellcondError):
    """Asked to age more cells than the population contains."""


class MixedGrids(CellcondError):
    """Profiles with different SOC grids cannot be aggregated."""


class OddPopulation(CellcondError):
    """A population with an odd cell count cannot be split into two packs."""


class EmptyDesignSet(CellcondError):
    """Best-design selection needs at least one candidate."""


class GenerationFailed(CellcondError):
    """Random cell generation kept producing invalid cells."""


class ParseError(CellcondError):
    """A population file is not valid JSON."""


class SchemaError(CellcondError):
    """A population file parsed but does not match the expected layout."""


class ValidationError(CellcondError):
    """A structurally well-formed cell fails physical validation."""
