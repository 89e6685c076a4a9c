"""Exception types raised by fplab."""


class FplabError(Exception):
    """Base class for all fplab errors."""


class InvalidParameterError(FplabError, ValueError):
    pass


class InvalidPlanError(FplabError, ValueError):
    pass


class InsufficientSamplesError(FplabError, ValueError):
    pass


class MissingParameterError(FplabError, ValueError):
    pass


class InconsistentInputError(FplabError, ValueError):
    pass


class MapFormatError(FplabError, ValueError):
    """A piecewise-linear map file or a distance-matrix file could not be parsed."""
