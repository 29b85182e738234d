class PlegmaLabError(Exception):
    """Base class for all errors raised by plegmalab"""


class InvalidInput(PlegmaLabError, ValueError):
    """A precondition of an operation is violated"""


class InvalidConfig(PlegmaLabError, ValueError):
    """A configuration (experiment or norm parameters) failed validation"""


class InvalidFunctional(InvalidInput):
    """A functional does not belong to the norming set"""


class ScaleRefusal(PlegmaLabError, RuntimeError):
    """An exact computation was refused because it is out of reach.

    The message always suggests the cheaper alternative (greedy / sampled mode,
    a smaller horizon etc.)
    """
