class KleinTowerError(Exception):
    pass


class ParameterError(KleinTowerError, ValueError):
    """Bad user-supplied parameter (prime, degree, branch points, generators)."""


class InvalidSubsetError(ParameterError):
    """A subset of {1..8} that does not encode a 2-torsion class."""


class NotACurveError(ParameterError):
    """Empty branch set: the double cover is disconnected."""


class ConsistencyError(KleinTowerError, AssertionError):
    """An internal identity that must always hold was violated."""


class CountInconsistencyError(KleinTowerError):
    """Point counts that do not come from a Weil polynomial."""
