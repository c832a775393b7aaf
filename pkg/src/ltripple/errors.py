"""Exception types shared across the package."""


class InvalidParameter(ValueError):
    pass


class FormatError(ValueError):
    """Malformed distribution file; message names the offending entry."""


class SessionError(ValueError):
    """Symbol does not belong to the decoder session (wrong k or payload length)."""


class SolverFailure(RuntimeError):
    """NNLS did not converge within its iteration cap.

    The best iterate found so far is kept on ``best`` so callers can still
    inspect it.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class DegenerateDesign(RuntimeError):
    pass
