"""Exception hierarchy shared by all modules.

Every exception carries a machine-readable ``category`` that the CLI maps to
an exit code.
"""


class ColorsepError(Exception):
    category = "error"


class InvalidParameter(ColorsepError, ValueError):
    category = "invalid-parameter"


class InvalidGraph(ColorsepError, ValueError):
    category = "invalid-graph"


class RejectsNonPlanar(InvalidGraph):
    category = "non-planar"


class RejectsMissingEmbedding(InvalidGraph):
    category = "missing-embedding"


class OracleFailure(ColorsepError, RuntimeError):
    category = "oracle-failure"


class NotFound(ColorsepError, LookupError):
    category = "not-found"


class SizeLimitExceeded(ColorsepError):
    category = "size-limit"


class ParameterOutOfWindow(ColorsepError, ValueError):
    """Raised when r (or q) lies outside the feasible window of an instance.

    ``bound`` names the failing side ("lower" or "upper") and ``window`` holds
    the computed (low, high) pair when it could be computed.
    """

    category = "parameter-window"

    def __init__(self, message, bound=None, window=None):
        super().__init__(message)
        self.bound = bound
        self.window = window


class UnbalancedInput(ColorsepError, ValueError):
    category = "unbalanced-input"


class NormViolation(ColorsepError, ValueError):
    category = "norm-violation"


class OverlappingSolutions(ColorsepError, ValueError):
    category = "overlapping-solutions"


class InvalidInstance(ColorsepError, ValueError):
    category = "invalid-instance"
