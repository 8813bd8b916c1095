"""Exception hierarchy shared by every module."""


class IdentificationError(Exception):
    """Base class for all domain errors raised by ivsets."""


class UnknownNode(IdentificationError, KeyError):
    def __str__(self) -> str:
        return Exception.__str__(self)


class UnknownEdge(IdentificationError, KeyError):
    def __str__(self) -> str:
        return Exception.__str__(self)


class CycleDetected(IdentificationError):
    pass


class DuplicateEdge(IdentificationError):
    pass


class OrderViolation(IdentificationError):
    """A directed edge points backwards in the declared node order."""


class NotIntermediate(IdentificationError):
    pass


class NodeNotOnPath(IdentificationError):
    pass


class PathBudgetExceeded(IdentificationError):
    pass


class NonConformingParametrization(IdentificationError):
    pass


class MissingParameter(IdentificationError):
    pass


class NumericFailure(IdentificationError):
    pass


class NotPositiveDefinite(NumericFailure):
    pass


class NonStandardized(IdentificationError):
    pass


class TooFewVariables(IdentificationError):
    pass


class DescendantInstrument(IdentificationError):
    pass


class MissingEdge(IdentificationError):
    pass


class NormalizationFailed(IdentificationError):
    pass


class BudgetExceeded(IdentificationError):
    pass


class NearSingular(IdentificationError):
    def __init__(self, message: str, det_q: float | None = None):
        super().__init__(message)
        self.det_q = det_q


class FormatError(IdentificationError):
    pass


class AsymmetryBeyondTolerance(FormatError):
    pass


class TooFewSamples(IdentificationError):
    pass


class ModelSyntaxError(IdentificationError):
    """Malformed model document. Carries 1-based line and column."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class SemanticError(ModelSyntaxError):
    """Well-formed statement that produces an invalid diagram."""


class InvalidEdge(IdentificationError):
    """Structurally meaningless edge, e.g. a bidirected self-loop."""


class DuplicateNode(IdentificationError):
    pass
