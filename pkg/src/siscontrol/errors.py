"""Exception hierarchy shared by all siscontrol modules."""


class SisControlError(Exception):
    """Base class for all siscontrol errors."""


class GraphError(SisControlError, ValueError):
    """Domain error: bad node ids, weights outside [0,1], malformed input."""


class CrusadeStructureError(GraphError):
    """Crusade bags do not shrink by exactly one node per step."""


class CapacityError(SisControlError):
    """An exhaustive oracle was asked to run above its configured size limit."""


class ContractError(SisControlError):
    """An operation received an input that violates its calling contract."""


class SolverError(SisControlError):
    """A numeric solver failed to converge within its iteration cap."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals or {}


class InvariantViolation(SisControlError):
    """A runtime drift/conservation assertion fired during a simulation."""


class StalledStateError(SisControlError):
    """Total transition rate is zero while nodes are still infected."""


class ManifestError(SisControlError, ValueError):
    """Experiment manifest failed to parse or validate."""

    def __init__(self, message, line=None, column=None):
        loc = "" if line is None else f" (line {line}, column {column or 1})"
        super().__init__(message + loc)
        self.line = line
        self.column = column
