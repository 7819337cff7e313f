"""poscone_errors.py: exceptions raised by the poscone laboratory."""


class PosconeException(Exception):
    """Base class of all domain errors; the cli maps these to exit code 1"""


class ConfigError(PosconeException):
    """Exception to indicate an invalid SpaceConfig or EnsembleSpec"""

class DimensionError(PosconeException):
    """Exception to indicate operands of mismatching or out of range dimension"""

class PositivityError(PosconeException):
    """Exception to indicate a negative entry (below -tol_abs) in a claimed positive object"""

class DegenerateInputError(PosconeException):
    """Exception to indicate a zero operator or zero vector where a non-zero one is required"""

class ContractionError(PosconeException):
    """Exception to indicate an operator whose norm is not strictly below 1 where that is required"""

class DeltaTooLargeError(PosconeException):
    """Exception to indicate that a perturbation size breaks the contraction property"""

    def __init__(self, message: str, admissible_delta: float):
        super().__init__(message)
        self.admissible_delta = admissible_delta

class UnsupportedError(PosconeException):
    """Exception to indicate a request outside the supported dimension range"""

class IterationLimitError(PosconeException):
    """Exception to indicate that an iteration did not converge within max_iter"""

    def __init__(self, message: str, best=None):
        super().__init__(message)
        self.best = best

class SolverError(PosconeException):
    """Exception to indicate failure of the linear programming backend"""

    def __init__(self, message: str, status=None):
        super().__init__(message)
        self.status = status

class RecipeError(PosconeException):
    """Exception to indicate a construction recipe that violates one of its inequalities"""

    def __init__(self, message: str, inequality: str):
        super().__init__(message)
        self.inequality = inequality

class RelationError(PosconeException):
    """Exception to indicate that B C = C B + delta D (or its preconditions) does not hold"""

class ConsistencyError(PosconeException):
    """Exception to indicate an internal inconsistency; a bug, never an input problem"""


class InterchangeException(Exception):
    """Exception to indicate a malformed interchange document; the cli maps these to exit code 2"""

    def __init__(self, message: str, line: int|None = None, column: int|None = None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column
