"""Exception hierarchy shared by the engine and the CLI."""


class FSRError(Exception):
    """Base class for domain errors (CLI exit code 1)."""

    kind = "domain"


class RuleError(FSRError):
    kind = "rule"


class RuleSyntaxError(RuleError):
    kind = "syntax"

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)


class UnknownTileTypeError(RuleError):
    kind = "unknown-tile-type"


class BoundaryMismatchError(FSRError):
    kind = "boundary-mismatch"


class NotADiskError(FSRError):
    kind = "not-a-disk"


class BudgetExceededError(FSRError):
    """Raised when a construction would exceed the tile budget."""

    kind = "budget"

    def __init__(self, message, stage=None):
        self.stage = stage
        super().__init__(message)


class InsufficientStagesError(FSRError):
    kind = "insufficient-stages"


class ZeroAreaError(FSRError):
    kind = "zero-area"


class DisconnectedAnnulusError(FSRError):
    kind = "disconnected-annulus"


class IterationCapError(FSRError):
    """Cutting-plane loop hit its cap; carries the best bound pair."""

    kind = "iteration-cap"

    def __init__(self, message, sum_sq=None, shortest=None):
        self.sum_sq = sum_sq
        self.shortest = shortest
        super().__init__(message)
