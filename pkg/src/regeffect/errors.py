"""Exception hierarchy.

Every error carries a stable ``code`` and the ``module`` it originates from so
the CLI can emit a machine-readable error object and pick an exit status.
"""

from __future__ import annotations

EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERICAL = 3


class RegEffectError(Exception):
    code = "error"
    module = "regeffect"
    exit_code = EXIT_DATA

    def to_dict(self) -> dict:
        return {"code": f"{self.module}.{self.code}", "module": self.module, "message": str(self)}


# data / input errors ---------------------------------------------------------

class DataError(RegEffectError):
    module = "data"
    code = "data_error"


class EmptyFile(DataError):
    code = "empty_file"


class RaggedRow(DataError):
    code = "ragged_row"

    def __init__(self, line: int, expected: int, got: int):
        super().__init__(f"line {line}: expected {expected} fields, got {got}")
        self.line = line


class UnknownColumn(DataError):
    code = "unknown_column"


class FormulaSyntaxError(RegEffectError):
    module = "formula"
    code = "syntax_error"
    exit_code = EXIT_USAGE

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class DuplicateTerm(RegEffectError):
    module = "formula"
    code = "duplicate_term"
    exit_code = EXIT_USAGE


class DesignError(RegEffectError):
    module = "linalg"
    code = "design_error"


class NonBinaryGroup(DesignError):
    code = "non_binary_group"


class MissingValue(DesignError):
    code = "missing_value"


class NonNumericColumn(DesignError):
    code = "non_numeric_column"


class InsufficientRows(DesignError):
    code = "insufficient_rows"


class ConfigError(RegEffectError):
    module = "simulation"
    code = "config_error"
    exit_code = EXIT_USAGE


# numerical errors ------------------------------------------------------------

class NumericalError(RegEffectError, ArithmeticError):
    code = "numerical_error"
    exit_code = EXIT_NUMERICAL


class RankDeficient(NumericalError):
    module = "linalg"
    code = "rank_deficient"


class DomainError(NumericalError, ValueError):
    module = "special"
    code = "domain_error"


class NoConvergence(NumericalError):
    module = "special"
    code = "no_convergence"


class CDFSaturated(NumericalError):
    """Non-centrality outside the supported range; ``value`` is the 0/1 limit."""

    module = "nct"
    code = "cdf_saturated"

    def __init__(self, message: str, value: float):
        super().__init__(message)
        self.value = value


class BracketFailure(NumericalError):
    module = "nct"
    code = "bracket_failure"


class DegenerateVariance(NumericalError):
    module = "effect"
    code = "degenerate_variance"
