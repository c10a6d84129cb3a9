class CcicError(Exception):
    """Base class for workbench errors."""


class BfnParseError(CcicError, ValueError):
    def __init__(self, message: str, line: int, column: int | None = None):
        self.line = line
        self.column = column
        where = f"line {line}" if column is None else f"line {line}, column {column}"
        super().__init__(f"{where}: {message}")


class UnknownFunctionError(CcicError, ValueError):
    pass


class CoverLimitError(CcicError, ValueError):
    pass


class EmptySideError(CcicError, ValueError):
    """Raised when a quantity is asked of a color the function never takes."""


class ConfigError(CcicError, ValueError):
    pass
