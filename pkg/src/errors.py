class EPowerError(Exception):
    exit_code = 1

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class ArgumentError(EPowerError, ValueError):
    exit_code = 2


class PartyIndexError(ArgumentError, IndexError):
    pass


class ValidationError(EPowerError):
    exit_code = 3


class UnsupportedInputError(EPowerError):
    exit_code = 2


class GateParseError(EPowerError):
    # Holds every message found during lexing/parsing/checking, not only the first one
    exit_code = 2

    def __init__(self, messages: list[str]):
        self.messages = list(messages)
        super().__init__("; ".join(self.messages) if self.messages else "unparsable gate")


class NonConvergenceError(EPowerError):
    exit_code = 4

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class FormulaResidualError(EPowerError):
    pass
