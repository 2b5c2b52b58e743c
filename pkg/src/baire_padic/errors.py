"""Exception types shared across the package."""


class InvalidArgumentError(ValueError):
    pass


class InvalidStateError(ValueError):
    pass


class ParseError(ValueError):
    """Input file could not be parsed; ``line`` is 1-based when known."""

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        elif line is not None:
            where = f"line {line}: "
        super().__init__(where + message)


class CorruptFileError(ValueError):
    pass


class UndefinedCorrelationError(ValueError):
    pass


class ConfigError(ValueError):
    pass


class StageError(RuntimeError):
    """A pipeline stage failed; the original exception is chained."""

    def __init__(self, stage, cause):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage '{stage}' failed: {cause}")
