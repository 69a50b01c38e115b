"""Exception types shared across the package."""


class ReprSchemeError(Exception):
    """Base class for every error raised by this package."""


class ParseError(ReprSchemeError):
    def __init__(self, message, line=None, column=None, source=None):
        self.message = message
        self.line = line
        self.column = column
        self.source = source
        where = ""
        if source:
            where += f"{source}:"
        if line is not None:
            where += f"{line}:"
            if column is not None:
                where += f"{column}:"
        super().__init__(f"{where} {message}" if where else message)


class ValidationError(ReprSchemeError):
    """A mathematical condition failed; ``obj`` names the offending relator, edge or point."""

    def __init__(self, message, obj=None):
        self.obj = obj
        super().__init__(message)


class TowerHeightError(ReprSchemeError):
    pass


class AnisotropyError(ValidationError):
    pass


class OrbitError(ValidationError):
    pass
