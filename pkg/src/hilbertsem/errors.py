"""Exception hierarchy shared by every module.

The CLI reports any ``HilbertError`` as ``ERROR <ClassName>: <message>``.
"""


class HilbertError(Exception):
    """Base class for all errors raised by the package."""

    @property
    def kind(self) -> str:
        return type(self).__name__


class ParseError(HilbertError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}, column {column}: "
        elif column is not None:
            where = f"column {column}: "
        super().__init__(where + message)
