from dataclasses import dataclass
from typing import List, Optional

SEVERITY_ERROR = "error"
SEVERITY_WARNING = "warning"


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    severity: str = SEVERITY_ERROR
    element: Optional[str] = None
    line: Optional[int] = None
    column: Optional[int] = None

    @property
    def is_error(self) -> bool:
        return self.severity == SEVERITY_ERROR

    def at(self, line: int, column: int) -> "Diagnostic":
        return Diagnostic(
            self.code, self.message, self.severity, self.element, line, column
        )

    def __str__(self):
        if self.line is not None:
            where = "{}:{}".format(self.line, self.column or 1)
        elif self.element is not None:
            where = self.element
        else:
            where = "-"
        return "{} {} [{}] {}".format(where, self.severity, self.code, self.message)


def error(code: str, message: str, element: str = None, line: int = None, column: int = None) -> Diagnostic:
    return Diagnostic(code, message, SEVERITY_ERROR, element, line, column)


def warning(code: str, message: str, element: str = None, line: int = None, column: int = None) -> Diagnostic:
    return Diagnostic(code, message, SEVERITY_WARNING, element, line, column)


def has_errors(diagnostics: List[Diagnostic]) -> bool:
    return any(d.is_error for d in diagnostics)


def sort_diagnostics(diagnostics: List[Diagnostic]) -> List[Diagnostic]:
    """
    Stable sort by source position; diagnostics without position keep their relative order at the end
    :param diagnostics:
    :return: list
    """

    def _key(d: Diagnostic):
        if d.line is None:
            return (1, 0, 0)
        return (0, d.line, d.column or 0)

    return sorted(diagnostics, key=_key)
