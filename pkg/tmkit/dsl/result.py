from dataclasses import dataclass, field
from typing import Any, List, Optional

from tmkit.core.diagnostics import Diagnostic, has_errors


@dataclass
class ParseResult:
    value: Optional[Any] = None
    diagnostics: List[Diagnostic] = field(default_factory=list)

    @property
    def success(self) -> bool:
        return self.value is not None and not has_errors(self.diagnostics)


@dataclass
class LowerResult:
    bundle: Optional[Any] = None
    diagnostics: List[Diagnostic] = field(default_factory=list)

    @property
    def success(self) -> bool:
        return self.bundle is not None and not has_errors(self.diagnostics)
