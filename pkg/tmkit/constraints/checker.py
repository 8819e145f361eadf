import logging
from dataclasses import dataclass, field
from typing import List

from tmkit.core.model import Bundle, ConstraintKind, ConstraintSpec, ModelError
from tmkit.engine.trace import Trace
from .checks import (
    BEHAVIOR_ID,
    Violation,
    check_at_most_once,
    check_behavior,
    check_binding,
    check_succession,
)

logger = logging.getLogger("tmkit.constraints")


@dataclass
class Report:
    violations: List[Violation] = field(default_factory=list)
    # constraint ids, in evaluation order
    checked: List[str] = field(default_factory=list)

    @property
    def conforming(self) -> bool:
        return len(self.violations) == 0

    def to_text(self) -> str:
        lines = [str(v) for v in self.violations]
        if self.conforming:
            lines.append("CONFORMING {} checked".format(len(self.checked)))
        else:
            lines.append("VIOLATIONS {}".format(len(self.violations)))
        return "\n".join(lines) + "\n"


class ConstraintChecker:
    def __init__(self, bundle: Bundle):
        """
        Constructor
        :param bundle: Bundle with the composites, behavior model and constraint declarations
        """
        self._bundle = bundle

    def check_constraint(self, spec: ConstraintSpec, trace: Trace) -> List[Violation]:
        """
        Evaluate a single constraint declaration
        :param spec: ConstraintSpec
        :param trace: Trace
        :return: list of Violation
        """
        if spec.kind == ConstraintKind.BINDING:
            return check_binding(trace, spec.targets[0], self._bundle, spec.id)
        if spec.kind == ConstraintKind.SUCCESSION:
            first, second = spec.targets
            return check_succession(trace, first, second, self._bundle, spec.id)
        if spec.kind == ConstraintKind.AT_MOST_ONCE:
            return check_at_most_once(trace, spec.targets[0], spec.key, self._bundle, spec.id)
        raise ModelError("unsupported constraint kind '{}'".format(spec.kind))

    def check(self, trace: Trace) -> Report:
        """
        Evaluate every declared constraint, then the behavior model if present
        Violations are ordered by step, then by declaration order of their constraint
        :param trace: Trace
        :return: Report
        """
        report = Report()
        collected = []
        for order, spec in enumerate(self._bundle.constraints):
            report.checked.append(spec.id)
            collected.extend((order, v) for v in self.check_constraint(spec, trace))

        if self._bundle.behavior is not None:
            order = len(report.checked)
            report.checked.append(BEHAVIOR_ID)
            collected.extend(
                (order, v) for v in check_behavior(trace, self._bundle.behavior, BEHAVIOR_ID)
            )

        collected.sort(key=lambda item: (item[1].time, item[0]))
        report.violations = [v for _, v in collected]
        logger.info(
            "checked {} constraints, {} violations".format(len(report.checked), len(report.violations))
        )
        return report


def evaluate(bundle: Bundle, trace: Trace) -> Report:
    """
    Evaluate all constraints of a bundle over a trace
    :param bundle: Bundle
    :param trace: Trace
    :return: Report
    """
    return ConstraintChecker(bundle).check(trace)
