from .checks import (
    BEHAVIOR_ID,
    Violation,
    CompositeOccurrence,
    composite_occurrences,
    check_binding,
    check_succession,
    check_at_most_once,
    check_behavior,
    format_witness,
)
from .checker import Report, ConstraintChecker, evaluate
