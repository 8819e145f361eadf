from .state import (
    EngineError,
    UnknownElement,
    UnknownInstance,
    AttributeOnNonRecord,
    GuardTypeError,
    StorageMiss,
    EvaluationError,
    FiringLimit,
    Thing,
    State,
    init_state,
)
from .trace import Occurrence, Message, Trace, TraceFormatError, to_text, from_text
from .interpreter import (
    DEFAULT_MAX_FIRINGS,
    Firing,
    StepRecord,
    RunResult,
    Interpreter,
    detect_occurrences,
    exec_statement,
    run_script,
)
