from tmkit.core.expr import ExpressionError
from .ast import (
    ModelAST,
    NotationDecl,
    ThimacDecl,
    VarDecl,
    StageDecl,
    FlowDecl,
    TriggerDecl,
    EventDecl,
    ParamDecl,
    CompositeDecl,
    BehaviorDecl,
    EdgeDecl,
    ConstraintDecl,
    Script,
    CreateInstance,
    SetAttribute,
    Flow,
    FlowTarget,
    TriggerEvent,
    ConditionalPrint,
    End,
)
from .result import ParseResult, LowerResult
from .parser import parse_model, parse_model_file, pretty_print
from .script import parse_script, parse_script_file, pretty_print_script, format_statement
from .lower import lower, load_model, load_model_file
