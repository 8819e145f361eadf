from .model import (
    ActionKind,
    ActionNode,
    BadKey,
    BehaviorEdge,
    BehaviorModel,
    Bundle,
    CompositeEvent,
    ConstraintKind,
    ConstraintSpec,
    END_MARKER_PREFIX,
    EventDef,
    FlowArc,
    InvalidModel,
    ModelError,
    Notation,
    Region,
    StaticModel,
    Thimac,
    TriggerArc,
    UnknownComposite,
    UnknownEvent,
    UnsharedVariable,
    Variable,
)
from .diagnostics import Diagnostic, error, warning, has_errors, sort_diagnostics
from .validate import validate_static_model, check_region, flow_legal
from .notation import canonicalize, simplify
from .compose import add_composite, compose, composite_id
