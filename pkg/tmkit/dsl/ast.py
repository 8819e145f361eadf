from dataclasses import dataclass, field
from typing import Optional, Tuple, Union

# source positions are 1-based and excluded from equality, so a re-parsed AST compares equal
# to the original regardless of layout


@dataclass(frozen=True)
class VarDecl:
    name: str
    initial: Union[int, tuple] = 0
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class StageDecl:
    kind: str
    id: str
    label: Optional[str] = None
    updates: Tuple[str, ...] = ()
    message: Optional[str] = None
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class NotationDecl:
    value: str
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class ThimacDecl:
    name: str
    parent: Optional[str] = None
    storage: bool = False
    variables: Tuple[VarDecl, ...] = ()
    stages: Tuple[StageDecl, ...] = ()
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class FlowDecl:
    id: Optional[str]
    source: str
    target: str
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class TriggerDecl:
    id: Optional[str]
    source: str
    target: str
    guard: Optional[str] = None
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class ParamDecl:
    name: str
    source: Optional[str] = None


@dataclass(frozen=True)
class EventDecl:
    id: str
    params: Tuple[ParamDecl, ...] = ()
    nodes: Tuple[str, ...] = ()
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class CompositeDecl:
    id: str
    members: Tuple[str, ...]
    shared: Tuple[str, ...] = ()
    anchor: Optional[str] = None
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class EdgeDecl:
    source: str
    target: str
    norepeat: bool = False
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class BehaviorDecl:
    edges: Tuple[EdgeDecl, ...] = ()
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class ConstraintDecl:
    """
    kind is one of "binding", "succession", "atmostonce"
    """

    id: str
    kind: str
    targets: Tuple[str, ...]
    key: Tuple[str, ...] = ()
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


Declaration = Union[
    NotationDecl,
    ThimacDecl,
    FlowDecl,
    TriggerDecl,
    EventDecl,
    CompositeDecl,
    BehaviorDecl,
    ConstraintDecl,
]


@dataclass(frozen=True)
class ModelAST:
    declarations: Tuple[Declaration, ...] = ()

    def of_type(self, cls) -> tuple:
        return tuple(d for d in self.declarations if isinstance(d, cls))


# script statements

Value = Union[int, str]


@dataclass(frozen=True)
class CreateInstance:
    thimac: str
    instance: str
    attributes: Tuple[Tuple[str, Value], ...] = ()
    label: Optional[str] = None
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class SetAttribute:
    thimac: str
    instance: str
    attribute: str
    value: Value
    label: Optional[str] = None
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class FlowTarget:
    thimac: str
    instance: Optional[str] = None
    attributes: Tuple[Tuple[str, Value], ...] = ()
    stages: Tuple[str, ...] = ()


@dataclass(frozen=True)
class Flow:
    """
    Dotted flow statement: Create.<Thimac>=<id>[.<Attr>=<v>]*[.<stage>]* -> <target> [-> <target>]*

    stages are kept as written; the path actually taken is decided by the model
    """

    thimac: str
    instance: str
    attributes: Tuple[Tuple[str, Value], ...] = ()
    stages: Tuple[str, ...] = ()
    targets: Tuple[FlowTarget, ...] = ()
    label: Optional[str] = None
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class TriggerEvent:
    event: str
    label: Optional[str] = None
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class ConditionalPrint:
    event: str
    text: str
    label: Optional[str] = None
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class End:
    composite: str
    binding: Tuple[Tuple[str, Value], ...] = ()
    label: Optional[str] = None
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


Statement = Union[CreateInstance, SetAttribute, Flow, TriggerEvent, ConditionalPrint, End]


@dataclass(frozen=True)
class Script:
    statements: Tuple[Statement, ...] = ()
