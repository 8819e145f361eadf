from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional, Tuple, Union

# initial value of a machine variable: integer counter or empty list
Initial = Union[int, tuple]


class ModelError(Exception):
    pass


class InvalidModel(ModelError):
    pass


class UnknownEvent(ModelError):
    pass


class UnknownComposite(ModelError):
    pass


class UnsharedVariable(ModelError):
    pass


class BadKey(ModelError):
    pass


class ActionKind(str, Enum):
    CREATE = "create"
    PROCESS = "process"
    RELEASE = "release"
    TRANSFER = "transfer"
    RECEIVE = "receive"

    @classmethod
    def parse(cls, name: str) -> "ActionKind":
        """
        Resolve a stage name, case-insensitive
        :param name: stage name (ex: "Transfer")
        :return: ActionKind
        """
        try:
            return cls(name.lower())
        except ValueError:
            raise ModelError("invalid action kind '{}'".format(name))


class Notation(str, Enum):
    CANONICAL = "canonical"
    SIMPLIFIED = "simplified"


@dataclass(frozen=True)
class Variable:
    name: str
    initial: Initial = 0


@dataclass(frozen=True)
class Thimac:
    id: str
    name: str
    parent: Optional[str] = None
    has_storage: bool = False
    variables: Tuple[Variable, ...] = ()

    def variable(self, name: str) -> Optional[Variable]:
        for v in self.variables:
            if v.name == name:
                return v
        return None


@dataclass(frozen=True)
class ActionNode:
    id: str
    owner: str
    kind: ActionKind
    label: str = ""
    updates: Tuple[str, ...] = ()
    message: Optional[str] = None

    @property
    def annotated(self) -> bool:
        return len(self.updates) > 0 or self.message is not None


@dataclass(frozen=True)
class FlowArc:
    id: str
    source: str
    target: str


@dataclass(frozen=True)
class TriggerArc:
    id: str
    source: str
    target: str
    guard: Optional[str] = None


@dataclass(frozen=True)
class Region:
    nodes: frozenset = frozenset()
    arcs: frozenset = frozenset()


@dataclass(frozen=True)
class EventDef:
    id: str
    region: Region
    params: Tuple[str, ...] = ()
    # reference bound by each param, same order as params
    sources: Tuple[str, ...] = ()

    def source_of(self, param: str) -> str:
        idx = self.params.index(param)
        if idx < len(self.sources):
            return self.sources[idx]
        return param


@dataclass(frozen=True)
class CompositeEvent:
    id: str
    members: Tuple[str, ...]
    shared: Tuple[str, ...] = ()
    anchor: Optional[str] = None

    @property
    def anchor_member(self) -> str:
        if self.anchor is not None:
            return self.anchor
        return self.members[0]

    @property
    def end_marker(self) -> str:
        return END_MARKER_PREFIX + self.id


END_MARKER_PREFIX = "end:"


@dataclass(frozen=True)
class BehaviorEdge:
    source: str
    target: str
    repeatable: bool = True


@dataclass(frozen=True)
class BehaviorModel:
    events: frozenset = frozenset()
    edges: Tuple[BehaviorEdge, ...] = ()

    def has_edge(self, source: str, target: str) -> bool:
        return self.edge(source, target) is not None

    def edge(self, source: str, target: str) -> Optional[BehaviorEdge]:
        for e in self.edges:
            if e.source == source and e.target == target:
                return e
        return None


class ConstraintKind(str, Enum):
    BINDING = "binding"
    SUCCESSION = "succession"
    AT_MOST_ONCE = "atmostonce"


@dataclass(frozen=True)
class ConstraintSpec:
    """
    Constraint declaration

    targets holds the composite id (binding, atmostonce) or the (first, second) event ids (succession);
    key is only used by atmostonce
    """

    id: str
    kind: ConstraintKind
    targets: Tuple[str, ...]
    key: Tuple[str, ...] = ()


@dataclass(frozen=True)
class StaticModel:
    thimacs: Tuple[Thimac, ...] = ()
    nodes: Tuple[ActionNode, ...] = ()
    flows: Tuple[FlowArc, ...] = ()
    triggers: Tuple[TriggerArc, ...] = ()
    notation: Notation = Notation.CANONICAL

    def thimac(self, thimac_id: str) -> Optional[Thimac]:
        for t in self.thimacs:
            if t.id == thimac_id:
                return t
        return None

    def node(self, node_id: str) -> Optional[ActionNode]:
        for n in self.nodes:
            if n.id == node_id:
                return n
        return None

    def arc(self, arc_id: str) -> Optional[Union[FlowArc, TriggerArc]]:
        for a in self.flows + self.triggers:
            if a.id == arc_id:
                return a
        return None

    def ancestors(self, thimac_id: str) -> Tuple[str, ...]:
        """
        Thimac id followed by its parent chain, nearest first
        Stops on a cycle or a missing parent
        :param thimac_id:
        :return: tuple of thimac ids
        """
        result = []
        current = thimac_id
        while current is not None and current not in result:
            result.append(current)
            t = self.thimac(current)
            current = t.parent if t is not None else None
        return tuple(result)

    def root(self, thimac_id: str) -> str:
        return self.ancestors(thimac_id)[-1]

    def outgoing_flows(self, node_id: str) -> Tuple[FlowArc, ...]:
        return tuple(a for a in self.flows if a.source == node_id)

    def outgoing_triggers(self, node_id: str) -> Tuple[TriggerArc, ...]:
        return tuple(a for a in self.triggers if a.source == node_id)

    def incoming(self, node_id: str) -> tuple:
        return tuple(a for a in self.flows + self.triggers if a.target == node_id)

    def induced_arcs(self, nodes) -> frozenset:
        """
        Ids of all arcs with both endpoints in nodes
        :param nodes: iterable of node ids
        :return: frozenset
        """
        nodes = set(nodes)
        return frozenset(
            a.id
            for a in self.flows + self.triggers
            if a.source in nodes and a.target in nodes
        )

    def same_machine(self, source: str, target: str) -> bool:
        a = self.node(source)
        b = self.node(target)
        return a is not None and b is not None and a.owner == b.owner


@dataclass(frozen=True)
class Bundle:
    static: StaticModel = field(default_factory=StaticModel)
    events: Tuple[EventDef, ...] = ()
    composites: Tuple[CompositeEvent, ...] = ()
    behavior: Optional[BehaviorModel] = None
    constraints: Tuple[ConstraintSpec, ...] = ()

    def event(self, event_id: str) -> Optional[EventDef]:
        for e in self.events:
            if e.id == event_id:
                return e
        return None

    def composite(self, composite_id: str) -> Optional[CompositeEvent]:
        for c in self.composites:
            if c.id == composite_id:
                return c
        return None

    def register(self, composite: CompositeEvent) -> "Bundle":
        """
        Returns a new bundle with the composite added (or replaced, if the id exists)
        :param composite: CompositeEvent
        :return: Bundle
        """
        composites = [c for c in self.composites if c.id != composite.id]
        composites.append(composite)
        return replace(self, composites=tuple(composites))
