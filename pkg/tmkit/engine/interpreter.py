import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from tmkit.core.expr import (
    ExpressionError,
    ReferenceMissing,
    evaluate,
    parse_guard,
    parse_update,
    split_updates,
)
from tmkit.core.model import (
    ActionKind,
    ActionNode,
    Bundle,
    FlowArc,
    StaticModel,
)
from tmkit.dsl.ast import (
    ConditionalPrint,
    CreateInstance,
    End,
    Flow,
    Script,
    SetAttribute,
    TriggerEvent,
)
from tmkit.engine.state import (
    AttributeOnNonRecord,
    EngineError,
    EvaluationError,
    FiringLimit,
    GuardTypeError,
    State,
    StorageMiss,
    Thing,
    UnknownElement,
    UnknownInstance,
    init_state,
)
from tmkit.engine.trace import Message, Occurrence, Trace, format_value

logger = logging.getLogger("tmkit.engine")

DEFAULT_MAX_FIRINGS = 10000

_MISSING = object()


@dataclass
class Firing:
    node: str
    owner: str
    # record carried by the firing: the flowing thing, or the context record for pure actions
    record: Dict[str, Any]
    # variable valuation right after the node's updates
    variables: Dict[str, Dict[str, Any]]


@dataclass
class StepRecord:
    step: int
    firings: List[Firing] = field(default_factory=list)
    # thimac id -> record of the target instance named by the statement
    targets: Dict[str, Dict[str, Any]] = field(default_factory=dict)

    @property
    def fired(self) -> set:
        return set(f.node for f in self.firings)


@dataclass
class RunResult:
    state: State
    trace: Trace
    error: Optional[EngineError] = None
    # 0-based index of the failed statement
    failed_at: Optional[int] = None

    @property
    def success(self) -> bool:
        return self.error is None


def _lookup_attribute(model: StaticModel, name: str, owner: str, record, targets) -> Any:
    if record is not None and name in record:
        return record[name]
    for tid in model.ancestors(owner):
        target = targets.get(tid, None)
        if target is not None and name in target:
            return target[name]
    return _MISSING


def _lookup_variable(model: StaticModel, name: str, owner: str, variables) -> Any:
    if "." in name:
        tid, var = name.split(".", 1)
        return variables.get(tid, {}).get(var, _MISSING)
    for tid in model.ancestors(owner):
        scope = variables.get(tid, {})
        if name in scope:
            return scope[name]
    return _MISSING


def resolve_reference(model: StaticModel, name: str, owner: str, record, targets, variables):
    """
    Resolve a name while a stage of owner fires

    Lookup order: qualified variable, thing attribute, target instance attribute for the owner
    or an ancestor, owner/ancestor variable
    :return: value; raises ReferenceMissing
    """
    if "." in name:
        value = _lookup_variable(model, name, owner, variables)
    else:
        value = _lookup_attribute(model, name, owner, record, targets)
        if value is _MISSING:
            value = _lookup_variable(model, name, owner, variables)
    if value is _MISSING:
        raise ReferenceMissing(name)
    return value


def _bind(model: StaticModel, firings: List[Firing], source: str, targets) -> Any:
    if "." not in source:
        values = []
        for f in firings:
            value = _lookup_attribute(model, source, f.owner, f.record, targets)
            if value is not _MISSING:
                values.append(value)
        if len(values) > 0:
            if any(v != values[0] for v in values):
                return _MISSING
            return values[0]
    last = firings[-1]
    return _lookup_variable(model, source, last.owner, last.variables)


def detect_occurrences(bundle: Bundle, record: StepRecord) -> List[Occurrence]:
    """
    Events whose whole region fired during a step

    Attribute-bound parameters must agree across the region's firings; parameters bound only by
    variables take the value after the region's last firing. An unresolved parameter means the
    event did not occur
    :param bundle: Bundle
    :param record: StepRecord of a completed step
    :return: occurrences, in event declaration order
    """
    fired = record.fired
    result = []
    for evt in bundle.events:
        if not evt.region.nodes <= fired:
            continue
        firings = [f for f in record.firings if f.node in evt.region.nodes]
        binding = []
        for param in evt.params:
            value = _bind(bundle.static, firings, evt.source_of(param), record.targets)
            if value is _MISSING:
                logger.debug(
                    "event {} not detected: parameter {} unresolved".format(evt.id, param)
                )
                break
            binding.append((param, value))
        else:
            result.append(Occurrence(evt.id, record.step, tuple(binding)))
    return result


class _StepRun:
    """
    Execution of the firings of a single statement
    """

    def __init__(self, interpreter: "Interpreter", state: State, targets: Dict[str, Dict[str, Any]],
                 source: Optional[str] = None):
        self.bundle = interpreter.bundle
        self.model = interpreter.bundle.static
        self.max_firings = interpreter.max_firings
        self.state = state
        self.record = StepRecord(state.step, [], targets)
        self.source = source
        self.messages = []  # type: List[Message]

    def emit(self, text: str):
        self.messages.append(Message(self.state.step, text))

    def resolver(self, owner: str, record):
        def _resolve(name: str):
            return resolve_reference(
                self.model, name, owner, record, self.record.targets, self.state.variables
            )

        return _resolve

    def assign(self, owner: str, name: str, value):
        if "." in name:
            tid, name = name.split(".", 1)
            self.state.variables[tid][name] = value
            return
        for tid in self.model.ancestors(owner):
            scope = self.state.variables.get(tid, {})
            if name in scope:
                scope[name] = value
                return
        raise EvaluationError("'{}' is not a variable of '{}'".format(name, owner))

    def apply_updates(self, node: ActionNode, record):
        resolve = self.resolver(node.owner, record)
        for text in node.updates:
            for stmt in split_updates(text):
                try:
                    update = parse_update(stmt)
                    value = evaluate(update.expr, resolve)
                    if update.probe is not None:
                        probe = evaluate(update.probe, resolve)
                        if probe not in resolve(update.target):
                            self.emit("not found: {}".format(format_value(probe)))
                except ExpressionError as e:
                    raise EvaluationError("stage '{}': {}".format(node.id, e))
                self.assign(node.owner, update.target, value)

    def fire(self, node: ActionNode, record):
        if len(self.record.firings) >= self.max_firings:
            raise FiringLimit(
                "more than {} firings in step {}".format(self.max_firings, self.state.step)
            )
        if node.kind in (ActionKind.PROCESS, ActionKind.CREATE):
            self.apply_updates(node, record)
        if node.message is not None:
            self.emit(node.message)

        snapshot = {tid: dict(scope) for tid, scope in self.state.variables.items()}
        self.record.firings.append(Firing(node.id, node.owner, dict(record or {}), snapshot))
        logger.debug("t={} fired {}".format(self.state.step, node.id))

        for arc in self.model.outgoing_triggers(node.id):
            if arc.guard is not None:
                try:
                    passed = evaluate(parse_guard(arc.guard), self.resolver(node.owner, record))
                except ExpressionError as e:
                    raise EvaluationError("guard of '{}': {}".format(arc.id, e))
                if not isinstance(passed, bool):
                    raise GuardTypeError(
                        "guard of '{}' evaluated to {!r}, expected a boolean".format(arc.id, passed)
                    )
                if not passed:
                    continue
            self.activate(self.model.node(arc.target), record)

    def activate(self, node: ActionNode, record):
        """
        Fire a node reached by a trigger or by an event trigger statement
        Create stages with outgoing flows bring a new thing into being; other stages fire as pure actions
        """
        if node.kind == ActionKind.CREATE and len(self.model.outgoing_flows(node.id)) > 0:
            thing = Thing(self.state.new_thing_id(), dict(record or {}))
            self.flow(thing, node)
        else:
            self.fire(node, record)

    def eligible(self, arc: FlowArc, current: ActionNode) -> bool:
        target = self.model.node(arc.target)
        if self.model.root(target.owner) == self.model.root(current.owner):
            return True
        if target.owner == self.source:
            return True
        lineage = self.model.ancestors(target.owner)
        return any(tid in self.record.targets for tid in lineage)

    def flow(self, thing: Thing, start: ActionNode):
        node = start
        crossed = False
        self.fire(node, thing.value)
        while True:
            arc = None
            for candidate in self.model.outgoing_flows(node.id):
                if self.eligible(candidate, node):
                    arc = candidate
                    break
            if arc is None:
                break
            following = self.model.node(arc.target)
            crossed = following.owner != node.owner
            node = following
            self.fire(node, thing.value)
        self.rest(thing, node, crossed)

    def rest(self, thing: Thing, node: ActionNode, crossed: bool):
        thing.at = (node.owner, node.id)
        owner = self.model.thimac(node.owner)
        # a thing entering a machine through an elided receive counts as received
        received = node.kind in (ActionKind.CREATE, ActionKind.RECEIVE) or crossed
        if owner.has_storage and received:
            self.state.storages.setdefault(owner.id, []).append(thing)
            logger.debug("t={} {} deposited in {}".format(self.state.step, thing.id, owner.id))
        else:
            self.state.resting.append(thing)
            logger.debug("t={} {} rests at {}".format(self.state.step, thing.id, node.id))


class Interpreter:
    """
    Deterministic script interpreter over a bundle

    Usage:
        interp = Interpreter(bundle)
        result = interp.run(script)
        if result.success:
            print(to_text(result.trace))
    """

    def __init__(self, bundle: Bundle, max_firings: int = DEFAULT_MAX_FIRINGS):
        self.bundle = bundle
        self.max_firings = max_firings

    def init_state(self) -> State:
        return init_state(self.bundle)

    def _thimac(self, thimac_id: str):
        thimac = self.bundle.static.thimac(thimac_id)
        if thimac is None:
            raise UnknownElement("unknown thimac '{}'".format(thimac_id))
        return thimac

    def _set_attributes(self, state: State, thimac_id: str, thing: Thing, attributes):
        if not thing.is_record:
            raise AttributeOnNonRecord(
                "instance '{}' of '{}' is not a record".format(thing.id, thimac_id)
            )
        scope = state.variables.get(thimac_id, {})
        for name, value in attributes:
            thing.value[name] = value
            if name in scope:
                scope[name] = value

    def _create_instance(self, state: State, stmt: CreateInstance) -> StepRecord:
        self._thimac(stmt.thimac)
        instances = state.instances.setdefault(stmt.thimac, {})
        thing = instances.get(stmt.instance, None)
        if thing is None:
            thing = Thing(stmt.instance, {})
            instances[stmt.instance] = thing
        self._set_attributes(state, stmt.thimac, thing, stmt.attributes)
        state.context = dict(thing.value)
        state.context_targets = {stmt.thimac: dict(thing.value)}
        return StepRecord(state.step)

    def _set_attribute(self, state: State, stmt: SetAttribute) -> StepRecord:
        self._thimac(stmt.thimac)
        thing = state.instance(stmt.thimac, stmt.instance)
        if thing is None:
            raise UnknownInstance(
                "no instance '{}' of '{}'".format(stmt.instance, stmt.thimac)
            )
        self._set_attributes(state, stmt.thimac, thing, [(stmt.attribute, stmt.value)])
        state.context = dict(thing.value)
        state.context_targets = {stmt.thimac: dict(thing.value)}
        return StepRecord(state.step)

    def _targets(self, state: State, stmt: Flow) -> Dict[str, Dict[str, Any]]:
        targets = {}
        for target in stmt.targets:
            self._thimac(target.thimac)
            if target.instance is None:
                targets[target.thimac] = dict(target.attributes)
                continue
            thing = state.instance(target.thimac, target.instance)
            if thing is None:
                raise StorageMiss(
                    "'{}' has no instance '{}'".format(target.thimac, target.instance)
                )
            if not thing.is_record:
                raise AttributeOnNonRecord(
                    "instance '{}' of '{}' is not a record".format(target.instance, target.thimac)
                )
            for name, value in target.attributes:
                if thing.value.get(name, _MISSING) != value:
                    raise StorageMiss(
                        "instance '{}' of '{}' does not match {}={}".format(
                            target.instance, target.thimac, name, format_value(value)
                        )
                    )
            targets[target.thimac] = dict(thing.value)
        return targets

    def _flow(self, state: State, stmt: Flow) -> _StepRun:
        self._thimac(stmt.thimac)
        source = state.instance(stmt.thimac, stmt.instance)
        if source is None:
            raise UnknownInstance("no instance '{}' of '{}'".format(stmt.instance, stmt.thimac))
        if not source.is_record:
            raise AttributeOnNonRecord(
                "instance '{}' of '{}' is not a record".format(stmt.instance, stmt.thimac)
            )

        start = None
        for node in self.bundle.static.nodes:
            if node.owner == stmt.thimac and node.kind == ActionKind.CREATE:
                start = node
                break
        if start is None:
            raise UnknownElement("thimac '{}' has no create stage".format(stmt.thimac))

        targets = self._targets(state, stmt)
        record = dict(source.value)
        record.update(dict(stmt.attributes))
        run = _StepRun(self, state, targets, stmt.thimac)
        run.flow(Thing(state.new_thing_id(), record), start)
        state.context = record
        state.context_targets = targets
        return run

    def _trigger_event(self, state: State, stmt: TriggerEvent) -> _StepRun:
        evt = self.bundle.event(stmt.event)
        if evt is None:
            raise UnknownElement("unknown event '{}'".format(stmt.event))
        model = self.bundle.static
        run = _StepRun(self, state, dict(state.context_targets))

        inner = set(model.arc(a).target for a in evt.region.arcs)
        entries = [n for n in model.nodes if n.id in evt.region.nodes and n.id not in inner]
        if any(len(model.incoming(n.id)) > 0 for n in entries):
            logger.debug("t={} trigger of {} is vacuous".format(state.step, stmt.event))
            return run
        for node in entries:
            run.activate(node, dict(state.context))
        return run

    def exec_statement(self, state: State, stmt) -> Tuple[State, List[Occurrence], List[Message]]:
        """
        Execute one statement at the next step
        :param state: current state (left untouched)
        :param stmt: script statement
        :return: (new state, occurrences of this step, messages of this step)
        """
        state = state.copy()
        state.step += 1
        occurrences = []
        messages = []

        if isinstance(stmt, CreateInstance):
            self._create_instance(state, stmt)
        elif isinstance(stmt, SetAttribute):
            self._set_attribute(state, stmt)
        elif isinstance(stmt, (Flow, TriggerEvent)):
            try:
                if isinstance(stmt, Flow):
                    run = self._flow(state, stmt)
                else:
                    run = self._trigger_event(state, stmt)
            except RecursionError:
                # trigger chains nest one frame per firing
                raise FiringLimit("trigger chain too deep in step {}".format(state.step))
            messages.extend(run.messages)
            occurrences.extend(detect_occurrences(self.bundle, run.record))
        elif isinstance(stmt, ConditionalPrint):
            if stmt.event in state.last_events:
                messages.append(Message(state.step, stmt.text))
        elif isinstance(stmt, End):
            composite = self.bundle.composite(stmt.composite)
            if composite is None:
                raise UnknownElement("unknown composite '{}'".format(stmt.composite))
            occurrences.append(Occurrence(composite.end_marker, state.step, stmt.binding))
        else:
            raise EngineError("unsupported statement {}".format(type(stmt).__name__))

        if len(occurrences) > 0:
            state.last_events = tuple(o.event for o in occurrences)
        return state, occurrences, messages

    def run(self, script: Script) -> RunResult:
        """
        Execute a script from a fresh state
        Stops at the first failing statement, keeping the trace built so far
        :param script: Script
        :return: RunResult
        """
        state = self.init_state()
        trace = Trace()
        for idx, stmt in enumerate(script.statements):
            try:
                state, occurrences, messages = self.exec_statement(state, stmt)
            except EngineError as e:
                logger.debug("statement {} failed: {}".format(idx + 1, e))
                return RunResult(state, trace, e, idx)
            trace.occurrences.extend(occurrences)
            trace.messages.extend(messages)
        return RunResult(state, trace)


def exec_statement(bundle: Bundle, state: State, stmt, max_firings: int = DEFAULT_MAX_FIRINGS):
    return Interpreter(bundle, max_firings).exec_statement(state, stmt)


def run_script(bundle: Bundle, script: Script, max_firings: int = DEFAULT_MAX_FIRINGS) -> RunResult:
    return Interpreter(bundle, max_firings).run(script)
