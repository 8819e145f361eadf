import logging
from collections import defaultdict
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple, Union

from tmkit.core.model import (
    BadKey,
    BehaviorModel,
    Bundle,
    CompositeEvent,
    UnknownComposite,
    UnknownEvent,
)
from tmkit.engine.trace import Occurrence, Trace, format_binding

logger = logging.getLogger("tmkit.constraints")

BEHAVIOR_ID = "behavior"


@dataclass(frozen=True)
class Violation:
    constraint: str
    time: int
    # binding values demonstrating the violation
    witness: Tuple[Tuple[str, Any], ...]
    # 0-based indices into the trace occurrences
    indices: Tuple[int, ...]
    message: str = ""

    def __str__(self):
        return "VIOLATION {} t={} {}".format(self.constraint, self.time, format_witness(self))


def format_witness(v: Violation) -> str:
    at = "at " + ",".join("#{}".format(i) for i in v.indices)
    binding = format_binding(v.witness)
    if binding == "":
        return at
    return "{} {}".format(binding, at)


@dataclass(frozen=True)
class CompositeOccurrence:
    """
    A complete occurrence of a composite event: the anchor occurrence plus one consistent
    companion for every other member, all at the same step
    """

    time: int
    anchor: int
    indices: Tuple[int, ...]
    assignment: Tuple[Tuple[str, Any], ...]

    def value(self, name: str):
        return dict(self.assignment).get(name, None)


def _resolve_composite(composite: Union[str, CompositeEvent], bundle: Optional[Bundle]) -> CompositeEvent:
    if isinstance(composite, CompositeEvent):
        if bundle is not None and bundle.composite(composite.id) is None:
            raise UnknownComposite("composite '{}' is not registered".format(composite.id))
        return composite
    if bundle is None or bundle.composite(composite) is None:
        raise UnknownComposite("unknown composite '{}'".format(composite))
    return bundle.composite(composite)


def _merge(assigned: Dict[str, Any], occ: Occurrence, shared) -> Optional[Dict[str, Any]]:
    result = dict(assigned)
    for name, value in occ.binding:
        if name not in shared:
            continue
        if name in result and result[name] != value:
            return None
        result[name] = value
    return result


def _companions(candidates: List[List[Tuple[int, Occurrence]]], assigned: Dict[str, Any], shared):
    """
    Backtracking search for one occurrence per member with mutually consistent shared values
    :return: (indices, assignment) or None
    """
    if len(candidates) == 0:
        return [], assigned
    for idx, occ in candidates[0]:
        merged = _merge(assigned, occ, shared)
        if merged is None:
            continue
        found = _companions(candidates[1:], merged, shared)
        if found is not None:
            return [idx] + found[0], found[1]
    return None


def _by_step(trace: Trace) -> Dict[int, List[Tuple[int, Occurrence]]]:
    steps = defaultdict(list)
    for idx, occ in enumerate(trace.occurrences):
        steps[occ.time].append((idx, occ))
    return steps


def _anchor_results(trace: Trace, composite: CompositeEvent):
    """
    For every anchor occurrence: (index, occurrence, companions or None)
    """
    anchor = composite.anchor_member
    others = [m for m in composite.members if m != anchor]
    shared = set(composite.shared)
    steps = _by_step(trace)
    for idx, occ in enumerate(trace.occurrences):
        if occ.event != anchor:
            continue
        start = _merge({}, occ, shared)
        candidates = [
            [(i, o) for i, o in steps[occ.time] if o.event == member] for member in others
        ]
        yield idx, occ, _companions(candidates, start, shared)


def composite_occurrences(trace: Trace, composite: CompositeEvent) -> List[CompositeOccurrence]:
    """
    All complete occurrences of a composite event, in trace order of their anchor
    :param trace: Trace
    :param composite: CompositeEvent
    :return: list of CompositeOccurrence
    """
    result = []
    for idx, occ, found in _anchor_results(trace, composite):
        if found is None:
            continue
        indices, assigned = found
        assignment = tuple((name, assigned.get(name, None)) for name in composite.shared)
        result.append(
            CompositeOccurrence(occ.time, idx, tuple(sorted([idx] + indices)), assignment)
        )
    return result


def check_binding(
    trace: Trace,
    composite: Union[str, CompositeEvent],
    bundle: Bundle,
    constraint_id: str = None,
) -> List[Violation]:
    """
    Every occurrence of the composite's anchor member needs companions for all other members at
    the same step, agreeing on the shared variables
    :param trace: Trace
    :param composite: CompositeEvent or composite id
    :param bundle: Bundle the composite is registered in
    :param constraint_id: id reported in violations; defaults to the composite id
    :return: list of Violation
    """
    composite = _resolve_composite(composite, bundle)
    constraint_id = constraint_id or composite.id
    result = []
    for idx, occ, found in _anchor_results(trace, composite):
        if found is not None:
            continue
        message = "{} at t={} ({}) has no consistent {} companions".format(
            occ.event, occ.time, format_binding(occ.binding), composite.id
        )
        logger.debug("{}: {}".format(constraint_id, message))
        result.append(Violation(constraint_id, occ.time, occ.binding, (idx,), message))
    return result


def _agree(a: Occurrence, b: Occurrence) -> bool:
    other = b.values
    for name, value in a.binding:
        if name in other and other[name] != value:
            return False
    return True


def check_succession(
    trace: Trace,
    first: str,
    second: str,
    bundle: Bundle = None,
    constraint_id: str = None,
) -> List[Violation]:
    """
    Every occurrence of first must be immediately followed by an occurrence of second that agrees
    on the parameters both share
    :param trace: Trace
    :param first: event id
    :param second: event id
    :param bundle: optional Bundle, used to check that both events are declared
    :param constraint_id: id reported in violations
    :return: list of Violation
    """
    if bundle is not None:
        for event_id in (first, second):
            if bundle.event(event_id) is None:
                raise UnknownEvent("unknown event '{}'".format(event_id))
    constraint_id = constraint_id or "{}->{}".format(first, second)
    result = []
    occurrences = trace.occurrences
    for idx, occ in enumerate(occurrences):
        if occ.event != first:
            continue
        if idx + 1 < len(occurrences):
            following = occurrences[idx + 1]
            if following.event == second and _agree(occ, following):
                continue
            indices = (idx, idx + 1)
            message = "{} at t={} is followed by {} instead of {}".format(
                first, occ.time, following.event, second
            )
        else:
            indices = (idx,)
            message = "{} at t={} is not followed by {}".format(first, occ.time, second)
        logger.debug("{}: {}".format(constraint_id, message))
        result.append(Violation(constraint_id, occ.time, occ.binding, indices, message))
    return result


def check_at_most_once(
    trace: Trace,
    composite: Union[str, CompositeEvent],
    key: List[str],
    bundle: Bundle = None,
    constraint_id: str = None,
) -> List[Violation]:
    """
    A complete composite occurrence must not repeat a key tuple once the composite has ended for
    that key (an end marker occurrence end:<CompositeId> carrying the key values)
    :param trace: Trace
    :param composite: CompositeEvent, or composite id when a bundle is given
    :param key: subset of the composite's shared variables
    :param bundle: optional Bundle
    :param constraint_id: id reported in violations
    :return: list of Violation
    """
    if bundle is not None or not isinstance(composite, CompositeEvent):
        composite = _resolve_composite(composite, bundle)
    key = tuple(key)
    bad = [k for k in key if k not in composite.shared]
    if len(bad) > 0:
        raise BadKey(
            "key variables {} are not shared by '{}'".format(", ".join(bad), composite.id)
        )
    constraint_id = constraint_id or composite.id

    complete = {c.anchor: c for c in composite_occurrences(trace, composite)}
    first = {}  # type: Dict[tuple, int]
    ended = set()
    result = []
    for idx, occ in enumerate(trace.occurrences):
        if occ.event == composite.end_marker:
            k = tuple(occ.value(name) for name in key)
            if k in first:
                ended.add(k)
            continue
        c = complete.get(idx, None)
        if c is None:
            continue
        k = tuple(c.value(name) for name in key)
        if k in ended:
            witness = tuple(zip(key, k))
            message = "{} repeated for {} after it ended".format(
                composite.id, format_binding(witness)
            )
            logger.debug("{}: {}".format(constraint_id, message))
            result.append(Violation(constraint_id, c.time, witness, (first[k], idx), message))
        elif k not in first:
            first[k] = idx
    return result


def check_behavior(trace: Trace, behavior: BehaviorModel, constraint_id: str = BEHAVIOR_ID) -> List[Violation]:
    """
    Consecutive occurrences whose events belong to the behavior model must follow one of its
    edges; a non-repeatable edge must not be traversed twice with the same shared parameters
    :param trace: Trace
    :param behavior: BehaviorModel
    :param constraint_id: id reported in violations
    :return: list of Violation
    """
    result = []
    traversed = set()
    occurrences = trace.occurrences
    for idx in range(1, len(occurrences)):
        a = occurrences[idx - 1]
        b = occurrences[idx]
        if a.event not in behavior.events or b.event not in behavior.events:
            continue
        edge = behavior.edge(a.event, b.event)
        if edge is None:
            message = "no chronology edge {} -> {}".format(a.event, b.event)
            result.append(Violation(constraint_id, b.time, b.binding, (idx - 1, idx), message))
            logger.debug("{}: {}".format(constraint_id, message))
            continue
        if edge.repeatable:
            continue
        other = b.values
        shared = tuple((name, value) for name, value in a.binding if name in other)
        traversal = (edge.source, edge.target, shared)
        if traversal in traversed:
            message = "edge {} -> {} traversed again for {}".format(
                a.event, b.event, format_binding(shared)
            )
            result.append(Violation(constraint_id, b.time, shared, (idx - 1, idx), message))
            logger.debug("{}: {}".format(constraint_id, message))
        else:
            traversed.add(traversal)
    return result
