from collections import Counter
from typing import List

from tmkit.core.diagnostics import Diagnostic, error, warning
from tmkit.core.expr import (
    ExpressionError,
    parse_guard,
    parse_update,
    references,
    split_updates,
)
from tmkit.core.model import ActionKind, Notation, Region, StaticModel

K = ActionKind

LEGAL_SAME_MACHINE = frozenset(
    [
        (K.TRANSFER, K.RECEIVE),
        (K.RECEIVE, K.PROCESS),
        (K.RECEIVE, K.RELEASE),
        (K.PROCESS, K.RELEASE),
        (K.CREATE, K.PROCESS),
        (K.CREATE, K.RELEASE),
        (K.RELEASE, K.TRANSFER),
    ]
)

LEGAL_CROSS_MACHINE = frozenset([(K.TRANSFER, K.TRANSFER)])


# arcs simplified notation may draw across machines; each expands to a legal chain
ELIDED_SOURCES = frozenset([K.CREATE, K.PROCESS, K.RECEIVE])
ELIDED_TARGETS = frozenset([K.PROCESS, K.RELEASE])


def flow_legal(
    source: ActionKind, target: ActionKind, same_machine: bool, notation: Notation
) -> bool:
    """
    Flow-legality table lookup
    :param source: kind of the source stage
    :param target: kind of the target stage
    :param same_machine: True if both stages belong to the same thimac
    :param notation: model notation; simplified models may elide release/transfer/receive across machines
    :return: bool
    """
    if same_machine:
        return (source, target) in LEGAL_SAME_MACHINE
    if (source, target) in LEGAL_CROSS_MACHINE:
        return True
    return (
        notation == Notation.SIMPLIFIED
        and source in ELIDED_SOURCES
        and target in ELIDED_TARGETS
    )


def _duplicates(ids) -> List[str]:
    return [k for k, n in Counter(ids).items() if n > 1]


def _check_expressions(model: StaticModel, result: List[Diagnostic]):
    for node in model.nodes:
        if model.thimac(node.owner) is None:
            continue
        scope = _scope(model, node.owner)
        for text in node.updates:
            for stmt in split_updates(text):
                try:
                    update = parse_update(stmt)
                except ExpressionError as e:
                    result.append(error("ExpressionError", str(e), node.id))
                    continue
                if not _is_variable(model, scope, update.target):
                    result.append(
                        error(
                            "UnknownVariable",
                            "update target '{}' is not a variable of '{}'".format(
                                update.target, node.owner
                            ),
                            node.id,
                        )
                    )
                _check_qualified(model, references(update), node.id, result)

    for arc in model.triggers:
        if arc.guard is None:
            continue
        try:
            tree = parse_guard(arc.guard)
        except ExpressionError as e:
            result.append(error("ExpressionError", str(e), arc.id))
            continue
        _check_qualified(model, references(tree), arc.id, result)


def _scope(model: StaticModel, thimac_id: str) -> set:
    names = set()
    for tid in model.ancestors(thimac_id):
        t = model.thimac(tid)
        if t is not None:
            names.update(v.name for v in t.variables)
    return names


def _is_variable(model: StaticModel, scope: set, name: str) -> bool:
    if "." in name:
        tid, var = name.split(".", 1)
        t = model.thimac(tid)
        return t is not None and t.variable(var) is not None
    return name in scope


def _check_qualified(model: StaticModel, names, element: str, result: List[Diagnostic]):
    # unqualified names may be thing attributes, only known at run time
    for name in names:
        if "." in name and not _is_variable(model, set(), name):
            result.append(
                error(
                    "UnknownVariable",
                    "reference '{}' does not name a thimac variable".format(name),
                    element,
                )
            )


def validate_static_model(model: StaticModel) -> List[Diagnostic]:
    """
    Check all structural invariants of a static model
    All problems are collected; validation never stops at the first one
    :param model: StaticModel
    :return: list of Diagnostic, empty if the model is well-formed
    """
    result = []

    for dup in _duplicates([t.id for t in model.thimacs]):
        result.append(error("DuplicateId", "duplicate thimac id '{}'".format(dup), dup))
    for dup in _duplicates([n.id for n in model.nodes]):
        result.append(error("DuplicateId", "duplicate node id '{}'".format(dup), dup))
    for dup in _duplicates([a.id for a in model.flows + model.triggers]):
        result.append(error("DuplicateId", "duplicate arc id '{}'".format(dup), dup))

    for t in model.thimacs:
        if t.parent is not None and model.thimac(t.parent) is None:
            result.append(
                error(
                    "UnknownThimac",
                    "thimac '{}' has unknown parent '{}'".format(t.id, t.parent),
                    t.id,
                )
            )
        chain = model.ancestors(t.id)
        last = model.thimac(chain[-1])
        if last is not None and last.parent is not None and model.thimac(last.parent) is not None:
            result.append(
                error("ParentCycle", "parent chain of '{}' is cyclic".format(t.id), t.id)
            )
        for dup in _duplicates([v.name for v in t.variables]):
            result.append(
                error(
                    "DuplicateVariable",
                    "variable '{}' declared twice in '{}'".format(dup, t.id),
                    t.id,
                )
            )

    for n in model.nodes:
        if model.thimac(n.owner) is None:
            result.append(
                error(
                    "UnknownThimac",
                    "node '{}' is owned by unknown thimac '{}'".format(n.id, n.owner),
                    n.id,
                )
            )

    for arc in model.flows + model.triggers:
        for end in (arc.source, arc.target):
            if model.node(end) is None:
                result.append(
                    error(
                        "DanglingArc",
                        "arc '{}' references unknown node '{}'".format(arc.id, end),
                        arc.id,
                    )
                )

    for arc in model.flows:
        src = model.node(arc.source)
        dst = model.node(arc.target)
        if src is None or dst is None:
            continue
        same = src.owner == dst.owner
        if not flow_legal(src.kind, dst.kind, same, model.notation):
            result.append(
                error(
                    "FlowOrderViolation",
                    "illegal {} flow {} -> {} ({} -> {})".format(
                        "same-machine" if same else "cross-machine",
                        src.id,
                        dst.id,
                        src.kind.value,
                        dst.kind.value,
                    ),
                    arc.id,
                )
            )

    for arc in model.triggers:
        if arc.source == arc.target:
            result.append(
                error(
                    "SelfTrigger",
                    "trigger '{}' starts and ends at '{}'".format(arc.id, arc.source),
                    arc.id,
                )
            )
        elif model.same_machine(arc.source, arc.target):
            result.append(
                warning(
                    "SameMachineTrigger",
                    "trigger '{}' stays inside thimac '{}'".format(
                        arc.id, model.node(arc.source).owner
                    ),
                    arc.id,
                )
            )

    _check_expressions(model, result)
    return result


def check_region(region: Region, model: StaticModel) -> bool:
    """
    Region well-formedness: nonempty, members exist, arcs stay inside, weakly connected
    :param region: Region
    :param model: host StaticModel
    :return: bool
    """
    if len(region.nodes) == 0:
        return False
    for node_id in region.nodes:
        if model.node(node_id) is None:
            return False

    adjacency = {n: set() for n in region.nodes}
    for arc_id in region.arcs:
        arc = model.arc(arc_id)
        if arc is None:
            return False
        if arc.source not in region.nodes or arc.target not in region.nodes:
            return False
        adjacency[arc.source].add(arc.target)
        adjacency[arc.target].add(arc.source)

    start = sorted(region.nodes)[0]
    seen = {start}
    pending = [start]
    while pending:
        for other in adjacency[pending.pop()]:
            if other not in seen:
                seen.add(other)
                pending.append(other)
    return len(seen) == len(region.nodes)
