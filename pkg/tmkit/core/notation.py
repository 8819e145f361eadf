# Conversion between canonical and simplified notation
#
# canonical:   A -> f.release -> f.transfer_out -> f.transfer_in -> f.receive -> B
# simplified:  A -> B
#
from dataclasses import replace
from typing import List, Optional

from tmkit.core.model import (
    ActionKind,
    ActionNode,
    FlowArc,
    InvalidModel,
    Notation,
    StaticModel,
)
from tmkit.core.validate import validate_static_model

# generated stage suffixes, in chain order
CHAIN_STAGES = (
    ("release", ActionKind.RELEASE, "release"),
    ("transfer_out", ActionKind.TRANSFER, "transfer"),
    ("transfer_in", ActionKind.TRANSFER, "transfer"),
    ("receive", ActionKind.RECEIVE, "receive"),
)


def _assert_valid(model: StaticModel):
    diagnostics = [d for d in validate_static_model(model) if d.is_error]
    if len(diagnostics) > 0:
        raise InvalidModel(
            "model is not well-formed: {}".format("; ".join(str(d) for d in diagnostics))
        )


def canonicalize(model: StaticModel) -> StaticModel:
    """
    Make every elided release/transfer/receive chain explicit

    Each cross-machine flow arc whose source is not a Transfer stage gets four generated stages
    named <arcId>.<stage>; the first chain arc keeps the original arc id, the following ones are
    named <arcId>.2 ... <arcId>.5
    :param model: well-formed StaticModel
    :return: StaticModel in canonical notation
    """
    _assert_valid(model)

    nodes = list(model.nodes)
    flows = []
    existing = set(n.id for n in model.nodes) | set(a.id for a in model.flows + model.triggers)

    for arc in model.flows:
        src = model.node(arc.source)
        dst = model.node(arc.target)
        if src.owner == dst.owner or src.kind == ActionKind.TRANSFER:
            flows.append(arc)
            continue

        chain = []
        for idx, (suffix, kind, label) in enumerate(CHAIN_STAGES):
            owner = src.owner if idx < 2 else dst.owner
            chain.append(ActionNode("{}.{}".format(arc.id, suffix), owner, kind, label))

        path = [src.id] + [n.id for n in chain] + [dst.id]
        arcs = [FlowArc(arc.id, path[0], path[1])]
        for idx in range(1, len(path) - 1):
            arcs.append(FlowArc("{}.{}".format(arc.id, idx + 1), path[idx], path[idx + 1]))

        for generated in [n.id for n in chain] + [a.id for a in arcs[1:]]:
            if generated in existing:
                raise InvalidModel(
                    "cannot canonicalize arc '{}': id '{}' already in use".format(
                        arc.id, generated
                    )
                )
            existing.add(generated)

        nodes.extend(chain)
        flows.extend(arcs)

    return replace(model, nodes=tuple(nodes), flows=tuple(flows), notation=Notation.CANONICAL)


def _single(items) -> Optional[object]:
    if len(items) == 1:
        return items[0]
    return None


def _chain_from(model: StaticModel, arc: FlowArc) -> Optional[List[FlowArc]]:
    """
    Returns the five arcs of an elidable chain starting with arc, or None
    """
    src = model.node(arc.source)
    arcs = [arc]
    chain = []
    current = arc
    for _, kind, _ in CHAIN_STAGES:
        node = model.node(current.target)
        if node is None or node.kind != kind or node.annotated:
            return None
        incoming = model.incoming(node.id)
        outgoing = model.outgoing_flows(node.id)
        if len(incoming) != 1 or incoming[0] != current:
            return None
        if len(model.outgoing_triggers(node.id)) > 0:
            return None
        current = _single(outgoing)
        if current is None:
            return None
        chain.append(node)
        arcs.append(current)

    dst = model.node(current.target)
    if dst is None or src is None:
        return None
    if src.kind == ActionKind.TRANSFER or dst.kind == ActionKind.TRANSFER:
        return None
    release, out, into, receive = chain
    if not (src.owner == release.owner == out.owner):
        return None
    if not (into.owner == receive.owner == dst.owner):
        return None
    if out.owner == into.owner:
        return None
    return arcs


def simplify(model: StaticModel) -> StaticModel:
    """
    Collapse Release -> Transfer -> Transfer -> Receive chains into a single cross-machine arc

    A chain is elidable when none of its four stages carries updates or messages, each stage has
    exactly one incoming and one outgoing arc, and no trigger touches it
    :param model: well-formed StaticModel in canonical notation
    :return: StaticModel in simplified notation
    """
    if model.notation != Notation.CANONICAL:
        raise InvalidModel("simplify expects a model in canonical notation")
    _assert_valid(model)

    dropped_nodes = set()
    dropped_arcs = set()
    replaced = {}
    for arc in model.flows:
        if arc.id in dropped_arcs:
            continue
        chain = _chain_from(model, arc)
        if chain is None:
            continue
        replaced[arc.id] = FlowArc(arc.id, arc.source, chain[-1].target)
        dropped_arcs.update(a.id for a in chain[1:])
        dropped_nodes.update(a.source for a in chain[1:])

    flows = tuple(
        replaced.get(a.id, a) for a in model.flows if a.id not in dropped_arcs
    )
    nodes = tuple(n for n in model.nodes if n.id not in dropped_nodes)
    return replace(model, nodes=nodes, flows=flows, notation=Notation.SIMPLIFIED)
