import json
from typing import Any, Union

from tmkit.core.model import (
    ActionKind,
    ActionNode,
    BehaviorEdge,
    BehaviorModel,
    Bundle,
    CompositeEvent,
    ConstraintKind,
    ConstraintSpec,
    EventDef,
    FlowArc,
    Notation,
    Region,
    StaticModel,
    Thimac,
    TriggerArc,
    Variable,
)
from tmkit.core.validate import check_region, validate_static_model
from tmkit.engine.trace import Message, Occurrence, Trace

FORMAT_TAG = "tmkit/1"
KIND_BUNDLE = "bundle"
KIND_TRACE = "trace"


class DecodeError(Exception):
    def __init__(self, path: str, message: str):
        super().__init__("{}: {}".format(path, message))
        self.path = path
        self.message = message


def _value(v):
    if isinstance(v, tuple):
        return [_value(i) for i in v]
    return v


def _bundle_dict(bundle: Bundle) -> dict:
    static = bundle.static
    behavior = None
    if bundle.behavior is not None:
        behavior = {
            "events": sorted(bundle.behavior.events),
            "edges": [
                {"source": e.source, "target": e.target, "repeatable": e.repeatable}
                for e in bundle.behavior.edges
            ],
        }
    return {
        "format": FORMAT_TAG,
        "kind": KIND_BUNDLE,
        "static": {
            "notation": static.notation.value,
            "thimacs": [
                {
                    "id": t.id,
                    "name": t.name,
                    "parent": t.parent,
                    "storage": t.has_storage,
                    "variables": [
                        {"name": v.name, "initial": _value(v.initial)} for v in t.variables
                    ],
                }
                for t in static.thimacs
            ],
            "nodes": [
                {
                    "id": n.id,
                    "owner": n.owner,
                    "kind": n.kind.value,
                    "label": n.label,
                    "updates": list(n.updates),
                    "message": n.message,
                }
                for n in static.nodes
            ],
            "flows": [{"id": a.id, "source": a.source, "target": a.target} for a in static.flows],
            "triggers": [
                {"id": a.id, "source": a.source, "target": a.target, "guard": a.guard}
                for a in static.triggers
            ],
        },
        "events": [
            {
                "id": e.id,
                "nodes": sorted(e.region.nodes),
                "arcs": sorted(e.region.arcs),
                "params": list(e.params),
                "sources": list(e.sources),
            }
            for e in bundle.events
        ],
        "composites": [
            {"id": c.id, "members": list(c.members), "shared": list(c.shared), "anchor": c.anchor}
            for c in bundle.composites
        ],
        "behavior": behavior,
        "constraints": [
            {"id": c.id, "kind": c.kind.value, "targets": list(c.targets), "key": list(c.key)}
            for c in bundle.constraints
        ],
    }


def _trace_dict(trace: Trace) -> dict:
    return {
        "format": FORMAT_TAG,
        "kind": KIND_TRACE,
        "occurrences": [
            {
                "event": o.event,
                "time": o.time,
                "binding": [[k, _value(v)] for k, v in o.binding],
            }
            for o in trace.occurrences
        ],
        "messages": [{"time": m.time, "text": m.text} for m in trace.messages],
    }


def to_json(value: Union[Bundle, Trace]) -> str:
    """
    Serialize a bundle or a trace
    :param value: Bundle or Trace
    :return: JSON text, keys in a fixed order
    """
    if isinstance(value, Bundle):
        document = _bundle_dict(value)
    elif isinstance(value, Trace):
        document = _trace_dict(value)
    else:
        raise TypeError("to_json(): unsupported type '{}'".format(type(value).__name__))
    return json.dumps(document, indent=2, ensure_ascii=False) + "\n"


class _Reader:
    """
    Typed accessors over decoded JSON that report the path of the offending field
    """

    def obj(self, value, path: str, required: list, optional: list = None) -> dict:
        if not isinstance(value, dict):
            raise DecodeError(path, "object expected")
        allowed = set(required) | set(optional or [])
        for key in value.keys():
            if key not in allowed:
                raise DecodeError("{}.{}".format(path, key), "unknown field")
        for key in required:
            if key not in value:
                raise DecodeError("{}.{}".format(path, key), "missing field")
        return value

    def array(self, value, path: str) -> list:
        if not isinstance(value, list):
            raise DecodeError(path, "array expected")
        return value

    def text(self, value, path: str, nullable: bool = False):
        if value is None and nullable:
            return None
        if not isinstance(value, str):
            raise DecodeError(path, "string expected")
        return value

    def integer(self, value, path: str) -> int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise DecodeError(path, "integer expected")
        return value

    def flag(self, value, path: str) -> bool:
        if not isinstance(value, bool):
            raise DecodeError(path, "boolean expected")
        return value

    def strings(self, value, path: str) -> tuple:
        return tuple(self.text(v, "{}[{}]".format(path, i)) for i, v in enumerate(self.array(value, path)))

    def scalar(self, value, path: str) -> Any:
        if isinstance(value, list):
            return tuple(self.scalar(v, "{}[{}]".format(path, i)) for i, v in enumerate(value))
        if isinstance(value, (dict, float)) or value is None:
            raise DecodeError(path, "integer, string or array expected")
        return value

    def enum(self, cls, value, path: str):
        try:
            return cls(self.text(value, path))
        except ValueError:
            raise DecodeError(path, "invalid value '{}'".format(value))


def _decode_static(r: _Reader, doc, path: str) -> StaticModel:
    doc = r.obj(doc, path, ["notation", "thimacs", "nodes", "flows", "triggers"])
    thimacs = []
    for i, t in enumerate(r.array(doc["thimacs"], path + ".thimacs")):
        p = "{}.thimacs[{}]".format(path, i)
        t = r.obj(t, p, ["id", "name"], ["parent", "storage", "variables"])
        variables = []
        for j, v in enumerate(r.array(t.get("variables", []), p + ".variables")):
            vp = "{}.variables[{}]".format(p, j)
            v = r.obj(v, vp, ["name", "initial"])
            variables.append(Variable(r.text(v["name"], vp + ".name"), r.scalar(v["initial"], vp + ".initial")))
        thimacs.append(
            Thimac(
                r.text(t["id"], p + ".id"),
                r.text(t["name"], p + ".name"),
                r.text(t.get("parent", None), p + ".parent", nullable=True),
                r.flag(t.get("storage", False), p + ".storage"),
                tuple(variables),
            )
        )

    nodes = []
    for i, n in enumerate(r.array(doc["nodes"], path + ".nodes")):
        p = "{}.nodes[{}]".format(path, i)
        n = r.obj(n, p, ["id", "owner", "kind"], ["label", "updates", "message"])
        nodes.append(
            ActionNode(
                r.text(n["id"], p + ".id"),
                r.text(n["owner"], p + ".owner"),
                r.enum(ActionKind, n["kind"], p + ".kind"),
                r.text(n.get("label", ""), p + ".label"),
                r.strings(n.get("updates", []), p + ".updates"),
                r.text(n.get("message", None), p + ".message", nullable=True),
            )
        )

    node_ids = set(n.id for n in nodes)
    flows = []
    for i, a in enumerate(r.array(doc["flows"], path + ".flows")):
        p = "{}.flows[{}]".format(path, i)
        a = r.obj(a, p, ["id", "source", "target"])
        flows.append(FlowArc(r.text(a["id"], p + ".id"), r.text(a["source"], p + ".source"), r.text(a["target"], p + ".target")))
        for end in ("source", "target"):
            if a[end] not in node_ids:
                raise DecodeError("{}.{}".format(p, end), "unknown node '{}'".format(a[end]))

    triggers = []
    for i, a in enumerate(r.array(doc["triggers"], path + ".triggers")):
        p = "{}.triggers[{}]".format(path, i)
        a = r.obj(a, p, ["id", "source", "target"], ["guard"])
        triggers.append(
            TriggerArc(
                r.text(a["id"], p + ".id"),
                r.text(a["source"], p + ".source"),
                r.text(a["target"], p + ".target"),
                r.text(a.get("guard", None), p + ".guard", nullable=True),
            )
        )
        for end in ("source", "target"):
            if a[end] not in node_ids:
                raise DecodeError("{}.{}".format(p, end), "unknown node '{}'".format(a[end]))

    model = StaticModel(
        tuple(thimacs),
        tuple(nodes),
        tuple(flows),
        tuple(triggers),
        r.enum(Notation, doc["notation"], path + ".notation"),
    )

    # remaining well-formedness errors are reported at the offending element
    paths = {}
    for name, items in (("thimacs", thimacs), ("nodes", nodes), ("flows", flows), ("triggers", triggers)):
        for i, item in enumerate(items):
            paths.setdefault(item.id, "{}.{}[{}]".format(path, name, i))
    for d in validate_static_model(model):
        if d.is_error:
            raise DecodeError(paths.get(d.element, path), "{} {}".format(d.code, d.message))
    return model


def _decode_bundle(r: _Reader, doc) -> Bundle:
    doc = r.obj(
        doc,
        "$",
        ["format", "kind", "static"],
        ["events", "composites", "behavior", "constraints"],
    )
    static = _decode_static(r, doc["static"], "$.static")

    events = []
    for i, e in enumerate(r.array(doc.get("events", []), "$.events")):
        p = "$.events[{}]".format(i)
        e = r.obj(e, p, ["id", "nodes"], ["arcs", "params", "sources"])
        region = Region(frozenset(r.strings(e["nodes"], p + ".nodes")), frozenset(r.strings(e.get("arcs", []), p + ".arcs")))
        if not check_region(region, static):
            raise DecodeError(p + ".nodes", "invalid region")
        events.append(
            EventDef(
                r.text(e["id"], p + ".id"),
                region,
                r.strings(e.get("params", []), p + ".params"),
                r.strings(e.get("sources", []), p + ".sources"),
            )
        )
    event_ids = set(e.id for e in events)

    composites = []
    for i, c in enumerate(r.array(doc.get("composites", []), "$.composites")):
        p = "$.composites[{}]".format(i)
        c = r.obj(c, p, ["id", "members"], ["shared", "anchor"])
        members = r.strings(c["members"], p + ".members")
        for j, m in enumerate(members):
            if m not in event_ids:
                raise DecodeError("{}.members[{}]".format(p, j), "unknown event '{}'".format(m))
        anchor = r.text(c.get("anchor", None), p + ".anchor", nullable=True)
        if anchor is not None and anchor not in members:
            raise DecodeError(p + ".anchor", "anchor '{}' is not a member".format(anchor))
        composites.append(CompositeEvent(r.text(c["id"], p + ".id"), members, r.strings(c.get("shared", []), p + ".shared"), anchor))

    behavior = None
    if doc.get("behavior", None) is not None:
        b = r.obj(doc["behavior"], "$.behavior", ["events", "edges"])
        edges = []
        for i, e in enumerate(r.array(b["edges"], "$.behavior.edges")):
            p = "$.behavior.edges[{}]".format(i)
            e = r.obj(e, p, ["source", "target"], ["repeatable"])
            edges.append(
                BehaviorEdge(
                    r.text(e["source"], p + ".source"),
                    r.text(e["target"], p + ".target"),
                    r.flag(e.get("repeatable", True), p + ".repeatable"),
                )
            )
        behavior = BehaviorModel(frozenset(r.strings(b["events"], "$.behavior.events")), tuple(edges))

    constraints = []
    for i, c in enumerate(r.array(doc.get("constraints", []), "$.constraints")):
        p = "$.constraints[{}]".format(i)
        c = r.obj(c, p, ["id", "kind", "targets"], ["key"])
        constraints.append(
            ConstraintSpec(
                r.text(c["id"], p + ".id"),
                r.enum(ConstraintKind, c["kind"], p + ".kind"),
                r.strings(c["targets"], p + ".targets"),
                r.strings(c.get("key", []), p + ".key"),
            )
        )

    return Bundle(static, tuple(events), tuple(composites), behavior, tuple(constraints))


def _decode_trace(r: _Reader, doc) -> Trace:
    doc = r.obj(doc, "$", ["format", "kind", "occurrences"], ["messages"])
    trace = Trace()
    for i, o in enumerate(r.array(doc["occurrences"], "$.occurrences")):
        p = "$.occurrences[{}]".format(i)
        o = r.obj(o, p, ["event", "time"], ["binding"])
        binding = []
        for j, pair in enumerate(r.array(o.get("binding", []), p + ".binding")):
            bp = "{}.binding[{}]".format(p, j)
            pair = r.array(pair, bp)
            if len(pair) != 2:
                raise DecodeError(bp, "[name, value] pair expected")
            binding.append((r.text(pair[0], bp + "[0]"), r.scalar(pair[1], bp + "[1]")))
        trace.occurrences.append(Occurrence(r.text(o["event"], p + ".event"), r.integer(o["time"], p + ".time"), tuple(binding)))
    for i, m in enumerate(r.array(doc.get("messages", []), "$.messages")):
        p = "$.messages[{}]".format(i)
        m = r.obj(m, p, ["time", "text"])
        trace.messages.append(Message(r.integer(m["time"], p + ".time"), r.text(m["text"], p + ".text")))
    return trace


def from_json(text: str) -> Union[Bundle, Trace]:
    """
    Decode a bundle or trace document
    :param text: JSON text
    :return: Bundle or Trace, depending on the document kind
    """
    try:
        doc = json.loads(text)
    except ValueError as e:
        raise DecodeError("$", "malformed JSON: {}".format(e))
    r = _Reader()
    if not isinstance(doc, dict):
        raise DecodeError("$", "object expected")
    if doc.get("format", None) != FORMAT_TAG:
        raise DecodeError("$.format", "expected '{}'".format(FORMAT_TAG))
    kind = doc.get("kind", None)
    if kind == KIND_BUNDLE:
        return _decode_bundle(r, doc)
    if kind == KIND_TRACE:
        return _decode_trace(r, doc)
    raise DecodeError("$.kind", "expected '{}' or '{}'".format(KIND_BUNDLE, KIND_TRACE))
