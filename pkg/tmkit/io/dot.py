from enum import Enum
from typing import List, Optional

from tmkit.core.model import Bundle, StaticModel


class ExportView(str, Enum):
    STATIC = "static"
    EVENTS = "events"
    BEHAVIOR = "behavior"


def quote(text) -> str:
    """
    Quotes a DOT identifier or label
    :param text:
    :return: str

    Examples:
        quote('E1') -> "E1"
        quote('say "hi"') -> "say \\"hi\\""
    """
    text = str(text).replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
    return '"{}"'.format(text)


def _attributes(attrs: dict) -> str:
    if len(attrs) == 0:
        return ""
    items = ["{}={}".format(k, quote(v)) for k, v in attrs.items()]
    return " [{}]".format(", ".join(items))


class DotGraph:
    """
    Minimal DOT builder

    Every method returns self, so calls can be chained:
        DotGraph("g").node("a", label="A").edge("a", "b").assemble()
    """

    def __init__(self, name: str, indent: str = "  "):
        self._name = name
        self._indent = indent
        self._lines = []  # type: List[str]
        self._depth = 1

    def _emit(self, line: str):
        self._lines.append(self._indent * self._depth + line)

    def attr(self, name: str, value) -> "DotGraph":
        self._emit("{}={};".format(name, quote(value)))
        return self

    def node(self, node_id: str, **attrs) -> "DotGraph":
        self._emit("{}{};".format(quote(node_id), _attributes(attrs)))
        return self

    def edge(self, source: str, target: str, **attrs) -> "DotGraph":
        self._emit("{} -> {}{};".format(quote(source), quote(target), _attributes(attrs)))
        return self

    def cluster(self, cluster_id: str, label: Optional[str] = None) -> "DotGraph":
        self._emit("subgraph {} {{".format(quote("cluster_" + cluster_id)))
        self._depth += 1
        if label is not None:
            self.attr("label", label)
        return self

    def end(self) -> "DotGraph":
        if self._depth <= 1:
            raise ValueError("end(): no open cluster")
        self._depth -= 1
        self._emit("}")
        return self

    def assemble(self) -> str:
        if self._depth != 1:
            raise ValueError("assemble(): {} cluster(s) still open".format(self._depth - 1))
        lines = ["digraph {} {{".format(quote(self._name))]
        lines.extend(self._lines)
        lines.append("}")
        return "\n".join(lines) + "\n"


def _node_label(node) -> str:
    label = "{}\n{}".format(node.kind.value, node.id)
    if node.label:
        label = "{}\n{}".format(label, node.label)
    return label


def _static(graph: DotGraph, model: StaticModel):
    children = {}
    for t in model.thimacs:
        children.setdefault(t.parent, []).append(t)
    owned = {}
    for n in model.nodes:
        owned.setdefault(n.owner, []).append(n)

    def draw(thimac):
        label = thimac.name
        if thimac.has_storage:
            label = label + " (storage)"
        graph.cluster(thimac.id, label)
        for n in sorted(owned.get(thimac.id, []), key=lambda n: n.id):
            graph.node(n.id, label=_node_label(n))
        for child in sorted(children.get(thimac.id, []), key=lambda t: t.id):
            draw(child)
        graph.end()

    known = set(t.id for t in model.thimacs)
    roots = [t for t in model.thimacs if t.parent is None or t.parent not in known]
    for t in sorted(roots, key=lambda t: t.id):
        draw(t)

    for a in sorted(model.flows, key=lambda a: a.id):
        graph.edge(a.source, a.target, label=a.id)
    for a in sorted(model.triggers, key=lambda a: a.id):
        attrs = {"style": "dashed", "label": a.id}
        if a.guard is not None:
            attrs["label"] = "{} [{}]".format(a.id, a.guard)
        graph.edge(a.source, a.target, **attrs)


def _events(graph: DotGraph, bundle: Bundle):
    model = bundle.static
    for e in sorted(bundle.events, key=lambda e: e.id):
        graph.cluster(e.id, "{}({})".format(e.id, ", ".join(e.params)))
        for node_id in sorted(e.region.nodes):
            n = model.node(node_id)
            label = _node_label(n) if n is not None else node_id
            graph.node("{}/{}".format(e.id, node_id), label=label)
        graph.end()
        for arc_id in sorted(e.region.arcs):
            a = model.arc(arc_id)
            if a is None:
                continue
            attrs = {"label": arc_id}
            if a in model.triggers:
                attrs["style"] = "dashed"
            graph.edge("{}/{}".format(e.id, a.source), "{}/{}".format(e.id, a.target), **attrs)


def _behavior(graph: DotGraph, bundle: Bundle):
    behavior = bundle.behavior
    if behavior is None:
        return
    for event_id in sorted(behavior.events):
        graph.node(event_id, label=event_id)
    for e in sorted(behavior.edges, key=lambda e: (e.source, e.target)):
        if e.repeatable:
            graph.edge(e.source, e.target)
        else:
            graph.edge(e.source, e.target, label="no repeat", arrowhead="tee")


def to_dot(bundle: Bundle, view: ExportView = ExportView.STATIC) -> str:
    """
    Render one layer of a bundle as a DOT digraph
    :param bundle: Bundle
    :param view: ExportView
    :return: str
    """
    view = ExportView(view)
    graph = DotGraph("tmkit_" + view.value)
    if view == ExportView.STATIC:
        _static(graph, bundle.static)
    elif view == ExportView.EVENTS:
        _events(graph, bundle)
    else:
        _behavior(graph, bundle)
    return graph.assemble()
