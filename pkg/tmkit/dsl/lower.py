import logging
from collections import Counter
from typing import Dict, List, Tuple

from tmkit.core.compose import compose
from tmkit.core.diagnostics import Diagnostic, error, has_errors, sort_diagnostics
from tmkit.core.model import (
    ActionKind,
    ActionNode,
    BehaviorEdge,
    BehaviorModel,
    Bundle,
    ConstraintKind,
    ConstraintSpec,
    EventDef,
    FlowArc,
    ModelError,
    Notation,
    Region,
    StaticModel,
    Thimac,
    TriggerArc,
    UnknownEvent,
    UnsharedVariable,
    Variable,
)
from tmkit.core.validate import check_region, validate_static_model
from tmkit.dsl.ast import (
    BehaviorDecl,
    CompositeDecl,
    ConstraintDecl,
    EventDecl,
    FlowDecl,
    ModelAST,
    NotationDecl,
    ThimacDecl,
    TriggerDecl,
)
from tmkit.dsl.parser import parse_model
from tmkit.dsl.result import LowerResult

logger = logging.getLogger("tmkit.dsl")


class _Lowering:
    def __init__(self, ast: ModelAST):
        self.ast = ast
        self.diagnostics = []  # type: List[Diagnostic]
        # element id -> (line, column) of its declaration
        self.positions = {}  # type: Dict[str, Tuple[int, int]]

    def fail(self, code: str, message: str, element: str, decl):
        self.diagnostics.append(
            error(code, message, element, line=decl.line, column=decl.column)
        )

    def notation(self) -> Notation:
        decls = self.ast.of_type(NotationDecl)
        for extra in decls[1:]:
            self.fail("DuplicateId", "notation declared more than once", "notation", extra)
        if len(decls) == 0:
            return Notation.CANONICAL
        try:
            return Notation(decls[0].value)
        except ValueError:
            self.fail(
                "InvalidNotation",
                "unknown notation '{}'".format(decls[0].value),
                "notation",
                decls[0],
            )
            return Notation.CANONICAL

    def static(self) -> StaticModel:
        thimacs = []
        nodes = []
        for decl in self.ast.of_type(ThimacDecl):
            self.positions.setdefault(decl.name, (decl.line, decl.column))
            variables = tuple(Variable(v.name, v.initial) for v in decl.variables)
            thimacs.append(Thimac(decl.name, decl.name, decl.parent, decl.storage, variables))
            for stage in decl.stages:
                self.positions.setdefault(stage.id, (stage.line, stage.column))
                try:
                    kind = ActionKind.parse(stage.kind)
                except ModelError as e:
                    self.fail("InvalidActionKind", str(e), stage.id, stage)
                    continue
                nodes.append(
                    ActionNode(
                        stage.id,
                        decl.name,
                        kind,
                        stage.label or "",
                        stage.updates,
                        stage.message,
                    )
                )

        known = set(n.id for n in nodes)
        flows = []
        for idx, decl in enumerate(self.ast.of_type(FlowDecl)):
            arc_id = decl.id or "f{}".format(idx + 1)
            if self._endpoints_known(arc_id, decl, known):
                self.positions.setdefault(arc_id, (decl.line, decl.column))
                flows.append(FlowArc(arc_id, decl.source, decl.target))

        triggers = []
        for idx, decl in enumerate(self.ast.of_type(TriggerDecl)):
            arc_id = decl.id or "t{}".format(idx + 1)
            if self._endpoints_known(arc_id, decl, known):
                self.positions.setdefault(arc_id, (decl.line, decl.column))
                triggers.append(TriggerArc(arc_id, decl.source, decl.target, decl.guard))

        model = StaticModel(
            tuple(thimacs), tuple(nodes), tuple(flows), tuple(triggers), self.notation()
        )
        for d in validate_static_model(model):
            pos = self.positions.get(d.element)
            self.diagnostics.append(d.at(*pos) if pos is not None else d)
        return model

    def _endpoints_known(self, arc_id: str, decl, known: set) -> bool:
        ok = True
        for end in (decl.source, decl.target):
            if end not in known:
                self.fail(
                    "UnknownNode",
                    "arc '{}' references unknown node '{}'".format(arc_id, end),
                    arc_id,
                    decl,
                )
                ok = False
        return ok

    def events(self, static: StaticModel) -> List[EventDef]:
        decls = self.ast.of_type(EventDecl)
        counts = Counter(d.id for d in decls)
        reported = set()
        result = []
        for decl in decls:
            if counts[decl.id] > 1:
                if decl.id not in reported:
                    self.fail(
                        "DuplicateId", "event '{}' declared more than once".format(decl.id), decl.id, decl
                    )
                    reported.add(decl.id)
                continue

            params = [p.name for p in decl.params]
            for name, n in Counter(params).items():
                if n > 1:
                    self.fail(
                        "DuplicateId",
                        "parameter '{}' repeated in event '{}'".format(name, decl.id),
                        decl.id,
                        decl,
                    )

            missing = [n for n in decl.nodes if static.node(n) is None]
            for node_id in missing:
                self.fail(
                    "UnknownNode",
                    "event '{}' references unknown node '{}'".format(decl.id, node_id),
                    decl.id,
                    decl,
                )
            if len(missing) > 0:
                continue

            nodes = frozenset(decl.nodes)
            region = Region(nodes, static.induced_arcs(nodes))
            if not check_region(region, static):
                self.fail(
                    "RegionInvalid",
                    "region of event '{}' is empty or not connected".format(decl.id),
                    decl.id,
                    decl,
                )
                continue

            sources = tuple(p.source or p.name for p in decl.params)
            result.append(EventDef(decl.id, region, tuple(params), sources))
        return result

    def composites(self, bundle: Bundle) -> Bundle:
        for decl in self.ast.of_type(CompositeDecl):
            if bundle.composite(decl.id) is not None:
                self.fail(
                    "DuplicateId",
                    "composite '{}' declared more than once".format(decl.id),
                    decl.id,
                    decl,
                )
                continue
            try:
                composite = compose(bundle, decl.members, decl.shared, decl.anchor)
            except UnknownEvent as e:
                self.fail("UnknownEvent", str(e), decl.id, decl)
                continue
            except UnsharedVariable as e:
                self.fail("UnsharedVariable", str(e), decl.id, decl)
                continue
            except ModelError as e:
                self.fail("InvalidComposite", str(e), decl.id, decl)
                continue
            if composite.id != decl.id:
                self.fail(
                    "CompositeIdMismatch",
                    "composite '{}' should be named '{}'".format(decl.id, composite.id),
                    decl.id,
                    decl,
                )
                continue
            bundle = bundle.register(composite)
        return bundle

    def behavior(self, bundle: Bundle):
        decls = self.ast.of_type(BehaviorDecl)
        if len(decls) == 0:
            return None
        for extra in decls[1:]:
            self.fail("DuplicateId", "behavior declared more than once", "behavior", extra)

        edges = []
        events = set()
        seen = set()
        for edge in decls[0].edges:
            ok = True
            for end in (edge.source, edge.target):
                if bundle.event(end) is None:
                    self.fail(
                        "UnknownEvent",
                        "behavior edge references unknown event '{}'".format(end),
                        "behavior",
                        edge,
                    )
                    ok = False
            if (edge.source, edge.target) in seen:
                self.fail(
                    "DuplicateId",
                    "behavior edge {} -> {} declared twice".format(edge.source, edge.target),
                    "behavior",
                    edge,
                )
                ok = False
            if not ok:
                continue
            seen.add((edge.source, edge.target))
            events.update([edge.source, edge.target])
            edges.append(BehaviorEdge(edge.source, edge.target, not edge.norepeat))
        return BehaviorModel(frozenset(events), tuple(edges))

    def constraints(self, bundle: Bundle) -> List[ConstraintSpec]:
        result = []
        seen = set()
        for decl in self.ast.of_type(ConstraintDecl):
            if decl.id in seen:
                self.fail(
                    "DuplicateId",
                    "constraint '{}' declared more than once".format(decl.id),
                    decl.id,
                    decl,
                )
                continue
            seen.add(decl.id)

            kind = ConstraintKind(decl.kind)
            if kind == ConstraintKind.SUCCESSION:
                missing = [e for e in decl.targets if bundle.event(e) is None]
                for e in missing:
                    self.fail(
                        "UnknownEvent",
                        "constraint '{}' references unknown event '{}'".format(decl.id, e),
                        decl.id,
                        decl,
                    )
                if len(missing) > 0:
                    continue
            else:
                composite = bundle.composite(decl.targets[0])
                if composite is None:
                    self.fail(
                        "UnknownComposite",
                        "constraint '{}' references unknown composite '{}'".format(
                            decl.id, decl.targets[0]
                        ),
                        decl.id,
                        decl,
                    )
                    continue
                bad = [k for k in decl.key if k not in composite.shared]
                if len(bad) > 0:
                    self.fail(
                        "BadKey",
                        "key variables {} are not shared by '{}'".format(
                            ", ".join(bad), composite.id
                        ),
                        decl.id,
                        decl,
                    )
                    continue
            result.append(ConstraintSpec(decl.id, kind, decl.targets, decl.key))
        return result

    def run(self) -> LowerResult:
        static = self.static()
        bundle = Bundle(static, tuple(self.events(static)))
        bundle = self.composites(bundle)
        behavior = self.behavior(bundle)
        constraints = self.constraints(bundle)
        bundle = Bundle(
            static, bundle.events, bundle.composites, behavior, tuple(constraints)
        )
        diagnostics = sort_diagnostics(self.diagnostics)
        if has_errors(diagnostics):
            logger.debug("lowering failed with {} diagnostics".format(len(diagnostics)))
            return LowerResult(None, diagnostics)
        return LowerResult(bundle, diagnostics)


def lower(ast: ModelAST) -> LowerResult:
    """
    Resolve names and build a Bundle from a parsed model

    A bundle is returned only when no error diagnostic was produced; warnings are kept
    :param ast: ModelAST
    :return: LowerResult
    """
    return _Lowering(ast).run()


def load_model(text: str) -> LowerResult:
    """
    Parse and lower model source text
    :param text: model source
    :return: LowerResult
    """
    parsed = parse_model(text)
    if not parsed.success:
        return LowerResult(None, parsed.diagnostics)
    return lower(parsed.value)


def load_model_file(path: str) -> LowerResult:
    with open(path, "r", encoding="utf-8") as f:
        return load_model(f.read())
