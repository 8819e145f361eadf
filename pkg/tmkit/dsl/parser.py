import logging
import re
from functools import lru_cache
from typing import List, Optional

from lark import Lark, Transformer, UnexpectedEOF, UnexpectedInput, UnexpectedToken, v_args

from tmkit.core.diagnostics import Diagnostic, error, sort_diagnostics
from tmkit.dsl.ast import (
    BehaviorDecl,
    CompositeDecl,
    ConstraintDecl,
    EdgeDecl,
    EventDecl,
    FlowDecl,
    ModelAST,
    NotationDecl,
    ParamDecl,
    StageDecl,
    ThimacDecl,
    TriggerDecl,
    VarDecl,
)
from tmkit.dsl.result import ParseResult
from tmkit.dsl.source import blank_comments, brace_delta

logger = logging.getLogger("tmkit.dsl")

MODEL_GRAMMAR = r"""
start: _decl*

_decl: notation_decl
     | thimac_decl
     | flow_decl
     | trigger_decl
     | event_decl
     | composite_decl
     | behavior_decl
     | constraint_decl

notation_decl: "notation" NAME

thimac_decl: "thimac" NAME ["parent" NAME] "{" _thimac_item* "}"
_thimac_item: storage_item | var_item | stage_item
thimac_item: storage_item | var_item | stage_item
storage_item: "storage" ";"?
var_item: "var" NAME "=" (SIGNED_INT | EMPTY_LIST) ";"?
stage_item: "stage" NAME NAME _stage_opt* ";"?
_stage_opt: label_opt | updates_opt | message_opt
label_opt: "label" STRING
updates_opt: "updates" STRING
message_opt: "message" STRING

flow_decl: "flow" [NAME ":"] NAME _ARROW NAME
trigger_decl: "trigger" [NAME ":"] NAME _ARROW NAME ["when" STRING]

event_decl: "event" NAME "(" params ")" "{" nodes "}"
params: (param ("," param)*)?
param: NAME [":" NAME]
nodes: NAME*

composite_decl: "composite" NAME "=" members "sharing" "(" names ")" ["anchor" NAME]
members: NAME ("," NAME)+
names: (NAME ("," NAME)*)?

behavior_decl: "behavior" "{" edge* "}"
edge: NAME _ARROW NAME [NOREPEAT] ";"?

constraint_decl: "constraint" NAME ":" _constraint_body
_constraint_body: binding_body | succession_body | atmostonce_body
binding_body: "binding" NAME
succession_body: "succession" NAME "," NAME
atmostonce_body: "atmostonce" NAME "key" "(" names ")"

NOREPEAT: "norepeat"
NAME: /[A-Za-z_][A-Za-z0-9_]*([.\-][A-Za-z0-9_]+)*/
EMPTY_LIST: /\[\s*\]/
_ARROW: "->" | "→"

%import common.SIGNED_INT
%import common.ESCAPED_STRING -> STRING
%import common.WS
%ignore WS
"""

TOP_LEVEL_KEYWORDS = (
    "notation",
    "thimac",
    "flow",
    "trigger",
    "event",
    "composite",
    "behavior",
    "constraint",
)

# block declarations with one item per line, and the rule that parses a single item
ITEM_RULES = {"thimac": "thimac_item", "behavior": "edge"}

_FIRST_WORD = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)")
_ESCAPE = re.compile(r"\\(.)")


def unquote(token) -> str:
    return _ESCAPE.sub(r"\1", str(token)[1:-1])


def quote(text: str) -> str:
    return '"{}"'.format(text.replace("\\", "\\\\").replace('"', '\\"'))


def _pos(meta, offset: int) -> dict:
    return {"line": meta.line + offset, "column": meta.column}


class _ModelBuilder(Transformer):
    """
    Builds ModelAST nodes; line numbers are shifted by the chunk offset
    """

    def __init__(self, offset: int = 0):
        super().__init__()
        self.offset = offset

    def start(self, children):
        return list(children)

    @v_args(meta=True)
    def notation_decl(self, meta, children):
        return NotationDecl(str(children[0]), **_pos(meta, self.offset))

    @v_args(meta=True)
    def thimac_decl(self, meta, children):
        name, parent = str(children[0]), children[1]
        storage = False
        variables = []
        stages = []
        for item in children[2:]:
            if item == "storage":
                storage = True
            elif isinstance(item, VarDecl):
                variables.append(item)
            else:
                stages.append(item)
        return ThimacDecl(
            name,
            str(parent) if parent is not None else None,
            storage,
            tuple(variables),
            tuple(stages),
            **_pos(meta, self.offset)
        )

    def storage_item(self, children):
        return "storage"

    @v_args(meta=True)
    def var_item(self, meta, children):
        name, value = children
        if value.type == "EMPTY_LIST":
            initial = ()
        else:
            initial = int(value)
        return VarDecl(str(name), initial, **_pos(meta, self.offset))

    @v_args(meta=True)
    def stage_item(self, meta, children):
        kind, node_id = str(children[0]), str(children[1])
        opts = dict(children[2:])
        updates = ()
        if "updates" in opts:
            updates = tuple(
                part.strip() for part in opts["updates"].split(";") if part.strip() != ""
            )
        return StageDecl(
            kind,
            node_id,
            opts.get("label"),
            updates,
            opts.get("message"),
            **_pos(meta, self.offset)
        )

    def label_opt(self, children):
        return "label", unquote(children[0])

    def updates_opt(self, children):
        return "updates", unquote(children[0])

    def message_opt(self, children):
        return "message", unquote(children[0])

    @v_args(meta=True)
    def flow_decl(self, meta, children):
        arc_id, source, target = children
        return FlowDecl(
            str(arc_id) if arc_id is not None else None,
            str(source),
            str(target),
            **_pos(meta, self.offset)
        )

    @v_args(meta=True)
    def trigger_decl(self, meta, children):
        arc_id, source, target, guard = children
        return TriggerDecl(
            str(arc_id) if arc_id is not None else None,
            str(source),
            str(target),
            unquote(guard) if guard is not None else None,
            **_pos(meta, self.offset)
        )

    @v_args(meta=True)
    def event_decl(self, meta, children):
        event_id, params, nodes = children
        return EventDecl(str(event_id), params, nodes, **_pos(meta, self.offset))

    def params(self, children):
        return tuple(children)

    def param(self, children):
        name, source = children
        return ParamDecl(str(name), str(source) if source is not None else None)

    def nodes(self, children):
        return tuple(str(c) for c in children)

    def members(self, children):
        return tuple(str(c) for c in children)

    def names(self, children):
        return tuple(str(c) for c in children)

    @v_args(meta=True)
    def composite_decl(self, meta, children):
        comp_id, members, shared, anchor = children
        return CompositeDecl(
            str(comp_id),
            members,
            shared,
            str(anchor) if anchor is not None else None,
            **_pos(meta, self.offset)
        )

    @v_args(meta=True)
    def behavior_decl(self, meta, children):
        return BehaviorDecl(tuple(children), **_pos(meta, self.offset))

    @v_args(meta=True)
    def edge(self, meta, children):
        source, target, norepeat = children
        return EdgeDecl(
            str(source), str(target), norepeat is not None, **_pos(meta, self.offset)
        )

    @v_args(meta=True)
    def constraint_decl(self, meta, children):
        constraint_id, (kind, targets, key) = children
        return ConstraintDecl(
            str(constraint_id), kind, targets, key, **_pos(meta, self.offset)
        )

    def binding_body(self, children):
        return "binding", (str(children[0]),), ()

    def succession_body(self, children):
        return "succession", (str(children[0]), str(children[1])), ()

    def atmostonce_body(self, children):
        return "atmostonce", (str(children[0]),), children[1]


@lru_cache(maxsize=None)
def _model_parser() -> Lark:
    return Lark(
        MODEL_GRAMMAR,
        parser="lalr",
        propagate_positions=True,
        start=["start", "thimac_item", "edge"],
    )


class _Chunk:
    def __init__(self, start: int, bad: bool = False):
        self.start = start
        self.end = start
        self.bad = bad
        self.depth = 0
        # position of the first unmatched block opener
        self.opener = None


def _split_chunks(lines: List[str]) -> List[_Chunk]:
    """
    Split source lines into declaration chunks

    A chunk starts at every line whose first word is a top-level keyword, unless that line sits
    inside a block opened by a non-keyword line. Lines at depth 0 that do not start a declaration
    form a bad chunk
    """
    chunks = []
    current = None
    for idx, line in enumerate(lines):
        stripped = line.strip()
        if stripped == "":
            continue
        match = _FIRST_WORD.match(line)
        word = match.group(1) if match else None
        at_top = current is None or current.depth <= 0

        if word in TOP_LEVEL_KEYWORDS and (at_top or not current.bad):
            current = _Chunk(idx)
            chunks.append(current)
        elif at_top and not stripped.startswith("{"):
            if current is None or not current.bad or current.depth > 0:
                current = _Chunk(idx, bad=True)
                chunks.append(current)
        elif current is None:
            current = _Chunk(idx, bad=True)
            chunks.append(current)

        delta = brace_delta(line)
        if delta > 0 and current.depth <= 0 and current.opener is None:
            current.opener = (idx + 1, line.index("{") + 1)
        current.depth += delta
        current.end = idx + 1
    return chunks


def _unexpected(lines: List[str], chunk: _Chunk) -> Diagnostic:
    line = lines[chunk.start]
    token = line.strip().split()[0]
    return error(
        "SyntaxError",
        "unexpected '{}', expected a declaration".format(token),
        line=chunk.start + 1,
        column=_indent(line) + 1,
    )


def _indent(line: str) -> int:
    return len(line) - len(line.lstrip())


def _column(e: UnexpectedInput) -> int:
    column = getattr(e, "column", None)
    if column is None or column < 1:
        return 1
    return column


def _at_end(e: UnexpectedInput) -> bool:
    return isinstance(e, UnexpectedEOF) or (
        isinstance(e, UnexpectedToken) and e.token.type == "$END"
    )


def _syntax_error(e: UnexpectedInput, line: int, column: int) -> Diagnostic:
    if isinstance(e, UnexpectedToken) and e.token.type != "$END":
        message = "unexpected '{}'".format(e.token)
    elif _at_end(e):
        message = "unexpected end of declaration"
    else:
        message = "unexpected character '{}'".format(getattr(e, "char", "?"))
    return error("SyntaxError", message, line=line, column=column)


def _item_error(lines: List[str], chunk: _Chunk) -> Optional[Diagnostic]:
    """
    Re-parse a block declaration one line at a time

    Block items are whitespace-separated, so a broken item usually surfaces on the next line; the
    header and every item line are parsed on their own and the first line that fails is reported
    :return: Diagnostic, or None if every line parses on its own
    """
    header = lines[chunk.start]
    match = _FIRST_WORD.match(header)
    rule = ITEM_RULES.get(match.group(1) if match else None)
    if rule is None or not header.rstrip().endswith("{"):
        return None

    try:
        _model_parser().parse(header.strip() + " }", start="start")
    except UnexpectedInput as e:
        return _syntax_error(e, chunk.start + 1, _column(e) + _indent(header))

    for idx in range(chunk.start + 1, chunk.end):
        line = lines[idx]
        if line.strip() in ("", "}"):
            continue
        try:
            _model_parser().parse(line.strip(), start=rule)
        except UnexpectedInput as e:
            return _syntax_error(e, idx + 1, _column(e) + _indent(line))
    return None


def _unterminated(lines: List[str], chunk: _Chunk) -> Diagnostic:
    opener_line, opener_column = chunk.opener
    message = "unterminated block opened at {}:{}".format(opener_line, opener_column)
    if opener_line == chunk.end:
        return error("SyntaxError", message, line=opener_line, column=opener_column)
    if chunk.end >= len(lines):
        return error(
            "SyntaxError", message, line=chunk.end, column=len(lines[chunk.end - 1]) + 1
        )
    # the closing brace belongs on the line after the last one of the block
    return error("SyntaxError", message, line=chunk.end + 1, column=1)


def _chunk_error(lines: List[str], e: UnexpectedInput, chunk: _Chunk) -> Diagnostic:
    located = _item_error(lines, chunk)
    if located is not None:
        return located
    if _at_end(e) and chunk.depth > 0 and chunk.opener is not None:
        return _unterminated(lines, chunk)

    line = getattr(e, "line", None)
    if line is None or line < 1:
        line = 1
    return _syntax_error(e, line + chunk.start, _column(e))


def parse_model(text: str) -> ParseResult:
    """
    Parse model source text

    Parsing recovers at declaration boundaries: every malformed declaration yields one
    SyntaxError diagnostic and the remaining declarations are still parsed
    :param text: model source
    :return: ParseResult with a ModelAST value, or None if any error was found
    """
    blanked, diagnostics = blank_comments(text)
    lines = blanked.split("\n")
    declarations = []

    for chunk in _split_chunks(lines):
        if chunk.bad:
            diagnostics.append(_unexpected(lines, chunk))
            continue
        source = "\n".join(lines[chunk.start:chunk.end])
        try:
            tree = _model_parser().parse(source, start="start")
        except UnexpectedInput as e:
            diagnostics.append(_chunk_error(lines, e, chunk))
            continue
        declarations.extend(_ModelBuilder(chunk.start).transform(tree))

    diagnostics = sort_diagnostics(diagnostics)
    if len(diagnostics) > 0:
        logger.debug("model parse failed with {} diagnostics".format(len(diagnostics)))
        return ParseResult(None, diagnostics)
    return ParseResult(ModelAST(tuple(declarations)), [])


def parse_model_file(path: str) -> ParseResult:
    with open(path, "r", encoding="utf-8") as f:
        return parse_model(f.read())


def _initial(value) -> str:
    if isinstance(value, tuple):
        return "[]"
    return str(value)


def _stage(stage: StageDecl) -> str:
    parts = ["stage", stage.kind, stage.id]
    if stage.label is not None:
        parts.extend(["label", quote(stage.label)])
    if len(stage.updates) > 0:
        parts.extend(["updates", quote("; ".join(stage.updates))])
    if stage.message is not None:
        parts.extend(["message", quote(stage.message)])
    return " ".join(parts)


def _arc_prefix(arc_id: Optional[str]) -> str:
    if arc_id is None:
        return ""
    return "{}: ".format(arc_id)


def pretty_print(ast: ModelAST) -> str:
    """
    Render a ModelAST back to model source text
    :param ast: ModelAST
    :return: str
    """
    out = []
    for decl in ast.declarations:
        if isinstance(decl, NotationDecl):
            out.append("notation {}".format(decl.value))
        elif isinstance(decl, ThimacDecl):
            header = "thimac {}".format(decl.name)
            if decl.parent is not None:
                header += " parent {}".format(decl.parent)
            out.append(header + " {")
            if decl.storage:
                out.append("    storage")
            for v in decl.variables:
                out.append("    var {} = {}".format(v.name, _initial(v.initial)))
            for s in decl.stages:
                out.append("    " + _stage(s))
            out.append("}")
        elif isinstance(decl, FlowDecl):
            out.append(
                "flow {}{} -> {}".format(_arc_prefix(decl.id), decl.source, decl.target)
            )
        elif isinstance(decl, TriggerDecl):
            line = "trigger {}{} -> {}".format(
                _arc_prefix(decl.id), decl.source, decl.target
            )
            if decl.guard is not None:
                line += " when {}".format(quote(decl.guard))
            out.append(line)
        elif isinstance(decl, EventDecl):
            params = []
            for p in decl.params:
                params.append(p.name if p.source is None else "{}: {}".format(p.name, p.source))
            out.append(
                "event {}({}) {{ {} }}".format(decl.id, ", ".join(params), " ".join(decl.nodes))
            )
        elif isinstance(decl, CompositeDecl):
            line = "composite {} = {} sharing ({})".format(
                decl.id, ", ".join(decl.members), ", ".join(decl.shared)
            )
            if decl.anchor is not None:
                line += " anchor {}".format(decl.anchor)
            out.append(line)
        elif isinstance(decl, BehaviorDecl):
            out.append("behavior {")
            for e in decl.edges:
                out.append(
                    "    {} -> {}{}".format(e.source, e.target, " norepeat" if e.norepeat else "")
                )
            out.append("}")
        elif isinstance(decl, ConstraintDecl):
            if decl.kind == "succession":
                body = "succession {}, {}".format(*decl.targets)
            elif decl.kind == "atmostonce":
                body = "atmostonce {} key ({})".format(decl.targets[0], ", ".join(decl.key))
            else:
                body = "binding {}".format(decl.targets[0])
            out.append("constraint {} : {}".format(decl.id, body))
    if len(out) == 0:
        return ""
    return "\n".join(out) + "\n"
