import logging
import re
from dataclasses import replace
from functools import lru_cache
from typing import List, Optional, Tuple

from lark import Lark, Transformer, UnexpectedInput, v_args

from tmkit.core.diagnostics import error, sort_diagnostics
from tmkit.dsl.ast import (
    ConditionalPrint,
    CreateInstance,
    End,
    Flow,
    FlowTarget,
    Script,
    SetAttribute,
    TriggerEvent,
)
from tmkit.dsl.parser import quote, unquote
from tmkit.dsl.result import ParseResult
from tmkit.dsl.source import blank_comments

logger = logging.getLogger("tmkit.dsl")

SCRIPT_GRAMMAR = r"""
?start: create_instance
      | set_attribute
      | flow
      | trigger_event
      | cond_print
      | end_marker

create_instance: "Create" WORD "=" WORD ("." attr)*
set_attribute: "Create" WORD WORD "." attr
flow: "Create" "." WORD "=" WORD _path (_ARROW target)*
target: WORD ["=" WORD] _path
_path: ("." _segment)*
_segment: attr | stage
attr: WORD "=" value
stage: WORD
trigger_event: "Trigger" "Event" WORD
cond_print: "If" WORD "print" (STRING | words)
words: WORD+
end_marker: "End" WORD "(" (attr ("," attr)*)? ")"
value: WORD | STRING

WORD: /[A-Za-z0-9_]+(-[A-Za-z0-9_]+)*/
_ARROW: "->" | "→"

%import common.ESCAPED_STRING -> STRING
%import common.WS
%ignore WS
"""

STATEMENT_KEYWORDS = ("Create", "Trigger", "If", "End")

_CONTINUATION = (".", "->", "→")
_LABEL = re.compile(r"^([A-Za-z0-9_][A-Za-z0-9_\-]*)\s*:\s*")
_FIRST = re.compile(r"^\S+")
_FIRST_WORD = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*")
_INT = re.compile(r"^[0-9]+$")
_BARE = re.compile(r"^[A-Za-z0-9_]+(-[A-Za-z0-9_]+)*$")


class _Stage(str):
    pass


@v_args(inline=True)
class _ScriptBuilder(Transformer):
    def value(self, token):
        if token.type == "STRING":
            return unquote(token)
        text = str(token)
        if _INT.match(text):
            return int(text)
        return text

    def attr(self, name, value):
        return str(name), value

    def stage(self, token):
        return _Stage(token)

    def words(self, *tokens):
        return " ".join(str(t) for t in tokens)

    def create_instance(self, thimac, instance, *attrs):
        return CreateInstance(str(thimac), str(instance), tuple(attrs))

    def set_attribute(self, thimac, instance, attr):
        return SetAttribute(str(thimac), str(instance), attr[0], attr[1])

    def target(self, thimac, instance, *segments):
        attrs, stages = _segments(segments)
        return FlowTarget(
            str(thimac), str(instance) if instance is not None else None, attrs, stages
        )

    def flow(self, thimac, instance, *rest):
        targets = tuple(r for r in rest if isinstance(r, FlowTarget))
        attrs, stages = _segments([r for r in rest if not isinstance(r, FlowTarget)])
        return Flow(str(thimac), str(instance), attrs, stages, targets)

    def trigger_event(self, event):
        return TriggerEvent(str(event))

    def cond_print(self, event, text):
        if hasattr(text, "type") and text.type == "STRING":
            text = unquote(text)
        return ConditionalPrint(str(event), str(text))

    def end_marker(self, composite, *attrs):
        return End(str(composite), tuple(attrs))


def _segments(segments) -> Tuple[tuple, tuple]:
    attrs = tuple(s for s in segments if isinstance(s, tuple))
    stages = tuple(str(s) for s in segments if isinstance(s, _Stage))
    return attrs, stages


@lru_cache(maxsize=None)
def _script_parser() -> Lark:
    return Lark(SCRIPT_GRAMMAR, parser="lalr")


class LogicalLine:
    """
    A statement assembled from one or more physical lines

    Keeps the physical origin of every piece so positions inside the joined text can be mapped back
    """

    def __init__(self):
        self.text = ""
        self.segments = []  # (offset, line, column)

    def add(self, piece: str, line: int, column: int):
        if self.text != "":
            self.text += " "
        self.segments.append((len(self.text), line, column))
        self.text += piece

    def locate(self, offset: int) -> Tuple[int, int]:
        for start, line, column in reversed(self.segments):
            if offset >= start:
                return line, column + offset - start
        return self.segments[0][1], self.segments[0][2]

    def drop(self, count: int):
        """
        Remove the first count characters, keeping positions
        """
        line, column = self.locate(count)
        rest = []
        for start, seg_line, seg_column in self.segments:
            if start > count:
                rest.append((start - count, seg_line, seg_column))
        self.segments = [(0, line, column)] + rest
        self.text = self.text[count:]

    @property
    def continues(self) -> bool:
        return self.text.endswith(_CONTINUATION)


def logical_lines(text: str) -> List[LogicalLine]:
    result = []
    current = None
    for idx, raw in enumerate(text.split("\n")):
        piece = raw.strip()
        if piece == "":
            continue
        column = len(raw) - len(raw.lstrip()) + 1
        if current is None or not current.continues:
            current = LogicalLine()
            result.append(current)
        current.add(piece, idx + 1, column)
    return result


def parse_script(text: str) -> ParseResult:
    """
    Parse script source text

    Each statement is parsed on its own, so every malformed statement is reported
    :param text: script source
    :return: ParseResult with a Script value, or None if any error was found
    """
    blanked, diagnostics = blank_comments(text)
    statements = []
    label = None  # type: Optional[str]

    for logical in logical_lines(blanked):
        match = _LABEL.match(logical.text)
        if match is not None:
            label = match.group(1)
            logical.drop(match.end())
            if logical.text.strip() == "":
                continue

        first = _FIRST_WORD.match(logical.text)
        if first is None or first.group(0) not in STATEMENT_KEYWORDS:
            word = (first or _FIRST.match(logical.text)).group(0)
            line, column = logical.locate(0)
            diagnostics.append(
                error(
                    "UnknownStatement",
                    "unknown statement '{}'".format(word),
                    line=line,
                    column=column,
                )
            )
            label = None
            continue

        try:
            tree = _script_parser().parse(logical.text)
        except UnexpectedInput as e:
            column = getattr(e, "column", None)
            offset = column - 1 if column is not None and column > 0 else len(logical.text)
            line, column = logical.locate(offset)
            diagnostics.append(
                error("SyntaxError", _describe(e), line=line, column=column)
            )
            label = None
            continue

        stmt = _ScriptBuilder().transform(tree)
        line, column = logical.locate(0)
        statements.append(replace(stmt, label=label, line=line, column=column))
        label = None

    diagnostics = sort_diagnostics(diagnostics)
    if len(diagnostics) > 0:
        logger.debug("script parse failed with {} diagnostics".format(len(diagnostics)))
        return ParseResult(None, diagnostics)
    return ParseResult(Script(tuple(statements)), [])


def _describe(e: UnexpectedInput) -> str:
    token = getattr(e, "token", None)
    if token is not None:
        if token.type == "$END":
            return "unexpected end of statement"
        return "unexpected '{}'".format(token)
    return "unexpected character '{}'".format(getattr(e, "char", "?"))


def parse_script_file(path: str) -> ParseResult:
    with open(path, "r", encoding="utf-8") as f:
        return parse_script(f.read())


def format_value(value) -> str:
    if isinstance(value, int):
        return str(value)
    if _BARE.match(value) and not _INT.match(value):
        return value
    return quote(value)


def _attrs(attributes) -> List[str]:
    return ["{}={}".format(name, format_value(value)) for name, value in attributes]


def format_statement(stmt) -> str:
    """
    Render a single statement, without its label
    :param stmt: statement
    :return: str
    """
    if isinstance(stmt, CreateInstance):
        return ".".join(["Create {}={}".format(stmt.thimac, stmt.instance)] + _attrs(stmt.attributes))
    if isinstance(stmt, SetAttribute):
        return "Create {} {}.{}={}".format(
            stmt.thimac, stmt.instance, stmt.attribute, format_value(stmt.value)
        )
    if isinstance(stmt, Flow):
        parts = [
            ".".join(
                ["Create", "{}={}".format(stmt.thimac, stmt.instance)]
                + _attrs(stmt.attributes)
                + list(stmt.stages)
            )
        ]
        for target in stmt.targets:
            head = target.thimac
            if target.instance is not None:
                head = "{}={}".format(target.thimac, target.instance)
            parts.append(".".join([head] + _attrs(target.attributes) + list(target.stages)))
        return " -> ".join(parts)
    if isinstance(stmt, TriggerEvent):
        return "Trigger Event {}".format(stmt.event)
    if isinstance(stmt, ConditionalPrint):
        return "If {} print {}".format(stmt.event, quote(stmt.text))
    if isinstance(stmt, End):
        return "End {}({})".format(stmt.composite, ", ".join(_attrs(stmt.binding)))
    raise ValueError("unknown statement type {}".format(type(stmt).__name__))


def pretty_print_script(script: Script) -> str:
    """
    Render a Script back to source text
    :param script: Script
    :return: str
    """
    out = []
    for stmt in script.statements:
        if stmt.label is not None:
            out.append("{}:".format(stmt.label))
        out.append(format_statement(stmt))
    if len(out) == 0:
        return ""
    return "\n".join(out) + "\n"
