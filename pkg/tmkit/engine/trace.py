# Trace text format
#
#   t=1 E1(x=Michael)
#   t=1 E2(x=Michael,f=3825)
#   t=3 msg "OK"
#
# occurrence lines first, then message lines; values are integers, bare words, quoted strings
# or bracketed lists such as [a,2]
import re
from dataclasses import dataclass, field
from typing import Any, Dict, List, Tuple

from tmkit.engine.state import EngineError


class TraceFormatError(EngineError):
    pass


@dataclass(frozen=True)
class Occurrence:
    event: str
    time: int
    binding: Tuple[Tuple[str, Any], ...] = ()

    @property
    def values(self) -> Dict[str, Any]:
        return dict(self.binding)

    def value(self, name: str, default=None):
        for k, v in self.binding:
            if k == name:
                return v
        return default


@dataclass(frozen=True)
class Message:
    time: int
    text: str


@dataclass
class Trace:
    occurrences: List[Occurrence] = field(default_factory=list)
    messages: List[Message] = field(default_factory=list)

    def __len__(self):
        return len(self.occurrences)

    def events(self) -> List[str]:
        return [o.event for o in self.occurrences]


_BARE = re.compile(r"^[A-Za-z0-9_.:]+(-[A-Za-z0-9_.:]+)*$")
_INT = re.compile(r"^-?[0-9]+$")
_LINE = re.compile(r'^t=(-?[0-9]+)\s+(?:msg\s+(".*")|([^\s(]+)\((.*)\))\s*$')
_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_QUOTED = re.compile(r'"(?:[^"\\]|\\.)*"')
_WORD = re.compile(r'[^,\[\]"]*')
_ESCAPE = re.compile(r"\\(.)")


def quote(text: str) -> str:
    return '"{}"'.format(text.replace("\\", "\\\\").replace('"', '\\"'))


def format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, tuple):
        return "[{}]".format(",".join(format_value(v) for v in value))
    value = str(value)
    if _BARE.match(value) and not _INT.match(value):
        return value
    return quote(value)


def parse_value(text: str):
    text = text.strip()
    if text.startswith('"'):
        return _ESCAPE.sub(r"\1", text[1:-1])
    if _INT.match(text):
        return int(text)
    return text


def format_binding(binding) -> str:
    return ",".join("{}={}".format(k, format_value(v)) for k, v in binding)


def format_occurrence(o: Occurrence) -> str:
    return "t={} {}({})".format(o.time, o.event, format_binding(o.binding))


def to_text(trace: Trace) -> str:
    """
    Serialize a trace: all occurrence lines, then all message lines
    :param trace: Trace
    :return: str
    """
    lines = [format_occurrence(o) for o in trace.occurrences]
    lines.extend('t={} msg {}'.format(m.time, quote(m.text)) for m in trace.messages)
    if len(lines) == 0:
        return ""
    return "\n".join(lines) + "\n"


class _BindingReader:
    """
    Reads name=value pairs; a value is an integer, a bare word, a quoted string or a [..] list
    """

    def __init__(self, text: str, lineno: int):
        self.text = text
        self.lineno = lineno
        self.pos = 0

    def fail(self):
        raise TraceFormatError("line {}: malformed binding '{}'".format(self.lineno, self.text))

    def peek(self) -> str:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1
        if self.pos < len(self.text):
            return self.text[self.pos]
        return ""

    def match(self, pattern) -> str:
        found = pattern.match(self.text, self.pos)
        if found is None:
            self.fail()
        self.pos = found.end()
        return found.group(0)

    def pairs(self) -> Tuple[Tuple[str, Any], ...]:
        binding = []
        if self.peek() == "":
            return ()
        while True:
            self.peek()
            name = self.match(_NAME)
            if self.peek() != "=":
                self.fail()
            self.pos += 1
            binding.append((name, self.value()))
            sep = self.peek()
            if sep == "":
                return tuple(binding)
            if sep != ",":
                self.fail()
            self.pos += 1

    def value(self):
        ch = self.peek()
        if ch == "[":
            self.pos += 1
            if self.peek() == "]":
                self.pos += 1
                return ()
            items = []
            while True:
                items.append(self.value())
                sep = self.peek()
                self.pos += 1
                if sep == "]":
                    return tuple(items)
                if sep != ",":
                    self.fail()
        if ch == '"':
            return parse_value(self.match(_QUOTED))
        return parse_value(self.match(_WORD))


def _parse_binding(text: str, lineno: int) -> Tuple[Tuple[str, Any], ...]:
    return _BindingReader(text.strip(), lineno).pairs()


def from_text(text: str) -> Trace:
    """
    Parse the text trace format
    :param text: serialized trace
    :return: Trace
    """
    trace = Trace()
    for lineno, line in enumerate(text.split("\n"), start=1):
        if line.strip() == "":
            continue
        match = _LINE.match(line.strip())
        if match is None:
            raise TraceFormatError("line {}: malformed trace line".format(lineno))
        time = int(match.group(1))
        if match.group(2) is not None:
            trace.messages.append(Message(time, parse_value(match.group(2))))
        else:
            trace.occurrences.append(
                Occurrence(match.group(3), time, _parse_binding(match.group(4), lineno))
            )
    return trace
