from typing import List, Tuple

from tmkit.core.diagnostics import Diagnostic, error


def position(text: str, offset: int) -> Tuple[int, int]:
    """
    Convert a character offset into a 1-based (line, column) pair
    """
    line = text.count("\n", 0, offset) + 1
    column = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, column


def blank_comments(text: str) -> Tuple[str, List[Diagnostic]]:
    """
    Replace /* ... */ comments with spaces, keeping newlines so positions do not move
    Double-quoted strings are skipped; an unterminated comment is reported at its opener
    :param text: source text
    :return: (blanked text, diagnostics)
    """
    out = list(text)
    diagnostics = []
    i = 0
    size = len(text)
    in_string = False
    while i < size:
        ch = text[i]
        if in_string:
            if ch == "\\":
                i += 2
                continue
            if ch == '"' or ch == "\n":
                in_string = False
            i += 1
            continue

        if ch == '"':
            in_string = True
            i += 1
            continue

        if text.startswith("/*", i):
            end = text.find("*/", i + 2)
            if end < 0:
                line, column = position(text, i)
                diagnostics.append(
                    error("SyntaxError", "unterminated comment", line=line, column=column)
                )
                end = size
            else:
                end += 2
            for j in range(i, end):
                if out[j] != "\n":
                    out[j] = " "
            i = end
            continue
        i += 1
    return "".join(out), diagnostics


def brace_delta(line: str) -> int:
    """
    Net change of block depth over a line, ignoring braces inside double-quoted strings
    """
    depth = 0
    in_string = False
    escaped = False
    for ch in line:
        if in_string:
            if escaped:
                escaped = False
            elif ch == "\\":
                escaped = True
            elif ch == '"':
                in_string = False
            continue
        if ch == '"':
            in_string = True
        elif ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
    return depth
