# Expression language used by stage updates and trigger guards
#
#   updates:  y := x + 1; append(Passengers, Name)
#   guards:   y > Airplane.NoSeats
#
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Callable, List, Optional, Tuple

from lark import Lark, LarkError, Transformer, v_args
from lark.exceptions import VisitError


class ExpressionError(Exception):
    pass


class ReferenceMissing(ExpressionError):
    def __init__(self, name: str):
        super().__init__("unknown reference '{}'".format(name))
        self.name = name


class TypeMismatch(ExpressionError):
    pass


_GRAMMAR = r"""
?update: NAME ":=" expr -> assign
       | expr

?expr: sum
     | sum CMPOP sum -> compare

?sum: unary
    | sum "+" unary -> add
    | sum "-" unary -> sub

?unary: atom
      | "-" unary -> neg

?atom: INT -> number
     | STRING -> string
     | NAME "(" [args] ")" -> call
     | NAME -> ref
     | "(" expr ")"

args: expr ("," expr)*

CMPOP: ">=" | "<=" | "==" | "!=" | ">" | "<"
NAME: /[A-Za-z_][A-Za-z0-9_]*(\.[A-Za-z_][A-Za-z0-9_]*)?/
STRING: /'[^'\n]*'/

%import common.INT
%import common.WS
%ignore WS
"""

FUNCTIONS = ("append", "remove_first", "contains", "len")
LIST_UPDATES = ("append", "remove_first")


@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Str:
    value: str


@dataclass(frozen=True)
class Ref:
    name: str


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple


@dataclass(frozen=True)
class BinOp:
    op: str
    left: Any
    right: Any


@dataclass(frozen=True)
class Neg:
    operand: Any


@dataclass(frozen=True)
class Assign:
    target: str
    expr: Any


@v_args(inline=True)
class _ToAst(Transformer):
    def number(self, token):
        return Num(int(token))

    def string(self, token):
        return Str(str(token)[1:-1])

    def ref(self, token):
        return Ref(str(token))

    def args(self, *items):
        return tuple(items)

    def call(self, name, args=None):
        name = str(name)
        if name not in FUNCTIONS:
            raise ExpressionError("unknown function '{}'".format(name))
        return Call(name, args or ())

    def add(self, left, right):
        return BinOp("+", left, right)

    def sub(self, left, right):
        return BinOp("-", left, right)

    def compare(self, left, op, right):
        return BinOp(str(op), left, right)

    def neg(self, operand):
        return Neg(operand)

    def assign(self, target, expr):
        return Assign(str(target), expr)


@lru_cache(maxsize=None)
def _parser() -> Lark:
    return Lark(_GRAMMAR, start=["update", "expr"], parser="lalr")


def _parse(text: str, start: str):
    try:
        tree = _parser().parse(text, start=start)
        if isinstance(tree, (Num, Str, Ref, Call, BinOp, Neg, Assign)):
            return tree
        return _ToAst().transform(tree)
    except VisitError as e:
        if isinstance(e.orig_exc, ExpressionError):
            raise e.orig_exc
        raise ExpressionError("malformed expression '{}': {}".format(text, e.orig_exc))
    except LarkError as e:
        raise ExpressionError("malformed expression '{}': {}".format(text, str(e).splitlines()[0]))


@lru_cache(maxsize=1024)
def parse_guard(text: str):
    """
    Parse a guard expression
    :param text: expression text
    :return: expression AST
    """
    return _parse(text, "expr")


@dataclass(frozen=True)
class Update:
    """
    A single update statement

    target is the variable being (re)bound; probe holds the searched value for a bare remove_first() call,
    so the caller can report a miss
    """

    target: str
    expr: Any
    probe: Optional[Any] = None


def split_updates(text: str) -> List[str]:
    return [part.strip() for part in text.split(";") if part.strip() != ""]


@lru_cache(maxsize=1024)
def parse_update(text: str) -> Update:
    """
    Parse one update statement: either "target := expr" or a bare list call that rebinds its first argument
    :param text: statement text
    :return: Update
    """
    tree = _parse(text, "update")
    if isinstance(tree, Assign):
        return Update(tree.target, tree.expr)
    if isinstance(tree, Call) and tree.name in LIST_UPDATES:
        if len(tree.args) != 2 or not isinstance(tree.args[0], Ref):
            raise ExpressionError(
                "'{}' update requires a list reference and a value".format(tree.name)
            )
        probe = tree.args[1] if tree.name == "remove_first" else None
        return Update(tree.args[0].name, tree, probe)
    raise ExpressionError("'{}' is not an update statement".format(text))


def references(tree) -> Tuple[str, ...]:
    """
    Names referenced by an expression, in reading order, without duplicates
    :param tree: expression AST or Update
    :return: tuple of names
    """
    result = []

    def _walk(node):
        if isinstance(node, Ref):
            if node.name not in result:
                result.append(node.name)
        elif isinstance(node, Call):
            for a in node.args:
                _walk(a)
        elif isinstance(node, BinOp):
            _walk(node.left)
            _walk(node.right)
        elif isinstance(node, Neg):
            _walk(node.operand)
        elif isinstance(node, Assign):
            _walk(node.expr)
        elif isinstance(node, Update):
            _walk(node.expr)

    _walk(tree)
    return tuple(result)


def _int(value, op: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise TypeMismatch("operator '{}' expects integers, got {!r}".format(op, value))
    return value


def _list(value, fn: str) -> tuple:
    if not isinstance(value, tuple):
        raise TypeMismatch("'{}' expects a list, got {!r}".format(fn, value))
    return value


def remove_first(items: tuple, value) -> tuple:
    if value not in items:
        return items
    idx = items.index(value)
    return items[:idx] + items[idx + 1:]


def evaluate(tree, resolve: Callable[[str], Any]):
    """
    Evaluate an expression
    :param tree: expression AST
    :param resolve: callable mapping a reference name to its value; raises ReferenceMissing
    :return: int, str, bool or tuple
    """
    if isinstance(tree, Num):
        return tree.value
    if isinstance(tree, Str):
        return tree.value
    if isinstance(tree, Ref):
        return resolve(tree.name)
    if isinstance(tree, Neg):
        return -_int(evaluate(tree.operand, resolve), "-")
    if isinstance(tree, Call):
        args = [evaluate(a, resolve) for a in tree.args]
        if tree.name == "len":
            if len(args) != 1:
                raise ExpressionError("'len' expects one argument")
            return len(_list(args[0], "len"))
        if len(args) != 2:
            raise ExpressionError("'{}' expects two arguments".format(tree.name))
        items = _list(args[0], tree.name)
        if tree.name == "append":
            return items + (args[1],)
        if tree.name == "remove_first":
            return remove_first(items, args[1])
        return args[1] in items

    if isinstance(tree, BinOp):
        left = evaluate(tree.left, resolve)
        right = evaluate(tree.right, resolve)
        op = tree.op
        if op == "==":
            return left == right
        if op == "!=":
            return left != right
        if op == "+":
            return _int(left, op) + _int(right, op)
        if op == "-":
            return _int(left, op) - _int(right, op)
        left = _int(left, op)
        right = _int(right, op)
        if op == ">":
            return left > right
        if op == "<":
            return left < right
        if op == ">=":
            return left >= right
        if op == "<=":
            return left <= right
    raise ExpressionError("cannot evaluate {!r}".format(tree))
