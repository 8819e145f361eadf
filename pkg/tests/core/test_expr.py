import pytest

from tmkit.core.expr import (
    ExpressionError,
    ReferenceMissing,
    TypeMismatch,
    evaluate,
    parse_guard,
    parse_update,
    references,
    split_updates,
)

VALUES = {
    "x": 2,
    "y": 3,
    "name": "Michael",
    "Passengers": ("Ann", "Bob"),
    "Airplane.NoSeats": 300,
}


def resolve(name):
    if name not in VALUES:
        raise ReferenceMissing(name)
    return VALUES[name]


def guard_cases():
    return [
        ["y > Airplane.NoSeats", False],
        ["y <= Airplane.NoSeats", True],
        ["x + 1 == y", True],
        ["x - y", -1],
        ["-x + 5", 3],
        ["(x + y) - 1", 4],
        ["name == 'Michael'", True],
        ["name != 'Michael'", False],
        ["len(Passengers)", 2],
        ["contains(Passengers, 'Bob')", True],
        ["contains(Passengers, name)", False],
        ["append(Passengers, name)", ("Ann", "Bob", "Michael")],
        ["remove_first(Passengers, 'Ann')", ("Bob",)],
        ["remove_first(Passengers, 'Zed')", ("Ann", "Bob")],
    ]


class TestExpressions:
    @pytest.mark.parametrize("text, expected", guard_cases())
    def test_evaluate(self, text, expected):
        assert evaluate(parse_guard(text), resolve) == expected

    def test_references(self):
        assert references(parse_guard("x + y > x")) == ("x", "y")
        assert references(parse_update("append(Passengers, Name)")) == ("Passengers", "Name")

    @pytest.mark.parametrize("text", ["x >", "x := 1", "1 +", "'open", "x y"])
    def test_malformed_guard(self, text):
        with pytest.raises(ExpressionError):
            parse_guard(text)

    @pytest.mark.parametrize("text", ["foo(x, 1) > 0", "len(bar(x))"])
    def test_unknown_function_guard(self, text):
        with pytest.raises(ExpressionError) as e:
            parse_guard(text)
        assert "unknown function" in str(e.value)

    @pytest.mark.parametrize("text", ["x := foo(x, 1)", "frobnicate(Passengers, x)"])
    def test_unknown_function_update(self, text):
        with pytest.raises(ExpressionError) as e:
            parse_update(text)
        assert "unknown function" in str(e.value)

    def test_type_errors(self):
        with pytest.raises(TypeMismatch):
            evaluate(parse_guard("name + 1"), resolve)
        with pytest.raises(TypeMismatch):
            evaluate(parse_guard("name > 1"), resolve)
        with pytest.raises(TypeMismatch):
            evaluate(parse_guard("len(x)"), resolve)

    def test_missing_reference(self):
        with pytest.raises(ReferenceMissing) as e:
            evaluate(parse_guard("nope > 1"), resolve)
        assert e.value.name == "nope"


class TestUpdates:
    def test_split(self):
        assert split_updates("x := y; append(Passengers, Name);") == ["x := y", "append(Passengers, Name)"]

    def test_assign(self):
        update = parse_update("y := x + 1")
        assert update.target == "y"
        assert update.probe is None
        assert evaluate(update.expr, resolve) == 3

    def test_list_updates(self):
        update = parse_update("append(Passengers, name)")
        assert update.target == "Passengers"
        assert update.probe is None
        assert evaluate(update.expr, resolve) == ("Ann", "Bob", "Michael")

        update = parse_update("remove_first(Passengers, 'Bob')")
        assert update.target == "Passengers"
        assert evaluate(update.probe, resolve) == "Bob"
        assert evaluate(update.expr, resolve) == ("Ann",)

    @pytest.mark.parametrize("text", ["x + 1", "len(Passengers)", "append('a', x)", "append(Passengers)"])
    def test_not_an_update(self, text):
        with pytest.raises(ExpressionError):
            parse_update(text)
