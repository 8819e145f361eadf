import random

import pytest

from tmkit.dsl import (
    BehaviorDecl,
    CompositeDecl,
    ConstraintDecl,
    EventDecl,
    FlowDecl,
    NotationDecl,
    ParamDecl,
    StageDecl,
    ThimacDecl,
    TriggerDecl,
    VarDecl,
    parse_model,
    parse_model_file,
    pretty_print,
)
from tests.common import CORPUS_MODELS, corpus_path

SMALL_MODEL = """notation simplified
/* a comment { with braces } */
thimac Flight {
    var x = 0
    var Passengers = []
    stage process name_in label "Name"
}
thimac Seat parent Flight {
    stage create add updates "x := y; append(Passengers, Name)"
}
flow f9: name_in -> add
trigger name_in -> add when "x > 0"
event E1(x: Name, f) { name_in add }
composite E1-2 = E1, E2 sharing (x) anchor E2
behavior {
    E1 -> E2 norepeat
    E2 -> E1
}
constraint C1: binding E1-2
constraint C2: succession E1, E2
constraint C3: atmostonce E1-2 key (x)
"""


def read(name: str) -> str:
    with open(corpus_path(name), "r", encoding="utf-8") as f:
        return f.read()


def errors(text: str):
    result = parse_model(text)
    assert result.value is None
    assert not result.success
    return result.diagnostics


class TestParseModel:
    def test_declarations(self):
        result = parse_model(SMALL_MODEL)
        assert result.success
        ast = result.value
        assert ast.of_type(NotationDecl) == (NotationDecl("simplified"),)

        flight, seat = ast.of_type(ThimacDecl)
        assert flight.name == "Flight"
        assert flight.parent is None
        assert flight.storage is False
        assert flight.variables == (VarDecl("x", 0), VarDecl("Passengers", ()))
        assert flight.stages == (StageDecl("process", "name_in", label="Name"),)
        assert seat.parent == "Flight"
        assert seat.stages[0].updates == ("x := y", "append(Passengers, Name)")

        assert ast.of_type(FlowDecl) == (FlowDecl("f9", "name_in", "add"),)
        assert ast.of_type(TriggerDecl) == (TriggerDecl(None, "name_in", "add", "x > 0"),)
        assert ast.of_type(EventDecl) == (
            EventDecl("E1", (ParamDecl("x", "Name"), ParamDecl("f")), ("name_in", "add")),
        )
        assert ast.of_type(CompositeDecl) == (CompositeDecl("E1-2", ("E1", "E2"), ("x",), "E2"),)
        behavior = ast.of_type(BehaviorDecl)[0]
        assert [(e.source, e.target, e.norepeat) for e in behavior.edges] == [
            ("E1", "E2", True),
            ("E2", "E1", False),
        ]
        assert ast.of_type(ConstraintDecl) == (
            ConstraintDecl("C1", "binding", ("E1-2",)),
            ConstraintDecl("C2", "succession", ("E1", "E2")),
            ConstraintDecl("C3", "atmostonce", ("E1-2",), ("x",)),
        )

    def test_positions(self):
        ast = parse_model(SMALL_MODEL).value
        flight, seat = ast.of_type(ThimacDecl)
        assert (flight.line, flight.column) == (3, 1)
        assert (flight.stages[0].line, flight.stages[0].column) == (6, 5)
        assert seat.line == 8
        assert ast.of_type(FlowDecl)[0].line == 11

    def test_empty(self):
        result = parse_model("")
        assert result.success
        assert result.value.declarations == ()
        assert parse_model("/* only a comment */\n\n").success

    def test_arrow_variants(self):
        result = parse_model("flow a→b\ntrigger x: c->d\n")
        assert result.success
        assert result.value.declarations == (FlowDecl(None, "a", "b"), TriggerDecl("x", "c", "d"))

    def test_escaped_strings(self):
        result = parse_model('thimac A {\n stage create a message "say \\"hi\\" {"\n}\n')
        assert result.success
        assert result.value.declarations[0].stages[0].message == 'say "hi" {'

    @pytest.mark.parametrize("name", CORPUS_MODELS)
    def test_corpus(self, name):
        result = parse_model_file(corpus_path(name))
        assert result.success, [str(d) for d in result.diagnostics]
        assert len(result.value.of_type(ThimacDecl)) > 0


class TestSyntaxErrors:
    def test_unexpected_declaration(self):
        diags = errors("notation simplified\nbogus line\nthimac A {\n}\n")
        assert len(diags) == 1
        assert diags[0].code == "SyntaxError"
        assert (diags[0].line, diags[0].column) == (2, 1)
        assert "bogus" in diags[0].message

    def test_error_position(self):
        diags = errors("thimac A {\n}\nflow a b\n")
        assert len(diags) == 1
        assert (diags[0].line, diags[0].column) == (3, 8)

    def test_unterminated_block(self):
        diags = errors("notation canonical\nthimac A {\n    stage create a\n")
        assert len(diags) == 1
        assert diags[0].message == "unterminated block opened at 2:10"
        assert (diags[0].line, diags[0].column) == (4, 1)

    def test_missing_closing_brace(self):
        diags = errors("thimac A {\n    stage create a\n\nthimac B {\n    stage process b\n}\n")
        assert [(d.line, d.message) for d in diags] == [(3, "unterminated block opened at 1:10")]

    def test_bare_opener(self):
        diags = errors("thimac A {\n")
        assert [(d.line, d.column, d.message) for d in diags] == [(1, 10, "unterminated block opened at 1:10")]

    def test_single_line_block_unterminated(self):
        diags = errors("event E1(x) { a\nflow a -> b\n")
        assert [(d.line, d.column) for d in diags] == [(1, 13)]

    @pytest.mark.parametrize(
        "body, line",
        [
            ["    stage\n    stage create a\n    stage process b\n", 2],
            ["    storage\n    stage create a =\n    stage process b\n", 3],
            ["    var x\n    stage create a\n", 2],
            ["    stage create a\n    stage process b\n    } ->\n", 4],
        ],
    )
    def test_item_error_on_its_own_line(self, body, line):
        diags = errors("thimac A {\n" + body + "}\n")
        assert diags[0].line == line

    def test_broken_header(self):
        diags = errors("thimac A B {\n    stage create a\n}\n")
        assert [(d.line, d.column) for d in diags] == [(1, 10)]

    def test_behavior_edge(self):
        diags = errors("behavior {\n    E1 -> E2\n    E2 ->\n    E2 -> E1\n}\n")
        assert [d.line for d in diags] == [3]

    def test_unterminated_comment(self):
        diags = errors("thimac A {\n}\n  /* open\nthimac B {}\n")
        assert len(diags) == 1
        assert diags[0].message == "unterminated comment"
        assert (diags[0].line, diags[0].column) == (3, 3)

    def test_recovers_between_declarations(self):
        text = "flow a b\nthimac A {\n stage create a\n}\ntrigger -> c\nflow a -> b\n"
        diags = errors(text)
        assert [d.line for d in diags] == [1, 5]

    def test_corrupted_corpus(self):
        # dropping, garbling or appending a token reports an error on the corrupted line
        rnd = random.Random(7)
        for name in CORPUS_MODELS:
            lines = read(name).split("\n")
            candidates = [
                i
                for i, line in enumerate(lines)
                if line.strip() != "" and not line.strip().startswith(("/*", "*"))
            ]
            for _ in range(40):
                idx = rnd.choice(candidates)
                tokens = lines[idx].split()
                pick = rnd.randrange(len(tokens))
                choice = rnd.random()
                if choice < 0.4:
                    del tokens[pick]
                elif choice < 0.7:
                    tokens[pick] = "="
                else:
                    tokens.append("->")
                mutated = list(lines)
                mutated[idx] = " ".join(tokens)
                result = parse_model("\n".join(mutated))
                if result.success:
                    continue
                for d in result.diagnostics:
                    assert d.code == "SyntaxError"
                    assert 1 <= d.line <= len(mutated)
                assert idx + 1 in [d.line for d in result.diagnostics], (name, mutated[idx])


class TestPrettyPrint:
    def test_round_trip(self):
        ast = parse_model(SMALL_MODEL).value
        text = pretty_print(ast)
        again = parse_model(text)
        assert again.success, [str(d) for d in again.diagnostics]
        assert again.value == ast
        assert pretty_print(again.value) == text

    @pytest.mark.parametrize("name", CORPUS_MODELS)
    def test_corpus_round_trip(self, name):
        ast = parse_model(read(name)).value
        assert parse_model(pretty_print(ast)).value == ast

    def test_empty(self):
        assert pretty_print(parse_model("").value) == ""
