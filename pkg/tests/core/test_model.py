import pytest

from tmkit.core import ActionKind, ModelError


class TestActionKind:
    @pytest.mark.parametrize(
        "name, expected",
        [
            ["create", ActionKind.CREATE],
            ["Process", ActionKind.PROCESS],
            ["RELEASE", ActionKind.RELEASE],
            ["Transfer", ActionKind.TRANSFER],
            ["receive", ActionKind.RECEIVE],
        ],
    )
    def test_parse(self, name, expected):
        assert ActionKind.parse(name) == expected

    def test_parse_invalid(self):
        with pytest.raises(ModelError):
            ActionKind.parse("destroy")


class TestStaticModel:
    def test_lookup(self, flight_bundle):
        static = flight_bundle.static
        assert static.thimac("Seat").parent == "Flight"
        assert static.node("add").owner == "Seat"
        assert static.node("nope") is None
        assert static.arc("f1").target == "name_in"
        assert static.arc("t2").guard == "y > Airplane.NoSeats"

    def test_ancestors(self, flight_bundle):
        static = flight_bundle.static
        assert static.ancestors("Seat") == ("Seat", "Flight")
        assert static.root("Counter") == "Flight"
        assert static.root("Person") == "Person"

    def test_arcs(self, flight_bundle):
        static = flight_bundle.static
        assert [a.id for a in static.outgoing_flows("person_create")] == ["f1"]
        assert [a.id for a in static.outgoing_triggers("count")] == ["t2", "t3"]
        assert [a.id for a in static.incoming("count")] == ["t1"]
        assert static.induced_arcs(["person_create", "name_in"]) == frozenset(["f1"])
        assert static.same_machine("count", "add") is False

    def test_variables(self, flight_bundle):
        flight = flight_bundle.static.thimac("Flight")
        assert flight.variable("Passengers").initial == ()
        assert flight.variable("x").initial == 0
        assert flight.variable("z") is None


class TestBundle:
    def test_lookup(self, edp_bundle):
        assert edp_bundle.event("E3").params == ("x", "y")
        assert edp_bundle.event("E3").source_of("y") == "Dept"
        assert edp_bundle.event("E99") is None
        assert edp_bundle.composite("E2-3-5-6-7").anchor == "E7"
        assert [c.id for c in edp_bundle.constraints] == ["C1", "C3", "C5", "C6", "C7"]

    def test_behavior(self, edp_bundle):
        behavior = edp_bundle.behavior
        assert behavior.events == frozenset(["E{}".format(i) for i in range(8)])
        assert behavior.has_edge("E0", "E1")
        assert not behavior.has_edge("E1", "E1")
        assert behavior.edge("E2", "E7").repeatable
