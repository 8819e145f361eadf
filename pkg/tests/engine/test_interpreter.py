import itertools

import pytest

from tmkit.dsl import TriggerEvent
from tmkit.engine import (
    AttributeOnNonRecord,
    EvaluationError,
    Firing,
    FiringLimit,
    GuardTypeError,
    Interpreter,
    Message,
    Occurrence,
    StepRecord,
    StorageMiss,
    UnknownElement,
    UnknownInstance,
    detect_occurrences,
    exec_statement,
    run_script,
    to_text,
)
from tests.common import bundle_from, load_script, run_corpus, script

FLIGHT_SETUP = "Create Airplane=A1.NoSeats={seats}\nCreate Flight=F1.FlightNo=100\nCreate Person=P\n"
BOOKING = "Create.Person=P.Name={name} -> Flight=F1\n"

ORDER_SETUP = "Create Customer=c1.Customer=c1\nCreate Customer=c2.Customer=c2\n"
ORDER_ACTIONS = {
    "c1": "Create.Customer=c1 -> Order.Receive\n",
    "c2": "Create.Customer=c2 -> Order.Receive\n",
    "deliver": "Trigger Event E4\n",
}

LOOP_MODEL = """
thimac A {
    var x = 0
    stage create a1
}
thimac B {
    stage process b1
}
trigger a1 -> b1 when "{guard}"
"""


def flight_run(bundle, seats, names):
    text = FLIGHT_SETUP.format(seats=seats) + "".join(BOOKING.format(name=n) for n in names)
    return run_script(bundle, script(text))


def events_at(trace, time):
    return [o.event for o in trace.occurrences if o.time == time]


class TestFlight:
    def test_michael(self, flight_bundle):
        result = run_script(flight_bundle, load_script("flight_michael.tms"))
        assert result.success
        trace = result.trace
        assert trace.occurrences == [
            Occurrence("E1", 6, (("x", "Michael"),)),
            Occurrence("E2", 6, (("x", "Michael"), ("f", 3825))),
            Occurrence("E3", 6, (("x", "Michael"),)),
        ]
        assert trace.messages == [Message(8, "OK")]
        state = result.state
        assert state.step == 9
        assert state.variable("Flight", "Passengers") == ("Michael",)
        assert state.variable("Flight", "x") == 1
        assert state.variable("Airplane", "NoSeats") == 300

    def test_vacuous_trigger(self, flight_bundle):
        # E2 starts at a node reached only through a trigger
        result = run_script(flight_bundle, load_script("flight_michael.tms"))
        assert events_at(result.trace, 7) == []

    def test_full_flight(self, flight_bundle):
        result = flight_run(flight_bundle, 2, ["Ann", "Bob", "Cid"])
        assert result.success
        trace = result.trace
        assert events_at(trace, 4) == ["E1", "E2", "E3"]
        assert events_at(trace, 5) == ["E1", "E2", "E3"]
        assert events_at(trace, 6) == ["E1", "E2", "E4"]
        assert trace.messages == [Message(6, "rejection: no seat available")]
        assert result.state.variable("Flight", "Passengers") == ("Ann", "Bob")
        assert result.state.variable("Flight", "x") == 2
        assert result.state.variable("Flight", "y") == 3

    @pytest.mark.parametrize(
        "names",
        [list(p) for n in range(1, 5) for p in itertools.product(["Ann", "Bob"], repeat=n)],
    )
    def test_capacity_holds(self, flight_bundle, names):
        result = flight_run(flight_bundle, 1, names)
        assert result.success
        passengers = result.state.variable("Flight", "Passengers")
        assert len(passengers) <= 1
        assert result.state.variable("Flight", "x") == len(passengers)

    @pytest.mark.parametrize(
        "names",
        [list(p) for n in range(1, 4) for p in itertools.product(["Ann", "Bob"], repeat=n)],
    )
    def test_seat_and_rejection_exclusive(self, flight_bundle, names):
        for seats in (1, 300):
            trace = flight_run(flight_bundle, seats, names).trace
            for step in range(1, trace.occurrences[-1].time + 1):
                events = events_at(trace, step)
                assert not ("E3" in events and "E4" in events)


class TestOrder:
    def test_single(self):
        result = run_corpus("order.tm", "order_single.tms")
        assert result.success
        assert result.trace.occurrences == [
            Occurrence("E1", 2, (("c", "c1"),)),
            Occurrence("E2", 2, (("c", "c1"),)),
        ]
        assert result.trace.messages == [Message(3, "order accepted")]
        assert result.state.variable("Order", "Undelivered") == ("c1",)
        assert result.state.variable("Customer", "orders") == 1
        assert len(result.state.storage("Order")) == 1

    def test_double(self):
        result = run_corpus("order.tm", "order_double.tms")
        assert result.success
        assert events_at(result.trace, 3) == ["E1", "E3"]
        assert result.trace.messages == [Message(3, "error: customer already placed an order")]
        assert result.state.variable("Order", "Undelivered") == ("c1",)

    def test_delivery(self):
        result = run_corpus("order.tm", "order_delivery.tms")
        assert result.success
        trace = result.trace
        assert events_at(trace, 4) == ["E4"]
        assert events_at(trace, 5) == ["E1", "E2"]
        assert [m.text for m in trace.messages] == [
            "error: customer already placed an order",
            "order accepted",
        ]
        assert result.state.variable("Order", "Undelivered") == ("c1",)
        # delivering does not empty the storage
        assert len(result.state.storage("Order")) == 2

    def test_deliver_without_context(self, order_bundle):
        result = run_script(order_bundle, script("Trigger Event E4\n"))
        assert isinstance(result.error, EvaluationError)
        assert result.failed_at == 0

    def test_deliver_missing_order(self, order_bundle):
        result = run_script(order_bundle, script(ORDER_SETUP + "Trigger Event E4\n"))
        assert result.success
        assert result.trace.messages == [Message(3, "not found: c2")]

    @pytest.mark.parametrize(
        "actions",
        [list(p) for n in range(1, 5) for p in itertools.product(sorted(ORDER_ACTIONS), repeat=n)],
    )
    def test_one_undelivered_order(self, order_bundle, actions):
        statements = script(ORDER_SETUP + "".join(ORDER_ACTIONS[a] for a in actions)).statements
        interp = Interpreter(order_bundle)
        state = interp.init_state()
        for stmt in statements:
            state, _, _ = interp.exec_statement(state, stmt)
            pending = state.variable("Order", "Undelivered")
            assert len(set(pending)) == len(pending)
            assert state.variable("Customer", "orders") == len(pending)


class TestCart:
    def test_shopping(self):
        result = run_corpus("cart.tm", "cart_shopping.tms")
        assert result.success
        trace = result.trace
        assert [(o.event, o.time) for o in trace.occurrences] == [
            ("E1", 2),
            ("E2", 4),
            ("E3", 6),
            ("E3", 8),
            ("E4", 10),
            ("E4", 12),
        ]
        assert trace.occurrences[1].binding == (("c", "c1"), ("s", "cart1"))
        assert [o.value("i") for o in trace.occurrences[2:]] == ["book", "pen", "book", "cup"]
        assert trace.messages == [Message(11, "removed"), Message(12, "not found: cup")]
        assert result.state.variable("ShoppingCart", "Items") == ("pen",)

    def test_things_are_conserved(self):
        state = run_corpus("cart.tm", "cart_shopping.tms").state
        assert state.things == 6
        for n in range(1, state.things + 1):
            assert len(state.locate("#{}".format(n))) == 1
        assert len(state.storage("Customer")) == 2
        assert state.storage("ShoppingCart") == []


class TestEdp:
    def test_conforming(self):
        result = run_corpus("edp.tm", "edp_conforming.tms")
        assert result.success
        assert to_text(result.trace) == (
            "t=2 E0(d=D1)\n"
            "t=3 E1(d=D1)\n"
            "t=6 E5(z=P1)\n"
            "t=6 E6(z=P1,y=D1)\n"
            "t=7 E2(x=alice)\n"
            "t=7 E3(x=alice,y=D1)\n"
            "t=7 E4(y=D1)\n"
            "t=7 E5(z=P1)\n"
            "t=7 E6(z=P1,y=D1)\n"
            "t=7 E7(x=alice,z=P1)\n"
            "t=9 E2(x=bob)\n"
            "t=9 E3(x=bob,y=D1)\n"
            "t=9 E4(y=D1)\n"
            "t=10 end:E2-3-5-6-7(x=alice,y=D1,z=P1)\n"
        )
        assert result.state.variable("Department", "Employees") == 2

    def test_partial_region(self):
        # bob reaches the department but no project, so E7 stays undetected
        trace = run_corpus("edp.tm", "edp_conforming.tms").trace
        assert "E7" not in events_at(trace, 9)


class TestStepDiscipline:
    def test_step_per_statement(self, flight_bundle):
        statements = load_script("flight_michael.tms").statements
        interp = Interpreter(flight_bundle)
        state = interp.init_state()
        for idx, stmt in enumerate(statements):
            before = state
            state, occurrences, messages = interp.exec_statement(state, stmt)
            assert state.step == idx + 1
            assert before.step == idx
            assert all(o.time == state.step for o in occurrences)
            assert all(m.time == state.step for m in messages)

    def test_state_untouched(self, flight_bundle):
        statements = load_script("flight_michael.tms").statements
        state = Interpreter(flight_bundle).init_state()
        for stmt in statements[:6]:
            state, _, _ = exec_statement(flight_bundle, state, stmt)
        snapshot = state.copy()
        exec_statement(flight_bundle, state, statements[6])
        assert state == snapshot

    @pytest.mark.parametrize(
        "model, name",
        [
            ["flight.tm", "flight_michael.tms"],
            ["cart.tm", "cart_shopping.tms"],
            ["order.tm", "order_delivery.tms"],
            ["edp.tm", "edp_conforming.tms"],
        ],
    )
    def test_deterministic(self, model, name):
        first = run_corpus(model, name)
        second = run_corpus(model, name)
        assert first.trace == second.trace
        assert first.state == second.state

    def test_conditional_print_uses_last_events(self, flight_bundle):
        text = FLIGHT_SETUP.format(seats=5) + BOOKING.format(name="Ann") + "Create Person=Q\nIf E3 print seated\n"
        result = run_script(flight_bundle, script(text))
        assert result.trace.messages == [Message(6, "seated")]


class TestEngineErrors:
    def run(self, bundle, text, **kwargs):
        result = run_script(bundle, script(text), **kwargs)
        assert not result.success
        return result

    def test_unknown_elements(self, flight_bundle, edp_bundle):
        assert isinstance(self.run(flight_bundle, "Create Nobody=n\n").error, UnknownElement)
        assert isinstance(self.run(flight_bundle, "Trigger Event E9\n").error, UnknownElement)
        assert isinstance(self.run(edp_bundle, "End E8-9(x=a)\n").error, UnknownElement)

    def test_unknown_instance(self, flight_bundle):
        assert isinstance(self.run(flight_bundle, "Create.Person=P\n").error, UnknownInstance)
        assert isinstance(self.run(flight_bundle, "Create Person P.Name=x\n").error, UnknownInstance)

    def test_storage_miss(self, flight_bundle):
        result = self.run(flight_bundle, "Create Person=P\nCreate.Person=P -> Flight=F9\n")
        assert isinstance(result.error, StorageMiss)
        assert result.failed_at == 1

        text = "Create Flight=F1.FlightNo=1\nCreate Person=P\nCreate.Person=P -> Flight=F1.FlightNo=2\n"
        assert isinstance(self.run(flight_bundle, text).error, StorageMiss)

    def test_failure_keeps_trace(self, flight_bundle):
        text = FLIGHT_SETUP.format(seats=5) + BOOKING.format(name="Ann") + "Trigger Event E9\n"
        result = self.run(flight_bundle, text)
        assert result.failed_at == 4
        assert events_at(result.trace, 4) == ["E1", "E2", "E3"]
        assert result.state.step == 4

    def test_guard_type(self):
        bundle = bundle_from(LOOP_MODEL.replace("{guard}", "A.x + 1"))
        result = self.run(bundle, "Create A=a\nCreate.A=a\n")
        assert isinstance(result.error, GuardTypeError)

    def test_firing_limit(self):
        bundle = bundle_from(LOOP_MODEL.replace("{guard}", "A.x == 0") + "trigger b1 -> a1\n")
        result = self.run(bundle, "Create A=a\nCreate.A=a\n", max_firings=50)
        assert isinstance(result.error, FiringLimit)
        # the default limit is still reported as a firing limit
        assert isinstance(self.run(bundle, "Create A=a\nCreate.A=a\n").error, FiringLimit)

    def test_non_record_instance(self, flight_bundle):
        interp = Interpreter(flight_bundle)
        state, _, _ = interp.exec_statement(interp.init_state(), script("Create Person=P\n").statements[0])
        state.instances["Person"]["P"].value = "scalar"
        with pytest.raises(AttributeOnNonRecord):
            interp.exec_statement(state, script("Create.Person=P\n").statements[0])

    def test_direct_statement(self, flight_bundle):
        interp = Interpreter(flight_bundle)
        state, occurrences, messages = interp.exec_statement(interp.init_state(), TriggerEvent("E2"))
        assert state.step == 1
        assert occurrences == []
        assert messages == []


def firing(node: str, owner: str, record: dict) -> Firing:
    return Firing(node, owner, record, {})


class TestDetectOccurrences:
    def test_region_with_target(self, flight_bundle):
        record = StepRecord(5, [firing("count", "Counter", {"Name": "Ann"})], {"Flight": {"FlightNo": 3825}})
        assert detect_occurrences(flight_bundle, record) == [Occurrence("E2", 5, (("x", "Ann"), ("f", 3825)))]

    def test_whole_region(self, flight_bundle):
        record = StepRecord(
            2,
            [
                firing("person_create", "Person", {"Name": "Ann"}),
                firing("name_in", "Flight", {"Name": "Ann"}),
            ],
        )
        assert detect_occurrences(flight_bundle, record) == [Occurrence("E1", 2, (("x", "Ann"),))]

    def test_partial_region(self, flight_bundle):
        record = StepRecord(2, [firing("name_in", "Flight", {"Name": "Ann"})])
        assert detect_occurrences(flight_bundle, record) == []

    def test_disagreeing_attributes(self, flight_bundle):
        record = StepRecord(
            2,
            [
                firing("person_create", "Person", {"Name": "Ann"}),
                firing("name_in", "Flight", {"Name": "Bob"}),
            ],
        )
        assert detect_occurrences(flight_bundle, record) == []

    def test_unresolved_parameter(self, flight_bundle):
        record = StepRecord(5, [firing("count", "Counter", {"Name": "Ann"})])
        assert detect_occurrences(flight_bundle, record) == []
