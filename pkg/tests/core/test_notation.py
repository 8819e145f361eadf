from dataclasses import replace

import pytest

from tmkit.core import (
    ActionKind,
    ActionNode,
    FlowArc,
    InvalidModel,
    Notation,
    StaticModel,
    Thimac,
    canonicalize,
    simplify,
    validate_static_model,
)
from tests.common import SIMPLIFIED_MODELS, load_bundle


def cross_flow_count(model: StaticModel) -> int:
    count = 0
    for arc in model.flows:
        src = model.node(arc.source)
        if src.owner != model.node(arc.target).owner and src.kind != ActionKind.TRANSFER:
            count += 1
    return count


def simple_pair() -> StaticModel:
    return StaticModel(
        thimacs=(Thimac("A", "A"), Thimac("B", "B")),
        nodes=(ActionNode("a", "A", ActionKind.CREATE), ActionNode("b", "B", ActionKind.PROCESS)),
        flows=(FlowArc("f1", "a", "b"),),
        notation=Notation.SIMPLIFIED,
    )


class TestCanonicalize:
    def test_chain_shape(self):
        model = canonicalize(simple_pair())
        assert model.notation == Notation.CANONICAL
        assert [n.id for n in model.nodes] == [
            "a",
            "b",
            "f1.release",
            "f1.transfer_out",
            "f1.transfer_in",
            "f1.receive",
        ]
        assert [(a.id, a.source, a.target) for a in model.flows] == [
            ("f1", "a", "f1.release"),
            ("f1.2", "f1.release", "f1.transfer_out"),
            ("f1.3", "f1.transfer_out", "f1.transfer_in"),
            ("f1.4", "f1.transfer_in", "f1.receive"),
            ("f1.5", "f1.receive", "b"),
        ]
        assert [n.owner for n in model.nodes[2:]] == ["A", "A", "B", "B"]
        assert validate_static_model(model) == []

    @pytest.mark.parametrize("name, added", [["flight.tm", 4], ["order.tm", 4], ["edp.tm", 8]])
    def test_corpus_node_count(self, name, added):
        static = load_bundle(name).static
        assert cross_flow_count(static) * 4 == added
        canonical = canonicalize(static)
        assert len(canonical.nodes) == len(static.nodes) + added
        assert len(canonical.flows) == len(static.flows) + added
        assert validate_static_model(canonical) == []

    @pytest.mark.parametrize("name", SIMPLIFIED_MODELS)
    def test_idempotent(self, name):
        once = canonicalize(load_bundle(name).static)
        assert canonicalize(once) == once

    def test_canonical_model_unchanged(self, cart_bundle):
        assert canonicalize(cart_bundle.static) == cart_bundle.static

    def test_id_collision(self):
        model = simple_pair()
        model = replace(model, nodes=model.nodes + (ActionNode("f1.release", "A", ActionKind.PROCESS),))
        with pytest.raises(InvalidModel):
            canonicalize(model)

    def test_invalid_model(self):
        model = replace(simple_pair(), flows=(FlowArc("f1", "a", "ghost"),))
        with pytest.raises(InvalidModel):
            canonicalize(model)


class TestSimplify:
    @pytest.mark.parametrize("name", SIMPLIFIED_MODELS)
    def test_round_trip(self, name):
        static = load_bundle(name).static
        assert simplify(canonicalize(static)) == static

    def test_round_trip_pair(self):
        assert simplify(canonicalize(simple_pair())) == simple_pair()

    def test_no_chain(self):
        model = StaticModel(
            thimacs=(Thimac("A", "A"),),
            nodes=(ActionNode("a", "A", ActionKind.CREATE), ActionNode("b", "A", ActionKind.PROCESS)),
            flows=(FlowArc("f1", "a", "b"),),
        )
        result = simplify(model)
        assert result.notation == Notation.SIMPLIFIED
        assert result.nodes == model.nodes
        assert result.flows == model.flows

    def test_cart_chains(self, cart_bundle):
        # the item and removal chains collapse; the cart chain ends in a receive stage and stays
        static = cart_bundle.static
        result = simplify(static)
        assert len(result.nodes) == len(static.nodes) - 8
        assert len(result.flows) == len(static.flows) - 8
        assert result.node("cart_arrive") is not None
        assert result.node("item_release") is None
        assert result.arc("f5").target == "ins_process"
        assert validate_static_model(result) == []

    def test_annotated_chain_kept(self):
        model = canonicalize(simple_pair())
        model = replace(
            model,
            nodes=tuple(replace(n, message="released") if n.id == "f1.release" else n for n in model.nodes),
        )
        result = simplify(model)
        assert result.nodes == model.nodes
        assert result.flows == model.flows
        assert result != simple_pair()

    def test_requires_canonical(self):
        with pytest.raises(InvalidModel):
            simplify(simple_pair())


def kind_pairs():
    return [[src, dst] for src in ActionKind for dst in ActionKind]


def cross_pair(src: ActionKind, dst: ActionKind) -> StaticModel:
    return StaticModel(
        thimacs=(Thimac("A", "A"), Thimac("B", "B")),
        nodes=(ActionNode("a", "A", src), ActionNode("b", "B", dst)),
        flows=(FlowArc("f1", "a", "b"),),
        notation=Notation.SIMPLIFIED,
    )


class TestKindPairs:
    @pytest.mark.parametrize("src, dst", kind_pairs())
    def test_accepted_arcs_expand_to_legal_chains(self, src, dst):
        model = cross_pair(src, dst)
        if any(d.is_error for d in validate_static_model(model)):
            with pytest.raises(InvalidModel):
                canonicalize(model)
            return
        canonical = canonicalize(model)
        assert validate_static_model(canonical) == []
        assert canonicalize(canonical) == canonical
        assert simplify(canonical) == model

    @pytest.mark.parametrize("src, dst", kind_pairs())
    def test_elided_pairs(self, src, dst):
        accepted = not any(d.is_error for d in validate_static_model(cross_pair(src, dst)))
        elided = src in (ActionKind.CREATE, ActionKind.PROCESS, ActionKind.RECEIVE) and dst in (
            ActionKind.PROCESS,
            ActionKind.RELEASE,
        )
        transfers = src == dst == ActionKind.TRANSFER
        assert accepted is (elided or transfers)
