import copy
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from tmkit.core.model import Bundle


class EngineError(Exception):
    pass


class UnknownElement(EngineError):
    pass


class UnknownInstance(EngineError):
    pass


class AttributeOnNonRecord(EngineError):
    pass


class GuardTypeError(EngineError):
    pass


class StorageMiss(EngineError):
    pass


class EvaluationError(EngineError):
    pass


class FiringLimit(EngineError):
    pass


@dataclass
class Thing:
    id: str
    # scalar, record (dict) or list
    value: Any = field(default_factory=dict)
    # (thimac id, node id) where the thing rests
    at: Optional[Tuple[str, str]] = None

    @property
    def is_record(self) -> bool:
        return isinstance(self.value, dict)


@dataclass
class State:
    """
    Mutable interpreter state

    instances holds the things created by script statements, per thimac and instance id;
    storages holds the things deposited by flows; resting holds flowed things that stopped
    outside any storage
    """

    instances: Dict[str, Dict[str, Thing]] = field(default_factory=dict)
    storages: Dict[str, List[Thing]] = field(default_factory=dict)
    variables: Dict[str, Dict[str, Any]] = field(default_factory=dict)
    resting: List[Thing] = field(default_factory=list)
    step: int = 0
    things: int = 0
    # record and target instance records of the last statement
    context: Dict[str, Any] = field(default_factory=dict)
    context_targets: Dict[str, Dict[str, Any]] = field(default_factory=dict)
    # events detected at the most recent step that recorded occurrences
    last_events: Tuple[str, ...] = ()

    def copy(self) -> "State":
        return copy.deepcopy(self)

    def variable(self, thimac_id: str, name: str):
        return self.variables[thimac_id][name]

    def instance(self, thimac_id: str, instance_id: str) -> Optional[Thing]:
        return self.instances.get(thimac_id, {}).get(instance_id, None)

    def storage(self, thimac_id: str) -> List[Thing]:
        return self.storages.get(thimac_id, [])

    def new_thing_id(self) -> str:
        self.things += 1
        return "#{}".format(self.things)

    def locate(self, thing_id: str) -> List[str]:
        """
        All places holding a thing with the given id
        :param thing_id:
        :return: list of place names ("storage:<thimac>", "resting")
        """
        places = []
        for thimac_id, things in self.storages.items():
            places.extend("storage:" + thimac_id for t in things if t.id == thing_id)
        places.extend("resting" for t in self.resting if t.id == thing_id)
        return places


def init_state(bundle: Bundle) -> State:
    """
    Fresh state for a bundle: empty storages, every variable at its initial value, step 0
    :param bundle: Bundle
    :return: State
    """
    state = State()
    for t in bundle.static.thimacs:
        state.instances[t.id] = {}
        if t.has_storage:
            state.storages[t.id] = []
        state.variables[t.id] = {v.name: v.initial for v in t.variables}
    return state
