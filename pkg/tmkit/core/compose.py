import re
from typing import List, Optional

from tmkit.core.model import (
    Bundle,
    CompositeEvent,
    ModelError,
    UnknownEvent,
    UnsharedVariable,
)

_PREFIX = re.compile(r"^[^0-9]*")


def composite_id(members: List[str]) -> str:
    """
    Build a composite event id from its member ids
    Later members drop the alphabetic prefix they share with the first one: [E2, E3, E5] -> "E2-3-5"
    :param members: member event ids
    :return: str
    """
    if len(members) == 0:
        return ""
    prefix = _PREFIX.match(members[0]).group(0)
    parts = [members[0]]
    for m in members[1:]:
        if prefix != "" and m.startswith(prefix) and len(m) > len(prefix):
            parts.append(m[len(prefix):])
        else:
            parts.append(m)
    return "-".join(parts)


def compose(
    bundle: Bundle, members: List[str], shared: List[str], anchor: Optional[str] = None
) -> CompositeEvent:
    """
    Bind several events together into a high-level event

    compose only builds and checks the composite; the bundle is immutable and is not changed.
    Pass the result to bundle.register(), or call add_composite() to do both in one step
    :param bundle: Bundle holding the member events
    :param members: ordered member event ids (at least 2)
    :param shared: binding variables that must agree across members
    :param anchor: member the binding check starts from; defaults to the first member
    :return: CompositeEvent
    """
    members = list(members)
    if len(members) < 2:
        raise ModelError("a composite event needs at least 2 members")

    params = set()
    for m in members:
        evt = bundle.event(m)
        if evt is None:
            raise UnknownEvent("unknown event '{}'".format(m))
        params.update(evt.params)

    for var in shared:
        if var not in params:
            raise UnsharedVariable(
                "variable '{}' is not a parameter of any of {}".format(var, ", ".join(members))
            )

    if anchor is not None and anchor not in members:
        raise UnknownEvent("anchor '{}' is not a member of the composite".format(anchor))

    return CompositeEvent(composite_id(members), tuple(members), tuple(shared), anchor)


def add_composite(
    bundle: Bundle, members: List[str], shared: List[str], anchor: Optional[str] = None
) -> Bundle:
    """
    Compose a high-level event and register it
    :return: new Bundle holding the composite
    """
    return bundle.register(compose(bundle, members, shared, anchor))
