"""Application topologies: nested sequencers, missions and schedulable objects."""
from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from importlib import resources
from typing import Iterator, Union

MAX_STEPS = 3
HANDLER_KINDS = ("periodic", "aperiodic", "oneShot")
# words the generated models use as atoms or binders
RESERVED_IDS = frozenset({
    "mission", "nullMissionId", "d0", "d1", "TRUE", "FALSE", "BOOL",
    "nextM", "pendingQ", "activeQ", "contR", "item", "sched",
    "if", "fi", "Skip", "Stop", "and", "or", "not",
})
_ID_RE = re.compile(r"[A-Za-z][A-Za-z0-9]*\Z")
BUILTINS = ("two-thread-buffer", "shuttle", "railway", "nested-pair")


class TopologyError(ValueError):
    def __init__(self, message: str, node: str | None = None):
        super().__init__(message)
        self.node = node


class VariantMismatch(TopologyError):
    pass


@dataclass(frozen=True)
class Request:
    """A termination request; ``target`` is ``"mission"`` or a sequencer id.

    ``escalate`` names the sequencer a mission-local request is ultimately
    meant to stop (used by the proposed protocol's one-tier-at-a-time
    propagation).
    """

    target: str = "mission"
    escalate: str | None = None


@dataclass(frozen=True)
class WorkLoop:
    steps: int = 1
    checks: bool = False


@dataclass(frozen=True)
class Terminator:
    request: Request = Request()
    steps: int = 0


@dataclass(frozen=True)
class Producer:
    buffer: str
    items: int = 2
    request: Request | None = None


@dataclass(frozen=True)
class Consumer:
    buffer: str


Behaviour = Union[WorkLoop, Terminator, Producer, Consumer]


@dataclass(frozen=True)
class Thread:
    id: str
    behaviour: Behaviour


@dataclass(frozen=True)
class Handler:
    id: str
    kind: str
    behaviour: Behaviour


@dataclass(frozen=True)
class Mission:
    id: str
    schedulables: tuple = ()
    interrupt: bool = False


@dataclass(frozen=True)
class Sequencer:
    id: str
    missions: tuple = ()


@dataclass(frozen=True)
class NestedSequencer:
    sequencer: Sequencer

    @property
    def id(self) -> str:
        return self.sequencer.id


Schedulable = Union[Thread, Handler, NestedSequencer]


@dataclass(frozen=True)
class Topology:
    root: Sequencer
    name: str = field(default="custom", compare=False)

    # traversal helpers
    def sequencers(self) -> Iterator[Sequencer]:
        def walk(s):
            yield s
            for m in s.missions:
                for k in m.schedulables:
                    if isinstance(k, NestedSequencer):
                        yield from walk(k.sequencer)
        return walk(self.root)

    def missions(self) -> Iterator[tuple[Sequencer, Mission]]:
        for s in self.sequencers():
            for m in s.missions:
                yield s, m

    def schedulables(self) -> Iterator[tuple[Mission, Schedulable]]:
        for _, m in self.missions():
            for k in m.schedulables:
                yield m, k

    def buffers(self) -> list[str]:
        out = []
        for _, k in self.schedulables():
            b = getattr(k, "behaviour", None)
            if isinstance(b, Producer) and b.buffer not in out:
                out.append(b.buffer)
        return out

    def parent_mission(self) -> dict[str, str | None]:
        """Sequencer id -> id of the mission it is registered to (None for the root)."""
        out = {self.root.id: None}
        for m, k in self.schedulables():
            if isinstance(k, NestedSequencer):
                out[k.id] = m.id
        return out

    def mission_sequencer(self) -> dict[str, str]:
        return {m.id: s.id for s, m in self.missions()}

    def ancestors(self, mission_id: str) -> list[str]:
        """Sequencer ids above a mission, innermost first."""
        seq_of, parent = self.mission_sequencer(), self.parent_mission()
        out, s = [], seq_of[mission_id]
        while s is not None:
            out.append(s)
            pm = parent[s]
            s = seq_of[pm] if pm is not None else None
        return out

    def node_ids(self) -> list[str]:
        ids = [s.id for s in self.sequencers()]
        ids += [m.id for _, m in self.missions()]
        ids += [k.id for _, k in self.schedulables() if not isinstance(k, NestedSequencer)]
        return ids


def _requests(b) -> Request | None:
    return getattr(b, "request", None)


def validate(t: Topology, variant: str | None = None) -> Topology:
    """Check the tree invariants; ``variant`` additionally enforces per-protocol rules."""
    seen: set[str] = set()

    def claim(i: str, what: str):
        if not isinstance(i, str) or not _ID_RE.match(i) or i in RESERVED_IDS:
            raise TopologyError(f"invalid {what} id {i!r}", i)
        if i in seen:
            raise TopologyError(f"duplicate id {i!r}", i)
        seen.add(i)

    for s in t.sequencers():
        claim(s.id, "sequencer")
    for _, m in t.missions():
        claim(m.id, "mission")
    producers: dict[str, str] = {}
    consumers: dict[str, str] = {}
    for m, k in t.schedulables():
        if isinstance(k, NestedSequencer):
            continue
        claim(k.id, "schedulable")
        if isinstance(k, Handler) and k.kind not in HANDLER_KINDS:
            raise TopologyError(f"handler {k.id}: unknown kind {k.kind!r}", k.id)
        b = k.behaviour
        if isinstance(b, (Producer, Consumer)):
            if isinstance(k, Handler):
                raise TopologyError(f"{k.id}: buffered producer/consumer roles are only valid in threads", k.id)
            table = producers if isinstance(b, Producer) else consumers
            if b.buffer in table:
                raise TopologyError(f"buffer {b.buffer!r} has more than one {type(b).__name__.lower()}", k.id)
            table[b.buffer] = m.id
        steps = getattr(b, "steps", 0)
        if not isinstance(steps, int) or not 0 <= steps <= MAX_STEPS:
            raise TopologyError(f"{k.id}: steps must be in 0..{MAX_STEPS}", k.id)
        if isinstance(b, WorkLoop) and b.steps < 1:
            raise TopologyError(f"{k.id}: a work loop needs at least one step", k.id)
        if isinstance(b, Producer) and not 1 <= b.items <= MAX_STEPS:
            raise TopologyError(f"{k.id}: items must be in 1..{MAX_STEPS}", k.id)
        req = _requests(b)
        if req is not None:
            anc = t.ancestors(m.id)
            for name in (req.target, req.escalate):
                if name not in (None, "mission") and name not in anc:
                    raise TopologyError(f"{k.id}: termination target {name!r} is not an enclosing sequencer", k.id)
            if req.escalate is not None and req.target != "mission":
                raise TopologyError(f"{k.id}: escalate requires target=mission", k.id)
            if variant == "proposed" and req.target != "mission":
                raise VariantMismatch(
                    f"{k.id}: a named-sequencer termination target is not part of the proposed protocol", k.id)
            if variant == "current" and req.escalate is not None:
                raise VariantMismatch(f"{k.id}: escalate is only meaningful under the proposed protocol", k.id)
    for b in sorted(set(producers) | set(consumers)):
        if b not in producers or b not in consumers:
            raise TopologyError(f"buffer {b!r} needs exactly one producer and one consumer", b)
        if producers[b] != consumers[b]:
            raise TopologyError(f"buffer {b!r} is shared across missions", b)
        claim(b, "buffer")
    return t


def rewrite_for_proposed(t: Topology) -> Topology:
    """Replace named-sequencer targets by mission-local requests that escalate."""

    def fix_behaviour(b):
        req = _requests(b)
        if req is None or req.target == "mission":
            return b
        return replace(b, request=Request("mission", req.target))

    def fix_seq(s: Sequencer) -> Sequencer:
        missions = []
        for m in s.missions:
            ks = []
            for k in m.schedulables:
                if isinstance(k, NestedSequencer):
                    ks.append(NestedSequencer(fix_seq(k.sequencer)))
                else:
                    ks.append(replace(k, behaviour=fix_behaviour(k.behaviour)))
            missions.append(replace(m, schedulables=tuple(ks)))
        return replace(s, missions=tuple(missions))

    return Topology(fix_seq(t.root), t.name)


def builtin_source(name: str) -> str:
    if name not in BUILTINS:
        raise TopologyError(f"unknown builtin topology {name!r} (known: {', '.join(BUILTINS)})")
    return resources.files("scjl2").joinpath("builtin", f"{name}.topo").read_text()


def builtin_topology(name: str) -> Topology:
    from ..dsl.topo import parse_topology
    from ..dsl.cmodel import ModelSource

    t = parse_topology(ModelSource(builtin_source(name), f"<builtin:{name}>"))
    return Topology(t.root, name)
