"""Explicit-state exploration of generated (or hand-written) process models.

Breadth-first enumeration of configurations with parent pointers, deadlock
and tau-cycle detection, event-ordering checks as monitor products, and a
side-by-side comparison of the two termination protocols.
"""
from __future__ import annotations

import gc
import os
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Iterable

from . import __version__
from .calc import TAU, TICK, ChanRef, Configuration, Engine, Event, EventSet, ModelDefs, Omega
from .scjmodel import ModelBundle, Topology, build_model, rewrite_for_proposed

DEFAULT_MAX_STATES = 10_000_000
MAX_WITNESSES = 5


def _env_max_states() -> int:
    raw = os.environ.get("MK_MAX_STATES")
    if not raw:
        return DEFAULT_MAX_STATES
    value = int(raw)
    if value < 1:
        raise ValueError("MK_MAX_STATES must be at least 1")
    return value


@dataclass(frozen=True)
class ExploreLimits:
    max_states: int = field(default_factory=_env_max_states)
    max_depth: int | None = None
    hide: frozenset = frozenset()

    def __post_init__(self):
        if self.max_states < 1:
            raise ValueError("max_states must be at least 1")
        if self.max_depth is not None and self.max_depth < 0:
            raise ValueError("max_depth must be non-negative")
        object.__setattr__(self, "hide", frozenset(self.hide))


@dataclass(frozen=True)
class Lasso:
    stem: tuple
    cycle: tuple

    def to_json(self) -> dict:
        return {"stem": [str(e) for e in self.stem], "cycle": [str(e) for e in self.cycle]}


@dataclass(frozen=True)
class ExplorationReport:
    states: int
    transitions: int
    deadlocks: tuple
    divergences: tuple
    terminated: int
    truncated: bool
    model: str = "custom"
    variant: str | None = None

    @property
    def ok(self) -> bool:
        return not self.deadlocks and not self.divergences

    def to_json(self) -> dict:
        return {
            "model": self.model,
            "variant": self.variant,
            "tool": f"scjl2 {__version__}",
            "states": self.states,
            "transitions": self.transitions,
            "deadlocks": [[str(e) for e in t] for t in self.deadlocks],
            "divergences": [d.to_json() for d in self.divergences],
            "terminated": self.terminated,
            "truncated": self.truncated,
        }


def trace_text(trace: Iterable[Event], elide_tau: bool = False) -> str:
    return " -> ".join(str(e) for e in trace if not (elide_tau and e == TAU)) or "<>"


@contextmanager
def _no_gc():
    # millions of long-lived configurations make cyclic collection quadratic
    enabled = gc.isenabled()
    gc.disable()
    try:
        yield
    finally:
        if enabled:
            gc.enable()


def _hidden_set(b: ModelBundle, limits: ExploreLimits) -> EventSet:
    return EventSet(_pattern(p) for p in (*b.state_channels, *limits.hide))


class _Graph:
    """Reachable states in BFS order with shortest-path parent pointers."""

    def __init__(self, b: ModelBundle, limits: ExploreLimits, keep_edges: bool = False,
                 tau_edges: EventSet | None = None):
        self.engine = Engine(b.defs)
        self.limits = limits
        c0 = self.engine.initial(b.defs.main)
        self.index: dict = {c0: 0}
        self.states: list = [c0]
        self.parent: list = [-1]
        self.via: list = [None]
        self.depth: list = [0]
        self.transitions = 0
        self.truncated = False
        self.deadlocks: list = []
        self.terminated = 0
        self.edges: list | None = [] if keep_edges else None
        self.hidden = tau_edges
        self.tau_succ: dict = {}

    def run(self):
        limits = self.limits
        i = 0
        while i < len(self.states):
            c = self.states[i]
            if limits.max_depth is not None and self.depth[i] >= limits.max_depth:
                if self.engine.step(c):
                    self.truncated = True
                i += 1
                continue
            succ = self.engine.step(c)
            if not succ:
                if isinstance(c.term, Omega):
                    self.terminated += 1
                else:
                    self.deadlocks.append(i)
            for ev, nxt in succ:
                j = self.index.get(nxt)
                if j is None:
                    if len(self.states) >= limits.max_states:
                        self.truncated = True
                        continue
                    j = len(self.states)
                    self.index[nxt] = j
                    self.states.append(nxt)
                    self.parent.append(i)
                    self.via.append(ev)
                    self.depth.append(self.depth[i] + 1)
                self.transitions += 1
                if self.edges is not None:
                    self.edges.append((i, ev, j))
                if self.hidden is not None and (ev == TAU or ev in self.hidden):
                    self.tau_succ.setdefault(i, []).append((ev, j))
            i += 1
        return self

    def path(self, i: int) -> tuple:
        out = []
        while self.parent[i] >= 0:
            out.append(self.via[i])
            i = self.parent[i]
        return tuple(reversed(out))

    def divergences(self) -> list:
        """Up to MAX_WITNESSES tau-cycles, each reported once at its entry state."""
        found: list = []
        colour: dict = {}  # 1 on stack, 2 done
        for root in sorted(self.tau_succ):
            if len(found) >= MAX_WITNESSES:
                break
            if root in colour:
                continue
            stack = [(root, iter(self.tau_succ.get(root, ())))]
            on_path: list = [(root, None)]
            colour[root] = 1
            while stack and len(found) < MAX_WITNESSES:
                node, it = stack[-1]
                nxt = next(it, None)
                if nxt is None:
                    colour[node] = 2
                    stack.pop()
                    on_path.pop()
                    continue
                ev, j = nxt
                state = colour.get(j)
                if state == 1:
                    k = next(n for n, (s, _) in enumerate(on_path) if s == j)
                    cycle = tuple(e for _, e in on_path[k + 1:]) + (ev,)
                    found.append(Lasso(self.path(j), cycle))
                elif state is None:
                    colour[j] = 1
                    on_path.append((j, ev))
                    stack.append((j, iter(self.tau_succ.get(j, ()))))
        return found


def explore(b: ModelBundle, limits: ExploreLimits | None = None) -> ExplorationReport:
    """Enumerate the reachable configurations of ``b`` and check deadlock and divergence freedom."""
    limits = limits or ExploreLimits()
    with _no_gc():
        g = _Graph(b, limits, tau_edges=_hidden_set(b, limits)).run()
        divs = g.divergences()
    return ExplorationReport(
        states=len(g.states),
        transitions=g.transitions,
        deadlocks=tuple(g.path(i) for i in g.deadlocks[:MAX_WITNESSES]),
        divergences=tuple(divs),
        terminated=g.terminated,
        truncated=g.truncated,
        model=b.topology,
        variant=b.variant,
    )


@dataclass(frozen=True)
class Lts:
    """The full labelled transition system of a model: states in BFS order, edges by index."""
    states: tuple
    transitions: frozenset
    truncated: bool


def build_lts(b: ModelBundle, limits: ExploreLimits | None = None) -> Lts:
    limits = limits or ExploreLimits()
    with _no_gc():
        g = _Graph(b, limits, keep_edges=True).run()
    return Lts(tuple(g.states), frozenset(g.edges), g.truncated)


# -- ordering queries ----------------------------------------------------------

FORALL_PRECEDES = "ForallPrecedes"
EXISTS_INTERLEAVING = "ExistsInterleaving"


def _pattern(p) -> ChanRef:
    if isinstance(p, ChanRef):
        return p
    ev = Event.parse(p) if isinstance(p, str) else Event(*p)
    return ChanRef(ev.channel, ev.args)


def _patterns(ps) -> tuple:
    if isinstance(ps, (str, ChanRef)):
        ps = (ps,)
    return tuple(_pattern(p) for p in ps)


@dataclass(frozen=True)
class OrderQuery:
    """``first``/``second`` are event patterns: a channel plus optional leading arguments.

    ForallPrecedes: no ``second`` event may occur before the first ``first`` event.
    ExistsInterleaving: ``second`` holds one pattern group per subsystem; a witness
    shows events of two distinct groups strictly between two ``first`` events.
    """
    mode: str
    first: tuple
    second: tuple

    def __post_init__(self):
        if self.mode not in (FORALL_PRECEDES, EXISTS_INTERLEAVING):
            raise ValueError(f"unknown query mode {self.mode!r}")
        object.__setattr__(self, "first", _patterns(self.first))
        if self.mode == FORALL_PRECEDES:
            object.__setattr__(self, "second", _patterns(self.second))
        else:
            groups = tuple(_patterns(g) for g in self.second)
            if len(groups) < 2:
                raise ValueError("ExistsInterleaving needs at least two subsystem groups")
            object.__setattr__(self, "second", groups)

    @classmethod
    def forall_precedes(cls, first, second) -> "OrderQuery":
        return cls(FORALL_PRECEDES, first, second)

    @classmethod
    def exists_interleaving(cls, first, groups) -> "OrderQuery":
        return cls(EXISTS_INTERLEAVING, first, groups)

    def channels(self) -> set[str]:
        refs = list(self.first)
        if self.mode == FORALL_PRECEDES:
            refs += self.second
        else:
            refs += [r for g in self.second for r in g]
        return {r.channel for r in refs}

    def to_json(self) -> dict:
        second = ([str(r) for r in self.second] if self.mode == FORALL_PRECEDES
                  else [[str(r) for r in g] for g in self.second])
        return {"mode": self.mode, "first": [str(r) for r in self.first], "second": second}


HOLDS, FAILS, WITNESS_FOUND, NO_WITNESS = "holds", "fails", "witnessFound", "noWitness"


@dataclass(frozen=True)
class OrderResult:
    verdict: str
    trace: tuple | None
    states: int
    truncated: bool
    first_seen: bool

    @property
    def passed(self) -> bool:
        return self.verdict in (HOLDS, WITNESS_FOUND)

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "trace": None if self.trace is None else [str(e) for e in self.trace],
            "states": self.states,
            "truncated": self.truncated,
            "firstSeen": self.first_seen,
        }


class QueryError(ValueError):
    pass


def _matches(refs: tuple, ev: Event) -> bool:
    return any(r.matches(ev) for r in refs)


def check_order(b: ModelBundle, q: OrderQuery, limits: ExploreLimits | None = None) -> OrderResult:
    """Explore ``b`` composed with a monitor for ``q``; shortest witnesses by BFS."""
    limits = limits or ExploreLimits()
    declared = {c.name for c in b.defs.channels}
    unknown = sorted(q.channels() - declared)
    if unknown:
        raise QueryError(f"query names undeclared channel(s): {', '.join(unknown)}")
    with _no_gc():
        return _monitor_product(b, q, limits)


def _monitor_product(b: ModelBundle, q: OrderQuery, limits: ExploreLimits) -> OrderResult:
    # monitor states: ForallPrecedes -> 0 before any `first`, 1 after (nothing left to check);
    # ExistsInterleaving -> None before any `first`, then the bitmask of groups seen since
    engine = Engine(b.defs)
    forall = q.mode == FORALL_PRECEDES
    start = (engine.initial(b.defs.main), 0 if forall else None)
    index = {start: 0}
    nodes = [start]
    parent, via, depth = [-1], [None], [0]
    truncated = False
    first_seen = False

    def trace(i: int) -> tuple:
        out = []
        while parent[i] >= 0:
            out.append(via[i])
            i = parent[i]
        return tuple(reversed(out))

    i = 0
    while i < len(nodes):
        conf, mon = nodes[i]
        if limits.max_depth is not None and depth[i] >= limits.max_depth:
            truncated = truncated or bool(engine.step(conf))
            i += 1
            continue
        for ev, nxt in engine.step(conf):
            if ev == TAU or ev == TICK:
                m2 = mon
            elif forall:
                if _matches(q.first, ev):
                    first_seen = True
                    continue  # ordering settled on every extension of this path
                if _matches(q.second, ev):
                    return OrderResult(FAILS, trace(i) + (ev,), len(nodes), truncated, first_seen)
                m2 = mon
            else:
                m2 = mon
                if _matches(q.first, ev):
                    first_seen = True
                    if mon is not None and bin(mon).count("1") >= 2:
                        return OrderResult(WITNESS_FOUND, trace(i) + (ev,), len(nodes), truncated, True)
                    if mon is None:
                        m2 = 0
                elif mon is not None:
                    for g, refs in enumerate(q.second):
                        if _matches(refs, ev):
                            m2 |= 1 << g
            key = (nxt, m2)
            if key not in index:
                if len(nodes) >= limits.max_states:
                    truncated = True
                    continue
                index[key] = len(nodes)
                nodes.append(key)
                parent.append(i)
                via.append(ev)
                depth.append(depth[i] + 1)
        i += 1
    verdict = HOLDS if forall else NO_WITNESS
    return OrderResult(verdict, None, len(nodes), truncated, first_seen)


# -- protocol comparison -------------------------------------------------------

@dataclass(frozen=True)
class Comparison:
    current: ExplorationReport
    proposed: ExplorationReport
    reduction: float
    inconclusive: bool

    def to_json(self) -> dict:
        return {
            "current": self.current.to_json(),
            "proposed": self.proposed.to_json(),
            "reduction": self.reduction,
            "inconclusive": self.inconclusive,
        }


def protocol_bundles(t: Topology) -> tuple[ModelBundle, ModelBundle]:
    """Current and proposed models of ``t``; sequencer-targeted requests are rewritten for the latter."""
    return build_model(t, "current"), build_model(rewrite_for_proposed(t), "proposed")


def compare_protocols(t: Topology, limits: ExploreLimits | None = None) -> Comparison:
    limits = limits or ExploreLimits()
    cur_b, prop_b = protocol_bundles(t)
    cur, prop = explore(cur_b, limits), explore(prop_b, limits)
    return Comparison(cur, prop, 1 - prop.states / cur.states, cur.truncated or prop.truncated)


def parallel_termination_query(t: Topology, mission: str | None = None) -> OrderQuery:
    """ExistsInterleaving over the cleanup of every nested subsystem of ``mission``.

    The window opens when the mission begins terminating and closes when its own
    cleanup starts; the default mission is the root sequencer's first.
    """
    parent = t.parent_mission()
    if mission is None:
        if not t.root.missions:
            raise QueryError("topology has no missions")
        mission = t.root.missions[0].id
    groups = []
    for s in t.sequencers():
        if parent.get(s.id) == mission:
            groups.append(tuple(f"cleanupMissionCall.{m.id}" for m in _all_missions(s)))
    if len(groups) < 2:
        raise QueryError(f"mission {mission!r} has fewer than two nested subsystems")
    return OrderQuery.exists_interleaving(
        (f"begin_termination.{mission}", f"cleanupMissionCall.{mission}"), groups)


def _all_missions(s) -> list:
    out = []
    for m in s.missions:
        out.append(m)
        for k in m.schedulables:
            inner = getattr(k, "sequencer", None)
            if inner is not None:
                out.extend(_all_missions(inner))
    return out


def bundle_of(defs: ModelDefs, name: str = "custom") -> ModelBundle:
    """Wrap a hand-written model for exploration (no state channels, no event index)."""
    return ModelBundle(defs=defs, state_channels=frozenset(), termination_channels=frozenset(),
                       event_index={}, variant=None, topology=name)


def replay(b: ModelBundle, trace: Iterable[Event]) -> Configuration:
    """Step the initial configuration through ``trace``; raises ValueError if it is not a run."""
    engine = Engine(b.defs)
    c = engine.initial(b.defs.main)
    frontier = [c]
    for ev in trace:
        nxt = [n for c in frontier for e, n in engine.step(c) if e == ev]
        if not nxt:
            raise ValueError(f"trace not replayable at {ev}")
        frontier = list(dict.fromkeys(nxt))
    return frontier[0]
