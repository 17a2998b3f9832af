"""Discrete-time hierarchical scheduling on one processor.

Integer-millisecond ticks.  Execution-time servers follow the deferrable-server
policy: the budget is reset to full at ``start + k * replenishment_period`` and
unused budget is not carried over.  Subsystem priorities are simulated by
transposing each server's member tasks into the server's priority band.

Scenarios are built functionally: :func:`fire_event`, :func:`produce`,
:func:`request_termination_with_deadline` and :func:`request_mission_change`
each return a new :class:`System` with one more scripted stimulus.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Union


class SchedError(ValueError):
    pass


class BandOverlap(SchedError):
    pass


class BandTooSmall(SchedError):
    pass


class DuplicateTimer(SchedError):
    pass


def _int(name: str, v, lo: int | None = 0) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise SchedError(f"{name} must be an integer number of ms, got {v!r}")
    if lo is not None and v < lo:
        raise SchedError(f"{name} must be >= {lo}, got {v}")
    return v


@dataclass(frozen=True)
class ServerParams:
    id: str
    replenishment_period: int
    budget: int
    base_priority: int
    priority_range: int
    start: int = 0

    def __post_init__(self):
        _int("start", self.start)
        _int("replenishment_period", self.replenishment_period, 1)
        _int("budget", self.budget, 1)
        _int("base_priority", self.base_priority, None)
        _int("priority_range", self.priority_range, 1)
        if self.budget > self.replenishment_period:
            raise SchedError(f"server {self.id}: budget exceeds replenishment period")

    @property
    def band(self) -> tuple[int, int]:
        return self.base_priority, self.base_priority + self.priority_range

    def window_start(self, t: int) -> int | None:
        if t < self.start:
            return None
        return t - (t - self.start) % self.replenishment_period


# -- task kinds ------------------------------------------------------------------

@dataclass(frozen=True)
class Periodic:
    period: int
    deadline: int
    wcet: int
    offset: int = 0


@dataclass(frozen=True)
class EventReleasedPeriodic:
    period: int
    deadline: int
    wcet: int


@dataclass(frozen=True)
class Consumer:
    processing: int


@dataclass(frozen=True)
class Background:
    chunk: int = 1


@dataclass(frozen=True)
class Aperiodic:
    """An event handler released by timers (deadline-miss handlers); one job per release."""
    wcet: int


TaskKind = Union[Periodic, EventReleasedPeriodic, Consumer, Background, Aperiodic]


@dataclass(frozen=True)
class TaskSpec:
    id: str
    kind: TaskKind
    server: str | None = None
    order_index: int = 0
    priority: int | None = None  # only for top-level tasks

    def __post_init__(self):
        k = self.kind
        if isinstance(k, (Periodic, EventReleasedPeriodic)):
            _int("period", k.period, 1)
            _int("deadline", k.deadline, 1)
            _int("wcet", k.wcet, 1)
            if not k.wcet <= k.deadline <= k.period:
                raise SchedError(f"task {self.id}: need wcet <= deadline <= period")
            if isinstance(k, Periodic):
                _int("offset", k.offset)
        elif isinstance(k, Consumer):
            _int("processing", k.processing, 1)
        elif isinstance(k, Background):
            _int("chunk", k.chunk, 1)
        elif isinstance(k, Aperiodic):
            _int("wcet", k.wcet, 1)
        else:
            raise SchedError(f"task {self.id}: unknown kind {k!r}")
        if self.server is None and self.priority is None:
            raise SchedError(f"top-level task {self.id} needs a priority")


# -- stimuli ---------------------------------------------------------------------

TERMINATION, MISSION_CHANGE = "TerminationDeadline", "MissionChangeDeadline"


@dataclass(frozen=True)
class FireEvent:
    task: str
    t: int


@dataclass(frozen=True)
class Produce:
    task: str
    t: int
    items: int = 1


@dataclass(frozen=True)
class SequencerTimer:
    """A sequencer timer: armed at ``t``, due at ``t + deadline``; the scripted
    lifecycle step (cleanup, or start of the next mission) completes at ``t + duration``."""
    kind: str
    sequencer: str
    t: int
    deadline: int
    handler: str
    duration: int
    next_mission_null: bool = False

    @property
    def due(self) -> int:
        return self.t + self.deadline

    @property
    def completes(self) -> int:
        return self.t + self.duration

    @property
    def fires(self) -> bool:
        # a completion at the deadline instant is processed first, so it cancels
        return self.completes > self.due

    @property
    def settled(self) -> int:
        return min(self.completes, self.due)


Stimulus = Union[FireEvent, Produce, SequencerTimer]


@dataclass(frozen=True)
class System:
    servers: tuple = ()
    tasks: tuple = ()
    sequencers: tuple = ()
    stimuli: tuple = ()
    warnings: tuple = ()

    def task(self, tid: str) -> TaskSpec:
        for k in self.tasks:
            if k.id == tid:
                return k
        raise SchedError(f"unknown task {tid!r}")

    def server(self, sid: str) -> ServerParams:
        for s in self.servers:
            if s.id == sid:
                return s
        raise SchedError(f"unknown server {sid!r}")


def transpose_priorities(servers, tasks) -> dict[str, int]:
    """Concrete priority per task: server members ranked by ``order_index`` into the server's band."""
    servers = list(servers)
    ids = [s.id for s in servers]
    if len(set(ids)) != len(ids):
        raise SchedError("duplicate server id")
    bands = sorted((s.band, s.id) for s in servers)
    for (a, a_id), (b, b_id) in zip(bands, bands[1:]):
        if b[0] <= a[1]:
            raise BandOverlap(f"priority bands of {a_id} {list(a)} and {b_id} {list(b)} overlap")
    out: dict[str, int] = {}
    by_server: dict[str, list] = {s.id: [] for s in servers}
    for k in tasks:
        if k.id in out or any(k.id in m for m in by_server.values()):
            raise SchedError(f"duplicate task id {k.id!r}")
        if k.server is None:
            out[k.id] = k.priority
        elif k.server not in by_server:
            raise SchedError(f"task {k.id}: unknown server {k.server!r}")
        else:
            by_server[k.server].append(k)
    for s in servers:
        members = sorted(by_server[s.id], key=lambda k: k.order_index)
        ranks = [k.order_index for k in members]
        if len(set(ranks)) != len(ranks):
            raise SchedError(f"server {s.id}: order_index values must be unique")
        if len(members) > s.priority_range:
            raise BandTooSmall(f"server {s.id}: {len(members)} tasks do not fit priority range {s.priority_range}")
        for rank, k in enumerate(members):
            out[k.id] = s.base_priority + rank
    seen: dict[int, str] = {}
    for tid, p in out.items():
        if p in seen:
            raise SchedError(f"tasks {seen[p]} and {tid} share priority {p}")
        seen[p] = tid
    return out


# -- scenario builders -----------------------------------------------------------

def _with(system: System, stim, warning: str | None = None) -> System:
    warnings = system.warnings + ((warning,) if warning else ())
    if stim is None:
        return replace(system, warnings=warnings)
    return replace(system, stimuli=system.stimuli + (stim,), warnings=warnings)


def fire_event(system: System, task_id: str, t: int) -> System:
    """First release of an event-released periodic task at ``t``."""
    k = system.task(task_id)
    if not isinstance(k.kind, EventReleasedPeriodic):
        raise SchedError(f"task {task_id} is not event-released periodic")
    _int("t", t)
    if any(isinstance(s, FireEvent) and s.task == task_id for s in system.stimuli):
        return _with(system, None, f"t={t}: repeated first release of {task_id} ignored")
    return _with(system, FireEvent(task_id, t))


def produce(system: System, task_id: str, t: int, items: int = 1) -> System:
    k = system.task(task_id)
    if not isinstance(k.kind, Consumer):
        raise SchedError(f"task {task_id} is not a consumer")
    return _with(system, Produce(task_id, _int("t", t), _int("items", items, 1)))


def _lifecycle(system: System, kind: str, seq: str, t: int, deadline: int, handler: str,
               duration: int, null_next: bool = False) -> System:
    if seq not in system.sequencers:
        raise SchedError(f"unknown sequencer {seq!r}")
    if not isinstance(system.task(handler).kind, Aperiodic):
        raise SchedError(f"deadline-miss handler {handler} must be aperiodic")
    req = SequencerTimer(kind, seq, _int("t", t), _int("deadline", deadline, 1), handler,
                           _int("duration", duration), null_next)
    for s in system.stimuli:
        if isinstance(s, SequencerTimer) and s.sequencer == seq and s.kind == kind \
                and s.t <= req.t < s.settled:
            raise DuplicateTimer(f"sequencer {seq} already has a live {kind} timer at t={t}")
    return _with(system, req)


def request_termination_with_deadline(system: System, sequencer: str, t: int, deadline: int,
                                      handler: str, cleanup_duration: int) -> System:
    return _lifecycle(system, TERMINATION, sequencer, t, deadline, handler, cleanup_duration)


def request_mission_change(system: System, sequencer: str, t: int, deadline: int, handler: str,
                           start_duration: int, next_mission_null: bool = False) -> System:
    return _lifecycle(system, MISSION_CHANGE, sequencer, t, deadline, handler, start_duration,
                      next_mission_null)


# -- simulation ------------------------------------------------------------------

@dataclass
class TaskState:
    next_release: int | None = None
    had_first_release: bool = False
    jobs: list = field(default_factory=list)  # [remaining, absolute deadline or None, missed]
    pending_items: int = 0
    missed: int = 0

    @property
    def remaining_work(self) -> int:
        return sum(j[0] for j in self.jobs)


@dataclass(frozen=True)
class SimEvent:
    t: int
    kind: str
    subject: str
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"t": self.t, "kind": self.kind, "subject": self.subject, **self.detail}


IDLE = "idle"


@dataclass(frozen=True)
class SimTrace:
    horizon: int
    per_tick: tuple
    events: tuple
    priorities: dict
    members: dict
    servers: dict
    warnings: tuple = ()

    def to_json(self) -> dict:
        return {
            "horizon": self.horizon,
            "perTick": list(self.per_tick),
            "events": [e.to_json() for e in self.events],
            "priorities": dict(sorted(self.priorities.items())),
            "warnings": list(self.warnings),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))

    def events_of(self, kind: str, subject: str | None = None) -> list:
        return [e for e in self.events if e.kind == kind and (subject is None or e.subject == subject)]

    def gantt(self, width: int = 100) -> str:
        """Plain-text chart: one row per task; ``#`` ran the whole bucket, ``+`` part of it."""
        scale = max(1, -(-self.horizon // width))
        names = sorted(self.priorities, key=lambda n: -self.priorities[n])
        pad = max([len(n) for n in names] + [4])
        cols = -(-self.horizon // scale)
        lines = [f"{'ms':<{pad}} 0{'':{cols - 1}}{self.horizon}  ({scale} ms per column)"]
        for n in [*names, IDLE]:
            row = []
            for c in range(cols):
                bucket = self.per_tick[c * scale:(c + 1) * scale]
                hits = sum(1 for x in bucket if x == n)
                row.append("#" if hits == len(bucket) else "+" if hits else ".")
            lines.append(f"{n:<{pad}} {''.join(row)}")
        return "\n".join(lines) + "\n"


def simulate(system: System, horizon: int) -> SimTrace:
    _int("horizon", horizon, 1)
    prio = transpose_priorities(system.servers, system.tasks)
    tasks = {k.id: k for k in system.tasks}
    for s in system.stimuli:
        if not 0 <= s.t < horizon:
            raise SchedError(f"stimulus at t={s.t} outside horizon [0, {horizon})")
        if isinstance(s, SequencerTimer) and s.sequencer not in system.sequencers:
            raise SchedError(f"unknown sequencer {s.sequencer!r}")
    servers = {s.id: s for s in system.servers}
    budget = {s.id: 0 for s in system.servers}
    state = {k.id: TaskState() for k in system.tasks}
    for k in system.tasks:
        if isinstance(k.kind, Periodic):
            state[k.id].next_release = k.kind.offset
        elif isinstance(k.kind, Background):
            state[k.id].jobs.append([k.kind.chunk, None, False])
    events: list[SimEvent] = []
    ev = lambda t, kind, subj, **d: events.append(SimEvent(t, kind, subj, d))  # noqa: E731
    at: dict[int, list] = {}
    for s in system.stimuli:
        at.setdefault(s.t, []).append(s)
    due: dict[int, list] = {}
    done: dict[int, list] = {}
    order = sorted(tasks, key=lambda n: -prio[n])
    per_tick = []

    def release(t: int, k: TaskSpec, work: int, deadline: int | None):
        st = state[k.id]
        st.jobs.append([work, deadline, False])
        ev(t, "release", k.id)
        if deadline is not None:
            ev(t, "deadlineArm", k.id, deadline=deadline)

    for t in range(horizon):
        for s in system.servers:
            if t >= s.start and (t - s.start) % s.replenishment_period == 0:
                budget[s.id] = s.budget
                ev(t, "replenish", s.id, budget=s.budget)
        for s in at.get(t, ()):
            if isinstance(s, SequencerTimer):
                phase = "cleanup" if s.kind == TERMINATION else "missionChange"
                ev(t, "missionPhase", s.sequencer, phase=phase, timer=s.kind, due=s.due)
                done.setdefault(s.completes, []).append(s)
                due.setdefault(s.due, []).append(s)
        cancelled = set()
        for s in done.pop(t, ()):
            if s.kind == TERMINATION:
                phase = "terminated"
            else:
                phase = "nullMission" if s.next_mission_null else "missionStarted"
            ev(t, "missionPhase", s.sequencer, phase=phase)
            if not s.fires:
                ev(t, "timerCancel", s.sequencer, timer=s.kind)
                cancelled.add(id(s))
        for s in due.pop(t, ()):
            if id(s) in cancelled or not s.fires:
                continue
            ev(t, "timerFire", s.sequencer, timer=s.kind, handler=s.handler)
            release(t, tasks[s.handler], tasks[s.handler].kind.wcet, None)
        for s in at.get(t, ()):
            if isinstance(s, FireEvent):
                st = state[s.task]
                st.had_first_release = True
                st.next_release = t
            elif isinstance(s, Produce):
                state[s.task].pending_items += s.items
        for name in order:
            st = state[name]
            for j in st.jobs:
                if j[1] is not None and j[1] <= t and j[0] > 0 and not j[2]:
                    j[2] = True
                    st.missed += 1
                    ev(t, "deadlineMiss", name, deadline=j[1], remaining=j[0])
        for name in order:
            k, st = tasks[name], state[name]
            kind = k.kind
            if isinstance(kind, (Periodic, EventReleasedPeriodic)) and st.next_release == t:
                release(t, k, kind.wcet, t + kind.deadline)
                st.next_release = t + kind.period
            elif isinstance(kind, Consumer) and st.pending_items and not st.jobs:
                st.pending_items -= 1
                release(t, k, kind.processing, None)
        runner = IDLE
        for name in order:
            k, st = tasks[name], state[name]
            if not st.jobs or st.jobs[0][0] <= 0:
                continue
            if k.server is not None and budget[k.server] <= 0:
                continue
            runner = name
            break
        per_tick.append(runner)
        if runner != IDLE:
            k, st = tasks[runner], state[runner]
            st.jobs[0][0] -= 1
            if k.server is not None:
                budget[k.server] -= 1
                if budget[k.server] == 0:
                    ev(t + 1, "budgetExhausted", k.server)
            if st.jobs[0][0] == 0:
                st.jobs.pop(0)
                if isinstance(k.kind, Background):
                    st.jobs.append([k.kind.chunk, None, False])
                elif isinstance(k.kind, Consumer) and st.pending_items:
                    st.pending_items -= 1
                    release(t + 1, k, k.kind.processing, None)

    members = {s.id: tuple(k.id for k in system.tasks if k.server == s.id) for s in system.servers}
    events = [e for e in events if e.t < horizon]
    return SimTrace(horizon, tuple(per_tick), tuple(events), prio, members,
                    {s.id: s for s in system.servers}, system.warnings)


def window_usage(trace: SimTrace, server_id: str, window_start: int) -> int:
    """Milliseconds executed by ``server_id``'s members in the replenishment window at ``window_start``."""
    s = trace.servers.get(server_id)
    if s is None:
        raise SchedError(f"unknown server {server_id!r}")
    if window_start < s.start or (window_start - s.start) % s.replenishment_period:
        raise SchedError(f"window start {window_start} is not on {server_id}'s replenishment grid")
    members = set(trace.members[server_id])
    ticks = trace.per_tick[window_start:window_start + s.replenishment_period]
    return sum(1 for x in ticks if x in members)


# -- JSON scenarios --------------------------------------------------------------

_KINDS = {"Periodic": Periodic, "EventReleasedPeriodic": EventReleasedPeriodic, "Consumer": Consumer,
          "Background": Background, "Aperiodic": Aperiodic}
_KIND_FIELDS = {
    "Periodic": ("period", "deadline", "wcet", "offset"),
    "EventReleasedPeriodic": ("period", "deadline", "wcet"),
    "Consumer": ("processing",),
    "Background": ("chunk",),
    "Aperiodic": ("wcet",),
}


def system_from_json(doc: dict) -> tuple[System, int]:
    """Build a scenario; returns the system and its horizon."""
    try:
        servers = tuple(ServerParams(
            id=s["id"], start=s.get("start", 0), replenishment_period=s["replenishmentPeriod"],
            budget=s["budget"], base_priority=s["basePriority"], priority_range=s["priorityRange"],
        ) for s in doc.get("servers", []))
        tasks = []
        for k in doc.get("tasks", []):
            kd = dict(k["kind"])
            name = kd.pop("type")
            if name not in _KINDS:
                raise SchedError(f"unknown task kind {name!r}")
            extra = set(kd) - set(_KIND_FIELDS[name])
            if extra:
                raise SchedError(f"{name}: unknown field(s) {sorted(extra)}")
            tasks.append(TaskSpec(k["id"], _KINDS[name](**kd), k.get("server"), k.get("orderIndex", 0),
                                  k.get("priority")))
        system = System(servers, tuple(tasks), tuple(doc.get("sequencers", [])))
        for s in doc.get("stimuli", []):
            kind = s["type"]
            if kind == "fireEvent":
                system = fire_event(system, s["task"], s["t"])
            elif kind == "produce":
                system = produce(system, s["task"], s["t"], s.get("items", 1))
            elif kind == "requestTermination":
                system = request_termination_with_deadline(system, s["sequencer"], s["t"], s["deadline"],
                                                           s["handler"], s["duration"])
            elif kind == "requestMissionChange":
                system = request_mission_change(system, s["sequencer"], s["t"], s["deadline"], s["handler"],
                                                s["duration"], s.get("nextMissionNull", False))
            else:
                raise SchedError(f"unknown stimulus type {kind!r}")
        horizon = _int("horizon", doc["horizon"], 1)
    except KeyError as e:
        raise SchedError(f"missing field {e.args[0]!r}") from None
    except TypeError as e:
        raise SchedError(str(e)) from None
    return system, horizon


def load_scenario(text: str) -> tuple[System, int]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchedError(f"invalid JSON: {e.msg} at line {e.lineno}") from None
    if not isinstance(doc, dict):
        raise SchedError("scenario must be a JSON object")
    return system_from_json(doc)


def builtin_scenario(name: str) -> str:
    from importlib.resources import files
    path = files("scjl2") / "scenarios" / f"{name}.json"
    if not path.is_file():
        raise SchedError(f"unknown scenario {name!r}")
    return path.read_text()
