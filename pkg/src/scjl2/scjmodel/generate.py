"""Compile a :class:`Topology` into the framework + application process network.

The output is ``.cmodel`` text (so it can be inspected with ``emit-model``)
which is then parsed into :class:`ModelDefs`.  Each generated component
carries an explicit alphabet of event prefixes (``chan.id``) and the set of
variables it writes; parallel compositions synchronise on exactly the
shared prefixes and use the write sets as name sets.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from ..calc.terms import ModelDefs
from ..dsl.cmodel import ModelSource, parse
from .topology import (
    Consumer, Handler, Mission, NestedSequencer, Producer, Request, Sequencer,
    Terminator, Thread, Topology, WorkLoop, validate,
)

VARIANTS = ("current", "proposed")
STATE_CHANNELS = frozenset({"terminationPending", "missionActive"})
TERMINATION_CHANNELS = frozenset({
    "requestTermination", "requestTerminationCall", "requestSequenceTermination",
    "signalTerminationCall", "signalTerminationRet", "begin_termination",
    "end_termination", "end_terminations", "done_mission", "cleanupMissionCall",
    "cleanupMissionRet", "interruptAll", "interrupted",
})


@dataclass(frozen=True)
class ModelBundle:
    defs: ModelDefs
    state_channels: frozenset
    termination_channels: frozenset
    event_index: dict = field(compare=False)
    variant: str = "current"
    topology: str = "custom"
    source: str = field(default="", compare=False, repr=False)


@dataclass(frozen=True)
class _Comp:
    text: str
    alpha: frozenset
    writes: frozenset = frozenset()


def _set(items) -> str:
    return "{" + ", ".join(sorted(items)) + "}"


def _par(a: _Comp, b: _Comp) -> _Comp:
    sync = a.alpha & b.alpha
    if not sync and not a.writes and not b.writes:
        text = f"({a.text}) ||| ({b.text})"
    else:
        text = f"({a.text}) [| {_set(a.writes)} | {_set(sync)} | {_set(b.writes)} |] ({b.text})"
    return _Comp(text, a.alpha | b.alpha, a.writes | b.writes)


def _par_all(comps: list[_Comp]) -> _Comp:
    out = comps[0]
    for c in comps[1:]:
        out = _par(out, c)
    return out


def _pfx(ev: str) -> str:
    return ".".join(ev.split(".")[:2])


def _chain(events: list[str], tail: str = "Skip") -> str:
    return " -> ".join([*events, tail])


class _Generator:
    def __init__(self, t: Topology, variant: str):
        self.t = t
        self.v = variant
        self.cur = variant == "current"
        self.procs: list[tuple[str, str]] = []
        self.vars: list[str] = []
        self.parent = t.parent_mission()
        self.seq_of = t.mission_sequencer()
        self.escalating = self._escalating_sequencers()
        self.stopped = self._stopped_missions()
        self.called = self._called_events()

    # -- static analysis of escalation (proposed protocol) -------------------

    def _requests(self):
        for m, k in self.t.schedulables():
            req = getattr(getattr(k, "behaviour", None), "request", None)
            if req is not None:
                yield m, req

    def _escalating_sequencers(self) -> set[str]:
        """Nested sequencers that pass a stop request on to their parent mission."""
        out: set[str] = set()
        if self.cur:
            return out
        for m, req in self._requests():
            if req.escalate is None:
                continue
            for s in self.t.ancestors(m.id):
                if s == req.escalate:
                    break
                out.add(s)
        return out

    def _stopped_missions(self) -> set[str]:
        out: set[str] = set()
        if self.cur:
            return out
        for m, req in self._requests():
            if req.escalate is not None:
                out.add(m.id)
        for s in self.escalating:
            out.add(self.parent[s])
        return out

    def _called_events(self) -> set[str]:
        """Request events some component actually issues; no others are offered."""
        out: set[str] = set()
        for m, req in self._requests():
            out.update(map(_pfx, self.request_events(m, req)))
        for sid in self.escalating:
            out.add(f"requestTerminationCall.{self.parent[sid]}")
        return out

    # -- helpers --------------------------------------------------------------

    def proc(self, name: str, body: str, params: str = ""):
        self.procs.append((f"{name}{params}", body))

    def var(self, name: str, domain: str, init: str):
        self.vars.append(f"var {name} : {domain} = {init}")

    def request_events(self, m: Mission, req: Request) -> list[str]:
        if req.target != "mission":
            return [f"requestSequenceTermination.{req.target}"]
        if self.cur:
            return [f"requestTerminationCall.{m.id}"]
        # the flag says whether the mission's sequencer should carry on afterwards
        return [f"requestTerminationCall.{m.id}.{'FALSE' if req.escalate is not None else 'TRUE'}"]

    # -- sequencers -----------------------------------------------------------

    def sequencer(self, s: Sequencer) -> _Comp:
        sid = s.id
        nested = self.parent[sid] is not None
        cm = f"currentMission_{sid}"
        ms = [m.id for m in s.missions]
        self.var(cm, "MissionID", "nullMissionId")
        per_m = ["start_mission", "done_mission", "requestTermination"]
        if nested or self.cur:
            per_m.append("initializeRet")
        if self.cur:
            per_m += ["terminationPending", "missionActive"]
        alpha = {f"getNextMissionCall.{sid}", f"getNextMissionRet.{sid}", f"end_sequencer_app.{sid}"}
        alpha |= {f"{c}.{m}" for c in per_m for m in ms}
        if self.cur:
            alpha.add(f"requestSequenceTermination.{sid}")
        if not nested and not self.cur:
            alpha -= {f"requestTermination.{m}" for m in ms}

        if self.cur:
            if nested:
                flags = [f"terminatingAbove_{sid}", f"terminatingBelow_{sid}"]
                go = f"terminatingAbove_{sid} = FALSE and terminatingBelow_{sid} = FALSE"
                stop = f"terminatingAbove_{sid} = TRUE or terminatingBelow_{sid} = TRUE"
                below, above = flags[1], flags[0]
                for f in flags:
                    self.var(f, "BOOL", "FALSE")
            else:
                flags = [f"terminating_{sid}"]
                go, stop = f"terminating_{sid} = FALSE", f"terminating_{sid} = TRUE"
                below = above = flags[0]
                self.var(flags[0], "BOOL", "FALSE")
        else:
            if nested:
                flags = [f"continueAbove_{sid}", f"continueBelow_{sid}"]
                go = f"continueAbove_{sid} = TRUE and continueBelow_{sid} = TRUE"
                stop = f"continueAbove_{sid} = FALSE or continueBelow_{sid} = FALSE"
                below, above = flags[1], flags[0]
            else:
                flags = [f"continue_{sid}"]
                go, stop = f"continue_{sid} = TRUE", f"continue_{sid} = FALSE"
                below = above = flags[0]
            for f in flags:
                self.var(f, "BOOL", "TRUE")

        self.proc(f"GetNextMission_{sid}",
                  f"getNextMissionCall.{sid} -> getNextMissionRet.{sid}?nextM -> {cm} := nextM ; "
                  f"StartMission_{sid} ; if {go} => GetNextMission_{sid} [] {stop} => Skip fi")
        end = f"end_terminations.{sid}" if nested else f"end_termination.{sid}"
        null_branch = f"{cm} = nullMissionId => {below} := {'TRUE' if self.cur else 'FALSE'}"
        if self.cur:
            rst = f"RequestSequenceTermination_{sid}"
            if f"requestSequenceTermination.{sid}" in self.called:
                self.proc(rst,
                          f"(requestSequenceTermination.{sid} -> {below} := TRUE ; "
                          f"terminationPending.{cm}?pendingQ -> missionActive.{cm}?activeQ -> "
                          f"(if pendingQ = FALSE and activeQ = TRUE => requestTermination.{cm} -> Skip "
                          f"[] pendingQ = TRUE or activeQ = FALSE => Skip fi) ; {rst}) "
                          f"[] {end} -> Skip")
            else:
                self.proc(rst, f"{end} -> Skip")
            alpha.add(end)
            if nested:
                body = (f"(SignalTermination_{sid} [| {{{above}}} | {{{end}}} | {{{below}}} |] {rst}) "
                        f"[| {{{above}, {below}}} | {{{end}}} | {{}} |] "
                        f"(done_mission.{cm} -> {end} -> Skip)")
            else:
                body = f"{rst} [| {{{below}}} | {{{end}}} | {{}} |] (done_mission.{cm} -> {end} -> Skip)"
            self.proc(f"StartMission_{sid}",
                      f"if {cm} != nullMissionId => start_mission.{cm} -> initializeRet.{cm} -> ({body}) "
                      f"[] {null_branch} fi")
        else:
            if nested:
                alpha.add(end)
                body = (f"SignalTermination_{sid} [| {{{above}}} | {{{end}}} | {{{below}}} |] "
                        f"(done_mission.{cm}?contR -> {below} := contR ; {end} -> Skip)")
                started = f"start_mission.{cm} -> initializeRet.{cm} -> ({body})"
            else:
                started = f"start_mission.{cm} -> done_mission.{cm}?contR -> {below} := contR"
            self.proc(f"StartMission_{sid}",
                      f"if {cm} != nullMissionId => {started} [] {null_branch} fi")
        if nested:
            raise_flag = f"{above} := TRUE" if self.cur else f"{above} := FALSE"
            self.proc(f"SignalTermination_{sid}",
                      f"{end} -> Skip [] (signalTerminationCall.{sid} -> {raise_flag} ; "
                      f"requestTermination.{cm} -> signalTerminationRet.{sid} -> Skip) ; {end} -> Skip")
            alpha |= {f"{c}.{sid}" for c in ("start_schedulable", "done_schedulable", "signalTerminationCall",
                                              "signalTerminationRet", "cleanupSchedulableCall",
                                              "cleanupSchedulableRet")}
            tail = f"end_sequencer_app.{sid} -> done_schedulable.{sid} -> cleanupSchedulableCall.{sid} -> " \
                   f"cleanupSchedulableRet.{sid} -> Skip"
            if sid in self.escalating:
                pm = self.parent[sid]
                self.proc(f"Escalate_{sid}",
                          f"if {below} = FALSE and {above} = TRUE and {cm} != nullMissionId => "
                          f"requestTerminationCall.{pm}.FALSE -> Skip "
                          f"[] {below} = TRUE or {above} = FALSE or {cm} = nullMissionId => Skip fi")
                alpha.add(f"requestTerminationCall.{pm}")
                tail = f"Escalate_{sid} ; {tail}"
            self.proc(f"Sequencer_{sid}", f"start_schedulable.{sid} -> GetNextMission_{sid} ; {tail}")
        else:
            self.proc(f"Sequencer_{sid}", f"GetNextMission_{sid} ; end_sequencer_app.{sid} -> Skip")
        fw = _Comp(f"Sequencer_{sid}", frozenset(alpha), frozenset(self.vars_of(sid)))

        # application side: getNextMission walks the mission list, then yields null
        for i, m in enumerate([*ms, "nullMissionId"]):
            nxt = f"SequencerApp_{sid}_{i + 1}" if i < len(ms) else f"(end_sequencer_app.{sid} -> Skip)"
            self.proc(f"SequencerApp_{sid}_{i}",
                      f"getNextMissionCall.{sid} -> getNextMissionRet.{sid}.{m} -> {nxt} "
                      f"[] end_sequencer_app.{sid} -> Skip")
        app = _Comp(f"SequencerApp_{sid}_0",
                    frozenset({f"getNextMissionCall.{sid}", f"getNextMissionRet.{sid}", f"end_sequencer_app.{sid}"}))
        parts = [_par(fw, app)]
        parts += [self.mission(s, m) for m in s.missions]
        return _par_all(parts)

    def vars_of(self, sid: str) -> list[str]:
        names = [f"currentMission_{sid}", f"terminating_{sid}", f"terminatingAbove_{sid}",
                 f"terminatingBelow_{sid}", f"continue_{sid}", f"continueAbove_{sid}", f"continueBelow_{sid}"]
        declared = {line.split()[1] for line in self.vars}
        return [n for n in names if n in declared]

    # -- missions -------------------------------------------------------------

    def mission(self, s: Sequencer, m: Mission) -> _Comp:
        mid, sid = m.id, s.id
        ks = [k.id for k in m.schedulables]
        active, term, intr, keep = f"active_{mid}", f"terminating_{mid}", f"intr_{mid}", f"keep_{mid}"
        if self.cur:
            self.var(active, "BOOL", "FALSE")
        self.var(term, "BOOL", "FALSE")
        if mid in self.stopped:
            self.var(keep, "BOOL", "TRUE")
        if m.interrupt:
            self.var(intr, "BOOL", "FALSE")

        # framework core: initialise, execute, clean up
        bt, ad = f"begin_termination.{mid}", f"all_done.{mid}"
        on_begin = f"{bt} -> interruptAll.{mid} -> {intr} := TRUE" if m.interrupt else f"{bt} -> Skip"
        self.proc(f"Trigger_{mid}", f"[{term} = TRUE] & {on_begin} [] {ad} -> Skip")
        if ks:
            self.proc(f"Finished_{mid}", f"{bt} -> Skip [] {ad} -> Skip")
            runs = []
            for k in ks:
                self.proc(f"Run_{k}",
                          f"start_schedulable.{k} -> (done_schedulable.{k} -> Finished_{mid} "
                          f"[] {bt} -> (signalTerminationCall.{k} -> signalTerminationRet.{k} -> "
                          f"done_schedulable.{k} -> Skip [] done_schedulable.{k} -> Skip))")
                runs.append(f"Run_{k}")
            joined = runs[0]
            for r in runs[1:]:
                joined = f"({joined}) [| {{}} | {{{ad}, {bt}}} | {{}} |] {r}"
            iw = f"{{{intr}}}" if m.interrupt else "{}"
            self.proc(f"Execute_{mid}", f"Trigger_{mid} [| {iw} | {{{ad}, {bt}}} | {{}} |] ({joined})")
            self.proc(f"CleanupSchedulables_{mid}",
                      f"||| sched : {_set(ks)} @ cleanupSchedulableCall.sched -> cleanupSchedulableRet.sched -> Skip")
            cleanup_scheds = f"CleanupSchedulables_{mid} ; "
        else:
            self.proc(f"Execute_{mid}", f"Trigger_{mid}")
            cleanup_scheds = ""
        if self.cur:
            self.proc(f"Finish_{mid}", f"end_mission_app.{mid} -> done_mission.{mid} -> Skip")
            ret = f"cleanupMissionRet.{mid} -> Finish_{mid}"
        else:
            self.proc(f"Finish_{mid}", f"end_mission_app.{mid} -> done_mission.{mid}.contR -> Skip",
                      "(contR : BOOL)")
            ret = f"cleanupMissionRet.{mid}?contR -> Finish_{mid}(contR)"
        # only the current protocol's sequencer asks whether a mission is active
        set_active, clear_active = (f"{active} := TRUE ; ", f"{active} := FALSE ; ") if self.cur else ("", "")
        self.proc(f"Cleanup_{mid}", f"{clear_active}{cleanup_scheds}cleanupMissionCall.{mid} -> {ret}")
        self.proc(f"MissionCore_{mid}",
                  f"initializeCall.{mid} -> initializeRet.{mid} -> {set_active}Execute_{mid} ; Cleanup_{mid}")
        per_k = ("start_schedulable", "done_schedulable", "signalTerminationCall", "signalTerminationRet",
                 "cleanupSchedulableCall", "cleanupSchedulableRet")
        core_alpha = {f"{c}.{mid}" for c in ("initializeCall", "initializeRet", "begin_termination", "all_done",
                                              "cleanupMissionCall", "cleanupMissionRet", "end_mission_app",
                                              "done_mission")}
        core_alpha |= {f"{c}.{k}" for c in per_k for k in ks}
        if m.interrupt:
            core_alpha.add(f"interruptAll.{mid}")
        core_writes = ({active} if self.cur else set()) | ({intr} if m.interrupt else set())
        core = _Comp(f"MissionCore_{mid}", frozenset(core_alpha), frozenset(core_writes))

        # mission state: termination requests and (current protocol) queries
        branches = []
        if self.parent[sid] is not None or f"requestSequenceTermination.{sid}" in self.called:
            branches.append(f"requestTermination.{mid} -> {term} := TRUE ; MissionState_{mid}")
        state_writes = {term}
        if f"requestTerminationCall.{mid}" in self.called:
            if self.cur:
                branches.append(f"requestTerminationCall.{mid} -> {term} := TRUE ; MissionState_{mid}")
            elif mid in self.stopped:
                branches.append(f"requestTerminationCall.{mid}?c -> {term}, {keep} := TRUE, {keep} and c ; "
                                f"MissionState_{mid}")
                state_writes.add(keep)
            else:
                branches.append(f"requestTerminationCall.{mid}.TRUE -> {term} := TRUE ; MissionState_{mid}")
        state_alpha = {f"requestTermination.{mid}", f"requestTerminationCall.{mid}", f"end_sequencer_app.{sid}"}
        if self.cur:
            branches += [f"terminationPending.{mid}!{term} -> MissionState_{mid}",
                         f"missionActive.{mid}!{active} -> MissionState_{mid}"]
            state_alpha |= {f"terminationPending.{mid}", f"missionActive.{mid}"}
        branches.append(f"end_sequencer_app.{sid} -> Skip")
        self.proc(f"MissionState_{mid}", " [] ".join(branches))
        state = _Comp(f"MissionState_{mid}", frozenset(state_alpha), frozenset(state_writes))

        # application: initialize/cleanUp methods, buffers, schedulables
        app_alpha = {f"{c}.{mid}" for c in ("initializeCall", "initializeRet", "cleanupMissionCall",
                                             "cleanupMissionRet", "end_mission_app")}
        if self.cur:
            cret = f"cleanupMissionRet.{mid}"
        else:
            cret = f"cleanupMissionRet.{mid}!{keep}" if mid in self.stopped else f"cleanupMissionRet.{mid}.TRUE"
        self.proc(f"MissionApp_{mid}",
                  _chain([f"initializeCall.{mid}", f"initializeRet.{mid}", f"cleanupMissionCall.{mid}",
                          cret, f"end_mission_app.{mid}"]))
        comps = [core, state, _Comp(f"MissionApp_{mid}", frozenset(app_alpha))]
        for b in self._mission_buffers(m):
            full, val = f"full_{b}", f"val_{b}"
            self.var(full, "BOOL", "FALSE")
            self.var(val, "Data", "d0")
            self.proc(f"Buffer_{b}",
                      f"[{full} = FALSE] & put.{b}?item -> {full}, {val} := TRUE, item ; Buffer_{b} "
                      f"[] [{full} = TRUE] & get.{b}!{val} -> {full}, {val} := FALSE, d0 ; Buffer_{b} "
                      f"[] end_mission_app.{mid} -> Skip")
            comps.append(_Comp(f"Buffer_{b}", frozenset({f"put.{b}", f"get.{b}", f"end_mission_app.{mid}"}),
                               frozenset({full, val})))
        for k in m.schedulables:
            if isinstance(k, NestedSequencer):
                comps.append(self.sequencer(k.sequencer))
            elif isinstance(k, Thread):
                comps.append(self.thread(m, k))
            else:
                comps.append(self.handler(m, k))
        net = _par_all(comps)
        self.proc(f"MissionNet_{mid}", net.text)
        self.proc(f"MissionFW_{mid}",
                  f"start_mission.{mid} -> MissionNet_{mid} [] end_sequencer_app.{sid} -> Skip")
        return _Comp(f"MissionFW_{mid}", net.alpha | {f"start_mission.{mid}", f"end_sequencer_app.{sid}"},
                     net.writes)

    @staticmethod
    def _mission_buffers(m: Mission) -> list[str]:
        return [k.behaviour.buffer for k in m.schedulables
                if isinstance(k, Thread) and isinstance(k.behaviour, Producer)]

    # -- schedulables ---------------------------------------------------------

    def behaviour(self, m: Mission, kid: str, b, loop: str, done: str = "Skip") -> tuple[str, set[str], bool]:
        """Text of one behaviour body (ending in ``done``), its alphabet and whether it reads ``sig_<kid>``."""
        if isinstance(b, WorkLoop):
            work = [f"work.{kid}"] * b.steps
            if b.checks:
                return (f"if sig_{kid} = TRUE => {done} [] sig_{kid} = FALSE => {_chain(work, loop)} fi",
                        {f"work.{kid}"}, True)
            return _chain(work, done), {f"work.{kid}"}, False
        if isinstance(b, Terminator):
            evs = [f"work.{kid}"] * b.steps + self.request_events(m, b.request)
            return _chain(evs, done), set(map(_pfx, evs)), False
        if isinstance(b, Producer):
            evs = [f"put.{b.buffer}.{'d0' if i % 2 == 0 else 'd1'}" for i in range(b.items)]
            alpha = {f"put.{b.buffer}"}
            if b.request is not None:
                req = self.request_events(m, b.request)
                evs += req
                alpha |= set(map(_pfx, req))
            return _chain(evs, done), alpha, False
        assert isinstance(b, Consumer)
        text = f"get.{b.buffer}?item -> {loop}"
        alpha = {f"get.{b.buffer}"}
        if m.interrupt:
            text += f" [] [intr_{m.id} = TRUE] & interrupted.{kid} -> {done}"
            alpha.add(f"interrupted.{kid}")
        return text, alpha, False

    def _sched_alpha(self, kid: str) -> set[str]:
        return {f"{c}.{kid}" for c in ("start_schedulable", "done_schedulable", "signalTerminationCall",
                                        "signalTerminationRet", "cleanupSchedulableCall", "cleanupSchedulableRet")}

    @staticmethod
    def _retire(kid: str) -> str:
        return f"done_schedulable.{kid} -> cleanupSchedulableCall.{kid} -> cleanupSchedulableRet.{kid} -> Skip"

    def thread(self, m: Mission, k: Thread) -> _Comp:
        kid = k.id
        # the body hands over to the framework's retirement steps; the signal side just waits for it
        text, alpha, reads_sig = self.behaviour(m, kid, k.behaviour, f"Behaviour_{kid}",
                                                f"end_signal.{kid} -> {self._retire(kid)}")
        self.proc(f"Behaviour_{kid}", text)
        sig = f"sig_{kid}"
        if reads_sig:
            self.var(sig, "BOOL", "FALSE")
            on_signal = f"signalTerminationCall.{kid} -> {sig} := TRUE ; signalTerminationRet.{kid} -> end_signal.{kid} -> Skip"
        else:
            on_signal = f"signalTerminationCall.{kid} -> signalTerminationRet.{kid} -> end_signal.{kid} -> Skip"
        self.proc(f"Signal_{kid}", f"{on_signal} [] end_signal.{kid} -> Skip")
        sw = f"{{{sig}}}" if reads_sig else "{}"
        self.proc(f"ThreadFW_{kid}",
                  f"start_schedulable.{kid} -> (Behaviour_{kid} [| {{}} | {{end_signal.{kid}}} | {sw} |] Signal_{kid})")
        alpha = alpha | self._sched_alpha(kid) | {f"end_signal.{kid}"}
        return _Comp(f"ThreadFW_{kid}", frozenset(alpha), frozenset({sig} if reads_sig else ()))

    def handler(self, m: Mission, k: Handler) -> _Comp:
        kid = k.id
        loop, stop = f"HandlerLoop_{kid}", f"HandlerStop_{kid}"
        b = k.behaviour
        if isinstance(b, WorkLoop):
            b = WorkLoop(b.steps)  # a release runs to completion; termination is seen at idle
        text, alpha, _ = self.behaviour(m, kid, b, loop, stop if k.kind == "oneShot" else loop)
        self.proc(f"Release_{kid}", text)
        enabled, pending = f"enabled_{kid}", f"pending_{kid}"
        self.var(enabled, "BOOL", "TRUE")
        writes = {enabled}
        flips = f"{enabled} := FALSE"
        if k.kind == "aperiodic":
            self.var(pending, "BOOL", "FALSE")
            writes.add(pending)
            flips = f"{enabled}, {pending} := FALSE, FALSE"
            body = (f"[{enabled} = TRUE] & fire.{kid} -> {pending} := TRUE ; {loop} "
                    f"[] [{pending} = TRUE] & release.{kid} -> {pending} := FALSE ; Release_{kid} "
                    f"[] {stop}")
            alpha |= {f"fire.{kid}", f"release.{kid}"}
        else:
            body = f"release.{kid} -> Release_{kid} [] {stop}"
            alpha.add(f"release.{kid}")
        self.proc(loop, body)
        self.proc(stop, f"signalTerminationCall.{kid} -> {flips} ; signalTerminationRet.{kid} -> {self._retire(kid)}")
        self.proc(f"HandlerFW_{kid}", f"start_schedulable.{kid} -> {loop}")
        return _Comp(f"HandlerFW_{kid}", frozenset(alpha | self._sched_alpha(kid)), frozenset(writes))

    # -- document ---------------------------------------------------------------

    def render(self) -> tuple[str, frozenset]:
        net = self.sequencer(self.t.root)
        t = self.t
        seqs = [s.id for s in t.sequencers()]
        missions = [m.id for _, m in t.missions()]
        scheds = [k.id for _, k in t.schedulables()]
        buffers = t.buffers()
        lines = ["cmodel 1", f"# generated: topology {t.name}, {self.v} protocol", ""]
        lines.append(f"domain SeqID = {_set_ordered(seqs)}")
        lines.append(f"domain MissionID = {_set_ordered([*missions, 'nullMissionId'])}")
        if scheds:
            lines.append(f"domain SchedID = {_set_ordered(scheds)}")
        if buffers:
            lines.append(f"domain BufferID = {_set_ordered(buffers)}")
            lines.append("domain Data = {d0, d1}")
        lines.append("")
        payload = "MissionID.BOOL" if not self.cur else "MissionID"
        chans = [
            ("getNextMissionCall", "SeqID"), ("getNextMissionRet", "SeqID.MissionID"),
            ("start_mission", "MissionID"), ("initializeCall", "MissionID"), ("initializeRet", "MissionID"),
            ("done_mission", payload), ("end_mission_app", "MissionID"), ("end_sequencer_app", "SeqID"),
            ("requestTermination", "MissionID"), ("requestTerminationCall", payload),
            ("terminationPending", "MissionID.BOOL"), ("missionActive", "MissionID.BOOL"),
        ]
        if self.cur:
            chans.append(("requestSequenceTermination", "SeqID"))
        chans += [
            ("cleanupMissionCall", "MissionID"), ("cleanupMissionRet", payload),
            ("end_termination", "SeqID"), ("end_terminations", "SeqID"),
            ("begin_termination", "MissionID"), ("all_done", "MissionID"), ("interruptAll", "MissionID"),
        ]
        if scheds:
            chans += [(c, "SchedID") for c in (
                "start_schedulable", "done_schedulable", "signalTerminationCall", "signalTerminationRet",
                "cleanupSchedulableCall", "cleanupSchedulableRet", "end_signal", "work", "release", "fire",
                "interrupted")]
        if buffers:
            chans += [("put", "BufferID.Data"), ("get", "BufferID.Data")]
        lines += [f"channel {c} : {p}" for c, p in chans]
        lines.append("")
        lines += self.vars
        lines.append("")
        for name, body in self.procs:
            lines.append(f"process {name} =")
            lines.append(f"  {body}")
        lines.append("")
        lines.append(f"process Program = {net.text}")
        lines.append("main Program")
        return "\n".join(lines) + "\n", net.alpha


def _set_ordered(items) -> str:
    return "{" + ", ".join(items) + "}"


def generate_source(t: Topology, variant: str) -> tuple[str, frozenset]:
    if variant not in VARIANTS:
        raise ValueError(f"unknown protocol variant {variant!r}")
    validate(t, variant)
    return _Generator(t, variant).render()


def build_model(t: Topology, variant: str) -> ModelBundle:
    """Generate the process network of ``t`` under the given protocol variant."""
    text, alpha = generate_source(t, variant)
    defs = parse(ModelSource(text, f"<generated:{t.name}:{variant}>"))
    index: dict[str, list[str]] = {i: [] for i in t.node_ids()}
    for ev in sorted(alpha):
        parts = ev.split(".")
        if len(parts) > 1 and parts[1] in index:
            index[parts[1]].append(ev)
    declared = {c.name for c in defs.channels}
    return ModelBundle(
        defs=defs,
        state_channels=STATE_CHANNELS & declared,
        termination_channels=TERMINATION_CHANNELS & declared,
        event_index={k: tuple(v) for k, v in index.items()},
        variant=variant,
        topology=t.name,
        source=text,
    )
