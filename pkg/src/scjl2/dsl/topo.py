"""Reader and writer for ``.topo`` topology files (header ``topo 1``).

Grammar::

    document    := "topo" "1" sequencer
    sequencer   := "sequencer" ID "{" mission* "}"
    mission     := "mission" ID ["(" "interrupt" "=" bool ")"] "{" member* "}"
    member      := "thread" ID ":" behaviour
                 | "handler" ID ("periodic" | "aperiodic" | "oneShot") ":" behaviour
                 | sequencer
    behaviour   := NAME "(" [ID "=" value ("," ID "=" value)*] ")"

Behaviours: ``workloop(steps, checks)``, ``terminator(target, steps, escalate)``,
``producer(buffer, items, terminate, escalate)`` and ``consumer(buffer)``.
A ``target``/``terminate`` value is ``mission`` or an enclosing sequencer id.

The same tree is accepted as JSON (``{"topo": 1, "root": {...}}``); see
:func:`topology_to_json`.
"""
from __future__ import annotations

import json

from ..scjmodel.topology import (
    Consumer, Handler, Mission, NestedSequencer, Producer, Request, Sequencer,
    Terminator, Thread, Topology, TopologyError, WorkLoop, validate,
)
from .cmodel import ModelSource
from .lexer import DslError, ParseError, TokenStream, tokenize

_BEHAVIOUR_KEYS = {
    "workloop": ("steps", "checks"),
    "terminator": ("target", "steps", "escalate"),
    "producer": ("buffer", "items", "terminate", "escalate"),
    "consumer": ("buffer",),
}


class TopologyParseError(DslError):
    pass


def _behaviour(kind: str, args: dict):
    def req(key):
        target = args.get(key)
        if target is None:
            if args.get("escalate") is not None:
                raise ValueError("escalate needs a termination target")
            return None
        return Request(target, args.get("escalate"))

    if kind == "workloop":
        return WorkLoop(args.get("steps", 1), args.get("checks", False))
    if kind == "terminator":
        return Terminator(Request(args.get("target", "mission"), args.get("escalate")), args.get("steps", 0))
    if kind == "producer":
        return Producer(args["buffer"], args.get("items", 2), req("terminate"))
    if kind == "consumer":
        return Consumer(args["buffer"])
    raise ValueError(f"unknown behaviour {kind!r}")


def _behaviour_args(b) -> tuple[str, dict]:
    if isinstance(b, WorkLoop):
        return "workloop", {"steps": b.steps, "checks": b.checks}
    if isinstance(b, Terminator):
        d = {"target": b.request.target, "steps": b.steps}
        if b.request.escalate:
            d["escalate"] = b.request.escalate
        return "terminator", d
    if isinstance(b, Producer):
        d = {"buffer": b.buffer, "items": b.items}
        if b.request:
            d["terminate"] = b.request.target
            if b.request.escalate:
                d["escalate"] = b.request.escalate
        return "producer", d
    return "consumer", {"buffer": b.buffer}


class _TopoParser:
    def __init__(self, src: ModelSource):
        self.origin = src.origin
        self.ts = TokenStream(tokenize(src.text, src.origin), src.origin)
        self.spans: dict[str, object] = {}

    def claim(self, tok):
        self.spans[tok.text] = tok

    def document(self) -> Topology:
        ts = self.ts
        ts.expect("topo")
        if ts.cur.text != "1":
            ts.fail("unsupported topo version (expected 1)")
        ts.advance()
        root = self.sequencer()
        if ts.cur.kind != "eof":
            ts.fail(f"expected end of input, found {ts.describe()}")
        return Topology(root)

    def sequencer(self) -> Sequencer:
        ts = self.ts
        ts.expect("sequencer")
        tok = ts.ident("sequencer id")
        self.claim(tok)
        ts.expect("{")
        missions = []
        while ts.at("mission"):
            missions.append(self.mission())
        ts.expect("}")
        return Sequencer(tok.text, tuple(missions))

    def mission(self) -> Mission:
        ts = self.ts
        ts.expect("mission")
        tok = ts.ident("mission id")
        self.claim(tok)
        interrupt = False
        if ts.accept("("):
            ts.expect("interrupt")
            ts.expect("=")
            interrupt = self.value()
            if not isinstance(interrupt, bool):
                ts.fail("interrupt expects true or false")
            ts.expect(")")
        ts.expect("{")
        members = []
        while not ts.at("}"):
            if ts.at("sequencer"):
                members.append(NestedSequencer(self.sequencer()))
            elif ts.accept("thread"):
                k = ts.ident("thread id")
                self.claim(k)
                ts.expect(":")
                members.append(Thread(k.text, self.behaviour()))
            elif ts.accept("handler"):
                k = ts.ident("handler id")
                self.claim(k)
                kind = ts.ident("handler kind (periodic, aperiodic or oneShot)")
                ts.expect(":")
                members.append(Handler(k.text, kind.text, self.behaviour()))
            else:
                ts.fail(f"expected thread, handler, sequencer or '}}', found {ts.describe()}")
            ts.accept(";")
        ts.expect("}")
        return Mission(tok.text, tuple(members), interrupt)

    def behaviour(self):
        ts = self.ts
        name = ts.ident("behaviour")
        if name.text not in _BEHAVIOUR_KEYS:
            ts.fail(f"unknown behaviour {name.text!r}", name)
        args: dict = {}
        ts.expect("(")
        while not ts.at(")"):
            key = ts.ident("argument name")
            if key.text not in _BEHAVIOUR_KEYS[name.text]:
                ts.fail(f"{name.text}: unknown argument {key.text!r}", key)
            if key.text in args:
                ts.fail(f"{name.text}: repeated argument {key.text!r}", key)
            ts.expect("=")
            args[key.text] = self.value()
            if key.text in ("buffer",):
                self.spans.setdefault(args[key.text], key)
            if not ts.accept(","):
                break
        ts.expect(")")
        try:
            return _behaviour(name.text, args)
        except (KeyError, ValueError) as e:
            ts.fail(f"{name.text}: {e.args[0] if isinstance(e, ValueError) else 'missing ' + str(e)}", name)

    def value(self):
        ts = self.ts
        if ts.accept("true"):
            return True
        if ts.accept("false"):
            return False
        if ts.cur.kind == "int":
            return ts.integer()
        return ts.ident("value").text


def parse_topology(src: ModelSource | str) -> Topology:
    """Parse and validate a ``.topo`` document (text or JSON)."""
    if isinstance(src, str):
        src = ModelSource(src, "<input>")
    if src.text.lstrip().startswith("{"):
        try:
            return validate(topology_from_json(json.loads(src.text)))
        except json.JSONDecodeError as e:
            raise TopologyParseError(e.msg, e.lineno, e.colno, src.origin) from None
        except (TopologyError, KeyError, TypeError, ValueError) as e:
            raise TopologyParseError(str(e), 1, 1, src.origin) from None
    p = _TopoParser(src)
    t = p.document()
    try:
        return validate(t)
    except TopologyError as e:
        tok = p.spans.get(e.node)
        line, col = (tok.line, tok.col) if tok is not None else (1, 1)
        raise TopologyParseError(str(e), line, col, src.origin) from None


def _fmt_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def format_topology(t: Topology) -> str:
    lines = ["topo 1"]

    def seq(s: Sequencer, ind: str):
        lines.append(f"{ind}sequencer {s.id} {{")
        for m in s.missions:
            flag = " (interrupt=true)" if m.interrupt else ""
            lines.append(f"{ind}  mission {m.id}{flag} {{")
            for k in m.schedulables:
                if isinstance(k, NestedSequencer):
                    seq(k.sequencer, ind + "    ")
                    continue
                name, args = _behaviour_args(k.behaviour)
                beh = f"{name}(" + ", ".join(f"{a}={_fmt_value(v)}" for a, v in args.items()) + ")"
                head = f"thread {k.id}" if isinstance(k, Thread) else f"handler {k.id} {k.kind}"
                lines.append(f"{ind}    {head} : {beh}")
            lines.append(f"{ind}  }}")
        lines.append(f"{ind}}}")

    seq(t.root, "")
    return "\n".join(lines) + "\n"


def topology_to_json(t: Topology) -> dict:
    def seq(s: Sequencer) -> dict:
        return {"id": s.id, "missions": [mission(m) for m in s.missions]}

    def mission(m: Mission) -> dict:
        out = []
        for k in m.schedulables:
            if isinstance(k, NestedSequencer):
                out.append({"sequencer": seq(k.sequencer)})
                continue
            name, args = _behaviour_args(k.behaviour)
            entry = {"thread": k.id} if isinstance(k, Thread) else {"handler": k.id, "kind": k.kind}
            entry["behaviour"] = {"type": name, **args}
            out.append(entry)
        return {"id": m.id, "interrupt": m.interrupt, "schedulables": out}

    return {"topo": 1, "root": seq(t.root)}


def topology_from_json(doc: dict) -> Topology:
    if doc.get("topo") != 1:
        raise ValueError("unsupported topo version (expected 1)")

    def seq(d) -> Sequencer:
        return Sequencer(d["id"], tuple(mission(m) for m in d.get("missions", [])))

    def mission(d) -> Mission:
        ks = []
        for k in d.get("schedulables", []):
            if "sequencer" in k:
                ks.append(NestedSequencer(seq(k["sequencer"])))
                continue
            b = dict(k["behaviour"])
            kind = b.pop("type")
            if kind not in _BEHAVIOUR_KEYS or set(b) - set(_BEHAVIOUR_KEYS[kind]):
                raise ValueError(f"invalid behaviour {k['behaviour']!r}")
            beh = _behaviour(kind, b)
            ks.append(Thread(k["thread"], beh) if "thread" in k else Handler(k["handler"], k["kind"], beh))
        return Mission(d["id"], tuple(ks), bool(d.get("interrupt", False)))

    return Topology(seq(doc["root"]))


__all__ = ["parse_topology", "format_topology", "topology_to_json", "topology_from_json",
           "TopologyParseError", "ParseError"]
