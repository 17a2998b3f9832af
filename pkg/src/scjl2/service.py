"""Command implementations shared by the HTTP API and the in-process CLI.

Every operation takes a request model and returns an :class:`Outcome`.  Bad
input raises :class:`InputError`, which both front ends map to exit code 3.
"""
from __future__ import annotations

from pathlib import Path

from . import __version__, hsched
from .calc.terms import CalcError
from .dsl import DslError, ModelSource, format as format_cmodel, parse as parse_cmodel
from .dsl.topo import parse_topology
from .explore import (
    EXISTS_INTERLEAVING, FAILS, WITNESS_FOUND, ExploreLimits, OrderQuery, QueryError, bundle_of,
    check_order, compare_protocols, explore, parallel_termination_query, protocol_bundles, trace_text,
)
from .models import (
    CheckRequest, CompareRequest, EmitRequest, Limits, OrderRequest, Outcome, SimRequest, Source,
)
from .scjmodel import BUILTINS, Topology, TopologyError, build_model, builtin_topology

OK, VIOLATED, TRUNCATED, INPUT_ERROR = 0, 1, 2, 3


class InputError(ValueError):
    pass


def source_from_arg(arg: str, builtins=BUILTINS) -> Source:
    """A CLI argument names a file if one exists at that path, a builtin otherwise."""
    p = Path(arg)
    if p.is_file():
        try:
            return Source(text=p.read_text(), origin=str(p))
        except (OSError, UnicodeDecodeError) as e:
            raise InputError(f"{arg}: cannot read: {e}") from None
    name = p.name.removesuffix(p.suffix) if p.suffix in (".topo", ".json") else arg
    if name not in builtins:
        raise InputError(f"{arg}: no such file or builtin (builtins: {', '.join(builtins)})")
    return Source(builtin=name)


def _topology(src: Source) -> Topology:
    try:
        if src.builtin is not None:
            return builtin_topology(src.builtin)
        t = parse_topology(ModelSource(src.text, src.origin))
        return Topology(t.root, Path(src.origin).stem if src.origin != "<input>" else t.name)
    except (DslError, TopologyError) as e:
        raise InputError(str(e)) from None


def _limits(lim: Limits) -> ExploreLimits:
    try:
        kw = {} if lim.max_states is None else {"max_states": lim.max_states}
        return ExploreLimits(max_depth=lim.max_depth, hide=frozenset(h for h in lim.hide if h), **kw)
    except ValueError as e:
        raise InputError(str(e)) from None


def _bundle(t: Topology, protocol: str):
    try:
        return protocol_bundles(t)[1] if protocol == "proposed" else build_model(t, "current")
    except (TopologyError, DslError) as e:
        raise InputError(str(e)) from None


def _check_hidden(b, lim: ExploreLimits):
    declared = {c.name for c in b.defs.channels}
    unknown = sorted({h.split(".")[0] for h in lim.hide} - declared)
    if unknown:
        raise InputError(f"--hide names undeclared channel(s): {', '.join(unknown)}")


def _exploration_text(r) -> str:
    lines = [f"{r.model} [{r.variant or 'model'}]: {r.states} states, {r.transitions} transitions"
             + (" (TRUNCATED)" if r.truncated else "")]
    lines.append(f"  deadlocks: {len(r.deadlocks)}  divergences: {len(r.divergences)}  "
                 f"terminated states: {r.terminated}")
    for t in r.deadlocks:
        lines.append(f"  deadlock after: {trace_text(t, elide_tau=True)}")
    for d in r.divergences:
        lines.append(f"  divergence: {trace_text(d.stem, True)} then loop {trace_text(d.cycle)}")
    return "\n".join(lines) + "\n"


def check(req: CheckRequest) -> Outcome:
    lim = _limits(req.limits)
    if req.model is not None:
        src = req.model
        if src.text is None:
            raise InputError("model input must be .cmodel text, not a builtin name")
        try:
            b = bundle_of(parse_cmodel(ModelSource(src.text, src.origin)), Path(src.origin).stem)
        except DslError as e:
            raise InputError(str(e)) from None
    else:
        b = _bundle(_topology(req.topology), req.protocol)
    _check_hidden(b, lim)
    try:
        r = explore(b, lim)
    except CalcError as e:
        # ill-formed models only show up once the offending term is stepped
        raise InputError(f"{b.topology}: {e}") from None
    code = VIOLATED if not r.ok else TRUNCATED if r.truncated else OK
    return Outcome(exit_code=code, report=r.to_json(), text=_exploration_text(r))


def compare(req: CompareRequest) -> Outcome:
    t = _topology(req.topology)
    lim = _limits(req.limits)
    try:
        c = compare_protocols(t, lim)
    except (TopologyError, DslError) as e:
        raise InputError(str(e)) from None
    if not (c.current.ok and c.proposed.ok):
        code = VIOLATED
    elif c.inconclusive:
        code = TRUNCATED
    else:
        code = OK if c.proposed.states < c.current.states else VIOLATED
    text = (_exploration_text(c.current) + _exploration_text(c.proposed)
            + f"reduction: {c.reduction:.4f}" + (" (inconclusive)" if c.inconclusive else "") + "\n")
    return Outcome(exit_code=code, report=c.to_json(), text=text)


def order(req: OrderRequest) -> Outcome:
    t = _topology(req.topology)
    b = _bundle(t, req.protocol)
    lim = _limits(req.limits)
    try:
        if req.parallel_termination is not None:
            q = parallel_termination_query(t, req.parallel_termination or None)
        elif req.query.mode == EXISTS_INTERLEAVING:
            q = OrderQuery.exists_interleaving(req.query.first, [tuple(g) for g in req.query.groups])
        else:
            q = OrderQuery.forall_precedes(req.query.first, req.query.second)
        res = check_order(b, q, lim)
    except (QueryError, ValueError) as e:
        raise InputError(str(e)) from None
    definitive = res.verdict in (FAILS, WITNESS_FOUND) or not res.truncated
    if not definitive:
        code = TRUNCATED
    else:
        code = OK if res.passed == (req.expect == "pass") else VIOLATED
    report = {"model": b.topology, "variant": b.variant, "tool": f"scjl2 {__version__}",
              "query": q.to_json(), **res.to_json()}
    text = f"{q.mode} on {b.topology} [{b.variant}]: {res.verdict} ({res.states} states)"
    text += " (TRUNCATED)\n" if res.truncated else "\n"
    if res.trace is not None:
        text += f"  witness: {trace_text(res.trace, elide_tau=True)}\n"
    return Outcome(exit_code=code, report=report, text=text)


def sim(req: SimRequest, gantt_width: int = 100) -> Outcome:
    src = req.scenario
    try:
        text = hsched.builtin_scenario(src.builtin) if src.builtin is not None else src.text
        system, horizon = hsched.load_scenario(text)
        trace = hsched.simulate(system, req.horizon or horizon)
    except hsched.SchedError as e:
        raise InputError(f"{src.builtin or src.origin}: {e}") from None
    code = OK if sim_invariants_hold(trace) else VIOLATED
    return Outcome(exit_code=code, report=trace.to_json(), text=trace.gantt(gantt_width))


def sim_invariants_hold(trace: hsched.SimTrace) -> bool:
    """Budget conservation in every full window and no deadline misses."""
    for s in trace.servers.values():
        for w in range(s.start, trace.horizon, s.replenishment_period):
            if hsched.window_usage(trace, s.id, w) > s.budget:
                return False
    return not trace.events_of("deadlineMiss")


def emit_model(req: EmitRequest) -> Outcome:
    t = _topology(req.topology)
    b = _bundle(t, req.protocol)
    text = format_cmodel(b.defs)
    return Outcome(exit_code=OK, report={"topology": t.name, "variant": req.protocol, "text": text},
                   text=text)


def scenario_names() -> tuple[str, ...]:
    from importlib.resources import files
    return tuple(sorted(p.name.removesuffix(".json") for p in (files("scjl2") / "scenarios").iterdir()
                        if p.name.endswith(".json")))
