"""Independent reference implementations the library is checked against.

Each oracle is a direct, unoptimised transcription of the rules it checks:
no memoisation, no read-set analysis, sets instead of ordered tuples.
"""
from __future__ import annotations

from collections import deque

from scjl2.calc import (
    OMEGA, SKIP, TAU, TICK, Assign, BinOp, Cond, Const, Event, ExtChoice, Guard, Hide, IntChoice,
    Interleave, IterInterleave, Name, Not, Omega, Par, Prefix, Ref, Seq, Skip, Stop,
)
from scjl2.calc.terms import subst
from scjl2.calc.semantics import Configuration


class OracleError(Exception):
    pass


class NaiveSemantics:
    def __init__(self, defs):
        self.defs = defs
        self.vars = [v.name for v in defs.variables]

    def domain(self, name):
        return self.defs.domain(name)

    def ev(self, e, store):
        if isinstance(e, Const):
            return e.value
        if isinstance(e, Name):
            return store[self.vars.index(e.ident)]
        if isinstance(e, Not):
            return not self.ev(e.operand, store)
        a, b = self.ev(e.left, store), self.ev(e.right, store)
        ops = {
            "and": lambda: a and b, "or": lambda: a or b,
            "=": lambda: type(a) is type(b) and a == b, "!=": lambda: not (type(a) is type(b) and a == b),
            "<": lambda: a < b, "<=": lambda: a <= b, ">": lambda: a > b, ">=": lambda: a >= b,
            "+": lambda: a + b, "-": lambda: a - b,
        }
        return ops[e.op]()

    def trans(self, t, store, depth=0) -> set:
        """Set of (event, next term, next store)."""
        if depth > 64:
            raise OracleError("unguarded recursion")
        if isinstance(t, (Stop, Omega)):
            return set()
        if isinstance(t, Skip):
            return {(TICK, OMEGA, store)}
        if isinstance(t, Prefix):
            combos = [((), {})]
            for part, dname in zip(t.parts, self.defs.channel(t.channel).params):
                nxt = []
                for args, env in combos:
                    if part.kind == "?":
                        for v in self.domain(dname).members:
                            nxt.append((args + (v,), {**env, part.binder: Const(v)}))
                    else:
                        nxt.append((args + (self.ev(subst_all(part.expr, env), store),), env))
                combos = nxt
            return {(Event(t.channel, args), subst(t.body, env), store) for args, env in combos}
        if isinstance(t, ExtChoice):
            out = set()
            for e, l2, s2 in self.trans(t.left, store, depth):
                out.add((e, ExtChoice(l2, t.right), s2) if e == TAU else (e, l2, s2))
            for e, r2, s2 in self.trans(t.right, store, depth):
                out.add((e, ExtChoice(t.left, r2), s2) if e == TAU else (e, r2, s2))
            return out
        if isinstance(t, IntChoice):
            return {(TAU, t.left, store), (TAU, t.right, store)}
        if isinstance(t, Seq):
            out = set()
            for e, l2, s2 in self.trans(t.left, store, depth):
                out.add((TAU, t.right, s2) if e == TICK else (e, Seq(l2, t.right), s2))
            return out
        if isinstance(t, (Par, Interleave)):
            sync = t.sync if isinstance(t, Par) else ()

            def rebuild(l, r):
                if isinstance(l, Omega) and isinstance(r, Omega):
                    return SKIP
                if isinstance(t, Par):
                    return Par(l, t.ns_left, t.sync, t.ns_right, r)
                return Interleave(l, t.ns_left, t.ns_right, r)

            ls, rs = self.trans(t.left, store, depth), self.trans(t.right, store, depth)
            out = set()
            for e, l2, s2 in ls:
                if e != TICK and e not in sync:
                    out.add((e, rebuild(l2, t.right), s2))
            for e, r2, s2 in rs:
                if e != TICK and e not in sync:
                    out.add((e, rebuild(t.left, r2), s2))
            for e, l2, _ in ls:
                for f, r2, _ in rs:
                    if e == f and e != TICK and e in sync:
                        out.add((e, rebuild(l2, r2), store))
            if any(e == TICK for e, _, _ in ls) and any(e == TICK for e, _, _ in rs):
                out.add((TICK, OMEGA, store))
            return out
        if isinstance(t, Hide):
            out = set()
            for e, b2, s2 in self.trans(t.body, store, depth):
                if e == TICK:
                    out.add((TICK, OMEGA, s2))
                else:
                    nb = OMEGA if isinstance(b2, Omega) else Hide(b2, t.hidden)
                    out.add((TAU if e in t.hidden else e, nb, s2))
            return out
        if isinstance(t, Guard):
            return self.trans(t.body, store, depth) if self.ev(t.pred, store) else set()
        if isinstance(t, Cond):
            live = [b for p, b in t.branches if self.ev(p, store)]
            if not live:
                raise OracleError("no enabled branch")
            return set().union(*(self.trans(b, store, depth) for b in live))
        if isinstance(t, Assign):
            s = list(store)
            for n, e in zip(t.names, t.exprs):
                s[self.vars.index(n)] = self.ev(e, store)
            return {(TAU, SKIP, tuple(s))}
        if isinstance(t, Ref):
            p = self.defs.process(t.name)
            env = {n: Const(self.ev(a, store)) for (n, _), a in zip(p.params, t.args)}
            return self.trans(subst(p.body, env), store, depth + 1)
        if isinstance(t, IterInterleave):
            bodies = [subst(t.body, {t.binder: Const(self.ev(v, store))}) for v in t.values]
            if not bodies:
                return self.trans(SKIP, store, depth + 1)
            u = bodies[0]
            for b in bodies[1:]:
                u = Interleave(u, (), (), b)
            return self.trans(u, store, depth + 1)
        raise OracleError(f"unsupported term {t!r}")


def subst_all(e, env):
    if not env:
        return e
    if isinstance(e, Name):
        return env.get(e.ident, e)
    if isinstance(e, Not):
        return Not(subst_all(e.operand, env))
    if isinstance(e, BinOp):
        return BinOp(e.op, subst_all(e.left, env), subst_all(e.right, env))
    return e


def naive_lts(defs, limit: int = 10_000):
    """(initial, states, edges) with edges as (source, event, target) configuration triples."""
    sem = NaiveSemantics(defs)
    c0 = Configuration(Ref(defs.main), tuple(v.initial for v in defs.variables))
    states = {c0}
    edges = set()
    todo = deque([c0])
    while todo:
        c = todo.popleft()
        for e, t, s in sem.trans(c.term, c.store):
            n = Configuration(t, s)
            edges.add((c, e, n))
            if n not in states:
                if len(states) >= limit:
                    raise OracleError("state limit")
                states.add(n)
                todo.append(n)
    return c0, states, edges


def product(lts_l, lts_r, sync):
    """Synchronised product of two operand LTSs given as (initial, edges) over opaque states.

    Shared (sync) events move both sides, others interleave, and the
    product terminates only when both operands can.  Ticked operands are
    not advanced on their own.
    """
    (l0, le), (r0, re) = lts_l, lts_r
    succ = lambda edges, s: [(e, t) for (a, e, t) in edges if a == s]  # noqa: E731
    init = (l0, r0)
    states, edges, todo = {init}, set(), deque([init])
    while todo:
        st = todo.popleft()
        if st == "Ω":
            continue
        l, r = st
        ls, rs = succ(le, l), succ(re, r)
        nxt = []
        nxt += [(e, (l2, r)) for e, l2 in ls if e != TICK and e not in sync]
        nxt += [(e, (l, r2)) for e, r2 in rs if e != TICK and e not in sync]
        nxt += [(e, (l2, r2)) for e, l2 in ls for f, r2 in rs if e == f and e != TICK and e in sync]
        if any(e == TICK for e, _ in ls) and any(e == TICK for e, _ in rs):
            nxt.append((TICK, "Ω"))
        for e, n in nxt:
            edges.add((st, e, n))
            if n not in states:
                states.add(n)
                todo.append(n)
    return init, states, edges


def tau_cycle_states(edges, hidden) -> set:
    """States lying on a cycle of internal transitions, by reachability from each state."""
    tau = {}
    for a, e, b in edges:
        if e == TAU or e in hidden:
            tau.setdefault(a, set()).add(b)
    on_cycle = set()
    for s in tau:
        seen, todo = set(), list(tau[s])
        while todo:
            x = todo.pop()
            if x == s:
                on_cycle.add(s)
                break
            if x not in seen:
                seen.add(x)
                todo.extend(tau.get(x, ()))
    return on_cycle


def sort_and_assign(servers, tasks) -> dict:
    """Reference transposition: sort each server's members by rank and count up from the base."""
    out = {k.id: k.priority for k in tasks if k.server is None}
    for s in servers:
        members = sorted((k for k in tasks if k.server == s.id), key=lambda k: k.order_index)
        p = s.base_priority
        for k in members:
            out[k.id] = p
            p += 1
    return out


def timer_fires(duration: int, deadline: int) -> bool:
    """Closed form for a sequencer timer: the handler runs only if the lifecycle overruns."""
    return duration > deadline
