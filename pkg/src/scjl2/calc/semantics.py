"""Small-step labelled operational semantics over (term, store) configurations."""
from __future__ import annotations

from dataclasses import dataclass

from .terms import (
    BOOL, OMEGA, SKIP, TAU, TICK, Assign, Atom, BinOp, CalcError, Cond, Const,
    DomainViolation, Event, ExtChoice, Guard, Hide, IntChoice, Interleave,
    IterInterleave, ModelDefs, Name, NameSetViolation, NonProductiveRecursion,
    Not, Omega, Par, Prefix, Ref, Seq, Skip, Stop, Term, UnboundedInput,
    UnknownProcess, children, expr_names, mk_hide, mk_interleave, mk_par,
    subst, subst_expr,
)

UNFOLD_BUDGET = 64
_CACHE_LIMIT = 1_500_000


@dataclass(frozen=True)
class Configuration:
    term: Term
    store: tuple

    def store_map(self, defs: ModelDefs) -> dict:
        return {v.name: val for v, val in zip(defs.variables, self.store)}


class Engine:
    """Stepping context for one model.

    Transitions of subterms are memoised on the subterm plus the values of
    the store variables that subterm can read while taking one step, so the
    cache stays valid across configurations that differ elsewhere.
    """

    def __init__(self, defs: ModelDefs, unfold_budget: int = UNFOLD_BUDGET):
        self.defs = defs
        self.unfold_budget = unfold_budget
        self.var_index = {v.name: i for i, v in enumerate(defs.variables)}
        self.var_domain = [defs.domain(v.domain) for v in defs.variables]
        self.procs = {p.name: p for p in defs.processes}
        self.chan_params = {c.name: tuple(defs.domain(d) for d in c.params) for c in defs.channels}
        self._unfold: dict = {}
        self._reads: dict = {}
        self._preads: dict | None = None
        self._ns: dict = {}
        self._cache: dict = {}

    # -- public --------------------------------------------------------

    def initial(self, main: str | None = None) -> Configuration:
        name = main or self.defs.main
        if name not in self.procs:
            raise UnknownProcess(name)
        store = []
        for v, dom in zip(self.defs.variables, self.var_domain):
            if v.initial not in dom:
                raise DomainViolation(f"initial value {v.initial!r} of {v.name} not in {dom.name}")
            store.append(v.initial)
        return Configuration(Ref(name), tuple(store))

    def step(self, c: Configuration) -> tuple:
        """All transitions of ``c`` as ``(Event, Configuration)`` pairs, deduplicated, in a fixed order."""
        out = []
        seen = set()
        for ev, t, delta in self._step(c.term, c.store, 0):
            store = c.store
            if delta:
                s = list(store)
                for i, v in delta:
                    s[i] = v
                store = tuple(s)
            key = (ev, t, store)
            if key not in seen:
                seen.add(key)
                out.append((ev, Configuration(t, store)))
        return tuple(out)

    def evaluate(self, e, store: tuple) -> Atom:
        if isinstance(e, Const):
            return e.value
        if isinstance(e, Name):
            idx = self.var_index.get(e.ident)
            if idx is None:
                raise CalcError(f"unbound name {e.ident!r}")
            return store[idx]
        if isinstance(e, Not):
            return not self._bool(self.evaluate(e.operand, store))
        op = e.op
        if op == "and":
            return self._bool(self.evaluate(e.left, store)) and self._bool(self.evaluate(e.right, store))
        if op == "or":
            return self._bool(self.evaluate(e.left, store)) or self._bool(self.evaluate(e.right, store))
        a = self.evaluate(e.left, store)
        b = self.evaluate(e.right, store)
        if op == "=":
            return type(a) is type(b) and a == b
        if op == "!=":
            return not (type(a) is type(b) and a == b)
        if not (type(a) is int and type(b) is int):
            raise CalcError(f"arithmetic on non-integers: {a!r} {op} {b!r}")
        return {"<": a < b, "<=": a <= b, ">": a > b, ">=": a >= b, "+": a + b, "-": a - b}[op]

    @staticmethod
    def _bool(v) -> bool:
        if v is not True and v is not False:
            raise CalcError(f"expected boolean, got {v!r}")
        return v

    # -- internals -----------------------------------------------------

    def _ns_indices(self, names: tuple) -> frozenset:
        r = self._ns.get(names)
        if r is None:
            r = frozenset(self.var_index[n] for n in names)
            self._ns[names] = r
        return r

    def unfold(self, t: Term, store: tuple) -> Term:
        """One unfolding of a Ref or IterInterleave node."""
        if isinstance(t, Ref):
            args = tuple(self.evaluate(a, store) for a in t.args)
            key = (t.name, args)
            r = self._unfold.get(key)
            if r is None:
                p = self.procs.get(t.name)
                if p is None:
                    raise UnknownProcess(t.name)
                if len(p.params) != len(args):
                    raise CalcError(f"{t.name} expects {len(p.params)} arguments, got {len(args)}")
                env = {}
                for (pname, dname), v in zip(p.params, args):
                    if v not in self.defs.domain(dname):
                        raise DomainViolation(f"argument {v!r} of {t.name} not in {dname}")
                    env[pname] = Const(v)
                r = subst(p.body, env)
                self._unfold[key] = r
            return r
        values = [self.evaluate(v, store) for v in t.values]
        bodies = [subst(t.body, {t.binder: Const(v)}) for v in values]
        if not bodies:
            return SKIP
        r = bodies[0]
        for b in bodies[1:]:
            r = Interleave(r, (), (), b)
        return r

    def reads(self, t: Term) -> tuple:
        """Store indices a single step of ``t`` may consult."""
        r = self._reads.get(t)
        if r is None:
            r = tuple(sorted(self._reads_of(t)))
            self._reads[t] = r
        return r

    def _expr_reads(self, e) -> frozenset:
        return frozenset(self.var_index[n] for n in expr_names(e) if n in self.var_index)

    def _proc_reads(self) -> dict:
        """Per-definition read sets, closed under references (a fixpoint)."""
        if self._preads is None:
            table = {name: frozenset() for name in self.procs}
            changed = True
            while changed:
                changed = False
                for name, p in self.procs.items():
                    r = self._reads_shallow(p.body, table)
                    if r != table[name]:
                        table[name] = r
                        changed = True
            self._preads = table
        return self._preads

    def _reads_of(self, t: Term) -> frozenset:
        return self._reads_shallow(t, self._proc_reads())

    def _reads_shallow(self, t: Term, table: dict) -> frozenset:
        if isinstance(t, (Skip, Stop, Omega, IntChoice)):
            return frozenset()
        if isinstance(t, Prefix):
            out = frozenset()
            for p in t.parts:
                if p.expr is not None:
                    out |= self._expr_reads(p.expr)
            return out
        if isinstance(t, Assign):
            out = frozenset()
            for e in t.exprs:
                out |= self._expr_reads(e)
            return out
        if isinstance(t, Seq):
            return self._reads_shallow(t.left, table)
        if isinstance(t, Guard):
            return self._expr_reads(t.pred) | self._reads_shallow(t.body, table)
        if isinstance(t, Cond):
            out = frozenset()
            for p, b in t.branches:
                out |= self._expr_reads(p) | self._reads_shallow(b, table)
            return out
        if isinstance(t, (ExtChoice, Par, Interleave)):
            return self._sub_reads(t.left, table) | self._sub_reads(t.right, table)
        if isinstance(t, Hide):
            return self._sub_reads(t.body, table)
        if isinstance(t, IterInterleave):
            out = frozenset()
            for v in t.values:
                out |= self._expr_reads(v)
            return out | self._reads_shallow(t.body, table)
        if isinstance(t, Ref):
            out = frozenset()
            for a in t.args:
                out |= self._expr_reads(a)
            if t.name not in table:
                raise UnknownProcess(t.name)
            return out | table[t.name]
        raise TypeError(t)

    def _sub_reads(self, t: Term, table: dict) -> frozenset:
        # memoised only once the per-definition table is final
        if table is not self._preads:
            return self._reads_shallow(t, table)
        return frozenset(self.reads(t))

    def _step(self, t: Term, store: tuple, depth: int) -> tuple:
        if t is OMEGA or isinstance(t, Stop):
            return ()
        if isinstance(t, Skip):
            return ((TICK, OMEGA, ()),)
        key = (t, tuple(store[i] for i in self.reads(t)))
        r = self._cache.get(key)
        if r is None:
            r = self._rule(t, store, depth)
            if len(self._cache) > _CACHE_LIMIT:
                self._cache.clear()
            self._cache[key] = r
        return r

    def _rule(self, t: Term, store: tuple, depth: int) -> tuple:
        if isinstance(t, Prefix):
            return self._prefix(t, store)
        if isinstance(t, Par):
            return self._par(t.left, t.ns_left, t.sync, t.ns_right, t.right, store, depth,
                             lambda l, r: mk_par(l, t.ns_left, t.sync, t.ns_right, r))
        if isinstance(t, Interleave):
            return self._par(t.left, t.ns_left, None, t.ns_right, t.right, store, depth,
                             lambda l, r: mk_interleave(l, t.ns_left, t.ns_right, r))
        if isinstance(t, Seq):
            out = []
            for ev, l2, d in self._step(t.left, store, depth):
                if ev is TICK or ev == TICK:
                    out.append((TAU, t.right, d))
                else:
                    out.append((ev, Seq(l2, t.right), d))
            return tuple(out)
        if isinstance(t, ExtChoice):
            out = []
            for ev, l2, d in self._step(t.left, store, depth):
                out.append((TAU, ExtChoice(l2, t.right), d) if ev == TAU else (ev, l2, d))
            for ev, r2, d in self._step(t.right, store, depth):
                out.append((TAU, ExtChoice(t.left, r2), d) if ev == TAU else (ev, r2, d))
            return tuple(out)
        if isinstance(t, IntChoice):
            return ((TAU, t.left, ()), (TAU, t.right, ()))
        if isinstance(t, Hide):
            out = []
            for ev, b2, d in self._step(t.body, store, depth):
                if ev == TICK:
                    out.append((TICK, OMEGA, d))
                elif ev in t.hidden:
                    out.append((TAU, mk_hide(b2, t.hidden), d))
                else:
                    out.append((ev, mk_hide(b2, t.hidden), d))
            return tuple(out)
        if isinstance(t, Assign):
            delta = []
            for n, e in zip(t.names, t.exprs):
                idx = self.var_index.get(n)
                if idx is None:
                    raise CalcError(f"assignment to undeclared variable {n!r}")
                v = self.evaluate(e, store)
                if v not in self.var_domain[idx]:
                    raise DomainViolation(f"{n} := {v!r} outside domain {self.var_domain[idx].name}")
                delta.append((idx, v))
            return ((TAU, SKIP, tuple(delta)),)
        if isinstance(t, Guard):
            if self._bool(self.evaluate(t.pred, store)):
                return self._step(t.body, store, depth)
            return ()
        if isinstance(t, Cond):
            out = []
            enabled = False
            for p, b in t.branches:
                if self._bool(self.evaluate(p, store)):
                    enabled = True
                    out.extend(self._step(b, store, depth))
            if not enabled:
                raise CalcError("conditional with no enabled branch")
            return tuple(out)
        if isinstance(t, (Ref, IterInterleave)):
            if depth >= self.unfold_budget:
                raise NonProductiveRecursion(f"unfold budget exhausted at {getattr(t, 'name', 'iterated interleave')}")
            return self._step(self.unfold(t, store), store, depth + 1)
        raise TypeError(f"cannot step {t!r}")

    def _prefix(self, t: Prefix, store: tuple) -> tuple:
        params = self.chan_params.get(t.channel)
        if params is None:
            raise CalcError(f"undeclared channel {t.channel!r}")
        if len(params) != len(t.parts):
            raise CalcError(f"channel {t.channel} expects {len(params)} parameters, got {len(t.parts)}")
        partial = [((), {})]
        for part, dom in zip(t.parts, params):
            nxt = []
            for args, env in partial:
                if part.kind == "?":
                    if dom is None:
                        raise UnboundedInput(t.channel)
                    for v in dom.members:
                        e2 = dict(env)
                        e2[part.binder] = Const(v)
                        nxt.append((args + (v,), e2))
                else:
                    expr = part.expr
                    if env:
                        expr = subst_expr(expr, env)
                    v = self.evaluate(expr, store)
                    if v not in dom:
                        raise DomainViolation(f"{t.channel}: value {v!r} outside {dom.name}")
                    nxt.append((args + (v,), env))
            partial = nxt
        return tuple((Event(t.channel, args), subst(t.body, env), ()) for args, env in partial)

    def _par(self, left, ns_left, sync, ns_right, right, store, depth, build) -> tuple:
        # termination is joint: the composition ticks once, when both sides can
        out = []
        ls = self._step(left, store, depth)
        rs = self._step(right, store, depth)
        ns_l = self._ns_indices(ns_left)
        ns_r = self._ns_indices(ns_right)
        pending: dict = {}
        left_ticks = False
        for ev, l2, d in ls:
            if ev == TICK:
                left_ticks = True
            elif sync is not None and ev in sync:
                pending.setdefault(ev, []).append(l2)
            else:
                for i, _ in d:
                    if i not in ns_l:
                        raise NameSetViolation(f"left side writes {self.defs.variables[i].name} outside its name set")
                out.append((ev, build(l2, right), d))
        for ev, r2, d in rs:
            if ev == TICK:
                if left_ticks:
                    out.append((TICK, OMEGA, ()))
            elif sync is not None and ev in sync:
                for l2 in pending.get(ev, ()):
                    out.append((ev, build(l2, r2), ()))
            else:
                for i, _ in d:
                    if i not in ns_r:
                        raise NameSetViolation(f"right side writes {self.defs.variables[i].name} outside its name set")
                out.append((ev, build(left, r2), d))
        return tuple(out)


def initial(defs: ModelDefs, main: str | None = None) -> Configuration:
    return Engine(defs).initial(main)


def step(c: Configuration, defs: ModelDefs) -> frozenset:
    """Transition set of ``c``; a fresh engine, so repeated calls are independent."""
    return frozenset(Engine(defs).step(c))


def alphabet(t: Term, defs: ModelDefs) -> frozenset:
    """Channels syntactically reachable from ``t``, following definitions to a fixed point."""
    seen_procs: set = set()
    chans: set = set()
    stack = [t]
    while stack:
        x = stack.pop()
        if isinstance(x, Prefix):
            chans.add(x.channel)
        elif isinstance(x, Ref):
            if x.name not in seen_procs:
                seen_procs.add(x.name)
                stack.append(defs.process(x.name).body)
            continue
        stack.extend(children(x))
    return frozenset(chans)


def writes(t: Term, defs: ModelDefs) -> frozenset:
    """Variables assigned anywhere reachable from ``t``."""
    seen_procs: set = set()
    out: set = set()
    stack = [t]
    while stack:
        x = stack.pop()
        if isinstance(x, Assign):
            out.update(x.names)
        elif isinstance(x, Ref):
            if x.name not in seen_procs:
                seen_procs.add(x.name)
                stack.append(defs.process(x.name).body)
            continue
        stack.extend(children(x))
    return frozenset(out)
