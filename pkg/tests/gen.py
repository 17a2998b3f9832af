"""Seeded random process models for oracle and round-trip tests."""
from __future__ import annotations

import random

from scjl2.calc import (
    BinOp, ChannelDecl, ChanRef, CommPart, Cond, Const, EventSet, ExtChoice, Guard, Hide,
    IntChoice, Interleave, IterInterleave, ModelDefs, Name, Not, Par, Prefix, ProcessDef, Ref,
    Seq, Skip, Stop, ValueDomain, VarDecl, Assign,
)

DOMAIN = ValueDomain("D", ("a0", "a1"))
RANGE = ValueDomain.int_range("R", 0, 2)
PLAIN = ("a", "b", "c")
CHANNELS = (*(ChannelDecl(c) for c in PLAIN), ChannelDecl("d", ("D",)), ChannelDecl("n", ("R",)))
VARS = (VarDecl("x", "BOOL", False), VarDecl("k", "R", 0))
ALL_VARS = ("k", "x")


class _Gen:
    def __init__(self, rng: random.Random, nprocs: int, rich: bool):
        self.rng = rng
        self.nprocs = nprocs
        self.rich = rich

    def pick(self, *xs):
        return self.rng.choice(xs)

    def eventset(self) -> EventSet:
        refs = [ChanRef(c) for c in PLAIN if self.rng.random() < 0.4]
        if self.rng.random() < 0.3:
            refs.append(ChanRef("d", (self.pick("a0", "a1"),)) if self.rng.random() < 0.5 else ChanRef("d"))
        return EventSet(refs)

    def bool_expr(self, bound):
        r = self.rng.random()
        if r < 0.4:
            return BinOp("=", Name("x"), Const(self.pick(True, False)))
        if r < 0.6:
            return Not(Name("x"))
        if r < 0.8:
            return BinOp(self.pick("<", "<=", "!="), Name("k"), Const(self.rng.randrange(3)))
        if bound:
            return BinOp("=", Name(self.pick(*bound)), Const(self.pick("a0", "a1")))
        return BinOp(self.pick("and", "or"), Name("x"), BinOp("=", Name("k"), Const(1)))

    def guarded(self, depth, bound, w):
        """A prefix: the only place recursion may occur."""
        r = self.rng.random()
        body = self.term(depth - 1, bound, True, w)
        if r < 0.6:
            return Prefix(self.pick(*PLAIN), (), body)
        if r < 0.8:
            b = self.pick("v", "w")
            inner = self.term(depth - 1, (*bound, b), True, w)
            if self.rng.random() < 0.5:
                inner = Prefix("d", (CommPart("!", Name(b)),), inner)
            return Prefix("d", (CommPart("?", binder=b),), inner)
        if r < 0.9:
            arg = Name(self.pick(*bound)) if bound else Const(self.pick("a0", "a1"))
            return Prefix("d", (CommPart(".", arg),), body)
        return Prefix("n", (CommPart("!", Name("k")),), body)

    def term(self, depth, bound=(), allow_ref=False, w=ALL_VARS):
        """``w`` is the set of variables this subterm may assign (parallel sides own disjoint sets)."""
        rng = self.rng
        # a referenced process may assign anything, so recursion stays outside parallel sides
        allow_ref = allow_ref and w == ALL_VARS
        if depth <= 0 or rng.random() < 0.15:
            leaves = [Skip(), Stop()]
            if allow_ref:
                leaves += [self.ref(bound)] * 3
            return rng.choice(leaves)
        kinds = ["prefix"] * 4 + ["ext", "int", "seq", "seq", "par", "inter", "hide", "guard", "assign"]
        if self.rich:
            kinds += ["cond", "iter"]
        k = rng.choice(kinds)
        sub = lambda: self.term(depth - 1, bound, allow_ref, w)  # noqa: E731
        if k == "prefix":
            return self.guarded(depth, bound, w)
        if k == "ext":
            return ExtChoice(sub(), sub())
        if k == "int":
            return IntChoice(sub(), sub())
        if k == "seq":
            return Seq(sub(), sub())
        if k == "par":
            # recursion under parallel composition can grow without bound
            wl, wr = self.split(w)
            return Par(self.term(depth - 1, bound, w=wl), wl, self.eventset(), wr, self.term(depth - 1, bound, w=wr))
        if k == "inter":
            wl, wr = self.split(w)
            return Interleave(self.term(depth - 1, bound, w=wl), wl, wr, self.term(depth - 1, bound, w=wr))
        if k == "hide":
            return Hide(sub(), self.eventset())
        if k == "guard":
            return Guard(self.bool_expr(bound), sub())
        if k == "assign" and w:
            if "x" in w and ("k" not in w or rng.random() < 0.5):
                a = Assign(("x",), (Not(Name("x")),))
            else:
                a = Assign(("k",), (Const(rng.randrange(3)),))
            return Seq(a, sub())
        if k == "assign":
            return sub()
        if k == "cond":
            p = self.bool_expr(bound)
            return Cond(((p, sub()), (Not(p), sub())))
        b = "i"
        vals = (Const("a0"), Const("a1"))
        return IterInterleave(b, vals, Prefix("d", (CommPart(".", Name(b)),), Skip()))

    def split(self, w):
        cut = self.rng.randrange(len(w) + 1)
        return w[:cut], w[cut:]

    def ref(self, bound):
        i = self.rng.randrange(self.nprocs)
        if i == 0:
            arg = Name(self.pick(*bound)) if bound and self.rng.random() < 0.5 else Const(self.pick("a0", "a1"))
            return Ref("P0", (arg,))
        return Ref(f"P{i}")


def random_model(seed: int, nprocs: int = 3, depth: int = 4, rich: bool = False) -> ModelDefs:
    """A small closed model: P0 takes one parameter of domain D, recursion only behind prefixes."""
    g = _Gen(random.Random(seed), nprocs, rich)
    procs = [ProcessDef("P0", (("p", "D"),), g.term(depth, ("p",)))]
    procs += [ProcessDef(f"P{i}", (), g.term(depth)) for i in range(1, nprocs)]
    procs.append(ProcessDef("Main", (), g.term(depth)))
    return ModelDefs((DOMAIN, RANGE), CHANNELS, VARS, tuple(procs), "Main")
