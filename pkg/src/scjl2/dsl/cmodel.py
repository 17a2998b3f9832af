"""Reader and pretty printer for ``.cmodel`` process models (header ``cmodel 1``).

Grammar (loosest binding first)::

    document := "cmodel" "1" item*
    item     := "domain" ID "=" ("{" ID,* "}" | INT ".." INT)
              | "channel" ID,+ [":" ID ("." ID)*]
              | "var" ID ":" ID "=" atom
              | "process" ID ["(" ID ":" ID ,* ")"] "=" term
              | "main" ID ["=" term]
    term     := choice  (("[|" names "|" events "|" names "|]" | "[|" names "||" names "|]" | "|||") choice)*
    choice   := ext ("|~|" ext)*
    ext      := seq ("[]" seq)*
    seq      := hide (";" hide)*
    hide     := unary ("\\" events)*
    unary    := ID comm* "->" unary | "[" expr "]" "&" unary | "|||" ID ":" valueset "@" unary | atom
    atom     := "Skip" | "Stop" | "(" term ")" | "if" expr "=>" seq ("[]" expr "=>" seq)* "fi"
              | ID,+ ":=" expr,+ | ID ["(" expr,* ")"]
    comm     := "." prim | "!" prim | "?" ID
"""
from __future__ import annotations

from dataclasses import dataclass

from ..calc.terms import (
    BOOL, RESERVED_CHANNELS, SKIP, STOP, Assign, BinOp, ChanRef, ChannelDecl,
    CommPart, Cond, Const, EventSet, ExtChoice, Guard, Hide, IntChoice,
    Interleave, IterInterleave, ModelDefs, Name, Not, Par, Prefix, ProcessDef,
    Ref, Seq, Skip, Stop, Term, ValueDomain, VarDecl, format_atom, names_tuple,
)
from .lexer import (
    ArityError, DomainDeclError, DslError, ParseError, ResolveError, Token,
    TokenStream, tokenize,
)

# declaration words are only special at the start of an item
KEYWORDS = frozenset({"if", "fi", "Skip", "Stop", "TRUE", "FALSE", "and", "or", "not"})


@dataclass(frozen=True)
class ModelSource:
    text: str
    origin: str = "<builtin>"


# -- parsing ----------------------------------------------------------------

class _Parser:
    def __init__(self, src: ModelSource):
        self.origin = src.origin
        self.ts = TokenStream(tokenize(src.text, src.origin), src.origin)
        self.pos: dict[int, Token] = {}
        self.set_items: list = []  # (ChanRef, Token)
        self.ns_items: list = []  # (name, Token)

    def mark(self, node, tok: Token):
        self.pos[id(node)] = tok
        return node

    # document
    def document(self):
        ts = self.ts
        ts.expect("cmodel")
        if ts.cur.kind != "int" or ts.cur.text != "1":
            ts.fail("unsupported cmodel version (expected 1)")
        ts.advance()
        domains, channels, variables, processes = [], [], [], []
        main = None
        while ts.cur.kind != "eof":
            tok = ts.cur
            if ts.accept("domain"):
                domains.append((self.domain_decl(), tok))
            elif ts.accept("channel"):
                channels.extend((c, tok) for c in self.channel_decl())
            elif ts.accept("var"):
                variables.append((self.var_decl(), tok))
            elif ts.accept("process"):
                processes.append((self.process_decl(), tok))
            elif ts.accept("main"):
                if main is not None:
                    ts.fail("more than one main declaration", tok)
                name = ts.ident("process name")
                main = name
                if ts.accept("="):
                    processes.append((ProcessDef(name.text, (), self.term()), name))
            else:
                ts.fail(f"expected a declaration, found {ts.describe()}")
        if main is None:
            ts.fail("missing main declaration")
        return domains, channels, variables, processes, main

    def domain_decl(self) -> ValueDomain:
        ts = self.ts
        name = ts.ident("domain name")
        ts.expect("=")
        try:
            if ts.accept("{"):
                members = []
                if not ts.at("}"):
                    members.append(ts.ident("domain member").text)
                    while ts.accept(","):
                        members.append(ts.ident("domain member").text)
                ts.expect("}")
                return ValueDomain(name.text, tuple(members))
            lo = ts.integer()
            ts.expect("..")
            hi = ts.integer()
            return ValueDomain.int_range(name.text, lo, hi)
        except ValueError as e:
            raise DomainDeclError(str(e), name.line, name.col, self.origin) from None

    def channel_decl(self) -> list:
        ts = self.ts
        names = [ts.ident("channel name")]
        while ts.accept(","):
            names.append(ts.ident("channel name"))
        params = []
        if ts.accept(":"):
            params.append(ts.ident("domain name").text)
            while ts.accept("."):
                params.append(ts.ident("domain name").text)
        return [self.mark(ChannelDecl(n.text, tuple(params)), n) for n in names]

    def var_decl(self) -> VarDecl:
        ts = self.ts
        name = ts.ident("variable name")
        ts.expect(":")
        dom = ts.ident("domain name").text
        ts.expect("=")
        return VarDecl(name.text, dom, self.atom_value())

    def atom_value(self):
        ts = self.ts
        if ts.accept("TRUE"):
            return True
        if ts.accept("FALSE"):
            return False
        if ts.cur.kind == "int" or ts.at("-"):
            return ts.integer()
        return ts.ident("value").text

    def process_decl(self) -> ProcessDef:
        ts = self.ts
        name = ts.ident("process name")
        params = []
        if ts.accept("("):
            if not ts.at(")"):
                params.append(self.param())
                while ts.accept(","):
                    params.append(self.param())
            ts.expect(")")
        ts.expect("=")
        return ProcessDef(name.text, tuple(params), self.term())

    def param(self):
        p = self.ts.ident("parameter name")
        self.ts.expect(":")
        d = self.ts.ident("domain name")
        self.ns_items.append((("param", p.text), p))
        return (p.text, d.text)

    # terms
    def term(self) -> Term:
        ts = self.ts
        left = self.choice()
        while True:
            if ts.accept("|||"):
                left = Interleave(left, (), (), self.choice())
            elif ts.at("[|"):
                tok = ts.advance()
                ns_l = self.nameset()
                if ts.accept("||"):
                    ns_r = self.nameset()
                    ts.expect("|]")
                    left = Interleave(left, ns_l, ns_r, self.choice())
                else:
                    ts.expect("|")
                    cs = self.eventset()
                    ts.expect("|")
                    ns_r = self.nameset()
                    ts.expect("|]")
                    left = Par(left, ns_l, cs, ns_r, self.choice())
                self.mark(left, tok)
            else:
                return left

    def choice(self) -> Term:
        left = self.ext()
        while self.ts.accept("|~|"):
            left = IntChoice(left, self.ext())
        return left

    def ext(self) -> Term:
        left = self.seq()
        while self.ts.accept("[]"):
            left = ExtChoice(left, self.seq())
        return left

    def seq(self) -> Term:
        left = self.hide()
        while self.ts.accept(";"):
            left = Seq(left, self.hide())
        return left

    def hide(self) -> Term:
        t = self.unary()
        while self.ts.accept("\\"):
            t = Hide(t, self.eventset())
        return t

    def unary(self) -> Term:
        ts = self.ts
        tok = ts.cur
        if tok.kind == "ident" and tok.text not in KEYWORDS and ts.peek().text in (".", "!", "?", "->") \
                and ts.peek().kind == "op":
            ts.advance()
            parts = []
            while not ts.at("->"):
                ptok = ts.cur
                if ts.accept("?"):
                    b = ts.ident("input binder")
                    self.ns_items.append((("binder", b.text), b))
                    parts.append(CommPart("?", binder=b.text))
                elif ts.accept(".") or ts.accept("!"):
                    parts.append(CommPart(ptok.text, self.prim()))
                else:
                    ts.fail(f"expected '.', '!', '?' or '->', found {ts.describe()}")
            ts.expect("->")
            return self.mark(Prefix(tok.text, tuple(parts), self.unary()), tok)
        if ts.accept("["):
            pred = self.expr()
            ts.expect("]")
            ts.expect("&")
            return Guard(pred, self.unary())
        if ts.accept("|||"):
            b = ts.ident("binder")
            self.ns_items.append((("binder", b.text), b))
            ts.expect(":")
            values = self.valueset()
            ts.expect("@")
            return self.mark(IterInterleave(b.text, values, self.unary()), b)
        return self.atom()

    def atom(self) -> Term:
        ts = self.ts
        tok = ts.cur
        if ts.accept("Skip"):
            return SKIP
        if ts.accept("Stop"):
            return STOP
        if ts.accept("("):
            t = self.term()
            ts.expect(")")
            return t
        if ts.accept("if"):
            branches = [self.branch()]
            while ts.accept("[]"):
                branches.append(self.branch())
            ts.expect("fi")
            return Cond(tuple(branches))
        if tok.kind != "ident" or tok.text in KEYWORDS:
            ts.fail(f"expected a process term, found {ts.describe()}")
        if ts.peek().text in (",", ":="):
            names = [ts.advance()]
            while ts.accept(","):
                names.append(ts.ident("variable name"))
            ts.expect(":=")
            exprs = [self.expr()]
            while ts.accept(","):
                exprs.append(self.expr())
            if len(exprs) != len(names):
                ts.fail("assignment arity mismatch", tok, ArityError)
            for n in names:
                self.ns_items.append((("assign", n.text), n))
            return self.mark(Assign(tuple(n.text for n in names), tuple(exprs)), tok)
        ts.advance()
        args = []
        if ts.accept("("):
            if not ts.at(")"):
                args.append(self.expr())
                while ts.accept(","):
                    args.append(self.expr())
            ts.expect(")")
        return self.mark(Ref(tok.text, tuple(args)), tok)

    def branch(self):
        pred = self.expr()
        self.ts.expect("=>")
        return (pred, self.seq())

    def nameset(self) -> tuple:
        ts = self.ts
        ts.expect("{")
        names = []
        if not ts.at("}"):
            names.append(ts.ident("variable name"))
            while ts.accept(","):
                names.append(ts.ident("variable name"))
        ts.expect("}")
        for n in names:
            self.ns_items.append((("nameset", n.text), n))
        return names_tuple(n.text for n in names)

    def eventset(self) -> EventSet:
        ts = self.ts
        ts.expect("{")
        items = []
        if not ts.at("}"):
            items.append(self.chanref())
            while ts.accept(","):
                items.append(self.chanref())
        ts.expect("}")
        return EventSet(items)

    def chanref(self) -> ChanRef:
        ts = self.ts
        tok = ts.ident("channel name")
        args = []
        while ts.accept("."):
            args.append(self.atom_value())
        ref = ChanRef(tok.text, tuple(args))
        self.set_items.append((ref, tok))
        return ref

    def valueset(self) -> tuple:
        ts = self.ts
        if ts.accept("{"):
            vals = []
            if not ts.at("}"):
                vals.append(self.expr())
                while ts.accept(","):
                    vals.append(self.expr())
            ts.expect("}")
            return tuple(vals)
        tok = ts.ident("domain name or value set")
        return self.mark(("domain", tok.text), tok)

    # expressions
    def expr(self):
        left = self.and_expr()
        while self.ts.accept("or"):
            left = BinOp("or", left, self.and_expr())
        return left

    def and_expr(self):
        left = self.not_expr()
        while self.ts.accept("and"):
            left = BinOp("and", left, self.not_expr())
        return left

    def not_expr(self):
        if self.ts.accept("not"):
            return Not(self.not_expr())
        return self.cmp_expr()

    def cmp_expr(self):
        left = self.sum_expr()
        for op in ("=", "!=", "<=", ">=", "<", ">"):
            if self.ts.accept(op):
                return BinOp(op, left, self.sum_expr())
        return left

    def sum_expr(self):
        left = self.prim()
        while self.ts.at("+") or self.ts.at("-"):
            op = self.ts.advance().text
            left = BinOp(op, left, self.prim())
        return left

    def prim(self):
        ts = self.ts
        tok = ts.cur
        if ts.accept("TRUE"):
            return Const(True)
        if ts.accept("FALSE"):
            return Const(False)
        if tok.kind == "int" or (ts.at("-") and ts.peek().kind == "int"):
            return Const(ts.integer())
        if ts.accept("("):
            e = self.expr()
            ts.expect(")")
            return e
        if tok.kind == "ident" and tok.text not in KEYWORDS:
            ts.advance()
            return self.mark(Name(tok.text), tok)
        ts.fail(f"expected an expression, found {ts.describe()}")


# -- resolution -------------------------------------------------------------

class _Resolver:
    def __init__(self, p: _Parser, domains, channels, variables, processes, main_tok):
        self.p = p
        self.origin = p.origin
        self.main_tok = main_tok
        self.domains = {BOOL: None}
        for d, tok in domains:
            if d.name in self.domains:
                self.err(f"duplicate domain {d.name}", tok, DomainDeclError)
            self.domains[d.name] = d
        self.atoms = {}
        for d, tok in domains:
            for m in d.members:
                if isinstance(m, str):
                    if m in KEYWORDS:
                        self.err(f"domain member {m} is a keyword", tok, DomainDeclError)
                    self.atoms[m] = d.name
        self.channels = {}
        for c, tok in channels:
            if c.name in self.channels or c.name in RESERVED_CHANNELS:
                self.err(f"duplicate or reserved channel {c.name}", tok, ResolveError)
            for d in c.params:
                if d not in self.domains:
                    self.err(f"channel {c.name}: unknown domain {d}", tok, ResolveError)
            self.channels[c.name] = c
        self.vars = {}
        for v, tok in variables:
            if v.name in self.vars:
                self.err(f"duplicate variable {v.name}", tok, ResolveError)
            if v.domain not in self.domains:
                self.err(f"variable {v.name}: unknown domain {v.domain}", tok, ResolveError)
            if v.name in self.atoms:
                self.err(f"variable {v.name} clashes with a domain member", tok, ResolveError)
            if v.initial not in self.domain(v.domain):
                self.err(f"initial value of {v.name} not in {v.domain}", tok, DomainDeclError)
            self.vars[v.name] = v
        self.procs = {}
        for pd, tok in processes:
            if pd.name in self.procs:
                self.err(f"duplicate process {pd.name}", tok, ResolveError)
            for _, d in pd.params:
                if d not in self.domains:
                    self.err(f"process {pd.name}: unknown domain {d}", tok, ResolveError)
            self.procs[pd.name] = pd

    def domain(self, name):
        from ..calc.terms import BOOL_DOMAIN
        return BOOL_DOMAIN if name == BOOL else self.domains[name]

    def err(self, msg, tok, cls=ResolveError):
        if tok is None:
            tok = Token("eof", "", 0, 0)
        raise cls(msg, tok.line, tok.col, self.origin)

    def tok(self, node):
        return self.p.pos.get(id(node))

    def check_binder(self, name: str, tok):
        if name in self.vars or name in self.atoms or name in self.channels or name in self.procs:
            self.err(f"binder {name} shadows a declaration", tok)

    def run(self) -> tuple:
        if self.main_tok.text not in self.procs:
            self.err(f"unknown main process {self.main_tok.text}", self.main_tok)
        for (kind, name), tok in self.p.ns_items:
            if kind in ("nameset", "assign") and name not in self.vars:
                self.err(f"unknown variable {name}", tok)
            if kind in ("param", "binder"):
                self.check_binder(name, tok)
        for ref, tok in self.p.set_items:
            c = self.channels.get(ref.channel)
            if c is None:
                self.err(f"unknown channel {ref.channel}", tok)
            if len(ref.args) > len(c.params):
                self.err(f"too many arguments for channel {ref.channel}", tok, ArityError)
            for a, d in zip(ref.args, c.params):
                if a not in self.domain(d):
                    self.err(f"{ref.channel}: {format_atom(a)} not in {d}", tok, ResolveError)
        out = []
        for pd in self.procs.values():
            scope = frozenset(n for n, _ in pd.params)
            out.append(ProcessDef(pd.name, pd.params, self.term(pd.body, scope)))
        return tuple(out)

    def expr(self, e, scope):
        if isinstance(e, Name):
            if e.ident in scope or e.ident in self.vars:
                return e
            if e.ident in self.atoms:
                return Const(e.ident)
            self.err(f"unknown name {e.ident}", self.tok(e))
        if isinstance(e, Not):
            return Not(self.expr(e.operand, scope))
        if isinstance(e, BinOp):
            return BinOp(e.op, self.expr(e.left, scope), self.expr(e.right, scope))
        return e

    def term(self, t, scope) -> Term:
        if isinstance(t, (Skip, Stop)):
            return t
        if isinstance(t, Prefix):
            c = self.channels.get(t.channel)
            if c is None:
                self.err(f"unknown channel {t.channel}", self.tok(t))
            if len(c.params) != len(t.parts):
                self.err(f"arity mismatch on channel {t.channel}: declared {len(c.params)} "
                         f"parameter(s), used with {len(t.parts)}", self.tok(t), ArityError)
            parts = []
            inner = scope
            for p in t.parts:
                if p.kind == "?":
                    inner = inner | {p.binder}
                    parts.append(p)
                else:
                    parts.append(CommPart(p.kind, self.expr(p.expr, inner)))
            return Prefix(t.channel, tuple(parts), self.term(t.body, inner))
        if isinstance(t, ExtChoice):
            return ExtChoice(self.term(t.left, scope), self.term(t.right, scope))
        if isinstance(t, IntChoice):
            return IntChoice(self.term(t.left, scope), self.term(t.right, scope))
        if isinstance(t, Seq):
            return Seq(self.term(t.left, scope), self.term(t.right, scope))
        if isinstance(t, Par):
            if set(t.ns_left) & set(t.ns_right):
                self.err("name sets of a parallel composition must be disjoint", self.tok(t))
            return Par(self.term(t.left, scope), t.ns_left, t.sync, t.ns_right, self.term(t.right, scope))
        if isinstance(t, Interleave):
            if set(t.ns_left) & set(t.ns_right):
                self.err("name sets of an interleaving must be disjoint", self.tok(t))
            return Interleave(self.term(t.left, scope), t.ns_left, t.ns_right, self.term(t.right, scope))
        if isinstance(t, IterInterleave):
            vals = t.values
            if isinstance(vals, tuple) and len(vals) == 2 and vals[0] == "domain":
                dname = vals[1]
                if dname not in self.domains:
                    self.err(f"unknown domain {dname}", self.tok(vals))
                vals = tuple(Const(m) for m in self.domain(dname).members)
            else:
                vals = tuple(self.expr(v, scope) for v in vals)
            return IterInterleave(t.binder, vals, self.term(t.body, scope | {t.binder}))
        if isinstance(t, Hide):
            return Hide(self.term(t.body, scope), t.hidden)
        if isinstance(t, Cond):
            return Cond(tuple((self.expr(p, scope), self.term(b, scope)) for p, b in t.branches))
        if isinstance(t, Assign):
            return Assign(t.names, tuple(self.expr(e, scope) for e in t.exprs))
        if isinstance(t, Guard):
            return Guard(self.expr(t.pred, scope), self.term(t.body, scope))
        if isinstance(t, Ref):
            pd = self.procs.get(t.name)
            if pd is None:
                self.err(f"unknown process {t.name}", self.tok(t))
            if len(pd.params) != len(t.args):
                self.err(f"process {t.name} expects {len(pd.params)} argument(s), got {len(t.args)}",
                         self.tok(t), ArityError)
            return Ref(t.name, tuple(self.expr(a, scope) for a in t.args))
        raise TypeError(t)


def parse(src: ModelSource | str) -> ModelDefs:
    """Parse and validate a ``.cmodel`` document."""
    if isinstance(src, str):
        src = ModelSource(src, "<input>")
    p = _Parser(src)
    domains, channels, variables, processes, main_tok = p.document()
    r = _Resolver(p, domains, channels, variables, processes, main_tok)
    procs = r.run()
    return ModelDefs(
        domains=tuple(d for d, _ in domains),
        channels=tuple(c for c, _ in channels),
        variables=tuple(v for v, _ in variables),
        processes=procs,
        main=main_tok.text,
    )


# -- formatting -------------------------------------------------------------

_LEVEL = {Par: 1, Interleave: 1, IntChoice: 2, ExtChoice: 3, Seq: 4, Hide: 5,
          Prefix: 6, Guard: 6, IterInterleave: 6}
_EXPR_LEVEL = {"or": 1, "and": 2, "=": 4, "!=": 4, "<": 4, "<=": 4, ">": 4, ">=": 4, "+": 5, "-": 5}


def _level(t) -> int:
    return _LEVEL.get(type(t), 7)


def format_expr(e, min_level: int = 0) -> str:
    if isinstance(e, Const):
        s = format_atom(e.value)
        return f"({s})" if isinstance(e.value, int) and not isinstance(e.value, bool) \
            and e.value < 0 and min_level > 0 else s
    if isinstance(e, Name):
        return e.ident
    if isinstance(e, Not):
        s = "not " + format_expr(e.operand, 3)
        lvl = 3
    else:
        lvl = _EXPR_LEVEL[e.op]
        right_min = lvl + 1
        if e.op in ("=", "!=", "<", "<=", ">", ">="):
            s = f"{format_expr(e.left, lvl + 1)} {e.op} {format_expr(e.right, right_min)}"
        else:
            s = f"{format_expr(e.left, lvl)} {e.op} {format_expr(e.right, right_min)}"
    return f"({s})" if lvl < min_level else s


def _prim(e) -> str:
    return format_expr(e, 6)


def _names(ns) -> str:
    return "{" + ", ".join(ns) + "}"


def _events(es: EventSet) -> str:
    return "{" + ", ".join(str(c) for c in es.items) + "}"


def format_term(t: Term, min_level: int = 0) -> str:
    if isinstance(t, Skip):
        return "Skip"
    if isinstance(t, Stop):
        return "Stop"
    lvl = _level(t)
    if isinstance(t, Par):
        s = f"{format_term(t.left, 1)} [| {_names(t.ns_left)} | {_events(t.sync)} | {_names(t.ns_right)} |] " \
            f"{format_term(t.right, 2)}"
    elif isinstance(t, Interleave):
        op = "|||" if not t.ns_left and not t.ns_right else f"[| {_names(t.ns_left)} || {_names(t.ns_right)} |]"
        s = f"{format_term(t.left, 1)} {op} {format_term(t.right, 2)}"
    elif isinstance(t, IntChoice):
        s = f"{format_term(t.left, 2)} |~| {format_term(t.right, 3)}"
    elif isinstance(t, ExtChoice):
        s = f"{format_term(t.left, 3)} [] {format_term(t.right, 4)}"
    elif isinstance(t, Seq):
        s = f"{format_term(t.left, 4)} ; {format_term(t.right, 5)}"
    elif isinstance(t, Hide):
        s = f"{format_term(t.body, 5)} \\ {_events(t.hidden)}"
    elif isinstance(t, Prefix):
        comm = "".join(f"?{p.binder}" if p.kind == "?" else f"{p.kind}{_prim(p.expr)}" for p in t.parts)
        s = f"{t.channel}{comm} -> {format_term(t.body, 6)}"
    elif isinstance(t, Guard):
        s = f"[{format_expr(t.pred)}] & {format_term(t.body, 6)}"
    elif isinstance(t, IterInterleave):
        vals = "{" + ", ".join(format_expr(v) for v in t.values) + "}"
        s = f"||| {t.binder} : {vals} @ {format_term(t.body, 6)}"
    elif isinstance(t, Cond):
        s = "if " + " [] ".join(f"{format_expr(p)} => {format_term(b, 4)}" for p, b in t.branches) + " fi"
    elif isinstance(t, Assign):
        s = f"{', '.join(t.names)} := {', '.join(format_expr(e) for e in t.exprs)}"
    elif isinstance(t, Ref):
        s = t.name + ("(" + ", ".join(format_expr(a) for a in t.args) + ")" if t.args else "")
    else:
        raise DslError(f"cannot format {type(t).__name__}")
    return f"({s})" if lvl < min_level else s


def format(defs: ModelDefs) -> str:  # noqa: A001 - mirrors parse
    """Deterministic text of ``defs``; ``parse(format(d)) == d``."""
    lines = ["cmodel 1", ""]
    for d in defs.domains:
        if d.is_range:
            lines.append(f"domain {d.name} = {d.members[0]}..{d.members[-1]}")
        else:
            lines.append(f"domain {d.name} = {{{', '.join(map(format_atom, d.members))}}}")
    if defs.domains:
        lines.append("")
    for c in defs.channels:
        lines.append(f"channel {c.name}" + (f" : {'.'.join(c.params)}" if c.params else ""))
    if defs.channels:
        lines.append("")
    for v in defs.variables:
        lines.append(f"var {v.name} : {v.domain} = {format_atom(v.initial)}")
    if defs.variables:
        lines.append("")
    for p in defs.processes:
        params = "(" + ", ".join(f"{n} : {d}" for n, d in p.params) + ")" if p.params else ""
        lines.append(f"process {p.name}{params} =")
        lines.append("  " + format_term(p.body))
        lines.append("")
    lines.append(f"main {defs.main}")
    return "\n".join(lines) + "\n"


__all__ = ["ModelSource", "parse", "format", "format_term", "format_expr", "DslError", "ParseError",
           "ResolveError", "ArityError", "DomainDeclError", "KEYWORDS"]
