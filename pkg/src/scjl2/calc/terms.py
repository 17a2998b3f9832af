"""Abstract syntax: atoms, events, expressions, process terms and model definitions."""
from __future__ import annotations

from operator import attrgetter
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Union

Atom = Union[bool, int, str]

MAX_RANGE_WIDTH = 16
BOOL = "BOOL"


class CalcError(Exception):
    """Base class for semantic errors raised while stepping a model."""


class NameSetViolation(CalcError):
    pass


class DomainViolation(CalcError):
    pass


class UnboundedInput(CalcError):
    pass


class NonProductiveRecursion(CalcError):
    pass


class UnknownProcess(CalcError):
    pass


def format_atom(value: Atom) -> str:
    if value is True:
        return "TRUE"
    if value is False:
        return "FALSE"
    return str(value)


class Event(NamedTuple):
    channel: str
    args: tuple = ()

    def __str__(self) -> str:
        return ".".join([self.channel, *(format_atom(a) for a in self.args)])

    @classmethod
    def parse(cls, text: str) -> "Event":
        head, *rest = text.split(".")
        return cls(head, tuple(parse_atom(a) for a in rest))


def parse_atom(text: str) -> Atom:
    if text == "TRUE":
        return True
    if text == "FALSE":
        return False
    if text.lstrip("-").isdigit():
        return int(text)
    return text


TAU = Event("tau")
TICK = Event("tick")
RESERVED_CHANNELS = frozenset({"tau", "tick"})


# -- declarations -----------------------------------------------------------

@dataclass(frozen=True)
class ValueDomain:
    name: str
    members: tuple
    is_range: bool = False

    def __post_init__(self):
        if not self.members:
            raise ValueError(f"domain {self.name} is empty")
        if len(set(self.members)) != len(self.members):
            raise ValueError(f"domain {self.name} has duplicate members")

    @classmethod
    def int_range(cls, name: str, lo: int, hi: int, bound: int = MAX_RANGE_WIDTH) -> "ValueDomain":
        if hi < lo:
            raise ValueError(f"domain {name}: empty range {lo}..{hi}")
        if hi - lo > bound:
            raise ValueError(f"domain {name}: range {lo}..{hi} exceeds width bound {bound}")
        return cls(name, tuple(range(lo, hi + 1)), True)

    def __contains__(self, value) -> bool:
        if self.name == BOOL:
            return value is True or value is False
        if isinstance(value, bool):
            return False
        return value in self.members


BOOL_DOMAIN = ValueDomain(BOOL, (False, True))


@dataclass(frozen=True)
class ChannelDecl:
    name: str
    params: tuple = ()  # domain names


@dataclass(frozen=True)
class VarDecl:
    name: str
    domain: str
    initial: Atom


# -- expressions ------------------------------------------------------------

@dataclass(frozen=True)
class Const:
    value: Atom


@dataclass(frozen=True)
class Name:
    ident: str


@dataclass(frozen=True)
class Not:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


Expr = Union[Const, Name, Not, BinOp]

BINARY_OPS = ("or", "and", "=", "!=", "<", "<=", ">", ">=", "+", "-")


def expr_names(e: Expr) -> set[str]:
    if isinstance(e, Name):
        return {e.ident}
    if isinstance(e, Not):
        return expr_names(e.operand)
    if isinstance(e, BinOp):
        return expr_names(e.left) | expr_names(e.right)
    return set()


def subst_expr(e: Expr, env: dict) -> Expr:
    if isinstance(e, Name):
        return env.get(e.ident, e)
    if isinstance(e, Not):
        return Not(subst_expr(e.operand, env))
    if isinstance(e, BinOp):
        return BinOp(e.op, subst_expr(e.left, env), subst_expr(e.right, env))
    return e


# -- event sets -------------------------------------------------------------

@dataclass(frozen=True)
class ChanRef:
    """A channel, optionally narrowed to events whose leading arguments are fixed."""

    channel: str
    args: tuple = ()

    def matches(self, ev: Event) -> bool:
        return ev.channel == self.channel and ev.args[: len(self.args)] == self.args

    def __str__(self) -> str:
        return ".".join([self.channel, *(format_atom(a) for a in self.args)])


def _chanref_key(c: ChanRef):
    return (c.channel, tuple((type(a).__name__, str(a)) for a in c.args))


class EventSet:
    """Immutable set of channel references used for synchronisation and hiding."""

    __slots__ = ("items", "_index", "_hash")

    def __init__(self, items: Iterable[ChanRef] = ()):
        uniq = {(_chanref_key(c)): c for c in items}
        self.items = tuple(uniq[k] for k in sorted(uniq))
        index: dict[str, list] = {}
        for c in self.items:
            index.setdefault(c.channel, []).append(c.args)
        self._index = {k: tuple(v) for k, v in index.items()}
        self._hash = hash(("EventSet", self.items))

    def __contains__(self, ev: Event) -> bool:
        prefixes = self._index.get(ev.channel)
        if prefixes is None:
            return False
        for p in prefixes:
            if ev.args[: len(p)] == p:
                return True
        return False

    @property
    def channels(self) -> frozenset:
        return frozenset(self._index)

    def __iter__(self):
        return iter(self.items)

    def __len__(self):
        return len(self.items)

    def __eq__(self, other):
        return isinstance(other, EventSet) and self.items == other.items

    def __hash__(self):
        return self._hash

    def __or__(self, other: "EventSet") -> "EventSet":
        return EventSet(self.items + other.items)

    def __repr__(self):
        return "EventSet({" + ", ".join(map(str, self.items)) + "})"

    @classmethod
    def of(cls, *specs: str) -> "EventSet":
        return cls(ChanRef(e.channel, e.args) for e in map(Event.parse, specs))


EMPTY_SET = EventSet()


# -- process terms ----------------------------------------------------------

class Term:
    """Base of all process terms: immutable, structurally compared, hash cached."""

    __slots__ = ()

    def __hash__(self):
        return self._h

    def __eq__(self, other):
        if self is other:
            return True
        if type(self) is not type(other) or self._h != other._h:
            return False
        return self._k == other._k

    def _vals(self):
        return self._getter(self)

    def _seal(self):
        k = self._getter(self)
        object.__setattr__(self, "_k", k)
        object.__setattr__(self, "_h", hash((self._tag,) + k))


def term(cls):
    cls = dataclass(frozen=True, eq=False)(cls)
    cls.__hash__ = Term.__hash__
    cls.__eq__ = Term.__eq__
    names = [f for f in cls.__dataclass_fields__ if f != "_h"]
    get = attrgetter(*names) if names else (lambda _: ())
    cls._getter = staticmethod(get if len(names) != 1 else (lambda o, g=get: (g(o),)))
    cls._tag = cls.__name__
    return cls


@term
class Skip(Term):
    _h: int = field(default=0, init=False, repr=False)

    def __post_init__(self):
        self._seal()


@term
class Stop(Term):
    _h: int = field(default=0, init=False, repr=False)

    def __post_init__(self):
        self._seal()


@term
class Omega(Term):
    _h: int = field(default=0, init=False, repr=False)

    def __post_init__(self):
        self._seal()


SKIP, STOP, OMEGA = Skip(), Stop(), Omega()


@dataclass(frozen=True)
class CommPart:
    kind: str  # "." | "!" | "?"
    expr: Expr | None = None
    binder: str | None = None


@term
class Prefix(Term):
    channel: str
    parts: tuple
    body: Term
    _h: int = field(default=0, init=False, repr=False)

    def __post_init__(self):
        self._seal()


@term
class ExtChoice(Term):
    left: Term
    right: Term
    _h: int = field(default=0, init=False, repr=False)

    def __post_init__(self):
        self._seal()


@term
class IntChoice(Term):
    left: Term
    right: Term
    _h: int = field(default=0, init=False, repr=False)

    def __post_init__(self):
        self._seal()


@term
class Seq(Term):
    left: Term
    right: Term
    _h: int = field(default=0, init=False, repr=False)

    def __post_init__(self):
        self._seal()


@term
class Par(Term):
    left: Term
    ns_left: tuple
    sync: EventSet
    ns_right: tuple
    right: Term
    _h: int = field(default=0, init=False, repr=False)

    def __post_init__(self):
        self._seal()


@term
class Interleave(Term):
    left: Term
    ns_left: tuple
    ns_right: tuple
    right: Term
    _h: int = field(default=0, init=False, repr=False)

    def __post_init__(self):
        self._seal()


@term
class IterInterleave(Term):
    binder: str
    values: tuple  # of Expr
    body: Term
    _h: int = field(default=0, init=False, repr=False)

    def __post_init__(self):
        self._seal()


@term
class Hide(Term):
    body: Term
    hidden: EventSet
    _h: int = field(default=0, init=False, repr=False)

    def __post_init__(self):
        self._seal()


@term
class Cond(Term):
    branches: tuple  # of (Expr, Term)
    _h: int = field(default=0, init=False, repr=False)

    def __post_init__(self):
        self._seal()


@term
class Assign(Term):
    names: tuple
    exprs: tuple
    _h: int = field(default=0, init=False, repr=False)

    def __post_init__(self):
        if len(self.names) != len(self.exprs):
            raise ValueError("assignment arity mismatch")
        self._seal()


@term
class Guard(Term):
    pred: Expr
    body: Term
    _h: int = field(default=0, init=False, repr=False)

    def __post_init__(self):
        self._seal()


@term
class Ref(Term):
    name: str
    args: tuple = ()
    _h: int = field(default=0, init=False, repr=False)

    def __post_init__(self):
        self._seal()


def names_tuple(names: Iterable[str]) -> tuple:
    return tuple(sorted(set(names)))


def mk_par(left, ns_left, sync, ns_right, right) -> Term:
    if left is OMEGA and right is OMEGA:
        return SKIP
    return Par(left, ns_left, sync, ns_right, right)


def mk_interleave(left, ns_left, ns_right, right) -> Term:
    if left is OMEGA and right is OMEGA:
        return SKIP
    return Interleave(left, ns_left, ns_right, right)


def mk_hide(body, hidden) -> Term:
    if body is OMEGA:
        return OMEGA
    return Hide(body, hidden)


# -- substitution -----------------------------------------------------------

def subst(t: Term, env: dict) -> Term:
    """Replace free occurrences of bound names (parameters, input binders) by expressions."""
    if not env:
        return t
    if isinstance(t, (Skip, Stop, Omega)):
        return t
    if isinstance(t, Prefix):
        parts = []
        inner = env
        for p in t.parts:
            if p.kind == "?":
                parts.append(p)
                if p.binder in inner:
                    inner = {k: v for k, v in inner.items() if k != p.binder}
            else:
                parts.append(CommPart(p.kind, subst_expr(p.expr, inner)))
        return Prefix(t.channel, tuple(parts), subst(t.body, inner))
    if isinstance(t, ExtChoice):
        return ExtChoice(subst(t.left, env), subst(t.right, env))
    if isinstance(t, IntChoice):
        return IntChoice(subst(t.left, env), subst(t.right, env))
    if isinstance(t, Seq):
        return Seq(subst(t.left, env), subst(t.right, env))
    if isinstance(t, Par):
        return Par(subst(t.left, env), t.ns_left, t.sync, t.ns_right, subst(t.right, env))
    if isinstance(t, Interleave):
        return Interleave(subst(t.left, env), t.ns_left, t.ns_right, subst(t.right, env))
    if isinstance(t, IterInterleave):
        values = tuple(subst_expr(v, env) for v in t.values)
        inner = {k: v for k, v in env.items() if k != t.binder}
        return IterInterleave(t.binder, values, subst(t.body, inner))
    if isinstance(t, Hide):
        return Hide(subst(t.body, env), t.hidden)
    if isinstance(t, Cond):
        return Cond(tuple((subst_expr(p, env), subst(b, env)) for p, b in t.branches))
    if isinstance(t, Assign):
        return Assign(t.names, tuple(subst_expr(e, env) for e in t.exprs))
    if isinstance(t, Guard):
        return Guard(subst_expr(t.pred, env), subst(t.body, env))
    if isinstance(t, Ref):
        return Ref(t.name, tuple(subst_expr(a, env) for a in t.args))
    raise TypeError(f"not a term: {t!r}")


def children(t: Term) -> tuple:
    if isinstance(t, (Prefix, Guard, Hide, IterInterleave)):
        return (t.body,)
    if isinstance(t, (ExtChoice, IntChoice, Seq, Par, Interleave)):
        return (t.left, t.right)
    if isinstance(t, Cond):
        return tuple(b for _, b in t.branches)
    return ()


# -- model definitions ------------------------------------------------------

@dataclass(frozen=True)
class ProcessDef:
    name: str
    params: tuple  # of (name, domain name)
    body: Term


@dataclass(frozen=True)
class ModelDefs:
    domains: tuple
    channels: tuple
    variables: tuple
    processes: tuple
    main: str

    def domain(self, name: str) -> ValueDomain:
        if name == BOOL:
            return BOOL_DOMAIN
        for d in self.domains:
            if d.name == name:
                return d
        raise KeyError(name)

    def channel(self, name: str) -> ChannelDecl:
        for c in self.channels:
            if c.name == name:
                return c
        raise KeyError(name)

    def process(self, name: str) -> ProcessDef:
        for p in self.processes:
            if p.name == name:
                return p
        raise UnknownProcess(name)
