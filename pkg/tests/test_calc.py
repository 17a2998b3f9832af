from dataclasses import replace

import pytest

from oracles import naive_lts, product, tau_cycle_states
from suites import small_random_suite
from scjl2.calc import (
    OMEGA, TAU, TICK, Engine, Event, EventSet, Omega, Par, ProcessDef, Ref,
)
from scjl2.calc.terms import NameSetViolation, NonProductiveRecursion, DomainViolation, CalcError
from scjl2.dsl import parse
from scjl2.explore import build_lts, bundle_of, explore

HEADER = """cmodel 1
domain D = {a0, a1}
channel a, b, c
channel d : D
var x : BOOL = FALSE
"""


def model(body: str):
    return parse(HEADER + body)


def events_from_start(text):
    e = Engine(model(text))
    return [ev for ev, _ in e.step(e.initial())]


def lts_edges(defs):
    lts = build_lts(bundle_of(defs))
    return {(lts.states[i], ev, lts.states[j]) for i, ev, j in lts.transitions}, lts


def test_skip_ticks_to_omega():
    e = Engine(model("main Main = Skip"))
    [(ev, c)] = e.step(e.initial())
    assert ev == TICK and isinstance(c.term, Omega)


def test_seq_turns_left_tick_into_tau():
    assert events_from_start("main Main = Skip ; a -> Skip") == [TAU]


def test_external_choice_resolved_by_visible_not_tau():
    e = Engine(model("main Main = (a -> Skip |~| b -> Skip) [] c -> Skip"))
    first = e.step(e.initial())
    assert {ev for ev, _ in first} == {TAU, Event("c")}
    after_tau = [c for ev, c in first if ev == TAU]
    # the choice survives internal progress on one side
    assert all(Event("c") in {ev for ev, _ in e.step(c)} for c in after_tau)


def test_parallel_terminates_jointly():
    # only the composition as a whole ticks, and only once both sides can
    e = Engine(model("main Main = Skip [| {} | {} | {} |] a -> Skip"))
    c0 = e.initial()
    assert [ev for ev, _ in e.step(c0)] == [Event("a")]
    [(_, c1)] = e.step(c0)
    [(ev, c2)] = e.step(c1)
    assert ev == TICK and c2.term is OMEGA


def test_sync_events_need_both_sides():
    assert events_from_start("main Main = a -> Skip [| {} | {a} | {} |] b -> a -> Skip") == [Event("b")]


def test_sync_on_channel_prefix():
    evs = events_from_start("main Main = d?v -> Skip [| {} | {d.a1} | {} |] d?w -> Skip")
    assert Event("d", ("a1",)) in evs
    assert evs.count(Event("d", ("a0",))) == 2


def test_hiding_makes_tau_and_keeps_tick():
    e = Engine(model("main Main = (a -> Skip) \\ {a}"))
    [(ev, c)] = e.step(e.initial())
    assert ev == TAU
    assert [ev for ev, _ in e.step(c)] == [TICK]


def test_assignment_is_one_tau_and_guard_reads_store():
    e = Engine(model("main Main = x := TRUE ; [x] & a -> Skip"))
    [(ev, c)] = e.step(e.initial())
    assert ev == TAU and c.store == (True,)
    [(ev, c)] = e.step(c)
    assert ev == TAU
    assert [ev for ev, _ in e.step(c)] == [Event("a")]


def test_false_guard_blocks():
    assert events_from_start("main Main = [x] & a -> Skip") == []


def test_conditional_without_enabled_branch_is_an_error():
    e = Engine(model("main Main = if x => Skip fi"))
    with pytest.raises(CalcError):
        e.step(e.initial())


def test_name_set_violation():
    e = Engine(model("main Main = x := TRUE [| {} | {} | {} |] Skip"))
    with pytest.raises(NameSetViolation):
        e.step(e.initial())


def test_unguarded_recursion_is_reported():
    e = Engine(model("process P = P\nmain P"))
    with pytest.raises(NonProductiveRecursion):
        e.step(e.initial())


def test_assignment_outside_domain():
    m = parse("cmodel 1\ndomain R = 0..1\nvar k : R = 0\nmain Main = k := k + 1 ; k := k + 1")
    e = Engine(m)
    [(_, c)] = e.step(e.initial())
    [(_, c)] = e.step(c)
    with pytest.raises(DomainViolation):
        e.step(c)


def test_step_is_deterministic_and_deduplicated():
    m = model("main Main = a -> Skip [] a -> Skip")
    e1, e2 = Engine(m), Engine(m)
    assert e1.step(e1.initial()) == e2.step(e2.initial())
    assert len(e1.step(e1.initial())) == 1


# -- oracle equivalence -------------------------------------------------------

SMALL = small_random_suite()


def test_random_suite_is_large_enough():
    assert len(SMALL) >= 200
    assert sum(1 for _, _, l in SMALL if len(l.states) >= 5) >= 50


def test_explore_matches_naive_enumerator():
    for seed, d, lts in SMALL:
        c0, states, edges = naive_lts(d)
        mine = {(lts.states[i], ev, lts.states[j]) for i, ev, j in lts.transitions}
        assert lts.states[0] == c0, seed
        assert set(lts.states) == states, seed
        assert mine == edges, seed


def test_divergence_and_deadlock_agree_with_brute_force():
    for seed, d, lts in SMALL:
        edges = {(lts.states[i], ev, lts.states[j]) for i, ev, j in lts.transitions}
        cyc = tau_cycle_states(edges, EventSet())
        outgoing = {a for a, _, _ in edges}
        stuck = {s for s in lts.states if s not in outgoing and not isinstance(s.term, Omega)}
        r = explore(bundle_of(d))
        assert bool(r.divergences) == bool(cyc), seed
        assert bool(r.deadlocks) == bool(stuck), seed
        for lasso in r.divergences:
            assert all(e == TAU for e in lasso.cycle), seed
            assert _lasso_closes(edges, lts.states[0], lasso), seed


def _lasso_closes(edges, init, lasso) -> bool:
    def walk(frontier, trace):
        for ev in trace:
            frontier = {b for a, e, b in edges if a in frontier and e == ev}
        return frontier
    for s in walk({init}, lasso.stem):
        if s in walk({s}, lasso.cycle):
            return True
    return False


# -- parallel composition against a product construction ---------------------

OPERANDS = [
    "Stop", "Skip", "a -> Skip", "a -> Stop", "a -> b -> Skip", "a -> Skip [] b -> Skip",
    "a -> Stop |~| Stop", "A1", "A2", "Skip ; a -> Stop", "d?v -> Skip",
    "c -> Skip [] a -> A1", "(a -> b -> Skip) \\ {b}", "b -> Skip ||| c -> Stop", "d.a0 -> A2",
]
SYNCS = ["{}", "{a}", "{a, b}", "{d.a0}", "{a, b, c, d}"]


def _operand_defs():
    procs = "\n".join(f"process Op{i} = {t}" for i, t in enumerate(OPERANDS))
    return model(f"process A1 = a -> A1\nprocess A2 = a -> b -> A2\n{procs}\nmain Op0")


def test_operands_are_small():
    defs = _operand_defs()
    for i in range(len(OPERANDS)):
        assert len(build_lts(bundle_of(replace(defs, main=f"Op{i}"))).states) <= 4, OPERANDS[i]


def test_parallel_matches_product_oracle():
    defs = _operand_defs()
    single = {}
    for i in range(len(OPERANDS)):
        edges, lts = lts_edges(replace(defs, main=f"Op{i}"))
        single[i] = (lts.states[0], {(a.term, e, b.term) for a, e, b in edges})
    for s_text in SYNCS:
        sync = parse(HEADER + f"main M = Skip [| {{}} | {s_text} | {{}} |] Skip").processes[0].body.sync
        for i in single:
            for j in single:
                body = Par(Ref(f"Op{i}"), (), sync, (), Ref(f"Op{j}"))
                d = replace(defs, processes=defs.processes + (ProcessDef("Main", (), body),), main="Main")
                edges, _ = lts_edges(d)

                def key(c):
                    if c.term is OMEGA:
                        return "Ω"
                    if isinstance(c.term, Ref):
                        return (Ref(f"Op{i}"), Ref(f"Op{j}"))
                    return (c.term.left, c.term.right)

                mine = {(key(a), e, key(b)) for a, e, b in edges}
                l0, le = single[i]
                r0, re = single[j]
                _, _, expected = product((l0.term, le), (r0.term, re), sync)
                assert mine == expected, (OPERANDS[i], s_text, OPERANDS[j])
