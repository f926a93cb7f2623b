import random

import pytest

from ieml import (
    AgentSet, Atom, Box, Dia, Evaluator, Frame, Model, MonoModel,
    MonoStructure, Rel, check_frame, compose, falsify_on_frame, is_closed,
    mono_satisfies, parse, satisfies, satisfies_variant, substitute,
    true_in_model, up_sets, valid_in_frame,
)
from ieml.errors import BudgetError, PreconditionError
from ieml.search import SizeBudget, enumerate_frames, sample_formulas
from ieml.syntax import MonoBox

from helpers import (
    naive_compose, naive_mono_satisfies, naive_satisfies,
    naive_valid_in_frame, random_ast, two_chain_frame,
)

AG = AgentSet.of("a")
AG2 = AgentSet.of("a", "b")
A = frozenset({"a"})


def chain_model(val=None, rel=None):
    frame = two_chain_frame(AG, rel)
    return Model.make(frame, val or {})


# ---------- relations ----------

def test_rel_compose_examples():
    r = Rel.from_pairs(3, [(0, 1), (1, 2)])
    assert compose(Rel.identity(3), r) == r
    assert compose(Rel.empty(3), r) == Rel.empty(3)
    assert compose(Rel.from_pairs(3, [(0, 1)]), Rel.from_pairs(3, [(1, 2)])) \
        == Rel.from_pairs(3, [(0, 2)])


def test_rel_compose_against_oracle():
    rng = random.Random(3)
    for _ in range(60):
        n = rng.randrange(1, 5)
        p = Rel.from_mask(n, rng.getrandbits(n * n))
        q = Rel.from_mask(n, rng.getrandbits(n * n))
        assert set(compose(p, q).pairs()) == naive_compose(p, q)


def test_rel_converse_and_closure():
    rng = random.Random(4)
    for _ in range(40):
        n = rng.randrange(1, 5)
        r = Rel.from_mask(n, rng.getrandbits(n * n))
        assert set(r.converse().pairs()) == {(j, i) for i, j in r.pairs()}
        c = r.rt_closure()
        assert c.is_reflexive() and c.is_transitive()
        assert r.le(c)


def test_rel_converse_numpy_path():
    n = 200
    rng = random.Random(5)
    pairs = {(rng.randrange(n), rng.randrange(n)) for _ in range(900)}
    r = Rel.from_pairs(n, pairs)
    assert set(r.converse().pairs()) == {(j, i) for i, j in pairs}


# ---------- frames and reports ----------

def test_check_frame_examples():
    one = Frame.make(AG, 1, Rel.identity(1), {A: Rel.empty(1)})
    assert check_frame(one).ok

    bad_refl = Frame.make(AG, 1, Rel.empty(1), {A: Rel.empty(1)})
    rep = check_frame(bad_refl)
    assert not rep.ok and "not reflexive" in rep.problems[0]

    leq = Rel.from_pairs(3, [(0, 0), (1, 1), (2, 2), (0, 1), (1, 2)])
    bad_trans = Frame.make(AG, 3, leq, {A: Rel.empty(3)})
    rep = check_frame(bad_trans)
    assert not rep.ok and any("not transitive" in p for p in rep.problems)


def test_up_sets_examples():
    one = Frame.make(AG, 1, Rel.identity(1), {A: Rel.empty(1)})
    assert up_sets(one) == [0, 1]
    assert up_sets(two_chain_frame(AG)) == [0, 2, 3]
    flat = Frame.make(AG, 2, Rel.identity(2), {A: Rel.empty(2)})
    assert up_sets(flat) == [0, 1, 2, 3]
    with pytest.raises(BudgetError):
        up_sets(flat, cap=2)


def test_valuation_closure_enforced():
    with pytest.raises(ValueError, match="not closed"):
        chain_model({"p": {0}})
    m = chain_model({"p": {1}})
    assert m.v("p") == 0b10


# ---------- satisfaction ----------

def test_satisfies_spec_examples():
    m = chain_model({"p": {1}})
    assert satisfies(m, 0, parse("T"))
    assert not satisfies(m, 0, parse("p \\/ ~p"))
    assert satisfies(m, 1, parse("p \\/ ~p"))
    assert satisfies(m, 0, parse("[a]p"))  # vacuous: empty accessibility
    assert not satisfies(m, 0, parse("p"))


def test_satisfies_cross_validated_with_oracle():
    rng = random.Random(77)
    budget = SizeBudget(max_states=3, max_agents=2, max_candidates=300, seed=8)
    frames = list(enumerate_frames(budget, "all"))
    for frame in frames[:40]:
        sets = up_sets(frame)
        model = Model.make(frame, {"p": rng.choice(sets), "q": rng.choice(sets)})
        for _ in range(12):
            f = random_ast(rng, depth=3)
            for s in range(frame.n):
                assert satisfies(model, s, f) == naive_satisfies(model, s, f), \
                    (f, s, model)


def test_satisfies_variants():
    one = Frame.make(AG, 1, Rel.identity(1), {A: Rel.identity(1)})
    m = Model.make(one, {"p": {0}})
    for v in ("prenosil", "fischer_servi", "wijesekera"):
        assert satisfies_variant(m, 0, parse("<a>p"), v)
    # prenosil variant is the plain relation
    m2 = chain_model({"p": {1}}, {A: Rel.from_pairs(2, [(0, 1)])})
    f = parse("<a>p")
    assert satisfies_variant(m2, 0, f, "prenosil") == satisfies(m2, 0, f)


def test_fischer_servi_requires_forward_confluence():
    # 0<=1 with accessibility only at 0 is not forward confluent
    frame = two_chain_frame(AG, {A: Rel.from_pairs(2, [(0, 0)])})
    m = Model.make(frame, {})
    with pytest.raises(PreconditionError):
        satisfies_variant(m, 0, parse("<a>p"), "fischer_servi")


def test_variants_cross_validated_with_oracle():
    rng = random.Random(13)
    budget = SizeBudget(max_states=3, max_agents=1, max_candidates=400, seed=21)
    frames = list(enumerate_frames(budget, "forward_confluent"))
    assert frames
    for frame in frames[:25]:
        sets = up_sets(frame)
        model = Model.make(frame, {"p": rng.choice(sets)})
        for _ in range(8):
            f = random_ast(rng, atoms=("p",), agents=("a",), depth=3)
            for variant in ("prenosil", "fischer_servi", "wijesekera"):
                for s in range(frame.n):
                    assert satisfies_variant(model, s, f, variant) == \
                        naive_satisfies(model, s, f, variant)


def test_true_in_model():
    m = chain_model({"p": {1}})
    assert true_in_model(m, parse("T"))
    assert not true_in_model(m, parse("p"))
    one = Frame.make(AG, 1, Rel.identity(1), {A: Rel.identity(1)})
    assert true_in_model(Model.make(one, {"p": {0}}), parse("[a]p"))


# ---------- validity ----------

def test_valid_in_frame_examples():
    frame = two_chain_frame(AG)
    assert valid_in_frame(frame, parse("T"))
    assert valid_in_frame(frame, parse("[a]p /\\ [a]q -> [a](p /\\ q)"))
    assert not valid_in_frame(frame, parse("p \\/ ~p"))
    hit = falsify_on_frame(frame, parse("p \\/ ~p"))
    model, state = hit
    assert model.v("p") == 0b10 and state == 0


def test_validity_against_full_valuation_oracle():
    budget = SizeBudget(max_states=2, max_agents=1, max_candidates=70, seed=6)
    frames = list(enumerate_frames(budget, "all"))
    rng = random.Random(14)
    formulas = [random_ast(rng, atoms=("p", "q"), agents=("a",), depth=2)
                for _ in range(15)]
    checked = 0
    for frame in frames:
        for f in formulas:
            assert valid_in_frame(frame, f) == naive_valid_in_frame(frame, f)
            checked += 1
    assert checked >= 100


def test_validity_invariant_under_atom_renaming():
    frame = two_chain_frame(AG, {A: Rel.from_pairs(2, [(0, 1)])})
    rng = random.Random(15)
    for _ in range(25):
        f = random_ast(rng, atoms=("p", "q"), agents=("a",), depth=3)
        g = substitute(f, {"p": Atom("x1"), "q": Atom("x2")})
        assert valid_in_frame(frame, f) == valid_in_frame(frame, g)


def test_validity_budget():
    frame = Frame.make(AG, 2, Rel.identity(2), {A: Rel.empty(2)})
    with pytest.raises(BudgetError):
        valid_in_frame(frame, parse("p \\/ q"), cap=8)


def test_heredity_property_small():
    rng = random.Random(16)
    budget = SizeBudget(max_states=3, max_agents=2, max_candidates=250, seed=31)
    for frame in enumerate_frames(budget, "all"):
        sets = up_sets(frame)
        model = Model.make(frame, {"p": rng.choice(sets), "q": rng.choice(sets)})
        ev = Evaluator(frame)
        memo = {}
        for f in sample_formulas(rng, ("p", "q"), frame.agents.groups(), 3, 10):
            assert is_closed(frame.leq, ev.truth_mask(f, model.val_map(), memo))


def test_box_antitone_in_accessibility():
    # growing the accessibility relation can only shrink the box truth set
    rng = random.Random(17)
    box_p = parse("[a]p")
    for _ in range(40):
        n = rng.randrange(1, 4)
        leq = Rel.from_mask(n, rng.getrandbits(n * n)).rt_closure()
        r1 = Rel.from_mask(n, rng.getrandbits(n * n))
        r2 = r1 | Rel.from_mask(n, rng.getrandbits(n * n))
        f1 = Frame.make(AG, n, leq, {A: r1})
        f2 = Frame.make(AG, n, leq, {A: r2})
        sets = up_sets(f1)
        val = {"p": rng.choice(sets)}
        big = Evaluator(f1).truth_mask(box_p, val)
        small = Evaluator(f2).truth_mask(box_p, val)
        assert small & ~big == 0


# ---------- mono structures ----------

def test_mono_satisfaction_box_clause():
    st = MonoStructure(2, Rel.from_pairs(2, [(0, 0), (1, 1), (0, 1)]),
                       Rel.from_pairs(2, [(0, 1), (1, 1)]))
    mm = MonoModel.make(st, {"p": {1}})
    assert mono_satisfies(mm, 0, MonoBox(Atom("p")))
    assert mono_satisfies(mm, 0, parse("~~p"))
    assert not mono_satisfies(mm, 0, Atom("p"))


def test_mono_satisfaction_against_oracle():
    rng = random.Random(18)
    from ieml.search import mono_structures
    structures = [s for n in (1, 2, 3) for s in mono_structures(n)]
    for ms in rng.sample(structures, 60):
        closed = [u for u in range(1 << ms.n) if is_closed(ms.leq, u)]
        mm = MonoModel.make(ms, {"p": rng.choice(closed)})
        for _ in range(6):
            f = random_ast(rng, atoms=("p",), agents=("a",), depth=3)
            from ieml import is_diamond_free, tau
            if not is_diamond_free(f):
                continue
            g = tau(f)
            for s in range(ms.n):
                assert mono_satisfies(mm, s, g) == naive_mono_satisfies(mm, s, g)
