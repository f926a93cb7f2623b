import itertools
import random

import pytest

from ieml import (
    AgentSet, Frame, FrameClass, Model, MonoModel, MonoStructure, Rel,
    check_frame, classify, collapse_mono, equivalence_mismatches, expand_mono,
    has_class, is_iel_structure, mono_equivalence_mismatches, parse,
    partition_lift, partition_lift_witnesses, rs_collapse, satisfies,
    standardize, transitive_lift, witness_h,
)
from ieml.constructions import _icoords, _pi_table
from ieml.errors import BudgetError, PreconditionError
from ieml.search import (
    SizeBudget, all_formulas, diamond_free_formulas, enumerate_frames,
    _random_model,
)

from helpers import two_chain_frame

AG = AgentSet.of("a")
AG2 = AgentSet.of("a", "b")
A, B, AB = frozenset({"a"}), frozenset({"b"}), frozenset({"a", "b"})


def one_point_model(agents=AG, reflexive=True):
    r = Rel.identity(1) if reflexive else Rel.empty(1)
    frame = Frame.make(agents, 1, Rel.identity(1),
                       {g: r for g in agents.groups()})
    return Model.make(frame, {"p": {0}})


# ---------- standardization ----------

def brute_standard_rel(m, alpha_mask, tables, variant="default"):
    """The lifted relation computed directly from its defining condition."""
    frame = m.frame
    n = frame.n
    agents = frame.agents
    k = len(agents)
    coords = _icoords(agents)
    cpos = {c: i for i, c in enumerate(coords)}
    pi = _pi_table(m, variant)
    n_i = len(tables)
    pairs = []
    for (t, gi), (u, hi) in itertools.product(
            itertools.product(range(n), range(n_i)), repeat=2):
        g, h = tables[gi], tables[hi]
        ok = True
        for gm in range(1, 1 << k):
            for a in range(k):
                if gm >> a & 1 and alpha_mask >> a & 1:
                    if g[cpos[(gm, a)]] != h[cpos[(gm, a)]]:
                        ok = False
            sg = sh = 0
            for a in range(k):
                if gm >> a & 1:
                    sg ^= g[cpos[(gm, a)]]
                    sh ^= h[cpos[(gm, a)]]
            if sg ^ sh != pi[gm][t][u]:
                ok = False
        if ok:
            pairs.append((t * n_i + gi, u * n_i + hi))
    return Rel.from_pairs(n * n_i, pairs)


@pytest.mark.parametrize("agents,nstates", [(AG, 1), (AG, 2), (AG2, 1)])
def test_standardize_matches_brute_force(agents, nstates):
    rng = random.Random(nstates + len(agents))
    budget = SizeBudget(max_states=nstates, max_agents=len(agents),
                        max_candidates=20000, seed=1)
    frames = [f for f in enumerate_frames(budget, FrameClass.PRESTANDARD,
                                          agents=agents)
              if f.n == nstates]
    for frame in frames[:6] + rng.sample(frames, min(6, len(frames))):
        model = _random_model(rng, frame, ("p",))
        result = standardize(model)
        nvals = 1 << frame.n
        tables = list(itertools.product(range(nvals),
                                        repeat=len(_icoords(agents))))
        for gm in range(1, 1 << len(agents)):
            want = brute_standard_rel(model, gm, tables)
            got = result.model.frame.r_mask(gm)
            assert got == want, (frame, gm)


def test_standardize_one_point_example():
    res = standardize(one_point_model())
    assert res.model.frame.n == 2
    assert res.names == ("w0|g0", "w0|g1")
    assert has_class(res.model.frame, FrameClass.STANDARD)
    assert check_frame(res.model.frame).ok


def test_standardize_requires_prestandard():
    rel = {A: Rel.empty(2), B: Rel.empty(2), AB: Rel.identity(2)}
    frame = Frame.make(AG2, 2, Rel.identity(2), rel)
    with pytest.raises(PreconditionError):
        standardize(Model.make(frame, {}))


def test_standardize_budget():
    frame = Frame.make(AG2, 2, Rel.identity(2),
                       {g: Rel.identity(2) for g in AG2.groups()})
    with pytest.raises(BudgetError):
        standardize(Model.make(frame, {}), max_states=64)


def test_standardize_partition_variant_needs_partition():
    frame = two_chain_frame(AG)  # empty accessibility: not reflexive
    with pytest.raises(PreconditionError):
        standardize(Model.make(frame, {}), "partition")


def test_standardize_claim_and_preservation_small():
    rng = random.Random(23)
    budget = SizeBudget(max_states=2, max_agents=1, max_candidates=200, seed=5)
    formulas = all_formulas(("p",), AG.groups(), 2)
    preserved = (FrameClass.DOXASTIC, FrameClass.EPISTEMIC, FrameClass.UD,
                 FrameClass.RS, FrameClass.PARTITION)
    count = 0
    for frame in enumerate_frames(budget, FrameClass.PRESTANDARD):
        model = _random_model(rng, frame, ("p",))
        result = standardize(model)
        assert check_frame(result.model.frame).ok
        assert has_class(result.model.frame, FrameClass.STANDARD)
        assert equivalence_mismatches(model, result, formulas) == []
        for c in preserved:
            if has_class(frame, c):
                assert has_class(result.model.frame, c), c
        count += 1
    assert count == 66  # every 1-agent frame up to two states is prestandard


def test_witness_h_lands_in_lifted_relation():
    rng = random.Random(31)
    budget = SizeBudget(max_states=2, max_agents=2, max_candidates=17000, seed=7)
    frames = list(enumerate_frames(budget, FrameClass.PRESTANDARD))
    for frame in rng.sample(frames, 5):
        model = _random_model(rng, frame, ("p",))
        result = standardize(model)
        nvals = 1 << frame.n
        coords = _icoords(frame.agents)
        tables = list(itertools.product(range(nvals), repeat=len(coords)))
        index_of = {t: i for i, t in enumerate(tables)}
        n_i = len(tables)
        for gm in range(1, 1 << len(frame.agents)):
            alpha = frame.agents.group_of_mask(gm)
            for t, u in frame.r(alpha).pairs():
                for g in rng.sample(tables, 4):
                    h = witness_h(model, alpha, t, u, g)
                    src = t * n_i + index_of[g]
                    dst = u * n_i + index_of[h]
                    assert result.model.frame.r(alpha).has(src, dst)


def test_witness_h_four_cases():
    model = one_point_model(AG2)
    g = tuple([1] * len(_icoords(AG2)))
    h = witness_h(model, A, 0, 0, g)
    coords = _icoords(AG2)
    for (gm, a), value in zip(coords, h):
        in_group = bool(gm >> a & 1)
        in_alpha = a == 0  # alpha = {a}, agent index 0
        if not in_group:
            assert value == 0
        elif in_alpha:
            assert value == g[coords.index((gm, a))]


def test_witness_h_preconditions():
    model = one_point_model(AG, reflexive=False)
    with pytest.raises(PreconditionError):
        witness_h(model, A, 0, 0, (0,))


# ---------- transitive lift ----------

def test_transitive_lift_examples():
    res = transitive_lift(one_point_model())
    out = res.model.frame
    assert out.r(A).pairs() == [(0, 1)]
    assert has_class(out, FrameClass.TRANSITIVE)
    assert res.names == ("w0|0", "w0|1")
    # the point satisfies the diamond of top iff its images do
    dia_top = parse("<a>T")
    assert satisfies(one_point_model(), 0, dia_top)
    assert satisfies(res.model, 0, dia_top)
    assert satisfies(res.model, 1, dia_top)

    empty = Model.make(two_chain_frame(AG), {})
    res2 = transitive_lift(empty)
    assert res2.model.frame.r(A) == Rel.empty(4)


def test_transitive_lift_claim_battery():
    rng = random.Random(41)
    budget = SizeBudget(max_states=3, max_agents=2, max_candidates=2000, seed=9)
    formulas = all_formulas(("p",), AG2.groups(), 2)
    for frame in list(enumerate_frames(budget, FrameClass.ALL))[:60]:
        model = _random_model(rng, frame, ("p",))
        result = transitive_lift(model)
        assert check_frame(result.model.frame).ok
        assert has_class(result.model.frame, FrameClass.TRANSITIVE)
        assert equivalence_mismatches(model, result, formulas) == []
        for c in (FrameClass.PRESTANDARD, FrameClass.STANDARD):
            if has_class(frame, c):
                assert has_class(result.model.frame, c)


# ---------- rs collapse ----------

def test_rs_collapse_examples():
    m = one_point_model()
    res = rs_collapse(m)
    assert res.model.frame == m.frame and res.model.val == m.val

    with pytest.raises(PreconditionError):
        rs_collapse(Model.make(two_chain_frame(AG), {}))


def test_rs_collapse_on_rs_inputs_grows_and_preserves():
    rng = random.Random(43)
    budget = SizeBudget(max_states=3, max_agents=2, max_candidates=1500, seed=10)
    formulas = all_formulas(("p",), AG2.groups(), 2)
    for frame in list(enumerate_frames(budget, FrameClass.RS))[:40]:
        model = _random_model(rng, frame, ("p",))
        result = rs_collapse(model)
        out = result.model.frame
        assert has_class(out, FrameClass.RS)
        for g in AG2.groups():
            assert frame.r(g).le(out.r(g))
        assert equivalence_mismatches(model, result, formulas) == []


# ---------- partition lift ----------

def test_partition_lift_one_point_identity():
    res = partition_lift(one_point_model())
    assert res.model.frame.n == 1
    assert has_class(res.model.frame, FrameClass.PARTITION)


def test_partition_lift_two_point_total():
    frame = Frame.make(AG, 2, Rel.identity(2), {A: Rel.total(2)})
    model = Model.make(frame, {"p": {1}})
    res = partition_lift(model)
    assert has_class(res.model.frame, FrameClass.PARTITION)
    formulas = all_formulas(("p",), AG.groups(), 2)
    assert equivalence_mismatches(model, res, formulas) == []


def test_partition_lift_preconditions_and_budget():
    with pytest.raises(PreconditionError):
        partition_lift(Model.make(two_chain_frame(AG), {}))
    frame = Frame.make(AG2, 3, Rel.identity(3),
                       {g: Rel.total(3) for g in AG2.groups()})
    with pytest.raises(BudgetError):
        partition_lift(Model.make(frame, {}), max_states=1000)


def test_partition_lift_witnesses_reproduce_reachability():
    frame = Frame.make(AG, 2, Rel.from_pairs(2, [(0, 0), (1, 1), (0, 1)]).rt_closure(),
                       {A: Rel.total(2)})
    model = Model.make(frame, {})
    res = partition_lift(model)
    out = res.model.frame
    n_j = len(res.fibers[0])
    coords = [(t, gm) for t in range(2) for gm in (1,)]
    succ_lists = [sorted(j for j in range(2) if frame.r_mask(gm).has(t, j))
                  for t, gm in coords]
    tables = list(itertools.product(*succ_lists))
    index_of = {t: i for i, t in enumerate(tables)}
    # order-then-step reachability transfers up and down the lift
    for t, u, v in itertools.product(range(2), repeat=3):
        src_reach = frame.leq.has(t, u) and frame.r(A).has(u, v)
        for gi in range(n_j):
            lifted = any(
                out.leq.has(t * n_j + gi, u * n_j + hi)
                and out.r(A).has(u * n_j + hi, v * n_j + ii)
                for hi in range(n_j) for ii in range(n_j))
            assert lifted == src_reach
        if src_reach:
            h, i = partition_lift_witnesses(model, A, u, v)
            hi, ii = index_of[h], index_of[i]
            assert out.leq.has(t * n_j + 0, u * n_j + hi)
            assert out.r(A).has(u * n_j + hi, v * n_j + ii)


def test_partition_lift_prestandard_variant():
    rng = random.Random(47)
    budget = SizeBudget(max_states=3, max_agents=2, max_candidates=1200, seed=13)
    formulas = all_formulas(("p",), AG2.groups(), 2)
    done = 0
    for frame in enumerate_frames(budget, (FrameClass.RS, FrameClass.PRESTANDARD)):
        model = _random_model(rng, frame, ("p",))
        try:
            res = partition_lift(model, "prestandard")
        except BudgetError:
            continue
        assert has_class(res.model.frame, FrameClass.PARTITION)
        assert has_class(res.model.frame, FrameClass.PRESTANDARD)
        assert equivalence_mismatches(model, res, formulas) == []
        done += 1
        if done >= 25:
            break
    assert done >= 10


# ---------- mono conversions ----------

def test_expand_mono_examples():
    ms = MonoStructure(1, Rel.identity(1), Rel.identity(1))
    mono = MonoModel.make(ms, {"p": {0}})
    res = expand_mono(mono, AG2, "minus")
    tags = classify(res.model.frame)
    assert FrameClass.DOXASTIC in tags and FrameClass.STANDARD in tags
    res_full = expand_mono(mono, AG2, "full")
    assert FrameClass.EPISTEMIC in classify(res_full.model.frame)


def test_expand_mono_precondition():
    leq = Rel.from_pairs(2, [(0, 0), (1, 1), (0, 1)])
    bad = MonoModel.make(MonoStructure(2, leq, Rel.from_pairs(2, [(1, 1)])), {})
    with pytest.raises(PreconditionError):
        expand_mono(bad, AG2, "minus")


def test_expand_mono_claim_battery():
    from ieml.search import mono_structures, _random_mono_model
    rng = random.Random(53)
    structures = [s for n in (1, 2, 3) for s in mono_structures(n, "minus")]
    formulas = {g: diamond_free_formulas(("p",), g, 2) for g in AG2.groups()}
    for ms in structures[:20] + rng.sample(structures, 30):
        mono = _random_mono_model(rng, ms, ("p",))
        res = expand_mono(mono, AG2, "minus")
        for g, fs in formulas.items():
            assert mono_equivalence_mismatches(res.model, mono, fs) == []


def test_collapse_mono_examples():
    m = one_point_model(AG2)
    res = collapse_mono(m, A, "minus")
    assert is_iel_structure(res.model.structure, "minus")

    empty = Model.make(two_chain_frame(AG2), {})
    res2 = collapse_mono(empty, A, "minus")
    assert res2.model.structure.r == Rel.empty(2)
    assert is_iel_structure(res2.model.structure, "minus")

    with pytest.raises(PreconditionError):
        collapse_mono(empty, A, "full")  # not epistemic


def test_collapse_mono_epistemic_yields_full_structure():
    rng = random.Random(59)
    budget = SizeBudget(max_states=3, max_agents=2, max_candidates=1500, seed=17)
    formulas = {g: diamond_free_formulas(("p",), g, 2) for g in AG2.groups()}
    done = 0
    for frame in enumerate_frames(budget, FrameClass.EPISTEMIC):
        model = _random_model(rng, frame, ("p",))
        for alpha in (A, AB):
            res = collapse_mono(model, alpha, "full")
            assert is_iel_structure(res.model.structure, "full")
            assert mono_equivalence_mismatches(model, res.model,
                                               formulas[alpha]) == []
        done += 1
        if done >= 30:
            break
    assert done >= 20
