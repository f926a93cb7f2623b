"""Frame/model generation, countermodel search, and the proposition battery.

Frame streams are deterministic: ascending state count, lexicographic within
a state count, exhaustive whenever the raw candidate space fits the budget
and seeded rejection sampling otherwise.  Samplers propose frames biased
toward the wanted classes, but every emitted frame is verified by the class
decision procedures and deduplicated.
"""
from __future__ import annotations

import itertools
import os
import random
from dataclasses import dataclass, replace
from typing import Iterable, Iterator, Optional, Sequence

from .constructions import (
    collapse_mono, equivalence_mismatches, expand_mono,
    mono_equivalence_mismatches, partition_lift, rs_collapse, standardize,
    transitive_lift,
)
from .errors import BudgetError
from .frame_classes import FrameClass, has_class, is_iel_structure
from .modelio import model_to_doc
from .semantics import (
    DEFAULT_ASSIGNMENT_CAP, Evaluator, Frame, Model, MonoModel, MonoStructure,
    Rel, bits, falsify_on_frame, is_closed, satisfies, up_sets, valid_in_frame,
)
from .syntax import (
    AgentSet, And, Atom, BOT, Box, Dia, Formula, Group, Implies, Or, TOP,
    groups_of, instantiate, render,
)

AGENT_POOL = ("a", "b", "c", "d", "e", "f", "g", "h")


@dataclass(frozen=True)
class SizeBudget:
    max_states: int = 3
    max_agents: int = 2
    max_formula_depth: int = 2
    max_candidates: int = 20000
    seed: int = 0

    def __post_init__(self):
        if self.max_agents < 1 or self.max_agents > 8:
            raise ValueError("max_agents must be between 1 and 8")
        if min(self.max_states, self.max_formula_depth, self.max_candidates) < 0:
            raise ValueError("budget fields must be nonnegative")

    def is_empty(self) -> bool:
        return self.max_states == 0 or self.max_candidates == 0


def budget_from_env(**overrides) -> SizeBudget:
    """Defaults, then IEML_BUDGET_* environment variables, then overrides."""
    fields = {}
    for name in ("max_states", "max_agents", "max_formula_depth",
                 "max_candidates", "seed"):
        env = os.environ.get(f"IEML_BUDGET_{name.upper()}")
        if env is not None:
            fields[name] = int(env)
    fields.update({k: v for k, v in overrides.items() if v is not None})
    return SizeBudget(**fields)


def default_agents(k: int) -> AgentSet:
    return AgentSet(AGENT_POOL[:k])


# ---------- frame enumeration ----------

_preorder_cache: dict = {}


def preorders(n: int) -> list[Rel]:
    """All preorders on n states, ascending by encoded bitmask (n <= 4)."""
    if n > 4:
        raise BudgetError("preorder enumeration supports at most 4 states")
    got = _preorder_cache.get(n)
    if got is None:
        seen = {Rel.from_mask(n, m).rt_closure() for m in range(1 << (n * n))}
        got = sorted(seen, key=Rel.mask)
        _preorder_cache[n] = got
    return got


def _raw_space(n: int, n_groups: int) -> Optional[int]:
    if n > 4:
        return None
    return len(preorders(n)) * (1 << (n * n)) ** n_groups


def _normalize_classes(classes) -> tuple:
    if isinstance(classes, (FrameClass, str)):
        classes = (classes,)
    return tuple(FrameClass(c) for c in classes)


def _random_relation(rng: random.Random, n: int) -> int:
    mask = rng.getrandbits(n * n)
    if rng.random() < 0.5:
        mask &= rng.getrandbits(n * n)
    return mask


def _diag(n: int) -> int:
    return sum(1 << (i * n + i) for i in range(n))


def _symmetrize(n: int, mask: int) -> int:
    out = mask
    for i in range(n):
        for j in range(n):
            if mask >> (i * n + j) & 1:
                out |= 1 << (j * n + i)
    return out


def _propose_group_mask(rng: random.Random, n: int, leq: Rel, wanted: set) -> int:
    if FrameClass.PARTITION in wanted:
        labels = [rng.randrange(n) for _ in range(n)]
        return sum(1 << (i * n + j) for i in range(n) for j in range(n)
                   if labels[i] == labels[j])
    if FrameClass.EPISTEMIC in wanted or FrameClass.DOXASTIC in wanted:
        mask = _random_relation(rng, n) & leq.mask()
        if FrameClass.EPISTEMIC in wanted:
            mask |= _diag(n)  # guarantees a successor through the preorder
        return mask
    if FrameClass.RS in wanted or (
            FrameClass.UD in wanted and rng.random() < 0.6):
        return _symmetrize(n, _random_relation(rng, n)) | _diag(n)
    mask = _random_relation(rng, n)
    if FrameClass.REFLEXIVE in wanted:
        mask |= _diag(n)
    if FrameClass.SYMMETRIC in wanted:
        mask = _symmetrize(n, mask)
    if FrameClass.TRANSITIVE in wanted:
        mask = Rel.from_mask(n, mask).compose(Rel.from_mask(n, mask)).mask() | mask
    if FrameClass.FORWARD_CONFLUENT in wanted:
        mask = leq.converse().compose(Rel.from_mask(n, mask)).mask()
    return mask


def _propose_frame(rng: random.Random, n: int, agents: AgentSet,
                   wanted: set) -> Frame:
    leq = Rel.from_mask(n, _random_relation(rng, n)).rt_closure()
    n_groups = (1 << len(agents)) - 1
    masks: dict = {}
    if FrameClass.STANDARD in wanted:
        for gm in range(1, n_groups + 1):
            if gm & (gm - 1) == 0:
                masks[gm] = _propose_group_mask(rng, n, leq, wanted)
        for gm in range(1, n_groups + 1):
            if gm & (gm - 1):
                acc = (1 << (n * n)) - 1
                for a in bits(gm):
                    acc &= masks[1 << a]
                masks[gm] = acc
    elif FrameClass.PRESTANDARD in wanted:
        for gm in sorted(range(1, n_groups + 1), key=lambda m: (bin(m).count("1"), m)):
            bound = (1 << (n * n)) - 1
            for sub in range(1, gm):
                if sub | gm == gm and sub in masks:
                    bound &= masks[sub]
            masks[gm] = _propose_group_mask(rng, n, leq, wanted) & bound
    else:
        for gm in range(1, n_groups + 1):
            masks[gm] = _propose_group_mask(rng, n, leq, wanted)
    rels = tuple(Rel.from_mask(n, masks[gm]) for gm in range(1, n_groups + 1))
    return Frame(agents, n, leq, rels)


def enumerate_frames(budget: SizeBudget, classes=FrameClass.ALL,
                     agents: Optional[AgentSet] = None,
                     stats: Optional[dict] = None) -> Iterator[Frame]:
    """Deterministic stream of pairwise-distinct frames of the given classes."""
    classes = _normalize_classes(classes)
    wanted = set(classes)
    if agents is None:
        agents = default_agents(budget.max_agents)
    n_groups = (1 << len(agents)) - 1
    if stats is None:
        stats = {}
    stats.update({"candidates": 0, "emitted": 0, "exhaustive": True})
    if budget.is_empty():
        stats["exhaustive"] = False
        return
    rng = random.Random(budget.seed)
    seen: set = set()
    remaining = budget.max_candidates
    for n in range(1, budget.max_states + 1):
        raw = _raw_space(n, n_groups)
        if raw is not None and raw <= remaining:
            for leq in preorders(n):
                space = itertools.product(range(1 << (n * n)), repeat=n_groups)
                for group_masks in space:
                    stats["candidates"] += 1
                    frame = Frame(agents, n, leq,
                                  tuple(Rel.from_mask(n, m) for m in group_masks))
                    if all(has_class(frame, c) for c in classes):
                        seen.add(frame)
                        stats["emitted"] += 1
                        yield frame
            remaining -= raw
        else:
            stats["exhaustive"] = False
            levels_left = budget.max_states - n + 1
            tries = remaining // levels_left
            remaining -= tries
            for _ in range(tries):
                stats["candidates"] += 1
                frame = _propose_frame(rng, n, agents, wanted)
                if frame in seen:
                    continue
                if all(has_class(frame, c) for c in classes):
                    seen.add(frame)
                    stats["emitted"] += 1
                    yield frame


def mono_structures(n: int, kind: Optional[str] = None) -> Iterator[MonoStructure]:
    """All single-relation structures on n states, optionally filtered."""
    for leq in preorders(n):
        for mask in range(1 << (n * n)):
            ms = MonoStructure(n, leq, Rel.from_mask(n, mask))
            if kind is None or is_iel_structure(ms, kind):
                yield ms


# ---------- random models ----------

def random_model(budget: SizeBudget, frame: Frame,
                 atoms: Sequence[str] = ("p", "q")) -> Model:
    return _random_model(random.Random(budget.seed), frame, atoms)


def _random_model(rng: random.Random, frame: Frame,
                  atoms: Sequence[str]) -> Model:
    sets = up_sets(frame)
    return Model.make(frame, {a: rng.choice(sets) for a in atoms})


def _random_mono_model(rng: random.Random, ms: MonoStructure,
                       atoms: Sequence[str]) -> MonoModel:
    closed = [u for u in range(1 << ms.n) if is_closed(ms.leq, u)]
    return MonoModel.make(ms, {a: rng.choice(closed) for a in atoms})


# ---------- formula spaces ----------

def all_formulas(atoms: Sequence[str], groups: Sequence[Group],
                 depth: int) -> list[Formula]:
    """Every formula over the atoms and groups up to the given depth."""
    level: list[Formula] = [Atom(a) for a in atoms] + [TOP, BOT]
    seen = set(level)
    for _ in range(depth):
        fresh: list[Formula] = []
        for g in groups:
            for f in level:
                fresh.extend((Box(g, f), Dia(g, f)))
        for a in level:
            for b in level:
                fresh.extend((Implies(a, b), Or(a, b), And(a, b)))
        for f in fresh:
            if f not in seen:
                seen.add(f)
                level.append(f)
    return level


def diamond_free_formulas(atoms: Sequence[str], group: Group,
                          depth: int) -> list[Formula]:
    """Every diamond-free formula (single box group) up to the given depth."""
    level: list[Formula] = [Atom(a) for a in atoms] + [TOP, BOT]
    seen = set(level)
    for _ in range(depth):
        fresh: list[Formula] = [Box(group, f) for f in level]
        for a in level:
            for b in level:
                fresh.extend((Implies(a, b), Or(a, b), And(a, b)))
        for f in fresh:
            if f not in seen:
                seen.add(f)
                level.append(f)
    return level


def random_formula(rng: random.Random, atoms: Sequence[str],
                   groups: Sequence[Group], depth: int) -> Formula:
    if depth == 0 or rng.random() < 0.2:
        roll = rng.random()
        if roll < 0.7:
            return Atom(rng.choice(list(atoms)))
        return TOP if roll < 0.85 else BOT
    kind = rng.choice("iioabd" if groups else "iioa")
    if kind == "b":
        return Box(rng.choice(list(groups)), random_formula(rng, atoms, groups, depth - 1))
    if kind == "d":
        return Dia(rng.choice(list(groups)), random_formula(rng, atoms, groups, depth - 1))
    left = random_formula(rng, atoms, groups, depth - 1)
    right = random_formula(rng, atoms, groups, depth - 1)
    if kind == "i":
        return Implies(left, right)
    if kind == "o":
        return Or(left, right)
    return And(left, right)


def sample_formulas(rng: random.Random, atoms: Sequence[str],
                    groups: Sequence[Group], depth: int,
                    count: int) -> list[Formula]:
    out: list[Formula] = []
    seen = set()
    for _ in range(count * 30):
        if len(out) >= count:
            break
        f = random_formula(rng, atoms, groups, depth)
        if f not in seen:
            seen.add(f)
            out.append(f)
    return out


# ---------- countermodel search ----------

@dataclass(frozen=True)
class CountermodelResult:
    found: bool
    model: Optional[Model]
    state: Optional[int]
    frames_checked: int
    exhausted: bool  # whole class space within the size bound was examined

    def to_json(self) -> dict:
        out = {"found": self.found, "frames_checked": self.frames_checked,
               "exhausted": self.exhausted}
        if self.found:
            out["model"] = model_to_doc(self.model)
            out["state"] = f"w{self.state}"
        return out


def agents_for_formula(a: Formula) -> AgentSet:
    """The agent universe a search over frames needs: the formula's own
    agents, or a single default agent for purely propositional input."""
    from .syntax import agents_of

    names = sorted(agents_of(a))
    if not names:
        return default_agents(1)
    return AgentSet(tuple(names))


def countermodel(a: Formula, classes, budget: SizeBudget,
                 cap: int = DEFAULT_ASSIGNMENT_CAP) -> CountermodelResult:
    """First model of the class falsifying ``a`` at some state, if any.

    A miss is only a validity proof when the result is exhaustive."""
    classes = _normalize_classes(classes)
    stats: dict = {}
    checked = 0
    skipped = False
    agents = agents_for_formula(a)
    for frame in enumerate_frames(budget, classes, agents=agents, stats=stats):
        checked += 1
        try:
            hit = falsify_on_frame(frame, a, cap)
        except BudgetError:
            skipped = True
            continue
        if hit is not None:
            model, state = hit
            if satisfies(model, state, a):  # pragma: no cover
                raise RuntimeError("countermodel witness failed re-verification")
            if not all(has_class(model.frame, c) for c in classes):  # pragma: no cover
                raise RuntimeError("countermodel witness left the frame class")
            return CountermodelResult(True, model, state, checked, False)
    return CountermodelResult(False, None, None, checked,
                              stats.get("exhaustive", False) and not skipped)


# ---------- proposition battery ----------

@dataclass(frozen=True)
class SuiteEntry:
    name: str
    status: str  # pass | fail
    checked: int
    witnesses: tuple
    extra: tuple = ()

    def to_json(self) -> dict:
        out = {"status": self.status, "checked": self.checked,
               "witnesses": list(self.witnesses)}
        out.update(dict(self.extra))
        return out


@dataclass(frozen=True)
class SuiteReport:
    seed: int
    entries: tuple

    @property
    def ok(self) -> bool:
        return all(e.status == "pass" for e in self.entries)

    def entry(self, name: str) -> SuiteEntry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    def to_json(self) -> dict:
        return {"seed": self.seed,
                "entries": {e.name: e.to_json() for e in self.entries}}


AXIOM_CLASSES = (
    ("A1", FrameClass.ALL), ("A2", FrameClass.ALL), ("A3", FrameClass.ALL),
    ("A4", FrameClass.ALL), ("A5", FrameClass.ALL),
    ("A6", FrameClass.DOXASTIC), ("A7", FrameClass.EPISTEMIC),
    ("A8", FrameClass.UD), ("A9", FrameClass.UD),
    ("A10", FrameClass.UD), ("A11", FrameClass.UD),
    ("A12", FrameClass.PRESTANDARD), ("A13", FrameClass.PRESTANDARD),
)


def axiom_instances(sid: str, agents: AgentSet) -> list[Formula]:
    """Concrete instances of a schema with atoms kept as atoms, one per
    group (or ordered pair of groups) over the agent set."""
    from .proofs import schema_catalog

    schema = schema_catalog()[sid]
    gvars = set()
    for slot in groups_of(schema.formula):
        gvars |= slot
    atom_map = {nm: Atom(nm) for nm in ("p", "q", "r")}
    out = []
    if not gvars:
        return [instantiate(schema, atom_map, {})]
    if gvars == {"alpha"}:
        for g in agents.groups():
            out.append(instantiate(schema, atom_map, {"alpha": g}))
        return out
    for g1 in agents.groups():
        for g2 in agents.groups():
            out.append(instantiate(schema, atom_map, {"alpha": g1, "beta": g2}))
    return out


_RULE_POOL_AB = (
    (Atom("p"), Atom("p")),
    (Atom("p"), Or(Atom("p"), Atom("q"))),
    (And(Atom("p"), Atom("q")), Atom("p")),
    (BOT, Atom("p")),
    (Atom("p"), TOP),
    (Atom("p"), Atom("q")),
)


def _rule_pool_r3(group: Group) -> list[tuple[Formula, Formula, Formula]]:
    p, q, r = Atom("p"), Atom("q"), Atom("r")
    return [(p, TOP, q), (p, Dia(group, p), p), (p, BOT, p), (p, q, r)]


def _witness_doc(frame: Frame, formula: Formula, note: str) -> dict:
    return {"formula": render(formula), "note": note,
            "frame": model_to_doc(Model.make(frame, {}))}


def proposition_suite(budget: SizeBudget, axiom_classes=None,
                      frames_per_check: Optional[int] = None) -> SuiteReport:
    """Run the validity, rule-preservation, heredity and construction-claim
    batteries at the given budget; failures become report witnesses."""
    if budget.is_empty():
        return SuiteReport(budget.seed, ())
    if frames_per_check is None:
        frames_per_check = max(1, min(100, budget.max_candidates // 50))
    agents = default_agents(budget.max_agents)
    entries: list[SuiteEntry] = []

    entries.append(_heredity_entry(budget, agents, frames_per_check))
    entries.extend(_axiom_entries(budget, agents, frames_per_check, axiom_classes))
    entries.extend(_rule_entries(budget, agents, frames_per_check))
    entries.extend(_claim_entries(budget, agents, frames_per_check))
    return SuiteReport(budget.seed, tuple(entries))


def _take_frames(budget: SizeBudget, classes, count: int,
                 agents: AgentSet, max_states: Optional[int] = None) -> list[Frame]:
    b = budget if max_states is None else replace(
        budget, max_states=min(budget.max_states, max_states))
    return list(itertools.islice(enumerate_frames(b, classes, agents=agents), count))


def _heredity_entry(budget: SizeBudget, agents: AgentSet,
                    frames_per_check: int) -> SuiteEntry:
    rng = random.Random(f"{budget.seed}:heredity")
    groups = agents.groups()
    checked = 0
    witnesses = []
    for frame in _take_frames(budget, FrameClass.ALL, frames_per_check, agents):
        model = _random_model(rng, frame, ("p", "q"))
        formulas = sample_formulas(rng, ("p", "q"), groups,
                                   budget.max_formula_depth, 20)
        ev = Evaluator(frame)
        memo: dict = {}
        val = model.val_map()
        for f in formulas:
            checked += 1
            if not is_closed(frame.leq, ev.truth_mask(f, val, memo)):
                witnesses.append({"formula": render(f),
                                  "model": model_to_doc(model)})
    status = "pass" if not witnesses else "fail"
    return SuiteEntry("heredity", status, checked, tuple(witnesses[:3]))


def _axiom_entries(budget: SizeBudget, agents: AgentSet, frames_per_check: int,
                   axiom_classes=None) -> list[SuiteEntry]:
    table = dict(AXIOM_CLASSES)
    if axiom_classes:
        table.update(axiom_classes)
    out = []
    for sid, cls in table.items():
        instances = axiom_instances(sid, agents)
        checked = 0
        witnesses = []
        for frame in _take_frames(budget, cls, frames_per_check, agents):
            for inst in instances:
                checked += 1
                if not valid_in_frame(frame, inst):
                    witnesses.append(_witness_doc(frame, inst, "axiom falsified"))
            if witnesses:
                break
        status = "pass" if not witnesses else "fail"
        out.append(SuiteEntry(f"{sid}_on_{cls.value}", status, checked,
                              tuple(witnesses[:3])))
    return out


def _rule_entries(budget: SizeBudget, agents: AgentSet,
                  frames_per_check: int) -> list[SuiteEntry]:
    group = frozenset({agents.names[0]})
    out = []
    frames = _take_frames(budget, FrameClass.ALL, frames_per_check, agents)
    for rule in ("R1", "R2", "R3"):
        checked = 0
        vacuous = 0
        witnesses = []
        for frame in frames:
            if rule == "R3":
                cases = [(Implies(Dia(group, a), Or(b, Box(group, Implies(a, c)))),
                          Implies(Dia(group, a), Or(b, Dia(group, c))))
                         for a, b, c in _rule_pool_r3(group)]
            else:
                wrap = Box if rule == "R1" else Dia
                cases = [(Implies(a, b),
                          Implies(wrap(group, a), wrap(group, b)))
                         for a, b in _RULE_POOL_AB]
            for premise, conclusion in cases:
                checked += 1
                if not valid_in_frame(frame, premise):
                    vacuous += 1
                    continue
                if not valid_in_frame(frame, conclusion):
                    witnesses.append(_witness_doc(frame, conclusion,
                                                  "conclusion falsified"))
        status = "pass" if not witnesses else "fail"
        out.append(SuiteEntry(f"{rule}_preserves_validity", status, checked,
                              tuple(witnesses[:3]),
                              extra=(("vacuous", vacuous),)))
    return out


def _claim_result(name: str, checked: int, mismatches: list,
                  class_failures: list, extra: tuple = ()) -> SuiteEntry:
    witnesses = tuple(mismatches[:3]) + tuple(class_failures[:3])
    status = "pass" if not witnesses else "fail"
    return SuiteEntry(name, status, checked, witnesses, extra=extra)


def _class_check(frame: Frame, required: Iterable[FrameClass],
                 failures: list, note: str) -> None:
    for c in required:
        if not has_class(frame, c):
            failures.append({"note": f"{note}: output not {c.value}"})


_PRESERVED = (FrameClass.DOXASTIC, FrameClass.EPISTEMIC, FrameClass.UD,
              FrameClass.RS, FrameClass.PARTITION)


def _claim_entries(budget: SizeBudget, agents: AgentSet,
                   frames_per_check: int) -> list[SuiteEntry]:
    rng = random.Random(f"{budget.seed}:claims")
    groups = agents.groups()
    depth = min(2, budget.max_formula_depth)
    small = all_formulas(("p",), groups, depth)
    entries = []

    # standardization: inputs capped at two states
    for name, variant, classes in (
            ("claim_standardize", "default", (FrameClass.PRESTANDARD,)),
            ("claim_standardize_partition", "partition",
             (FrameClass.PRESTANDARD, FrameClass.PARTITION))):
        checked = 0
        mismatches: list = []
        class_failures: list = []
        count = max(2, frames_per_check // 12)
        for frame in _take_frames(budget, classes, count, agents, max_states=2):
            model = _random_model(rng, frame, ("p",))
            result = standardize(model, variant)
            checked += 1
            formulas = small if result.model.frame.n <= 256 else \
                sample_formulas(rng, ("p",), groups, depth, 150)
            mismatches.extend(equivalence_mismatches(model, result, formulas))
            _class_check(result.model.frame, (FrameClass.STANDARD,),
                         class_failures, name)
            for c in _PRESERVED:
                if has_class(frame, c):
                    _class_check(result.model.frame, (c,), class_failures,
                                 f"{name} preserving {c.value}")
        entries.append(_claim_result(name, checked, mismatches, class_failures))

    # transitive lift
    checked = 0
    mismatches = []
    class_failures = []
    for frame in _take_frames(budget, FrameClass.ALL, frames_per_check, agents):
        model = _random_model(rng, frame, ("p",))
        result = transitive_lift(model)
        checked += 1
        mismatches.extend(equivalence_mismatches(model, result, small))
        _class_check(result.model.frame, (FrameClass.TRANSITIVE,),
                     class_failures, "claim_transitive_lift")
        for c in (FrameClass.PRESTANDARD, FrameClass.STANDARD):
            if has_class(frame, c):
                _class_check(result.model.frame, (c,), class_failures,
                             f"claim_transitive_lift preserving {c.value}")
    entries.append(_claim_result("claim_transitive_lift", checked,
                                 mismatches, class_failures))

    # rs collapse
    checked = 0
    mismatches = []
    class_failures = []
    for frame in _take_frames(budget, FrameClass.UD, frames_per_check, agents):
        model = _random_model(rng, frame, ("p",))
        result = rs_collapse(model)
        checked += 1
        mismatches.extend(equivalence_mismatches(model, result, small))
        _class_check(result.model.frame, (FrameClass.RS,),
                     class_failures, "claim_rs_collapse")
    entries.append(_claim_result("claim_rs_collapse", checked,
                                 mismatches, class_failures))

    # partition lifts
    for name, variant, classes in (
            ("claim_partition_lift", "plain", (FrameClass.RS,)),
            ("claim_partition_lift_prestandard", "prestandard",
             (FrameClass.RS, FrameClass.PRESTANDARD))):
        checked = 0
        skipped = 0
        mismatches = []
        class_failures = []
        count = max(2, frames_per_check // 3)
        for frame in _take_frames(budget, classes, count, agents):
            model = _random_model(rng, frame, ("p",))
            try:
                result = partition_lift(model, variant)
            except BudgetError:
                skipped += 1
                continue
            checked += 1
            formulas = small if result.model.frame.n <= 256 else \
                sample_formulas(rng, ("p",), groups, depth, 150)
            mismatches.extend(equivalence_mismatches(model, result, formulas))
            _class_check(result.model.frame, (FrameClass.PARTITION,),
                         class_failures, name)
            if variant == "prestandard":
                _class_check(result.model.frame, (FrameClass.PRESTANDARD,),
                             class_failures, name)
        entries.append(_claim_result(name, checked, mismatches, class_failures,
                                     extra=(("skipped_over_budget", skipped),)))

    # mono conversions
    entries.extend(_mono_entries(budget, agents, frames_per_check, rng, depth))
    return entries


def _mono_entries(budget: SizeBudget, agents: AgentSet, frames_per_check: int,
                  rng: random.Random, depth: int) -> list[SuiteEntry]:
    entries = []
    df_sets = {g: diamond_free_formulas(("p",), g, depth)
               for g in agents.groups()}

    for name, kind, out_classes in (
            ("claim_expand_mono", "minus",
             (FrameClass.DOXASTIC, FrameClass.STANDARD)),
            ("claim_expand_mono_full", "full",
             (FrameClass.EPISTEMIC, FrameClass.STANDARD))):
        checked = 0
        mismatches: list = []
        class_failures: list = []
        structures = []
        for n in range(1, min(budget.max_states, 3) + 1):
            structures.extend(mono_structures(n, kind))
        if len(structures) > frames_per_check:
            structures = structures[:frames_per_check // 2] + \
                rng.sample(structures, frames_per_check // 2)
        for ms in structures:
            mono = _random_mono_model(rng, ms, ("p",))
            result = expand_mono(mono, agents, kind)
            checked += 1
            for g, formulas in df_sets.items():
                mismatches.extend(
                    mono_equivalence_mismatches(result.model, mono, formulas))
            _class_check(result.model.frame, out_classes, class_failures, name)
        entries.append(_claim_result(name, checked, mismatches, class_failures))

    for name, kind, cls in (
            ("claim_collapse_mono", "minus", FrameClass.DOXASTIC),
            ("claim_collapse_mono_epi", "full", FrameClass.EPISTEMIC)):
        checked = 0
        mismatches = []
        class_failures = []
        for frame in _take_frames(budget, cls, frames_per_check, agents):
            model = _random_model(rng, frame, ("p",))
            for alpha in (agents.groups()[0], agents.groups()[-1]):
                result = collapse_mono(model, alpha, kind)
                checked += 1
                mismatches.extend(mono_equivalence_mismatches(
                    model, result.model, df_sets[alpha]))
                if not is_iel_structure(result.model.structure, kind):
                    class_failures.append(
                        {"note": f"{name}: output fails the {kind} conditions"})
        entries.append(_claim_result(name, checked, mismatches, class_failures))
    return entries
