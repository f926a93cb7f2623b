"""Independent oracles and generators shared across the test suite.

The naive evaluators here work on explicit pair sets with literal
transliterations of the satisfaction clauses, deliberately sharing no code
with the bitmask engine they are used to check.
"""
from __future__ import annotations

import itertools
import random

from ieml import (
    AgentSet, And, Atom, BOT, Bot, Box, Dia, Formula, Implies, Model,
    MonoBox, MonoModel, Or, TOP, Top, atoms_of,
)
from ieml.semantics import Frame, Rel, bits


def rel_pairs(r: Rel) -> set:
    return set(r.pairs())


def model_tables(m: Model):
    frame = m.frame
    leq = rel_pairs(frame.leq)
    rel = {g: rel_pairs(frame.r(g)) for g in frame.agents.groups()}
    val = {atom: set(bits(mask)) for atom, mask in m.val}
    return frame.n, leq, rel, val


def naive_satisfies(m: Model, s: int, f: Formula, variant: str = "prenosil") -> bool:
    n, leq, rel, val = model_tables(m)

    def sat(w: int, g: Formula) -> bool:
        if isinstance(g, Atom):
            return w in val.get(g.name, set())
        if isinstance(g, Top):
            return True
        if isinstance(g, Bot):
            return False
        if isinstance(g, And):
            return sat(w, g.left) and sat(w, g.right)
        if isinstance(g, Or):
            return sat(w, g.left) or sat(w, g.right)
        if isinstance(g, Implies):
            return all(not sat(t, g.left) or sat(t, g.right)
                       for t in range(n) if (w, t) in leq)
        if isinstance(g, Box):
            return all(sat(t, g.body)
                       for v in range(n) if (w, v) in leq
                       for t in range(n) if (v, t) in rel[g.group])
        if isinstance(g, Dia):
            if variant == "fischer_servi":
                return any(sat(t, g.body)
                           for t in range(n) if (w, t) in rel[g.group])
            if variant == "wijesekera":
                return all(
                    any(sat(u, g.body)
                        for u in range(n) if (t, u) in rel[g.group])
                    for t in range(n) if (w, t) in leq)
            return any(sat(t, g.body)
                       for v in range(n) if (v, w) in leq
                       for t in range(n) if (v, t) in rel[g.group])
        raise TypeError(g)

    return sat(s, f)


def naive_mono_satisfies(mm: MonoModel, s: int, f: Formula) -> bool:
    st = mm.structure
    leq = rel_pairs(st.leq)
    r = rel_pairs(st.r)
    val = {atom: set(bits(mask)) for atom, mask in mm.val}

    def sat(w: int, g: Formula) -> bool:
        if isinstance(g, Atom):
            return w in val.get(g.name, set())
        if isinstance(g, Top):
            return True
        if isinstance(g, Bot):
            return False
        if isinstance(g, And):
            return sat(w, g.left) and sat(w, g.right)
        if isinstance(g, Or):
            return sat(w, g.left) or sat(w, g.right)
        if isinstance(g, Implies):
            return all(not sat(t, g.left) or sat(t, g.right)
                       for t in range(st.n) if (w, t) in leq)
        if isinstance(g, MonoBox):
            return all(sat(t, g.body) for t in range(st.n) if (w, t) in r)
        raise TypeError(g)

    return sat(s, f)


def naive_valid_in_frame(frame: Frame, f: Formula) -> bool:
    """Enumerate full valuations over the atoms of f (all subsets, skipping
    the ones that are not closed) and require truth at every state."""
    names = sorted(atoms_of(f))
    n = frame.n
    leq = rel_pairs(frame.leq)

    def closed(states: set) -> bool:
        return all(t in states for s in states for t in range(n) if (s, t) in leq)

    subsets = [set(c) for k in range(n + 1)
               for c in itertools.combinations(range(n), k)]
    for choice in itertools.product(subsets, repeat=len(names)):
        if not all(closed(c) for c in choice):
            continue
        model = Model.make(frame, dict(zip(names, choice)))
        if not all(naive_satisfies(model, s, f) for s in range(n)):
            return False
    return True


def naive_compose(p: Rel, q: Rel) -> set:
    return {(i, k) for i, j1 in p.pairs() for j2, k in q.pairs() if j1 == j2}


def random_ast(rng: random.Random, atoms=("p", "q", "r"),
               agents=("a", "b"), depth: int = 4) -> Formula:
    """Formula generator independent of the search module's one."""
    if depth == 0:
        roll = rng.random()
        if roll < 0.7:
            return Atom(rng.choice(atoms))
        return TOP if roll < 0.85 else BOT
    kind = rng.randrange(8)
    if kind == 0:
        return random_ast(rng, atoms, agents, 0)
    if kind in (1, 2):
        return Implies(random_ast(rng, atoms, agents, depth - 1),
                       random_ast(rng, atoms, agents, depth - 1))
    if kind == 3:
        return Or(random_ast(rng, atoms, agents, depth - 1),
                  random_ast(rng, atoms, agents, depth - 1))
    if kind == 4:
        return And(random_ast(rng, atoms, agents, depth - 1),
                   random_ast(rng, atoms, agents, depth - 1))
    group = frozenset(rng.sample(agents, rng.randrange(1, len(agents) + 1)))
    node = Box if kind in (5, 6) else Dia
    return node(group, random_ast(rng, atoms, agents, depth - 1))


def two_chain_frame(agents: AgentSet, rel=None) -> Frame:
    """Two states with 0 below 1; accessibility empty unless given."""
    leq = Rel.from_pairs(2, [(0, 0), (1, 1), (0, 1)])
    rel = rel or {}
    full = {g: rel.get(g, Rel.empty(2)) for g in agents.groups()}
    return Frame.make(agents, 2, leq, full)
