"""Finite birelational frames, models, satisfaction, truth, validity.

States are indices 0..n-1.  Relations are bitsets per row: ``rows[i]`` has
bit ``j`` set when i relates to j.  Group-indexed accessibility is stored as
a tuple over all nonempty groups in ascending bitmask order, so it is total
by construction.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Optional, Union

from .errors import BudgetError, PreconditionError
from .syntax import (
    AgentSet, Atom, Bot, Box, Dia, Formula, Group, Implies, MonoBox, And, Or,
    Top, atoms_of,
)

DEFAULT_ASSIGNMENT_CAP = 1 << 20

VARIANTS = ("prenosil", "fischer_servi", "wijesekera")


def bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


# ---------- Relations ----------

@dataclass(frozen=True)
class Rel:
    n: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if self.n < 0 or len(self.rows) != self.n:
            raise ValueError("row count must equal carrier size")
        full = (1 << self.n) - 1
        for r in self.rows:
            if r & ~full:
                raise ValueError("row refers to states outside the carrier")

    @classmethod
    def empty(cls, n: int) -> "Rel":
        return cls(n, (0,) * n)

    @classmethod
    def identity(cls, n: int) -> "Rel":
        return cls(n, tuple(1 << i for i in range(n)))

    @classmethod
    def total(cls, n: int) -> "Rel":
        return cls(n, ((1 << n) - 1,) * n)

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[tuple[int, int]]) -> "Rel":
        rows = [0] * n
        for i, j in pairs:
            rows[i] |= 1 << j
        return cls(n, tuple(rows))

    @classmethod
    def from_mask(cls, n: int, mask: int) -> "Rel":
        """Decode a relation from an n*n bitmask, row-major."""
        full = (1 << n) - 1
        return cls(n, tuple(mask >> (n * i) & full for i in range(n)))

    def mask(self) -> int:
        return sum(r << (self.n * i) for i, r in enumerate(self.rows))

    def has(self, i: int, j: int) -> bool:
        return bool(self.rows[i] >> j & 1)

    def pairs(self) -> list[tuple[int, int]]:
        return [(i, j) for i in range(self.n) for j in bits(self.rows[i])]

    def __and__(self, other: "Rel") -> "Rel":
        return Rel(self.n, tuple(a & b for a, b in zip(self.rows, other.rows)))

    def __or__(self, other: "Rel") -> "Rel":
        return Rel(self.n, tuple(a | b for a, b in zip(self.rows, other.rows)))

    def le(self, other: "Rel") -> bool:
        return all(a & ~b == 0 for a, b in zip(self.rows, other.rows))

    def converse(self) -> "Rel":
        if self.n >= 128:  # bit-matrix transpose through numpy
            import numpy as np

            nbytes = (self.n + 7) // 8
            buf = b"".join(r.to_bytes(nbytes, "little") for r in self.rows)
            arr = np.frombuffer(buf, dtype=np.uint8).reshape(self.n, nbytes)
            unpacked = np.unpackbits(arr, axis=1, bitorder="little")[:, :self.n]
            packed = np.packbits(np.ascontiguousarray(unpacked.T),
                                 axis=1, bitorder="little")
            rows = tuple(int.from_bytes(packed[i].tobytes(), "little")
                         for i in range(self.n))
            return Rel(self.n, rows)
        rows = [0] * self.n
        for i, r in enumerate(self.rows):
            for j in bits(r):
                rows[j] |= 1 << i
        return Rel(self.n, tuple(rows))

    def compose(self, other: "Rel") -> "Rel":
        """Left-to-right: i (self;other) k iff some j with i self j and j other k."""
        rows = []
        cache: dict = {}  # rows repeat heavily in product constructions
        for r in self.rows:
            acc = cache.get(r)
            if acc is None:
                acc = 0
                for j in bits(r):
                    acc |= other.rows[j]
                cache[r] = acc
            rows.append(acc)
        return Rel(self.n, tuple(rows))

    def is_reflexive(self) -> bool:
        return all(self.rows[i] >> i & 1 for i in range(self.n))

    def is_symmetric(self) -> bool:
        return self.le(self.converse())

    def is_transitive(self) -> bool:
        return self.compose(self).le(self)

    def rt_closure(self) -> "Rel":
        rows = [r | (1 << i) for i, r in enumerate(self.rows)]
        for j in range(self.n):
            bit = 1 << j
            for i in range(self.n):
                if rows[i] & bit:
                    rows[i] |= rows[j]
        return Rel(self.n, tuple(rows))


def compose(p: Rel, q: Rel) -> Rel:
    """Relational composition, left to right."""
    if p.n != q.n:
        raise ValueError("compose needs relations over the same carrier")
    return p.compose(q)


# ---------- Frames, models, mono structures ----------

@dataclass(frozen=True)
class Frame:
    agents: AgentSet
    n: int
    leq: Rel
    rels: tuple[Rel, ...]  # index = group bitmask - 1

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("frames need a nonempty state set")
        if self.leq.n != self.n:
            raise ValueError("preorder carrier mismatch")
        want = (1 << len(self.agents)) - 1
        if len(self.rels) != want:
            raise ValueError(f"need one relation per nonempty group ({want})")
        for r in self.rels:
            if r.n != self.n:
                raise ValueError("relation carrier mismatch")

    @classmethod
    def make(cls, agents: AgentSet, n: int, leq: Rel,
             rel: Mapping[Group, Rel]) -> "Frame":
        rels = []
        for g in agents.groups():
            if g not in rel:
                raise ValueError(f"missing relation for group {{{','.join(sorted(g))}}}")
            rels.append(rel[g])
        return cls(agents, n, leq, tuple(rels))

    def r(self, group: Group) -> Rel:
        return self.rels[self.agents.mask(group) - 1]

    def r_mask(self, gmask: int) -> Rel:
        return self.rels[gmask - 1]

    def geq(self) -> Rel:
        return self.leq.converse()

    def rel_map(self) -> dict:
        return {g: self.r(g) for g in self.agents.groups()}


@dataclass(frozen=True)
class FrameReport:
    ok: bool
    problems: tuple[str, ...]


def check_frame(f: Frame) -> FrameReport:
    """Confirm ``leq`` is a preorder and accessibility is total."""
    problems = []
    if not f.leq.is_reflexive():
        missing = [i for i in range(f.n) if not f.leq.has(i, i)]
        problems.append(f"not reflexive: missing {missing}")
    if not f.leq.is_transitive():
        gaps = [(i, j) for i, j in f.leq.compose(f.leq).pairs() if not f.leq.has(i, j)]
        problems.append(f"not transitive: missing {gaps[:4]}")
    # totality over groups holds by construction, but report defensively
    want = (1 << len(f.agents)) - 1
    if len(f.rels) != want:  # pragma: no cover
        problems.append("accessibility not total over groups")
    return FrameReport(not problems, tuple(problems))


def is_closed(leq: Rel, mask: int) -> bool:
    """Is the state set an up-set of the preorder?"""
    return all(leq.rows[s] & ~mask == 0 for s in bits(mask))


def up_sets(f: Frame, cap: int = DEFAULT_ASSIGNMENT_CAP) -> list[int]:
    """All closed state sets as bitmasks, ascending."""
    if 1 << f.n > cap:
        raise BudgetError(f"2^{f.n} candidate sets exceed the cap {cap}")
    return [u for u in range(1 << f.n) if is_closed(f.leq, u)]


def _val_items(n: int, val: Mapping[str, Union[int, Iterable[int]]]) -> tuple:
    items = []
    for name, v in val.items():
        mask = v if isinstance(v, int) else sum(1 << i for i in set(v))
        if mask & ~((1 << n) - 1):
            raise ValueError(f"valuation of {name!r} mentions unknown states")
        items.append((name, mask))
    return tuple(sorted(items))


@dataclass(frozen=True)
class Model:
    frame: Frame
    val: tuple  # sorted ((atom, state mask), ...)

    def __post_init__(self):
        for name, mask in self.val:
            if not is_closed(self.frame.leq, mask):
                raise ValueError(f"valuation of {name!r} is not closed under the preorder")

    @classmethod
    def make(cls, frame: Frame, val: Mapping[str, Union[int, Iterable[int]]]) -> "Model":
        return cls(frame, _val_items(frame.n, val))

    def v(self, atom: str) -> int:
        for name, mask in self.val:
            if name == atom:
                return mask
        return 0

    def val_map(self) -> dict:
        return dict(self.val)


@dataclass(frozen=True)
class MonoStructure:
    """Single-relation birelational structure (no groups)."""

    n: int
    leq: Rel
    r: Rel

    def __post_init__(self):
        if self.leq.n != self.n or self.r.n != self.n:
            raise ValueError("carrier mismatch")


@dataclass(frozen=True)
class MonoModel:
    structure: MonoStructure
    val: tuple

    def __post_init__(self):
        for name, mask in self.val:
            if not is_closed(self.structure.leq, mask):
                raise ValueError(f"valuation of {name!r} is not closed under the preorder")

    @classmethod
    def make(cls, structure: MonoStructure,
             val: Mapping[str, Union[int, Iterable[int]]]) -> "MonoModel":
        return cls(structure, _val_items(structure.n, val))

    def v(self, atom: str) -> int:
        for name, mask in self.val:
            if name == atom:
                return mask
        return 0


# ---------- Satisfaction ----------

def is_forward_confluent(f: Frame) -> bool:
    geq = f.geq()
    return all(geq.compose(r).le(r.compose(geq)) for r in f.rels)


class Evaluator:
    """Truth-set computation for one frame.

    ``truth_mask`` returns the bitmask of states satisfying a formula under a
    given valuation.  Modal clauses run in two linear passes over the rows of
    the plain relations, so no composed relation is ever materialized; an
    optional memo dict shares subformula results across calls with the same
    valuation.
    """

    def __init__(self, frame: Frame, variant: str = "prenosil"):
        if variant not in VARIANTS:
            raise ValueError(f"unknown variant {variant!r}")
        if variant == "fischer_servi" and not is_forward_confluent(frame):
            raise PreconditionError(
                "the fischer_servi diamond requires a forward confluent frame")
        self.frame = frame
        self.variant = variant

    def truth_mask(self, f: Formula, val: Mapping[str, int],
                   memo: Optional[dict] = None) -> int:
        if memo is None:
            memo = {}
        return self._truth(f, val, memo)

    def _truth(self, f: Formula, val: Mapping[str, int], memo: dict) -> int:
        # memo is keyed by object identity: structural hashing dominates the
        # profile on large batteries, and generated batteries share subterms
        hit = memo.get(id(f))
        if hit is not None:
            return hit[1]
        n = self.frame.n
        full = (1 << n) - 1
        leq_rows = self.frame.leq.rows
        if isinstance(f, Atom):
            out = val.get(f.name, 0)
        elif isinstance(f, Top):
            out = full
        elif isinstance(f, Bot):
            out = 0
        elif isinstance(f, And):
            out = self._truth(f.left, val, memo) & self._truth(f.right, val, memo)
        elif isinstance(f, Or):
            out = self._truth(f.left, val, memo) | self._truth(f.right, val, memo)
        elif isinstance(f, Implies):
            bad = self._truth(f.left, val, memo) & ~self._truth(f.right, val, memo)
            if bad == 0:
                out = full
            else:
                out = 0
                for s in range(n):
                    if leq_rows[s] & bad == 0:
                        out |= 1 << s
        elif isinstance(f, Box):
            # s satisfies the box iff every preorder successor of s sends its
            # whole accessibility image into the body
            body = self._truth(f.body, val, memo)
            r_rows = self.frame.r(f.group).rows
            over = ~body
            good = 0
            for v in range(n):
                if r_rows[v] & over == 0:
                    good |= 1 << v
            if good == full:
                out = full
            else:
                bad = ~good
                out = 0
                for s in range(n):
                    if leq_rows[s] & bad == 0:
                        out |= 1 << s
        elif isinstance(f, Dia):
            body = self._truth(f.body, val, memo)
            r_rows = self.frame.r(f.group).rows
            if self.variant == "fischer_servi":
                out = 0
                for s in range(n):
                    if r_rows[s] & body:
                        out |= 1 << s
            elif self.variant == "wijesekera":
                can = 0
                for t in range(n):
                    if r_rows[t] & body:
                        can |= 1 << t
                miss = ~can
                out = 0
                for s in range(n):
                    if leq_rows[s] & miss == 0:
                        out |= 1 << s
            else:
                # witnesses: states with an accessibility successor in the
                # body; the diamond holds above each witness
                out = 0
                for v in range(n):
                    if r_rows[v] & body:
                        out |= leq_rows[v]
        elif isinstance(f, MonoBox):
            raise TypeError("group-free boxes need a mono structure; see mono_satisfies")
        else:  # pragma: no cover
            raise TypeError(f"not a formula: {f!r}")
        memo[id(f)] = (f, out)  # keep f alive so its id is not recycled
        return out


def satisfies(m: Model, s: int, a: Formula) -> bool:
    """The satisfaction relation at state ``s``."""
    if not 0 <= s < m.frame.n:
        raise ValueError(f"state {s} out of range")
    ev = Evaluator(m.frame)
    return bool(ev.truth_mask(a, m.val_map()) >> s & 1)


def satisfies_variant(m: Model, s: int, a: Formula, variant: str) -> bool:
    """Satisfaction with the chosen diamond clause; other clauses unchanged."""
    if not 0 <= s < m.frame.n:
        raise ValueError(f"state {s} out of range")
    ev = Evaluator(m.frame, variant)
    return bool(ev.truth_mask(a, m.val_map()) >> s & 1)


def true_in_model(m: Model, a: Formula) -> bool:
    ev = Evaluator(m.frame)
    full = (1 << m.frame.n) - 1
    return ev.truth_mask(a, m.val_map()) == full


def _assignment_space(f: Frame, a: Formula, cap: int) -> tuple[list[str], list[int]]:
    names = sorted(atoms_of(a))
    sets = up_sets(f, cap)
    if names and len(sets) ** len(names) > cap:
        raise BudgetError(
            f"{len(sets)}^{len(names)} valuation assignments exceed the cap {cap}")
    return names, sets

def valid_in_frame(f: Frame, a: Formula,
                   cap: int = DEFAULT_ASSIGNMENT_CAP) -> bool:
    """True in every model based on ``f``.

    Only atoms occurring in ``a`` are assigned (others cannot matter); each
    ranges over all closed state sets.
    """
    return falsify_on_frame(f, a, cap) is None


def falsify_on_frame(f: Frame, a: Formula,
                     cap: int = DEFAULT_ASSIGNMENT_CAP) -> Optional[tuple[Model, int]]:
    """A model on ``f`` and a state where ``a`` fails, if one exists."""
    names, sets = _assignment_space(f, a, cap)
    ev = Evaluator(f)
    full = (1 << f.n) - 1
    for choice in itertools.product(sets, repeat=len(names)):
        val = dict(zip(names, choice))
        mask = ev.truth_mask(a, val)
        if mask != full:
            state = next(bits(full & ~mask))
            return Model.make(f, val), state
    return None


# ---------- Mono-modal satisfaction (single box, plain accessibility) ----------

def mono_truth_mask(mm: MonoModel, f: Formula,
                    memo: Optional[dict] = None) -> int:
    if memo is None:
        memo = {}
    hit = memo.get(id(f))
    if hit is not None:
        return hit[1]
    st = mm.structure
    n = st.n
    full = (1 << n) - 1
    if isinstance(f, Atom):
        out = mm.v(f.name)
    elif isinstance(f, Top):
        out = full
    elif isinstance(f, Bot):
        out = 0
    elif isinstance(f, And):
        out = mono_truth_mask(mm, f.left, memo) & mono_truth_mask(mm, f.right, memo)
    elif isinstance(f, Or):
        out = mono_truth_mask(mm, f.left, memo) | mono_truth_mask(mm, f.right, memo)
    elif isinstance(f, Implies):
        bad = mono_truth_mask(mm, f.left, memo) & ~mono_truth_mask(mm, f.right, memo)
        out = 0
        for s in range(n):
            if st.leq.rows[s] & bad == 0:
                out |= 1 << s
    elif isinstance(f, MonoBox):
        body = mono_truth_mask(mm, f.body, memo)
        out = 0
        for s in range(n):
            if st.r.rows[s] & ~body == 0:
                out |= 1 << s
    else:
        raise TypeError(f"not a group-free formula: {f!r}")
    memo[id(f)] = (f, out)
    return out


def mono_satisfies(mm: MonoModel, s: int, a: Formula) -> bool:
    if not 0 <= s < mm.structure.n:
        raise ValueError(f"state {s} out of range")
    return bool(mono_truth_mask(mm, a) >> s & 1)
