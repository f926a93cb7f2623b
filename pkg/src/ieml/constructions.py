"""Model transformations with machine-checkable equivalence claims.

Each construction returns a :class:`ConstructionResult` carrying the new
model, display names for its states, and for every source state the list of
output states representing it (its fiber).  The advertised biconditionals
("the source state satisfies B iff every/some fiber state does") can then be
checked exhaustively with :func:`equivalence_mismatches`.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

from .errors import BudgetError, PreconditionError
from .frame_classes import FrameClass, has_class, is_iel_structure
from .modelio import default_names
from .semantics import (
    Evaluator, Frame, Model, MonoModel, MonoStructure, Rel, bits,
    mono_truth_mask,
)
from .syntax import AgentSet, Formula, Group, tau

STANDARDIZE_MAX_STATES = 8192
PARTITION_LIFT_MAX_STATES = 4096

# An index function table: one state-set mask per (group, agent) coordinate,
# coordinates ordered by ascending group bitmask, then agent position.
IFunc = tuple

# A choice function table: one successor state per (state, group) coordinate,
# coordinates ordered by ascending state index, then group bitmask.
JFunc = tuple


@dataclass(frozen=True)
class ConstructionResult:
    model: Union[Model, MonoModel]
    names: tuple
    fibers: tuple  # source state index -> tuple of output state indices


# ---------- shared coordinate helpers ----------

def _icoords(agents: AgentSet) -> list[tuple[int, int]]:
    k = len(agents)
    return [(gmask, a) for gmask in range(1, 1 << k) for a in range(k)]


def _pi_table(m: Model, variant: str) -> dict:
    """pi[gmask][t][u]: the mismatch set attached to moving from t to u."""
    frame = m.frame
    n = frame.n
    full = (1 << n) - 1
    pi: dict = {}
    for gmask in range(1, 1 << len(frame.agents)):
        r = frame.r_mask(gmask)
        if variant == "partition":
            rows = [[r.rows[t] ^ r.rows[u] for u in range(n)] for t in range(n)]
        else:
            rows = [[0 if r.has(t, u) else full for u in range(n)] for t in range(n)]
        pi[gmask] = rows
    return pi


def _names(m: Model, src_names: Optional[Sequence[str]]) -> tuple:
    if src_names is None:
        return default_names(m.frame.n if isinstance(m, Model) else m.structure.n)
    return tuple(src_names)


# ---------- standardization ----------

def standardize(m: Model, variant: str = "default",
                max_states: int = STANDARDIZE_MAX_STATES,
                src_names: Optional[Sequence[str]] = None) -> ConstructionResult:
    """Blow a prestandard model up into a standard one over index functions.

    The new carrier pairs each state with a table assigning a state set to
    every (group, agent) coordinate.  Two lifted states are related for a
    group exactly when the tables agree on the group's own coordinates and
    their per-group symmetric differences track the source relation.
    """
    if variant not in ("default", "partition"):
        raise ValueError(f"unknown variant {variant!r}")
    frame = m.frame
    if not has_class(frame, FrameClass.PRESTANDARD):
        raise PreconditionError("standardize needs a prestandard frame")
    if variant == "partition" and not has_class(frame, FrameClass.PARTITION):
        raise PreconditionError("the partition variant needs a partition frame")
    n, agents = frame.n, frame.agents
    coords = _icoords(agents)
    cpos = {c: i for i, c in enumerate(coords)}
    nvals = 1 << n
    n_i = nvals ** len(coords)
    n_out = n * n_i
    if n_out > max_states:
        raise BudgetError(f"output would have {n_out} states (cap {max_states})")

    tables = list(itertools.product(range(nvals), repeat=len(coords)))
    index_of = {t: i for i, t in enumerate(tables)}
    pi = _pi_table(m, variant)
    k = len(agents)
    gmasks = list(range(1, 1 << k))
    group_coords = {gm: [cpos[(gm, a)] for a in range(k) if gm >> a & 1]
                    for gm in gmasks}
    loose = [cpos[(gm, a)] for gm in gmasks for a in range(k) if not gm >> a & 1]
    # per table and group: xor of the table over the group's own coordinates
    sigma = [[0] * (len(gmasks) + 1) for _ in tables]
    for gi, g in enumerate(tables):
        for gm in gmasks:
            acc = 0
            for c in group_coords[gm]:
                acc ^= g[c]
            sigma[gi][gm] = acc

    rel = {}
    for amask in gmasks:
        closed_groups = [gm for gm in gmasks if not (gm & ~amask)]
        split = []  # (gm, free coords minus one, determined coord, fixed xor coords)
        for gm in gmasks:
            if gm & ~amask:
                free = [cpos[(gm, a)] for a in range(k)
                        if gm >> a & 1 and not amask >> a & 1]
                fixed = [cpos[(gm, a)] for a in range(k)
                         if gm >> a & 1 and amask >> a & 1]
                split.append((gm, free[:-1], free[-1], fixed))
        open_coords = [c for _, rest, _, _ in split for c in rest] + loose
        rows = [0] * n_out
        for t in range(n):
            for u in range(n):
                if any(pi[gm][t][u] for gm in closed_groups):
                    continue
                base = u * n_i
                for gi, g in enumerate(tables):
                    acc = 0
                    template = list(g)
                    needs = []
                    for gm, rest, last, fixed in split:
                        need = sigma[gi][gm] ^ pi[gm][t][u]
                        for c in fixed:
                            need ^= g[c]
                        needs.append((last, rest, need))
                    for assignment in itertools.product(range(nvals),
                                                        repeat=len(open_coords)):
                        for c, v in zip(open_coords, assignment):
                            template[c] = v
                        for last, rest, need in needs:
                            hv = need
                            for c in rest:
                                hv ^= template[c]
                            template[last] = hv
                        acc |= 1 << (base + index_of[tuple(template)])
                    rows[t * n_i + gi] |= acc
        rel[agents.group_of_mask(amask)] = Rel(n_out, tuple(rows))

    block = (1 << n_i) - 1
    leq_rows = []
    for t in range(n):
        row = 0
        for u in bits(frame.leq.rows[t]):
            row |= block << (u * n_i)
        leq_rows.extend([row] * n_i)
    out_frame = Frame.make(agents, n_out, Rel(n_out, tuple(leq_rows)), rel)

    val = {}
    for atom, mask in m.val:
        acc = 0
        for t in bits(mask):
            acc |= block << (t * n_i)
        val[atom] = acc
    out = Model.make(out_frame, val)

    src = _names(m, src_names)
    names = tuple(f"{src[t]}|g{i}" for t in range(n) for i in range(n_i))
    fibers = tuple(tuple(range(t * n_i, (t + 1) * n_i)) for t in range(n))
    return ConstructionResult(out, names, fibers)


def witness_h(m: Model, alpha: Group, t: int, u: int, g: IFunc,
              variant: str = "default") -> IFunc:
    """The table h with (t,g) related to (u,h) in the standardized model.

    ``pick`` selects, for each group not inside ``alpha``, its least member
    outside ``alpha`` in the canonical agent order; that coordinate absorbs
    the per-group correction."""
    frame = m.frame
    if not has_class(frame, FrameClass.PRESTANDARD):
        raise PreconditionError("witness_h needs a prestandard frame")
    if not frame.r(alpha).has(t, u):
        raise PreconditionError("witness_h needs t related to u for the group")
    agents = frame.agents
    k = len(agents)
    amask = agents.mask(alpha)
    coords = _icoords(agents)
    cpos = {c: i for i, c in enumerate(coords)}
    pi = _pi_table(m, variant)
    h = []
    for gm, a in coords:
        in_group = bool(gm >> a & 1)
        in_alpha = bool(amask >> a & 1)
        if not in_group:
            h.append(0)
        elif in_alpha:
            h.append(g[cpos[(gm, a)]])
        else:
            rest = gm & ~amask
            picked = (rest & -rest).bit_length() - 1
            if a != picked:
                h.append(0)
            else:
                acc = pi[gm][t][u]
                for b in bits(rest):
                    acc ^= g[cpos[(gm, b)]]
                h.append(acc)
    return tuple(h)


# ---------- transitive lift ----------

def transitive_lift(m: Model,
                    src_names: Optional[Sequence[str]] = None) -> ConstructionResult:
    """Duplicate every state into a 0-layer and a 1-layer; accessibility only
    crosses from layer 0 to layer 1, so no two steps compose."""
    frame = m.frame
    n = frame.n
    n_out = 2 * n
    rel = {}
    for group in frame.agents.groups():
        rows = [0] * n_out
        for t, u in frame.r(group).pairs():
            rows[2 * t] |= 1 << (2 * u + 1)
        rel[group] = Rel(n_out, tuple(rows))
    leq_rows = []
    for t in range(n):
        row = 0
        for u in bits(frame.leq.rows[t]):
            row |= 0b11 << (2 * u)
        leq_rows.extend([row, row])
    out_frame = Frame.make(frame.agents, n_out, Rel(n_out, tuple(leq_rows)), rel)
    val = {}
    for atom, mask in m.val:
        acc = 0
        for t in bits(mask):
            acc |= 0b11 << (2 * t)
        val[atom] = acc
    out = Model.make(out_frame, val)
    src = _names(m, src_names)
    names = tuple(f"{src[t]}|{j}" for t in range(n) for j in (0, 1))
    fibers = tuple((2 * t, 2 * t + 1) for t in range(n))
    return ConstructionResult(out, names, fibers)


# ---------- collapse to a reflexive symmetric frame ----------

def rs_collapse(m: Model,
                src_names: Optional[Sequence[str]] = None) -> ConstructionResult:
    """Close accessibility under order detours in both directions."""
    frame = m.frame
    if not has_class(frame, FrameClass.UD):
        raise PreconditionError(
            "rs_collapse needs an up and down reflexive and symmetric frame")
    leq, geq = frame.leq, frame.geq()
    rel = {}
    for group in frame.agents.groups():
        r = frame.r(group)
        rel[group] = (leq.compose(r).compose(leq)) & (geq.compose(r).compose(geq))
    out_frame = Frame.make(frame.agents, frame.n, leq, rel)
    out = Model(out_frame, m.val)
    names = _names(m, src_names)
    fibers = tuple((t,) for t in range(frame.n))
    return ConstructionResult(out, names, fibers)


# ---------- partition lift ----------

def _jcoords(n: int, n_groups: int) -> list[tuple[int, int]]:
    return [(t, gm) for t in range(n) for gm in range(1, n_groups + 1)]


def partition_lift(m: Model, variant: str = "plain",
                   max_states: int = PARTITION_LIFT_MAX_STATES,
                   src_names: Optional[Sequence[str]] = None) -> ConstructionResult:
    """Pair states with choice functions into accessibility successors; two
    pairs are related when the chosen two-element sets coincide."""
    if variant not in ("plain", "prestandard"):
        raise ValueError(f"unknown variant {variant!r}")
    frame = m.frame
    if not has_class(frame, FrameClass.RS):
        raise PreconditionError("partition_lift needs a reflexive symmetric frame")
    n, agents = frame.n, frame.agents
    n_groups = (1 << len(agents)) - 1
    coords = _jcoords(n, n_groups)
    cpos = {c: i for i, c in enumerate(coords)}
    succ_lists = [sorted(bits(frame.r_mask(gm).rows[t])) for t, gm in coords]
    n_j = 1
    for lst in succ_lists:
        n_j *= len(lst)
    n_out = n * n_j
    if n_out > max_states:
        raise BudgetError(f"output would have {n_out} states (cap {max_states})")
    tables = list(itertools.product(*succ_lists))

    strides = [0] * len(coords)
    acc = 1
    for c in range(len(coords) - 1, -1, -1):
        strides[c] = acc
        acc *= len(succ_lists[c])

    patterns: dict = {}

    def pattern(c: int, pos: int) -> int:
        key = (c, pos)
        pat = patterns.get(key)
        if pat is None:
            stride = strides[c]
            deg = len(succ_lists[c])
            block = ((1 << stride) - 1) << (pos * stride)
            period = deg * stride
            pat = 0
            for i in range(n_j // period):
                pat |= block << (i * period)
            patterns[key] = pat
        return pat

    def allowed_mask(t: int, u: int, gm: int, gv: int) -> int:
        # positions of x in the (u, gm) successor list with {t, gv} == {u, x}
        want = {t, gv}
        lst = succ_lists[cpos[(u, gm)]]
        out = 0
        for pos, x in enumerate(lst):
            if {u, x} == want:
                out |= pattern(cpos[(u, gm)], pos)
        return out

    full_j = (1 << n_j) - 1
    rel = {}
    row_cache: dict = {}
    for gm in range(1, n_groups + 1):
        sub = [g for g in range(1, n_groups + 1) if g | gm == gm] \
            if variant == "prestandard" else [gm]
        rows = [0] * n_out
        for t in range(n):
            r_succ = list(bits(frame.r_mask(gm).rows[t]))
            for gi, g in enumerate(tables):
                key = (gm, t, tuple(g[cpos[(t, sm)]] for sm in sub))
                row = row_cache.get(key)
                if row is None:
                    row = 0
                    for u in r_succ:
                        h_mask = full_j
                        for sm in sub:
                            h_mask &= allowed_mask(t, u, sm, g[cpos[(t, sm)]])
                            if not h_mask:
                                break
                        row |= h_mask << (u * n_j)
                    row_cache[key] = row
                rows[t * n_j + gi] = row
        rel[agents.group_of_mask(gm)] = Rel(n_out, tuple(rows))

    leq_rows = []
    for t in range(n):
        row = 0
        for u in bits(frame.leq.rows[t]):
            row |= full_j << (u * n_j)
        leq_rows.extend([row] * n_j)
    out_frame = Frame.make(agents, n_out, Rel(n_out, tuple(leq_rows)), rel)
    val = {}
    for atom, mask in m.val:
        acc = 0
        for t in bits(mask):
            acc |= full_j << (t * n_j)
        val[atom] = acc
    out = Model.make(out_frame, val)
    src = _names(m, src_names)
    names = tuple(f"{src[t]}|j{i}" for t in range(n) for i in range(n_j))
    fibers = tuple(tuple(range(t * n_j, (t + 1) * n_j)) for t in range(n))
    return ConstructionResult(out, names, fibers)


def partition_lift_witnesses(m: Model, alpha: Group,
                             u: int, v: int) -> tuple[JFunc, JFunc]:
    """Choice tables h, i putting (u,h) and (v,i) in the lifted relation.

    h sends u to v at the chosen group and fixes everything else; i sends v
    back to u.  Requires u related to v (so both tables are valid choices on
    a reflexive symmetric frame)."""
    frame = m.frame
    if not has_class(frame, FrameClass.RS):
        raise PreconditionError("witnesses need a reflexive symmetric frame")
    if not frame.r(alpha).has(u, v):
        raise PreconditionError("witnesses need u related to v for the group")
    amask = frame.agents.mask(alpha)
    coords = _jcoords(frame.n, (1 << len(frame.agents)) - 1)
    h = tuple(v if (w == u and gm == amask) else w for w, gm in coords)
    i = tuple(u if (w == v and gm == amask) else w for w, gm in coords)
    return h, i


# ---------- conversions between mono structures and frames ----------

def expand_mono(mm: MonoModel, agents: AgentSet, kind: str = "minus",
                src_names: Optional[Sequence[str]] = None) -> ConstructionResult:
    """Read a single-relation structure as a frame where every group shares
    the one relation; the result is standard, and doxastic or epistemic
    according to the structure kind."""
    st = mm.structure
    if not is_iel_structure(st, kind):
        raise PreconditionError(f"input is not a {kind} structure")
    rel = {g: st.r for g in agents.groups()}
    frame = Frame.make(agents, st.n, st.leq, rel)
    out = Model(frame, mm.val)
    names = _names(mm, src_names)
    fibers = tuple((t,) for t in range(st.n))
    return ConstructionResult(out, names, fibers)


def collapse_mono(m: Model, alpha: Group, kind: str = "minus",
                  src_names: Optional[Sequence[str]] = None) -> ConstructionResult:
    """Forget all groups but ``alpha``, absorbing the preorder into the
    accessibility relation."""
    frame = m.frame
    need = FrameClass.EPISTEMIC if kind == "full" else FrameClass.DOXASTIC
    if kind not in ("minus", "full"):
        raise ValueError(f"kind must be 'minus' or 'full', got {kind!r}")
    if not has_class(frame, need):
        raise PreconditionError(f"collapse_mono({kind}) needs a {need.value} frame")
    r = frame.leq.compose(frame.r(alpha))
    out = MonoModel(MonoStructure(frame.n, frame.leq, r), m.val)
    names = _names(m, src_names)
    fibers = tuple((t,) for t in range(frame.n))
    return ConstructionResult(out, names, fibers)


# ---------- claim verification ----------

def equivalence_mismatches(src: Model, result: ConstructionResult,
                           formulas: Iterable[Formula]) -> list[dict]:
    """Check `source state satisfies B iff each of its fiber states does`.

    Returns one record per failing formula with the offending states."""
    out = result.model
    ev_src = Evaluator(src.frame)
    ev_out = Evaluator(out.frame)
    vs, vo = src.val_map(), out.val_map()
    memo_s: dict = {}
    memo_o: dict = {}
    fiber_bits = []
    covered = 0
    for fiber in result.fibers:
        mask = 0
        for x in fiber:
            mask |= 1 << x
        fiber_bits.append(mask)
        covered |= mask
    mismatches = []
    for f in formulas:
        ms = ev_src.truth_mask(f, vs, memo_s)
        mo = ev_out.truth_mask(f, vo, memo_o)
        expect = 0
        for t in range(src.frame.n):
            if ms >> t & 1:
                expect |= fiber_bits[t]
        if mo & covered != expect:
            bad = (mo & covered) ^ expect
            mismatches.append({
                "formula": str(f),
                "source_mask": ms,
                "output_disagreement": sorted(bits(bad)),
            })
    return mismatches


def mono_equivalence_mismatches(multi: Model, mono: MonoModel,
                                formulas: Iterable[Formula]) -> list[dict]:
    """Check `multi-agent satisfaction of B equals mono satisfaction of
    tau(B)` statewise; both models share one carrier."""
    ev = Evaluator(multi.frame)
    vm = multi.val_map()
    memo_multi: dict = {}
    memo_mono: dict = {}
    mismatches = []
    for f in formulas:
        left = ev.truth_mask(f, vm, memo_multi)
        right = mono_truth_mask(mono, tau(f), memo_mono)
        if left != right:
            mismatches.append({
                "formula": str(f),
                "multi_mask": left,
                "mono_mask": right,
            })
    return mismatches
