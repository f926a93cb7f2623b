"""Decision procedures for the named frame classes."""
from __future__ import annotations

from enum import Enum

from .semantics import Frame, MonoStructure, is_forward_confluent


class FrameClass(str, Enum):
    ALL = "all"
    DOXASTIC = "doxastic"
    EPISTEMIC = "epistemic"
    REFLEXIVE = "reflexive"
    SYMMETRIC = "symmetric"
    TRANSITIVE = "transitive"
    RS = "rs"
    PARTITION = "partition"
    UD_REFLEXIVE = "ud_reflexive"
    UD_SYMMETRIC = "ud_symmetric"
    UD = "ud"
    PRESTANDARD = "prestandard"
    STANDARD = "standard"
    FORWARD_CONFLUENT = "forward_confluent"


def _doxastic(f: Frame) -> bool:
    return all(r.le(f.leq) for r in f.rels)


def _serial_box(f: Frame) -> bool:
    # every state reaches some state through leq followed by accessibility
    for r in f.rels:
        composed = f.leq.compose(r)
        if not all(composed.rows[s] for s in range(f.n)):
            return False
    return True


def _ud_reflexive(f: Frame) -> bool:
    leq, geq = f.leq, f.geq()
    for r in f.rels:
        up = leq.compose(r).compose(leq)
        down = geq.compose(r).compose(geq)
        if not (up.is_reflexive() and down.is_reflexive()):
            return False
    return True


def _ud_symmetric(f: Frame) -> bool:
    leq, geq = f.leq, f.geq()
    for r in f.rels:
        up = leq.compose(r).compose(leq)
        down = geq.compose(r).compose(geq)
        for s, t in r.pairs():
            if not (up.has(t, s) and down.has(t, s)):
                return False
    return True


def _prestandard(f: Frame, exact: bool) -> bool:
    top = 1 << len(f.agents)
    for m1 in range(1, top):
        for m2 in range(1, top):
            union = f.r_mask(m1 | m2)
            meet = f.r_mask(m1) & f.r_mask(m2)
            if exact:
                if union != meet:
                    return False
            elif not union.le(meet):
                return False
    return True


def has_class(f: Frame, c: FrameClass) -> bool:
    c = FrameClass(c)
    if c is FrameClass.ALL:
        return True
    if c is FrameClass.DOXASTIC:
        return _doxastic(f)
    if c is FrameClass.EPISTEMIC:
        return _doxastic(f) and _serial_box(f)
    if c is FrameClass.REFLEXIVE:
        return all(r.is_reflexive() for r in f.rels)
    if c is FrameClass.SYMMETRIC:
        return all(r.is_symmetric() for r in f.rels)
    if c is FrameClass.TRANSITIVE:
        return all(r.is_transitive() for r in f.rels)
    if c is FrameClass.RS:
        return has_class(f, FrameClass.REFLEXIVE) and has_class(f, FrameClass.SYMMETRIC)
    if c is FrameClass.PARTITION:
        return has_class(f, FrameClass.RS) and has_class(f, FrameClass.TRANSITIVE)
    if c is FrameClass.UD_REFLEXIVE:
        return _ud_reflexive(f)
    if c is FrameClass.UD_SYMMETRIC:
        return _ud_symmetric(f)
    if c is FrameClass.UD:
        return _ud_reflexive(f) and _ud_symmetric(f)
    if c is FrameClass.PRESTANDARD:
        return _prestandard(f, exact=False)
    if c is FrameClass.STANDARD:
        return _prestandard(f, exact=True)
    if c is FrameClass.FORWARD_CONFLUENT:
        return is_forward_confluent(f)
    raise ValueError(f"unknown frame class {c!r}")  # pragma: no cover


def classify(f: Frame) -> list[FrameClass]:
    """All class tags the frame belongs to, in declaration order."""
    return [c for c in FrameClass if has_class(f, c)]


def is_iel_structure(ms: MonoStructure, kind: str = "minus") -> bool:
    """Conditions (i) accessibility refines the preorder, (ii) the preorder
    absorbs into accessibility on the left, and for ``full`` also (iii)
    every state has a successor."""
    if kind not in ("minus", "full"):
        raise ValueError(f"kind must be 'minus' or 'full', got {kind!r}")
    if not ms.r.le(ms.leq):
        return False
    if not ms.leq.compose(ms.r).le(ms.r):
        return False
    if kind == "full" and not all(ms.r.rows[s] for s in range(ms.n)):
        return False
    return True
