"""Collections over pasting diagrams and contraction checking.

A collection is a dimension-preserving map from a globular set onto
unlabeled pasting diagrams (stage trees) within a size bound.  Contraction
data assigns fillers to parallel pairs over every diagram one dimension up;
the incoherent variant leaves the top dimension unconstrained.  Everything
here verifies given data; no initial structures are constructed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from .gcore import (GlobSet, Violation, make_globset, token_str,
                    truncate_globset, validate_globset)
from .monads import (LEAF, parse_tree, tree_boundary, tree_extensions,
                     tree_size, tree_str, trees_of_stage)


@dataclass
class Collection:
    """A globular map onto stage trees, bounded by pasting size.

    ``p`` maps dimension-d cell ids to stage-d trees (tuple form).
    """

    n: int
    A: GlobSet
    p: dict
    bound: int


@dataclass
class MissingLift:
    m: int
    a: str
    b: str
    y: object

    def key(self):
        return (self.m, self.a, self.b, tree_str(self.y))

    def to_json(self):
        return {"m": self.m, "a": self.a, "b": self.b, "y": tree_str(self.y)}


def check_collection(c: Collection):
    """Globularity of the underlying data plus boundary commutation of p."""
    v = validate_globset(c.A)
    if v is not None:
        return v
    if c.A.n != c.n:
        return Violation(None, "dimension", "carrier has dimension %d, not %d"
                         % (c.A.n, c.n))
    for d in range(c.n + 1):
        for cell in c.A.cells[d]:
            if cell not in c.p:
                return Violation(cell, "p-total", "no diagram assigned")
            t = c.p[cell]
            if tree_size(t) > c.bound:
                return Violation(cell, "p-bound",
                                 "diagram size %d exceeds bound %d"
                                 % (tree_size(t), c.bound))
            if not _valid_stage(t, d):
                return Violation(cell, "p-stage", "diagram has wrong stage")
    for d in range(1, c.n + 1):
        for cell in c.A.cells[d]:
            boundary = tree_boundary(c.p[cell], d)
            if c.p[c.A.src[d][cell]] != boundary:
                return Violation(cell, "p-src",
                                 "p does not commute with src")
            if c.p[c.A.tgt[d][cell]] != boundary:
                return Violation(cell, "p-tgt",
                                 "p does not commute with tgt")
    return None


def _valid_stage(t, d):
    if d == 0:
        return t == LEAF
    if not isinstance(t, tuple):
        return False
    return all(_valid_stage(ch, d - 1) for ch in t)


def parallel_pairs(A: GlobSet, m: int):
    """Pairs of m-cells that agree on boundaries (all pairs when m = 0)."""
    cells = A.cells[m]
    if m == 0:
        return [(a, b) for a in cells for b in cells]
    out = []
    for a in cells:
        for b in cells:
            if A.src[m][a] == A.src[m][b] and A.tgt[m][a] == A.tgt[m][b]:
                out.append((a, b))
    return out


def check_contraction(c: Collection, lift: Callable, m_max: int):
    """Filler existence for every parallel pair under every diagram.

    ``lift(m, a, b, y)`` returns a candidate (m+1)-cell id or None.  The
    check ranges over m <= m_max; dimensions at or above the carrier's top
    are vacuous because no higher diagrams exist.  Returns the list of
    missing (m, a, b, y) tuples, empty when the contraction is total.
    """
    missing = []
    top = min(m_max, c.n - 1)
    for m in range(top + 1):
        higher = set(c.A.cells[m + 1])
        for (a, b) in parallel_pairs(c.A, m):
            if c.p[a] != c.p[b]:
                continue  # no diagram connects them one dimension up
            for y in tree_extensions(c.p[a], m, c.bound):
                x = lift(m, a, b, y)
                ok = (x is not None and x in higher
                      and c.A.src[m + 1][x] == a and c.A.tgt[m + 1][x] == b
                      and c.p[x] == y)
                if not ok:
                    missing.append(MissingLift(m, a, b, y))
    return missing


def check_incoherent_contraction(c: Collection, lift: Callable):
    """As check_contraction, but the top dimension is unconstrained."""
    return check_contraction(c, lift, c.n - 1)


def truncate_collection(c: Collection, m: int) -> Collection:
    """Truncate the carrier and restrict p; diagrams re-index canonically.

    Stage-d trees for d <= m are already diagrams one level down, so the
    re-indexing into the truncated diagram family is the identity.
    """
    A2 = truncate_globset(c.A, m)
    p2 = {cell: c.p[cell] for d in range(m + 1) for cell in A2.cells[d]}
    return Collection(m, A2, p2, c.bound)


def diagram_cell_id(d: int, t) -> str:
    """Dimension-prefixed id; the empty tree renders alike at every stage."""
    return "%d:%s" % (d, tree_str(t))


def identity_collection(n: int, bound: int):
    """The bounded diagram family over itself, with the tautological lift."""
    cells = []
    for d in range(n + 1):
        cells.append(tuple(diagram_cell_id(d, t)
                           for t in trees_of_stage(d, bound)))
    src = {}
    tgt = {}
    for d in range(1, n + 1):
        src[d] = {}
        tgt[d] = {}
        for t in trees_of_stage(d, bound):
            b = diagram_cell_id(d - 1, tree_boundary(t, d))
            src[d][diagram_cell_id(d, t)] = b
            tgt[d][diagram_cell_id(d, t)] = b
    A = make_globset(n, cells, src, tgt)
    p = {}
    for d in range(n + 1):
        for t in trees_of_stage(d, bound):
            p[diagram_cell_id(d, t)] = t
    coll = Collection(n, A, p, bound)

    def lift(m, a, b, y):
        return diagram_cell_id(m + 1, y)
    return coll, lift


def lift_from_table(table: dict) -> Callable:
    """Adapt a JSON-style lift table keyed by "(m|a|b|y)" strings."""
    def lift(m, a, b, y):
        return table.get("(%d|%s|%s|%s)" % (m, a, b, tree_str(y)))
    return lift


def collection_from_json(doc: dict) -> Collection:
    from .gcore import globset_from_json
    A = globset_from_json(doc["A"])
    p = {cell: parse_tree(t) for cell, t in doc["p"].items()}
    return Collection(doc["n"], A, p, doc["bound"])
