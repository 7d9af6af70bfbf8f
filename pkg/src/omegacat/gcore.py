"""Finite globular sets and graded enrichment bases.

The substrate for everything else in the package:

* ``GlobSet``: finite n-globular sets with source/target maps.
* ``SetBase`` / ``GraphBase``: finitary base categories with terminal and
  initial objects, finite products and coproducts, and a distributivity
  isomorphism.  Objects are enumerated per *grade*; possibly-infinite free
  constructions stay usable because every grade is finite and every check
  takes an explicit bound.
* Structural morphisms (``SetMor``/``GraphMor``) with bounded equality.
* Conversions between globular sets and iterated enriched graphs, and the
  truncation-compatible towers with their wrap/unwrap isomorphism.

Tokens are canonical nested values (strings and tuples).  All values are
immutable after construction; memo caches fill idempotently, so sharing
between threads is safe.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional


# ---------------------------------------------------------------------------
# tokens
# ---------------------------------------------------------------------------

def token_str(t) -> str:
    """Canonical string form of a token (tuples render as (a,b,...))."""
    if isinstance(t, tuple):
        return "(" + ",".join(token_str(x) for x in t) + ")"
    return str(t)


def token_json(t):
    """JSON-friendly form of a token: tuples become lists."""
    if isinstance(t, tuple):
        return [token_json(x) for x in t]
    return t


class DimensionError(ValueError):
    pass


class CompatibilityError(ValueError):
    def __init__(self, level, message):
        self.level = level
        super().__init__(message)


# ---------------------------------------------------------------------------
# graded enumeration
# ---------------------------------------------------------------------------

class GradedParts:
    """Grade-indexed finite enumerations, lazily generated and memoized.

    ``max_grade`` is an optional promise that all parts above it are empty;
    plain finite sets sit entirely at grade 0.
    """

    __slots__ = ("_gen", "_memo", "max_grade")

    def __init__(self, gen: Callable[[int], Iterable], max_grade: Optional[int] = None):
        self._gen = gen
        self._memo = {}
        self.max_grade = max_grade

    def parts(self, s: int) -> tuple:
        if s < 0:
            return ()
        if self.max_grade is not None and s > self.max_grade:
            return ()
        if s not in self._memo:
            self._memo[s] = tuple(self._gen(s))
        return self._memo[s]

    @staticmethod
    def plain(tokens) -> "GradedParts":
        toks = tuple(tokens)
        return GradedParts(lambda s: toks if s == 0 else (), max_grade=0)


class SetObj:
    """Object of the finite-sets base: a graded family of element tokens."""

    kind = "set"
    __slots__ = ("grades",)

    def __init__(self, grades: GradedParts):
        self.grades = grades

    def parts(self, s: int) -> tuple:
        return self.grades.parts(s)

    @property
    def max_grade(self):
        return self.grades.max_grade

    @staticmethod
    def plain(tokens) -> "SetObj":
        return SetObj(GradedParts.plain(tokens))


class GraphObj:
    """Object of a graph base: a graded object family plus hom objects.

    ``hom(a, b)`` returns an object of the inner base, memoized by token
    pair.  Hom objects may be graded-infinite; consumers always enumerate
    under a bound.
    """

    kind = "graph"
    __slots__ = ("obj", "_hom_fn", "_hom_memo")

    def __init__(self, obj: SetObj, hom_fn: Callable):
        self.obj = obj
        self._hom_fn = hom_fn
        self._hom_memo = {}

    def obj_parts(self, s: int) -> tuple:
        return self.obj.parts(s)

    def hom(self, a, b):
        key = (a, b)
        if key not in self._hom_memo:
            self._hom_memo[key] = self._hom_fn(a, b)
        return self._hom_memo[key]


# ---------------------------------------------------------------------------
# morphisms
# ---------------------------------------------------------------------------

class SetMor:
    __slots__ = ("dom", "cod", "fn")

    def __init__(self, dom, cod, fn):
        self.dom = dom
        self.cod = cod
        self.fn = fn

    def apply(self, token):
        return self.fn(token)


class GraphMor:
    """Graph morphism: an object-token map plus a hom morphism per pair."""

    __slots__ = ("dom", "cod", "obj_fn", "_hom_fn", "_hom_memo")

    def __init__(self, dom, cod, obj_fn, hom_fn):
        self.dom = dom
        self.cod = cod
        self.obj_fn = obj_fn
        self._hom_fn = hom_fn
        self._hom_memo = {}

    def apply_obj(self, a):
        return self.obj_fn(a)

    def hom_mor(self, a, b):
        key = (a, b)
        if key not in self._hom_memo:
            self._hom_memo[key] = self._hom_fn(a, b)
        return self._hom_memo[key]


def _never(token):
    raise AssertionError("morphism out of an empty object applied to %r" % (token,))


# ---------------------------------------------------------------------------
# bases
# ---------------------------------------------------------------------------

class SetBase:
    """The base of finite (graded) sets.  Element tokens compare with ==."""

    inner = None
    depth = 0

    def __eq__(self, other):
        return isinstance(other, SetBase)

    def __hash__(self):
        return hash("SetBase")

    def __repr__(self):
        return "SetBase()"

    # -- objects ------------------------------------------------------------

    def terminal(self):
        return SetObj.plain(("*",))

    def initial(self):
        return SetObj.plain(())

    def product(self, x, y):
        mg = None
        if x.max_grade is not None and y.max_grade is not None:
            mg = x.max_grade + y.max_grade

        def gen(s):
            for i in range(s + 1):
                for ex in x.parts(i):
                    for ey in y.parts(s - i):
                        yield (ex, ey)
        return SetObj(GradedParts(gen, mg))

    def product_list(self, xs):
        """Product of a list, with flat tuples as elements.

        The empty product is terminal with the empty tuple as its element.
        """
        xs = tuple(xs)

        def gen(s):
            yield from _tuple_parts(xs, s)
        mg = 0
        for x in xs:
            if x.max_grade is None:
                mg = None
                break
            mg += x.max_grade
        return SetObj(GradedParts(gen, mg))

    def coproduct(self, xs):
        xs = tuple(xs)
        mgs = [x.max_grade for x in xs]
        mg = None if (not mgs or any(m is None for m in mgs)) else max(mgs)
        if not xs:
            return SetObj.plain(())

        def gen(s):
            for i, x in enumerate(xs):
                for e in x.parts(s):
                    yield (i, e)
        return SetObj(GradedParts(gen, mg))

    def shift(self, x, k):
        if k == 0:
            return x
        mg = None if x.max_grade is None else x.max_grade + k
        return SetObj(GradedParts(lambda s: x.parts(s - k), mg))

    def elements(self, x, bound):
        out = []
        for s in range(bound + 1):
            out.extend((t, s) for t in x.parts(s))
        return out

    def eq_obj(self, x, y, bound):
        return all(x.parts(s) == y.parts(s) for s in range(bound + 1))

    def token_grade(self, x, token, cap):
        for s in range(cap + 1):
            if token in x.parts(s):
                return s
        return None

    # -- morphisms ----------------------------------------------------------

    def mor(self, dom, cod, fn):
        return SetMor(dom, cod, fn)

    def identity(self, x):
        return SetMor(x, x, lambda t: t)

    def compose(self, f, g):
        """f then g."""
        return SetMor(f.dom, g.cod, lambda t: g.fn(f.fn(t)))

    def bang(self, x):
        return SetMor(x, self.terminal(), lambda t: "*")

    def vacuous(self, dom, cod):
        return SetMor(dom, cod, _never)

    def eq_mor(self, f, g, bound):
        for t, _ in self.elements(f.dom, bound):
            if f.fn(t) != g.fn(t):
                return False
        return True

    def proj(self, xs, i):
        """Projection out of a flat product_list."""
        return SetMor(self.product_list(xs), xs[i], lambda t: t[i])

    def inj(self, xs, i):
        return SetMor(xs[i], self.coproduct(xs), lambda e, _i=i: (_i, e))

    def case_(self, xs, mors, cod):
        def fn(t):
            i, e = t
            return mors[i].fn(e)
        return SetMor(self.coproduct(xs), cod, fn)

    def flat_product_mor(self, doms, cods, mors):
        """Componentwise action on flat product tuples."""
        return SetMor(self.product_list(doms), self.product_list(cods),
                      lambda t: tuple(m.fn(e) for m, e in zip(mors, t)))

    def token_mor(self, dom, cod, fn):
        """A morphism acting by one token function (set level: just fn)."""
        return SetMor(dom, cod, fn)

    def apply_global(self, f, token):
        return f.fn(token)

    def distribute(self, x, ys):
        """Canonical map x * coproduct(ys) -> coproduct of x * y_i."""
        dom = self.product(x, self.coproduct(ys))
        cod = self.coproduct([self.product(x, y) for y in ys])

        def fwd(t):
            ex, (i, ey) = t
            return (i, (ex, ey))
        return SetMor(dom, cod, fwd)


def _tuple_parts(xs, s):
    """Flat tuples over a list of graded objects with total grade s."""
    if not xs:
        if s == 0:
            yield ()
        return
    head, rest = xs[0], xs[1:]
    for i in range(s + 1):
        for e in head.parts(i):
            for tail in _tuple_parts(rest, s - i):
                yield (e,) + tail


class GraphBase:
    """The base of enriched graphs over an inner base."""

    def __init__(self, inner):
        self.inner = inner
        self.depth = inner.depth + 1

    def __eq__(self, other):
        return isinstance(other, GraphBase) and self.inner == other.inner

    def __hash__(self):
        return hash(("GraphBase", self.inner))

    def __repr__(self):
        return "GraphBase(%r)" % (self.inner,)

    # -- objects ------------------------------------------------------------

    def terminal(self):
        term = self.inner.terminal()
        return GraphObj(SetObj.plain(("*",)), lambda a, b: term)

    def initial(self):
        init = self.inner.initial()
        return GraphObj(SetObj.plain(()), lambda a, b: init)

    def product(self, x, y):
        sb = SetBase()
        obj = sb.product(x.obj, y.obj)

        def hom(a, b):
            return self.inner.product(x.hom(a[0], b[0]), y.hom(a[1], b[1]))
        return GraphObj(obj, hom)

    def product_list(self, xs):
        xs = tuple(xs)
        sb = SetBase()
        obj = sb.product_list([x.obj for x in xs])

        def hom(a, b):
            return self.inner.product_list(
                [x.hom(a[i], b[i]) for i, x in enumerate(xs)])
        return GraphObj(obj, hom)

    def coproduct(self, xs):
        xs = tuple(xs)
        sb = SetBase()
        obj = sb.coproduct([x.obj for x in xs])

        def hom(a, b):
            if a[0] == b[0]:
                return xs[a[0]].hom(a[1], b[1])
            return self.inner.initial()
        return GraphObj(obj, hom)

    def shift(self, x, k):
        if k == 0:
            return x
        sb = SetBase()
        return GraphObj(sb.shift(x.obj, k),
                        lambda a, b: self.inner.shift(x.hom(a, b), k))

    def elements(self, x, bound):
        """Global elements: an object together with a loop element on it."""
        out = []
        for s in range(bound + 1):
            for a in x.obj_parts(s):
                for e, g in self.inner.elements(x.hom(a, a), bound - s):
                    out.append(((a, e), s + g))
        out.sort(key=lambda p: (p[1], token_str(p[0])))
        return out

    def eq_obj(self, x, y, bound):
        for s in range(bound + 1):
            if x.obj_parts(s) != y.obj_parts(s):
                return False
        objs = [a for s in range(bound + 1) for a in x.obj_parts(s)]
        for a in objs:
            for b in objs:
                if not self.inner.eq_obj(x.hom(a, b), y.hom(a, b), bound):
                    return False
        return True

    def token_grade(self, x, token, cap):
        for s in range(cap + 1):
            if token in x.obj_parts(s):
                return s
        return None

    # -- morphisms ----------------------------------------------------------

    def identity(self, x):
        return GraphMor(x, x, lambda a: a,
                        lambda a, b: self.inner.identity(x.hom(a, b)))

    def compose(self, f, g):
        def hom(a, b):
            fa, fb = f.obj_fn(a), f.obj_fn(b)
            return self.inner.compose(f.hom_mor(a, b), g.hom_mor(fa, fb))
        return GraphMor(f.dom, g.cod, lambda a: g.obj_fn(f.obj_fn(a)), hom)

    def bang(self, x):
        term = self.terminal()
        return GraphMor(x, term, lambda a: "*",
                        lambda a, b: self.inner.bang(x.hom(a, b)))

    def vacuous(self, dom, cod):
        return GraphMor(dom, cod, _never, lambda a, b: _never(None))

    def eq_mor(self, f, g, bound):
        objs = [a for s in range(bound + 1) for a in f.dom.obj_parts(s)]
        for a in objs:
            if f.obj_fn(a) != g.obj_fn(a):
                return False
        for a in objs:
            for b in objs:
                if not self.inner.eq_mor(f.hom_mor(a, b), g.hom_mor(a, b), bound):
                    return False
        return True

    def proj(self, xs, i):
        dom = self.product_list(xs)
        return GraphMor(dom, xs[i], lambda a: a[i],
                        lambda a, b: self.inner.proj(
                            [x.hom(a[j], b[j]) for j, x in enumerate(xs)], i))

    def inj(self, xs, i):
        cod = self.coproduct(xs)
        return GraphMor(xs[i], cod, lambda a, _i=i: (_i, a),
                        lambda a, b: self.inner.identity(xs[i].hom(a, b)))

    def case_(self, xs, mors, cod):
        dom = self.coproduct(xs)

        def hom(a, b):
            if a[0] == b[0]:
                return mors[a[0]].hom_mor(a[1], b[1])
            return self.inner.vacuous(dom.hom(a, b),
                                      cod.hom(mors[a[0]].obj_fn(a[1]),
                                              mors[b[0]].obj_fn(b[1])))
        return GraphMor(dom, cod, lambda a: mors[a[0]].obj_fn(a[1]), hom)

    def flat_product_mor(self, doms, cods, mors):
        dom = self.product_list(doms)
        cod = self.product_list(cods)

        def hom(a, b):
            return self.inner.flat_product_mor(
                [d.hom(a[i], b[i]) for i, d in enumerate(doms)],
                [c.hom(mors[i].obj_fn(a[i]), mors[i].obj_fn(b[i]))
                 for i, c in enumerate(cods)],
                [mors[i].hom_mor(a[i], b[i]) for i in range(len(mors))])
        return GraphMor(dom, cod,
                        lambda a: tuple(m.obj_fn(e) for m, e in zip(mors, a)),
                        hom)

    def token_mor(self, dom, cod, fn):
        """A morphism applying the same token surgery at every level."""
        def hom(a, b):
            return self.inner.token_mor(dom.hom(a, b), cod.hom(fn(a), fn(b)), fn)
        return GraphMor(dom, cod, fn, hom)

    def apply_global(self, f, token):
        a, e = token
        return (f.obj_fn(a), self.inner.apply_global(f.hom_mor(a, a), e))

    def distribute(self, x, ys):
        dom = self.product(x, self.coproduct(ys))
        cod = self.coproduct([self.product(x, y) for y in ys])

        def fwd(t):
            ex, (i, ey) = t
            return (i, (ex, ey))

        def hom(a, b):
            (ax, (ia, ay)) = a
            (bx, (ib, by)) = b
            d = dom.hom(a, b)
            c = cod.hom(fwd(a), fwd(b))
            if ia == ib:
                return self.inner.token_mor(d, c, lambda t: t)
            return self.inner.vacuous(d, c)
        return GraphMor(dom, cod, fwd, hom)


def finset_base() -> SetBase:
    """The base of finite sets."""
    return SetBase()


def vgraph_base(V) -> GraphBase:
    """The base whose objects are graphs enriched in V."""
    return GraphBase(V)


def ngraph_base(n: int):
    """Iterated graph base: sets for n = 0, then n graph layers."""
    base = SetBase()
    for _ in range(n):
        base = GraphBase(base)
    return base


def check_distributivity(base, x, ys, bound) -> bool:
    """Enumerate-check that distribute(x, ys) is a bijection up to bound.

    Compares the image of the domain's global elements, grade by grade,
    against the codomain's global elements.
    """
    mor = base.distribute(x, ys)
    image = [(base.apply_global(mor, t), s)
             for t, s in base.elements(mor.dom, bound)]
    cod_el = base.elements(mor.cod, bound)
    key = lambda p: (p[1], token_str(p[0]))
    return sorted(image, key=key) == sorted(cod_el, key=key)


# ---------------------------------------------------------------------------
# base functors
# ---------------------------------------------------------------------------

@dataclass
class BaseFunctor:
    """A functor between bases given by its object and morphism actions."""
    dom_base: object
    cod_base: object
    on_obj: Callable
    on_mor: Callable
    name: str = ""


def identity_functor(base) -> BaseFunctor:
    return BaseFunctor(base, base, lambda x: x, lambda f: f, "id")


def constant_terminal_functor(base) -> BaseFunctor:
    term = base.terminal()

    def on_mor(f):
        return base.identity(term)
    return BaseFunctor(base, base, lambda x: term, on_mor, "const1")


def diagonal_square_functor(base) -> BaseFunctor:
    """X maps to X * X (pairs); used to exercise apply_locally."""
    def on_obj(x):
        return base.product(x, x)

    def on_mor(f):
        if isinstance(f, SetMor):
            return SetMor(on_obj(f.dom), on_obj(f.cod),
                          lambda t: (f.fn(t[0]), f.fn(t[1])))
        raise NotImplementedError("square functor is set-level")
    return BaseFunctor(base, base, on_obj, on_mor, "square")


def apply_locally(H: BaseFunctor, A: GraphObj) -> GraphObj:
    """Apply a base functor to every hom of a graph; objects unchanged."""
    return GraphObj(A.obj, lambda a, b: H.on_obj(A.hom(a, b)))


def apply_locally_mor(H: BaseFunctor, f: GraphMor, dom, cod) -> GraphMor:
    return GraphMor(dom, cod, f.obj_fn,
                    lambda a, b: H.on_mor(f.hom_mor(a, b)))


# ---------------------------------------------------------------------------
# globular sets
# ---------------------------------------------------------------------------

@dataclass
class Violation:
    cell: Optional[str]
    axiom: str
    detail: str

    def to_json(self):
        return {"cell": self.cell, "axiom": self.axiom, "detail": self.detail}


@dataclass
class GlobSet:
    """A finite n-globular set.

    ``cells[d]`` lists the dimension-d cell ids in declaration order;
    ``src[d]`` and ``tgt[d]`` map dimension-d cells to dimension-(d-1)
    cells for 1 <= d <= n.
    """

    n: int
    cells: tuple
    src: dict
    tgt: dict

    def cell_dims(self):
        return range(self.n + 1)

    def boundary0(self, d, cell, which):
        """Iterated source or target down to dimension 0."""
        c = cell
        for k in range(d, 0, -1):
            c = (self.src if which == "s" else self.tgt)[k][c]
        return c


def make_globset(n, cells, src, tgt) -> GlobSet:
    return GlobSet(n, tuple(tuple(cs) for cs in cells), src, tgt)


def terminal_globset(n: int) -> GlobSet:
    """One cell per dimension, all maps forced."""
    cells = [("t%d" % d,) for d in range(n + 1)]
    src = {d: {"t%d" % d: "t%d" % (d - 1)} for d in range(1, n + 1)}
    tgt = {d: {"t%d" % d: "t%d" % (d - 1)} for d in range(1, n + 1)}
    return make_globset(n, cells, src, tgt)


def empty_globset(n: int) -> GlobSet:
    return make_globset(n, [() for _ in range(n + 1)],
                        {d: {} for d in range(1, n + 1)},
                        {d: {} for d in range(1, n + 1)})


def validate_globset(g: GlobSet):
    """Check the globular axioms; returns None or the first Violation."""
    for d in range(g.n + 1):
        seen = set()
        for c in g.cells[d]:
            if c in seen:
                return Violation(c, "unique-ids",
                                 "cell id repeated in dimension %d" % d)
            seen.add(c)
    for d in range(1, g.n + 1):
        lower = set(g.cells[d - 1])
        for c in g.cells[d]:
            for name, m in (("src", g.src), ("tgt", g.tgt)):
                if c not in m.get(d, {}):
                    return Violation(c, "total-maps",
                                     "%s undefined at dimension %d" % (name, d))
                if m[d][c] not in lower:
                    return Violation(c, "map-range",
                                     "%s value %r not a %d-cell"
                                     % (name, m[d][c], d - 1))
    for d in range(2, g.n + 1):
        for c in g.cells[d]:
            s, t = g.src[d][c], g.tgt[d][c]
            if g.src[d - 1][s] != g.src[d - 1][t]:
                return Violation(c, "ss=st",
                                 "src of src differs from src of tgt")
            if g.tgt[d - 1][s] != g.tgt[d - 1][t]:
                return Violation(c, "ts=tt",
                                 "tgt of src differs from tgt of tgt")
    return None


def truncate_globset(g: GlobSet, m: int) -> GlobSet:
    if m > g.n:
        raise DimensionError("cannot truncate dimension %d to %d" % (g.n, m))
    return make_globset(m, g.cells[: m + 1],
                        {d: dict(g.src[d]) for d in range(1, m + 1)},
                        {d: dict(g.tgt[d]) for d in range(1, m + 1)})


def slice_globset(g: GlobSet, x, y) -> GlobSet:
    """The hom globular set between 0-cells x and y, shifted down by one."""
    if g.n == 0:
        raise DimensionError("0-globular sets have no hom slices")
    keep = [[] for _ in range(g.n)]
    for d in range(1, g.n + 1):
        for c in g.cells[d]:
            if g.boundary0(d, c, "s") == x and g.boundary0(d, c, "t") == y:
                keep[d - 1].append(c)
    src = {d: {c: g.src[d + 1][c] for c in keep[d]} for d in range(1, g.n)}
    tgt = {d: {c: g.tgt[d + 1][c] for c in keep[d]} for d in range(1, g.n)}
    # globularity guarantees boundaries of kept cells are kept
    kept = [set(cs) for cs in keep]
    for d in range(1, g.n):
        for c in keep[d]:
            assert src[d][c] in kept[d - 1] and tgt[d][c] in kept[d - 1]
    return make_globset(g.n - 1, keep, src, tgt)


def globset_from_json(doc: dict) -> GlobSet:
    """Parse the wire format: dimensions keyed by decimal strings."""
    allowed = {"n", "cells", "src", "tgt"}
    extra = set(doc) - allowed
    if extra:
        raise ValueError("unknown keys %s in globular-set document" % sorted(extra))
    n = doc["n"]
    cells = [tuple(cs) for cs in doc["cells"]]
    if len(cells) != n + 1:
        raise ValueError("expected %d cell lists, got %d" % (n + 1, len(cells)))
    src = {int(k): dict(v) for k, v in doc.get("src", {}).items()}
    tgt = {int(k): dict(v) for k, v in doc.get("tgt", {}).items()}
    for d in range(1, n + 1):
        src.setdefault(d, {})
        tgt.setdefault(d, {})
    return make_globset(n, cells, src, tgt)


def globset_to_json(g: GlobSet) -> dict:
    return {"n": g.n,
            "cells": [list(cs) for cs in g.cells],
            "src": {str(d): dict(g.src[d]) for d in range(1, g.n + 1)},
            "tgt": {str(d): dict(g.tgt[d]) for d in range(1, g.n + 1)}}


# ---------------------------------------------------------------------------
# conversions between globular sets and iterated graphs
# ---------------------------------------------------------------------------

def globset_to_ngraph(g: GlobSet):
    """The iterated enriched graph presentation of a globular set.

    All cells enter at grade 0; identifiers are preserved as tokens.
    Raises on invalid input.
    """
    v = validate_globset(g)
    if v is not None:
        raise ValueError("invalid globular set: %s (%s)" % (v.axiom, v.detail))
    return _gs_to_graph(g)


def _gs_to_graph(g: GlobSet):
    if g.n == 0:
        return SetObj.plain(g.cells[0])
    memo = {}

    def hom(a, b):
        if (a, b) not in memo:
            memo[(a, b)] = _gs_to_graph(slice_globset(g, a, b))
        return memo[(a, b)]
    return GraphObj(SetObj.plain(g.cells[0]), hom)


def collect_cells(h, n: int, bound: int):
    """Located cells of an iterated graph, per dimension, up to a bound.

    A located cell is a pair (chain, token): the chain of hom locations
    descended through, then the object token (dimensions below n) or the
    element token (dimension n).
    """
    out = [[] for _ in range(n + 1)]

    def walk(obj, depth, chain):
        if depth == n:
            # bottom level: a set object, elements are dimension-n cells
            for s in range(bound + 1):
                for t in obj.parts(s):
                    out[depth].append((chain, t))
            return
        toks = [a for s in range(bound + 1) for a in obj.obj_parts(s)]
        for a in toks:
            out[depth].append((chain, a))
        for a in toks:
            for b in toks:
                walk(obj.hom(a, b), depth + 1, chain + ((a, b),))

    walk(h, 0, ())
    return out


def located_id(chain, tok) -> str:
    """Canonical string id of a located cell."""
    return token_str(tuple(chain) + (tok,))


def map_located(mor, chain, tok, at_set_level: bool):
    """Map a located cell through a graph morphism, descending its chain."""
    m = mor
    new_chain = []
    for (a, b) in chain:
        new_chain.append((m.obj_fn(a), m.obj_fn(b)))
        m = m.hom_mor(a, b)
    if at_set_level:
        return tuple(new_chain), m.fn(tok)
    return tuple(new_chain), m.obj_fn(tok)


def ngraph_to_globset(h, n: int, bound: int) -> GlobSet:
    """Collect the cells of an iterated graph into a globular set.

    Cell ids are canonical strings built from location chains, realizing one
    fixed choice of coproducts.  Cells of grade above ``bound`` are dropped.
    """
    located = collect_cells(h, n, bound)
    cells = [[] for _ in range(n + 1)]
    src = {d: {} for d in range(1, n + 1)}
    tgt = {d: {} for d in range(1, n + 1)}
    for d in range(n + 1):
        for (chain, tok) in located[d]:
            cid = located_id(chain, tok)
            cells[d].append(cid)
            if d >= 1:
                a, b = chain[-1]
                src[d][cid] = located_id(chain[:-1], a)
                tgt[d][cid] = located_id(chain[:-1], b)
    return make_globset(n, cells, src, tgt)


def roundtrip_witness(g: GlobSet, bound: int = 0):
    """globset -> ngraph -> globset, with the relabeling dictionary.

    Returns (image globular set, witness) where witness maps original ids
    to image ids dimension by dimension, bijectively.
    """
    h = globset_to_ngraph(g)
    g2 = ngraph_to_globset(h, g.n, bound)
    witness = {}

    def walk(sub: GlobSet, chain, depth):
        for c in sub.cells[0]:
            witness[(depth, c)] = token_str(chain + (c,)) if chain else token_str((c,))
        if sub.n == 0:
            return
        for a in sub.cells[0]:
            for b in sub.cells[0]:
                walk(slice_globset(sub, a, b), chain + ((a, b),), depth + 1)

    walk(g, (), 0)
    return g2, witness


# ---------------------------------------------------------------------------
# towers
# ---------------------------------------------------------------------------

class OmegaTower:
    """A truncation-compatible family of globular sets, one per dimension.

    Levels are produced on demand and memoized; the witness that level n is
    the truncation of level n+1 is checked lazily, at probe time.
    """

    def __init__(self, level_fn):
        self._fn = level_fn
        self._memo = {}
        self._checked = set()

    def level(self, k: int) -> GlobSet:
        if k not in self._memo:
            g = self._fn(k)
            if g.n != k:
                raise CompatibilityError(k, "level %d has dimension %d" % (k, g.n))
            self._memo[k] = g
        return self._memo[k]

    def check_witness(self, k: int):
        """Verify truncate(level(k+1), k) == level(k), identifier-exact."""
        if k in self._checked:
            return
        lo, hi = self.level(k), truncate_globset(self.level(k + 1), k)
        if lo != hi:
            raise CompatibilityError(k + 1, "level %d does not truncate to level %d" % (k + 1, k))
        self._checked.add(k)

    @staticmethod
    def constant_terminal() -> "OmegaTower":
        return OmegaTower(terminal_globset)

    @staticmethod
    def from_globset(g: GlobSet) -> "OmegaTower":
        """Truncation tower of a fixed globular set, padded above its dim."""
        def fn(k):
            if k <= g.n:
                return truncate_globset(g, k)
            pad = truncate_globset(g, g.n)
            cells = list(pad.cells) + [() for _ in range(k - g.n)]
            src = dict(pad.src)
            tgt = dict(pad.tgt)
            for d in range(g.n + 1, k + 1):
                src[d] = {}
                tgt[d] = {}
            return make_globset(k, cells, src, tgt)
        return OmegaTower(fn)


@dataclass
class GraphOfTowers:
    """A graph whose homs are towers: the unwrapped form of a tower."""
    objects: tuple
    hom: Callable  # (a, b) -> OmegaTower


def tower_unwrap(t: OmegaTower, probe_depth: int = 1) -> GraphOfTowers:
    """Expose a tower as a fixed object set with a hom tower per pair.

    Checks truncation witnesses up to ``probe_depth`` before slicing.
    """
    for k in range(probe_depth):
        t.check_witness(k)
    objects = t.level(0).cells[0]

    def hom(a, b):
        def fn(k):
            return slice_globset(t.level(k + 1), a, b)
        return OmegaTower(fn)
    return GraphOfTowers(objects, hom)


def tower_wrap(gt: GraphOfTowers) -> OmegaTower:
    """Reassemble a graph of towers into a tower.

    Hom-tower cell ids must be disjoint across object pairs so that ids can
    be preserved exactly; a collision raises CompatibilityError.
    """
    objects = tuple(gt.objects)

    def fn(k):
        if k == 0:
            return make_globset(0, [objects], {}, {})
        cells = [list(objects)] + [[] for _ in range(k)]
        src = {d: {} for d in range(1, k + 1)}
        tgt = {d: {} for d in range(1, k + 1)}
        seen = set()
        for a in objects:
            for b in objects:
                sub = gt.hom(a, b).level(k - 1)
                for d in range(k):
                    for c in sub.cells[d]:
                        if c in seen and d == 0:
                            raise CompatibilityError(
                                k, "hom-tower cell id %r not disjoint" % (c,))
                        cells[d + 1].append(c)
                        if d == 0:
                            seen.add(c)
                            src[1][c] = a
                            tgt[1][c] = b
                        else:
                            src[d + 1][c] = sub.src[d][c]
                            tgt[d + 1][c] = sub.tgt[d][c]
        return make_globset(k, cells, src, tgt)
    return OmegaTower(fn)
