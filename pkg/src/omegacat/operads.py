"""Operads in cartesian bases and operad-weighted enrichment.

A ``FinOperad`` is an arity-indexed family of base objects with a
substitution composition and a unit; composition acts uniformly on tokens
at every structural level.  Weighted categories pair a graph with
arity-indexed composition maps drawn from an operad.  Space models stand in
for a topological base: they present points, graded path objects, and a
strictly associative concatenation acted on by a chosen operad.  The
enrichment steps combine these with the monad machinery, producing weak
towers whose levels carry a base, a composite monad, a weighting operad,
and a fundamental-structure functor, plus the dimensionwise composite-monad
characterization checked against the tower.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional

from .gcore import (GradedParts, GraphBase, GraphMor, GraphObj, SetBase,
                    SetMor, SetObj, GlobSet, globset_to_ngraph,
                    ngraph_to_globset, token_str, validate_globset,
                    vgraph_base)
from .monads import (GradedHom, Monad, UnsupportedDepthError, _path_dispatch,
                     check_monad_laws, fm_step, identity_monad, lift_monad,
                     path_hom, path_monad, stratified_mor, strict_tower)


class OperadCapError(ValueError):
    pass


class ModelError(ValueError):
    pass


class ProductPreservationError(ValueError):
    pass


# ---------------------------------------------------------------------------
# operads
# ---------------------------------------------------------------------------

@dataclass
class FinOperad:
    """Arity-indexed base objects with token-level composition and unit.

    ``comp(pe, pes)`` substitutes a tuple of operations into one; it is
    applied to tokens uniformly at every structural stratum.  ``unit_elem``
    is a global-element token of ops(1).  ``action_fn``, when present, gives
    the algebra structure T(ops(k)) -> ops(k) needed to weight over a
    non-identity monad.
    """

    base: object
    cap: int
    ops_fn: Callable
    comp: Callable
    unit_elem: object
    name: str = "P"
    is_terminal: bool = False
    action_fn: Optional[Callable] = None

    def ops(self, k: int):
        if k < 0 or k > self.cap:
            raise OperadCapError("arity %d beyond the cap %d" % (k, self.cap))
        return self.ops_fn(k)

    def action(self, T, k):
        if self.action_fn is None:
            return None
        return self.action_fn(T, k)


def _terminal_global(base):
    if isinstance(base, SetBase):
        return "*"
    return ("*", _terminal_global(base.inner))


def terminal_operad(V, cap: int) -> FinOperad:
    """Every arity a terminal object; composition and unit forced."""
    term = V.terminal()
    return FinOperad(V, cap, lambda k: term, lambda pe, pes: "*",
                     _terminal_global(V), "terminal", is_terminal=True)


def monoid_operad(elems, op, unit, cap: int, name="monoid") -> FinOperad:
    """ops(k) = a fixed monoid at every arity; substitution multiplies."""
    base = SetBase()
    M = SetObj.plain(tuple(elems))

    def comp(pe, pes):
        out = pe
        for q in pes:
            out = op(out, q)
        return out
    return FinOperad(base, cap, lambda k: M, comp, unit, name)


def set_operad(cap, ops_lists, comp_table, unit, name="P") -> FinOperad:
    """A finite operad in sets given by explicit tables."""
    base = SetBase()
    objs = {k: SetObj.plain(tuple(v)) for k, v in ops_lists.items()}

    def ops_fn(k):
        if k not in objs:
            raise OperadCapError("arity %d missing" % k)
        return objs[k]

    def comp(pe, pes):
        key = (pe, tuple(pes))
        if key not in comp_table:
            raise OperadCapError("composition undefined at %s" % token_str(key))
        return comp_table[key]
    return FinOperad(base, cap, ops_fn, comp, unit, name)


def _global_comp(base, comp, pe, pes):
    """Apply a token-level composition to global-element tokens."""
    if isinstance(base, SetBase):
        return comp(pe, tuple(pes))
    head = comp(pe[0], tuple(p[0] for p in pes))
    return (head, _global_comp(base.inner, comp, pe[1], tuple(p[1] for p in pes)))


@dataclass
class OperadViolation:
    law: str
    arities: tuple
    elements: tuple

    def to_json(self):
        return {"law": self.law, "arities": list(self.arities),
                "elements": [token_str(e) for e in self.elements]}


def check_operad_laws(P: FinOperad, bound: int = 0):
    """Elementwise unit and associativity within the arity cap."""
    base = P.base

    def els(k):
        return [t for t, _ in base.elements(P.ops(k), bound)]

    unit = P.unit_elem
    for k in range(P.cap + 1):
        for p in els(k):
            lhs = _global_comp(base, P.comp, unit, (p,))
            if lhs != p:
                return OperadViolation("left-unit", (k,), (p,))
            rhs = _global_comp(base, P.comp, p, (unit,) * k)
            if rhs != p:
                return OperadViolation("right-unit", (k,), (p,))
    for m in range(P.cap + 1):
        for ks in _arity_tuples(m, P.cap):
            total = sum(ks)
            for p in els(m):
                for qs in itertools.product(*[els(k) for k in ks]):
                    pq = _global_comp(base, P.comp, p, qs)
                    for ls_flat in _arity_tuples(total, P.cap):
                        rs = [els(l) for l in ls_flat]
                        for rflat in itertools.product(*rs):
                            lhs = _global_comp(base, P.comp, pq, rflat)
                            # regroup: feed chunks of rs into each q
                            chunks = []
                            idx = 0
                            inner = []
                            for i, k in enumerate(ks):
                                chunk = rflat[idx: idx + k]
                                sub = _global_comp(base, P.comp, qs[i], chunk)
                                inner.append(sub)
                                idx += k
                            rhs = _global_comp(base, P.comp, p, tuple(inner))
                            if lhs != rhs:
                                return OperadViolation(
                                    "associativity", (m,) + ks + ls_flat,
                                    (p,) + qs + rflat)
    return None


def _arity_tuples(m, cap):
    """Tuples (k_1..k_m) with sum <= cap."""
    if m == 0:
        return [()]
    out = []
    for ks in itertools.product(range(cap + 1), repeat=m):
        if sum(ks) <= cap:
            out.append(ks)
    return out


# ---------------------------------------------------------------------------
# weighted homs and monads
# ---------------------------------------------------------------------------

def vp_free_hom(A: GraphObj, P: FinOperad, a, b, bound: int) -> GradedHom:
    """Free weighted hom: paths carrying an operad element per length."""
    if bound > P.cap:
        raise OperadCapError(
            "bound %d needs arities beyond the cap %d" % (bound, P.cap))
    return GradedHom(path_hom(P.base, A, a, b, P), P.base)


def vp_free_monad(V, P: FinOperad) -> Monad:
    """The free weighted-category monad on V-graphs."""
    if not (P.base == V):
        raise ValueError("operad lives in a different base")
    return path_monad(V, P)


def strip_weight_mor(V, A: GraphObj, P: FinOperad, a, b) -> object:
    """Canonical map from the weighted hom to the plain free hom.

    Drops the operad slot of every payload at every stratum; with the
    terminal operad this is the degenerate-reduction bijection.
    """
    dom = path_hom(V, A, a, b, P)
    cod = path_hom(V, A, a, b, None)

    def comp_mor(p):
        k = len(p) - 1
        facs = [P.ops(k)] + [A.hom(p[i], p[i + 1]) for i in range(k)]
        prod_with = V.product_list(facs)
        prod_without = V.product_list(facs[1:])
        return stratified_mor(V, prod_with, prod_without,
                              lambda level: (lambda t: t[1:]))
    return _path_dispatch(V, dom, cod, lambda p: p, comp_mor)


def insert_weight_mor(V, A: GraphObj, P: FinOperad, a, b) -> object:
    """Inverse direction for a terminal weighting: insert the forced slot."""
    if not P.is_terminal:
        raise ValueError("insertion is canonical only for the terminal operad")
    dom = path_hom(V, A, a, b, None)
    cod = path_hom(V, A, a, b, P)

    def comp_mor(p):
        k = len(p) - 1
        facs = [A.hom(p[i], p[i + 1]) for i in range(k)]
        prod_without = V.product_list(facs)
        prod_with = V.product_list([P.ops(k)] + facs)
        return stratified_mor(V, prod_without, prod_with,
                              lambda level: (lambda t: ("*",) + t))
    return _path_dispatch(V, dom, cod, lambda p: p, comp_mor)


# ---------------------------------------------------------------------------
# algebras and weighted categories
# ---------------------------------------------------------------------------

@dataclass
class AlgebraData:
    """A one-object action of an operad: act(k, pe, xs) -> x."""
    operad: FinOperad
    carrier: SetObj
    act: Callable


def one_object_algebra_check(alg: AlgebraData, bound: int = 0):
    """Unit and substitution-compatibility axioms, elementwise."""
    P, X = alg.operad, alg.carrier
    base = P.base
    xs_all = [t for t, _ in SetBase().elements(X, bound)]

    def pels(k):
        return [t for t, _ in base.elements(P.ops(k), bound)]

    for x in xs_all:
        if alg.act(1, P.unit_elem, (x,)) != x:
            return OperadViolation("algebra-unit", (1,), (x,))
    for m in range(P.cap + 1):
        for ks in _arity_tuples(m, P.cap):
            total = sum(ks)
            for p in pels(m):
                for qs in itertools.product(*[pels(k) for k in ks]):
                    for xs in itertools.product(xs_all, repeat=total):
                        pq = _global_comp(base, P.comp, p, qs)
                        lhs = alg.act(total, pq, xs)
                        idx = 0
                        inner = []
                        for i, k in enumerate(ks):
                            inner.append(alg.act(k, qs[i], xs[idx: idx + k]))
                            idx += k
                        rhs = alg.act(m, p, tuple(inner))
                        if lhs != rhs:
                            return OperadViolation(
                                "algebra-compat", (m,) + ks, (p,) + qs + xs)
    return None


@dataclass
class WeightedCategory:
    """A graph with arity-indexed composition weighted by an operad.

    ``gamma(path)`` returns the token-level composition along an object
    path: (pe, (e_1, ..., e_k)) -> element of hom(path[0], path[-1]), with
    edge slots in path order.
    """

    base: object
    operad: FinOperad
    graph: GraphObj
    gamma: Callable

    def objects(self, bound: int = 0):
        return [t for s in range(bound + 1) for t in self.graph.obj_parts(s)]


def check_weighted_cat(wc: WeightedCategory, bound: int = 0):
    """Nested-evaluation compatibility and unit law, elementwise."""
    P = wc.operad
    V = wc.base
    pts = wc.objects(bound)

    def hom_els(x, y):
        return [t for t, _ in V.elements(wc.graph.hom(x, y), bound)]

    def pels(k):
        return [t for t, _ in P.base.elements(P.ops(k), bound)]

    # unit law
    for x in pts:
        for y in pts:
            for e in hom_els(x, y):
                if wc.gamma((x, y))(P.unit_elem, (e,)) != e:
                    return OperadViolation("cat-unit", (1,), (e,))
    # nested compatibility within the cap
    for m in range(P.cap + 1):
        for ks in _arity_tuples(m, P.cap):
            total = sum(ks)
            if total > P.cap:
                continue
            for opath in itertools.product(pts, repeat=total + 1):
                # cut points for the outer path
                cuts = [0]
                for k in ks:
                    cuts.append(cuts[-1] + k)
                outer = tuple(opath[c] for c in cuts)
                inner_paths = [opath[cuts[i]: cuts[i + 1] + 1]
                               for i in range(m)]
                edge_pools = [hom_els(opath[i], opath[i + 1])
                              for i in range(total)]
                for p in pels(m):
                    for qs in itertools.product(*[pels(k) for k in ks]):
                        for es in itertools.product(*edge_pools):
                            pq = _global_comp(P.base, P.comp, p, qs)
                            lhs = wc.gamma((opath[0], opath[-1])
                                           if total == 0 else opath)(pq, es)
                            idx = 0
                            inner = []
                            for i, k in enumerate(ks):
                                inner.append(wc.gamma(inner_paths[i])(
                                    qs[i], es[idx: idx + k]))
                                idx += k
                            rhs = wc.gamma(outer)(p, tuple(inner))
                            if lhs != rhs:
                                return OperadViolation(
                                    "cat-compat", (m,) + ks, (p,) + qs + es)
    return None


def weighted_cat_from_algebra(alg: AlgebraData, obj="@") -> WeightedCategory:
    """A one-object weighted category from an operad action."""
    G = GraphObj(SetObj.plain((obj,)), lambda a, b: alg.carrier)

    def gamma(path):
        return lambda pe, es: alg.act(len(es), pe, tuple(es))
    return WeightedCategory(SetBase(), alg.operad, G, gamma)


def algebra_from_weighted_cat(wc: WeightedCategory) -> AlgebraData:
    """The operad action carried by a one-object weighted category."""
    pts = wc.objects(0)
    if len(pts) != 1:
        raise ValueError("algebra extraction needs exactly one object")
    o = pts[0]

    def act(k, pe, xs):
        return wc.gamma((o,) * (k + 1))(pe, tuple(xs))
    return AlgebraData(wc.operad, wc.graph.hom(o, o), act)


# ---------------------------------------------------------------------------
# space models
# ---------------------------------------------------------------------------

@dataclass
class ModelSpace:
    """A finite stand-in for a space: graded vertices and directed edges."""
    verts: SetObj
    edges: tuple = ()

    def vert_list(self, bound: int = 0):
        return [t for s in range(bound + 1) for t in self.verts.parts(s)]


class DiscreteModel:
    """Points only; the only paths are constant (the empty edge tuple)."""

    name = "discrete"

    def space(self, points) -> ModelSpace:
        return ModelSpace(SetObj.plain(tuple(points)))

    def points(self, X: ModelSpace) -> SetObj:
        return X.verts

    def path_space(self, X: ModelSpace, x, y) -> ModelSpace:
        toks = ((),) if x == y else ()
        return ModelSpace(SetObj.plain(toks))

    def concat(self, paths) -> tuple:
        return tuple(e for p in paths for e in p)

    def product(self, X: ModelSpace, Y: ModelSpace) -> ModelSpace:
        return ModelSpace(SetBase().product(X.verts, Y.verts))


class FiniteGraphModel:
    """Digraph spaces; paths are edge sequences graded by length.

    Path spaces are discrete (edge paths carry no homotopies), so
    concatenation is strictly associative and the associative or terminal
    operad acts.  Products are strong products (move-or-stay), under which
    points and path components are product-preserving at space level.
    """

    name = "graph"

    def space(self, verts, edges) -> ModelSpace:
        return ModelSpace(SetObj.plain(tuple(verts)), tuple(edges))

    def points(self, X: ModelSpace) -> SetObj:
        return X.verts

    def path_space(self, X: ModelSpace, x, y) -> ModelSpace:
        succ = {}
        for (name, u, v) in X.edges:
            succ.setdefault(u, []).append((name, v))

        def gen(s):
            def rec(at, left):
                if left == 0:
                    if at == y:
                        yield ()
                    return
                for (name, v) in succ.get(at, ()):
                    for rest in rec(v, left - 1):
                        yield (name,) + rest
            yield from rec(x, s)
        return ModelSpace(SetObj(GradedParts(gen)))

    def concat(self, paths) -> tuple:
        return tuple(e for p in paths for e in p)

    def product(self, X: ModelSpace, Y: ModelSpace) -> ModelSpace:
        verts = SetBase().product(X.verts, Y.verts)
        edges = []
        xv = X.vert_list()
        yv = Y.vert_list()
        for (e, u, v) in X.edges:
            for (f, w, z) in Y.edges:
                edges.append(((e, f), (u, w), (v, z)))
            for w in yv:
                edges.append(((e, ("stay", w)), (u, w), (v, w)))
        for (f, w, z) in Y.edges:
            for u in xv:
                edges.append(((("stay", u), f), (u, w), (u, z)))
        return ModelSpace(verts, tuple(edges))

    def components(self, X: ModelSpace) -> dict:
        """Vertex -> canonical component representative, by BFS."""
        verts = X.vert_list()
        adj = {v: set() for v in verts}
        for (_, u, v) in X.edges:
            adj[u].add(v)
            adj[v].add(u)
        rep = {}
        for v in sorted(verts, key=token_str):
            if v in rep:
                continue
            stack, comp = [v], [v]
            rep[v] = v
            while stack:
                w = stack.pop()
                for z in adj.get(w, ()):
                    if z not in rep:
                        rep[z] = v
                        comp.append(z)
                        stack.append(z)
        return rep


@dataclass
class SpaceFunctor:
    """A level-0 functor out of a model: object part plus token action."""
    model: object
    name: str
    on_space: Callable       # ModelSpace -> SetObj
    on_point: Callable       # (ModelSpace, token) -> token


def points_functor(model) -> SpaceFunctor:
    return SpaceFunctor(model, "points",
                        lambda X: model.points(X),
                        lambda X, t: t)


def components_functor(model) -> SpaceFunctor:
    def on_space(X):
        if not X.edges:
            return X.verts
        rep = model.components(X)
        seen = []
        for v in sorted(set(rep.values()), key=token_str):
            seen.append(v)
        return SetObj.plain(tuple(seen))

    def on_point(X, t):
        if not X.edges:
            return t
        return model.components(X)[t]
    return SpaceFunctor(model, "components", on_space, on_point)


def check_space_product_preservation(model, pi: SpaceFunctor, X, Y,
                                     bound: int = 0) -> bool:
    """Does the canonical map pi(X x Y) -> pi(X) x pi(Y) biject?"""
    XY = model.product(X, Y)
    lhs = pi.on_space(XY)
    sb = SetBase()
    rhs = sb.product(pi.on_space(X), pi.on_space(Y))
    image = []
    for s in range(bound + 1):
        for t in lhs.parts(s):
            # representatives are vertices of the product, i.e. pairs
            image.append(((pi.on_point(X, t[0]), pi.on_point(Y, t[1])), s))
    cod = [(t, s) for s in range(bound + 1) for t in rhs.parts(s)]
    key = lambda p: (p[1], token_str(p[0]))
    return sorted(image, key=key) == sorted(cod, key=key)


# ---------------------------------------------------------------------------
# model operads (stand-ins for a path-space operad)
# ---------------------------------------------------------------------------

@dataclass
class ModelOperad:
    """An operad of model spaces with a point-level composition."""
    model: object
    cap: int
    spaces: Callable          # k -> ModelSpace
    point_comp: Callable      # (pe, pes) -> point token
    unit_point: object
    is_terminal: bool = False
    name: str = "seed"


def terminal_model_operad(model, cap: int) -> ModelOperad:
    pt = model.space(("*",)) if isinstance(model, DiscreteModel) \
        else model.space(("*",), ())
    return ModelOperad(model, cap, lambda k: pt, lambda pe, pes: "*", "*",
                       is_terminal=True, name="terminal")


def monoid_model_operad(model, elems, op, unit, cap: int) -> ModelOperad:
    sp = model.space(tuple(elems)) if isinstance(model, DiscreteModel) \
        else model.space(tuple(elems), ())

    def comp(pe, pes):
        out = pe
        for q in pes:
            out = op(out, q)
        return out
    return ModelOperad(model, cap, lambda k: sp, comp, unit, name="monoid-seed")


def push_operad_level0(pi: SpaceFunctor, seed: ModelOperad) -> FinOperad:
    """The level-0 weighting: the seed through a level-0 functor."""
    base = SetBase()
    objs = {}

    def ops_fn(k):
        if k > seed.cap:
            raise OperadCapError("arity %d beyond the cap %d" % (k, seed.cap))
        if k not in objs:
            objs[k] = pi.on_space(seed.spaces(k))
        return objs[k]

    def comp(pe, pes):
        sp = seed.spaces(1)
        out = seed.point_comp(pe, tuple(pes))
        return pi.on_point(sp, out)
    unit = pi.on_point(seed.spaces(1), seed.unit_point)
    return FinOperad(base, seed.cap, ops_fn, comp, unit,
                     "%s@%s" % (seed.name, pi.name), is_terminal=seed.is_terminal)


# ---------------------------------------------------------------------------
# enrichment steps over a model
# ---------------------------------------------------------------------------

def gamma_path_graph(model, X: ModelSpace, bound: int,
                     operad: Optional[FinOperad] = None) -> WeightedCategory:
    """The weighted category of points and graded paths of a model space.

    Composition is the model's concatenation under the chosen operad
    (terminal by default); endpoint preservation is verified on the probed
    fragment and a violation raises ModelError.
    """
    sb = SetBase()
    if operad is None:
        operad = terminal_operad(sb, bound)
    pts = X.vert_list()
    homs = {}

    def hom(x, y):
        if (x, y) not in homs:
            homs[(x, y)] = model.path_space(X, x, y).verts
        return homs[(x, y)]
    G = GraphObj(X.verts, hom)

    def gamma(path):
        def fn(pe, es):
            return model.concat(tuple(es))
        return fn
    wc = WeightedCategory(sb, operad, G, gamma)
    # endpoint rule on the probed fragment
    for x in pts:
        for y in pts:
            for z in pts:
                for (e1, s1) in sb.elements(hom(x, y), bound):
                    for (e2, s2) in sb.elements(hom(y, z), bound):
                        if s1 + s2 > bound:
                            continue
                        out = model.concat((e1, e2))
                        pool = [t for t, _ in sb.elements(hom(x, z), s1 + s2)]
                        if out not in pool:
                            raise ModelError(
                                "concatenation violates endpoints at %s"
                                % token_str((x, y, z)))
    return wc


@dataclass
class EnrichStep:
    """Result of one slice-level enrichment step."""
    base: object
    operad: FinOperad
    pi_plus: Callable         # ModelSpace -> WeightedCategory | GraphObj
    monad: Optional[Monad] = None


def dc_step(V, pi: SpaceFunctor, seed: ModelOperad, probes=(),
            bound: int = 2) -> EnrichStep:
    """One category-level step: weighted categories of points and paths.

    Verifies product preservation of the level functor on the given probe
    pairs; failure raises ProductPreservationError.
    """
    model = pi.model
    for (X, Y) in probes:
        if not check_space_product_preservation(model, pi, X, Y, bound):
            raise ProductPreservationError(
                "level functor %s does not preserve the probed product" % pi.name)
    P = push_operad_level0(pi, seed)

    def pi_plus(X: ModelSpace) -> WeightedCategory:
        homs = {}

        def hom(x, y):
            if (x, y) not in homs:
                ps = model.path_space(X, x, y)
                homs[(x, y)] = (ps, pi.on_space(ps))
            return homs[(x, y)]
        G = GraphObj(X.verts, lambda x, y: hom(x, y)[1])

        def gamma(path):
            def fn(pe, es):
                x, y = path[0], path[-1]
                ps, _ = hom(x, y)
                return pi.on_point(ps, model.concat(tuple(es)))
            return fn
        return WeightedCategory(SetBase(), P, G, gamma)
    return EnrichStep(vgraph_base(V), P, pi_plus)


def dm_step(V, T: Monad, weighting: FinOperad, fundamental: Callable,
            model, pi0: SpaceFunctor):
    """One monad-level step: the composite weighted monad plus the next
    fundamental functor.

    Returns (graph base over V, composite monad, next fundamental functor).
    """
    W, Tplus = fm_step(V, T, operad=weighting)

    def fund_next(X: ModelSpace):
        memo = {}

        def hom(x, y):
            if (x, y) not in memo:
                memo[(x, y)] = fundamental(model.path_space(X, x, y))
            return memo[(x, y)]
        # the object family keeps the space's grading (path spaces grade
        # their points by length)
        return GraphObj(X.verts, hom)
    return W, Tplus, fund_next


@dataclass
class TowerLevel:
    """One level of a weak tower: base, monad, weighting, fundamental."""
    base: object
    monad: Monad
    weight: FinOperad
    fundamental: Callable


def weak_tower(model, seed: ModelOperad, n: int, mode: str = "incoherent"):
    """Iterated operad-weighted enrichment levels over a space model.

    ``mode`` selects the level-0 functor: points (incoherent) or path
    components (coherent-at-0).
    """
    if n > 2:
        raise UnsupportedDepthError("weak tower depth %d exceeds the supported 2" % n)
    if mode not in ("incoherent", "coherent-at-0"):
        raise ValueError("unknown mode %r" % mode)
    pi0 = points_functor(model) if mode == "incoherent" else components_functor(model)
    base = SetBase()
    levels = []
    fund0 = lambda X: pi0.on_space(X)
    w0 = push_operad_level0(pi0, seed) if not seed.is_terminal else \
        terminal_operad(base, seed.cap)
    levels.append(TowerLevel(base, identity_monad(base), w0, fund0))
    for k in range(1, n + 1):
        prev = levels[-1]
        W, Tp, fund = dm_step(prev.base, prev.monad, prev.weight,
                              prev.fundamental, model, pi0)
        wk = _push_weight(W, prev, seed, model)
        levels.append(TowerLevel(W, Tp, wk, fund))
    return levels


def _push_weight(Wbase, prev_level: TowerLevel, seed: ModelOperad, model):
    """The next level's weighting: the seed through the level fundamental."""
    if seed.is_terminal:
        return terminal_operad(Wbase, seed.cap)
    # genuine weights above level 0 would need algebra actions over the
    # level monad; only identity-monad levels are exercised with them
    def ops_fn(k):
        return prev_level.fundamental(seed.spaces(k))
    sp1 = seed.spaces(1)
    unit_tok = (seed.unit_point, ())

    def comp(pe, pes):
        return seed.point_comp(pe, tuple(pes))
    return FinOperad(Wbase, seed.cap, ops_fn, comp, unit_tok,
                     seed.name + "+", is_terminal=False)


# ---------------------------------------------------------------------------
# composite characterization
# ---------------------------------------------------------------------------

def pk_monad(levels, n: int, k: int) -> Monad:
    """Composition along bounding k-cells, at the depth-n approximation."""
    if not (0 <= k < n):
        raise ValueError("k must satisfy 0 <= k < n")
    lvl = levels[n - k - 1]
    M = path_monad(lvl.base, lvl.weight)
    for _ in range(k):
        M = lift_monad(M)
    return M


@dataclass
class CompositeReport:
    ok: bool
    dim: int
    left: list
    right: list
    witness: dict
    mismatch: Optional[str] = None

    def to_json(self):
        return {"ok": self.ok, "dim": self.dim,
                "left_count": len(self.left), "right_count": len(self.right),
                "mismatch": self.mismatch}


def composite_check(levels, X: GlobSet, n: int, bound: int) -> CompositeReport:
    """Dimension-n cells of the tower monad against the P_0...P_{n-1} composite."""
    if X.n != n:
        raise ValueError("input dimension %d, expected %d" % (X.n, n))
    v = validate_globset(X)
    if v is not None:
        raise ValueError("invalid globular set: %s" % v.axiom)
    h = globset_to_ngraph(X)
    if n == 0:
        cells = list(X.cells[0])
        return CompositeReport(True, 0, cells, cells,
                               {c: c for c in cells})
    lhs_obj = levels[n].monad.functor.on_obj(h)
    rhs_obj = h
    for k in range(n - 1, -1, -1):
        rhs_obj = pk_monad(levels, n, k).functor.on_obj(rhs_obj)
    lg = ngraph_to_globset(lhs_obj, n, bound)
    rg = ngraph_to_globset(rhs_obj, n, bound)
    left, right = list(lg.cells[n]), list(rg.cells[n])
    witness = {}
    if sorted(left) != sorted(right):
        extra = set(left) ^ set(right)
        return CompositeReport(False, n, left, right, {},
                               mismatch=next(iter(sorted(extra))))
    for c in left:
        witness[c] = c
    return CompositeReport(True, n, left, right, witness)


# ---------------------------------------------------------------------------
# comparison of weak and strict towers
# ---------------------------------------------------------------------------

def strict_weak_compare(n: int, X: GlobSet, bound: int, model=None,
                        seed: Optional[ModelOperad] = None) -> dict:
    """Compare the terminal-seed weak tower with the strict tower on X.

    Builds the canonical slot-stripping map dimension by dimension and
    checks it is a boundary-respecting bijection on cells up to the bound.
    """
    from .gcore import collect_cells, located_id, map_located
    model = model if model is not None else DiscreteModel()
    seed = seed if seed is not None else terminal_model_operad(model, max(bound, 2))
    levels = weak_tower(model, seed, n)
    strict = strict_tower(n)
    h = globset_to_ngraph(X)
    out = {"ok": True, "dims": {}}
    if n == 0:
        out["dims"][0] = {"ok": True, "left": len(X.cells[0]),
                          "right": len(X.cells[0])}
        out["witness_size"] = len(X.cells[0])
        return out
    iobj = levels[n].monad.functor.on_obj(h)
    sobj = strict.monads[n].functor.on_obj(h)
    ileft = collect_cells(iobj, n, bound)
    sleft = collect_cells(sobj, n, bound)
    mor = _compare_mor(levels, strict, n, h)
    mapping = {}
    for d in range(n + 1):
        pairs = {}
        for (chain, tok) in ileft[d]:
            ichain, itok = map_located(mor, chain, tok, at_set_level=(d == n))
            pairs[located_id(chain, tok)] = located_id(ichain, itok)
        expected = sorted(located_id(c, t) for c, t in sleft[d])
        ok = sorted(pairs.values()) == expected
        out["dims"][d] = {"ok": ok, "left": len(ileft[d]),
                          "right": len(sleft[d])}
        if not ok:
            out["ok"] = False
        mapping.update(pairs)
    # boundary commutation: located ids encode boundaries positionally, so
    # a dimensionwise bijection of ids automatically respects src and tgt;
    # assert it anyway on the globular presentations
    ig = ngraph_to_globset(iobj, n, bound)
    sg = ngraph_to_globset(sobj, n, bound)
    for d in range(1, n + 1):
        for c in ig.cells[d]:
            if c not in mapping or ig.src[d][c] not in mapping:
                continue
            if mapping[ig.src[d][c]] != sg.src[d].get(mapping[c]) or \
               mapping[ig.tgt[d][c]] != sg.tgt[d].get(mapping[c]):
                out["ok"] = False
                out["dims"][d]["ok"] = False
                break
    out["witness_size"] = len(mapping)
    return out


def _compare_mor(levels, strict, k: int, A: GraphObj):
    """The canonical morphism iT_k(A) -> T_k(A): strip weight slots."""
    if k == 0:
        return None
    V = levels[k - 1].base
    P = levels[k - 1].weight
    inner_monad_w = levels[k - 1].monad
    inner_monad_s = strict.monads[k - 1]

    def inner_compare(hom_obj):
        if k - 1 == 0:
            return None
        return _compare_mor(levels, strict, k - 1, hom_obj)

    dom = levels[k].monad.functor.on_obj(A)
    cod = strict.monads[k].functor.on_obj(A)

    def hom_mor(a, b):
        def comp_mor(p):
            kk = len(p) - 1
            w_facs = [P.ops(kk)]
            s_facs = []
            mors = []
            for i in range(kk):
                hob = A.hom(p[i], p[i + 1])
                who = inner_monad_w.functor.on_obj(hob)
                sho = inner_monad_s.functor.on_obj(hob)
                w_facs.append(who)
                s_facs.append(sho)
                cm = inner_compare(hob)
                mors.append(V.identity(who) if cm is None else cm)
            prod_w = V.product_list(w_facs)
            mid = V.product_list(w_facs[1:])
            drop = stratified_mor(V, prod_w, mid,
                                  lambda level: (lambda t: t[1:]))
            apply_inner = V.flat_product_mor(w_facs[1:], s_facs, mors)
            return V.compose(drop, apply_inner)
        return _path_dispatch(V, dom.hom(a, b), cod.hom(a, b),
                              lambda p: p, comp_mor)
    return GraphMor(dom, cod, lambda a: a, hom_mor)
