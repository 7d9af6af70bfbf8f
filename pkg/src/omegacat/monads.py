"""Monads on enrichment bases.

The free enriched-category monad is built from one parametrized "path
monad": hom objects are graded coproducts over object paths of products of
the homs along the path, each length-k component shifted up by k so that a
cell's grade counts the composition slots it uses.  An optional operad adds
a weighting factor ``ops(k)`` to every length-k component; with the
terminal operad the construction degenerates to the plain free category
monad, token for token up to the extra slot.

Also here: lifting a monad homwise to graphs, the canonical distributive
law of the lift over the path monad, the composite-monad step and its
action on monad morphisms, the strict tower, bounded cell enumeration
through the graph/globular conversions, and a pasting-diagram counting
oracle written directly on globular sets, independent of all of the above.

Grades never increase under multiplication (flattening drops the outer
composition slots); units and functor actions preserve them.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional

from .coalgebra import Endofunctor
from .gcore import (BaseFunctor, DimensionError, GlobSet, GradedParts,
                    GraphBase, GraphMor, GraphObj, SetBase, SetMor, SetObj,
                    globset_to_ngraph, ngraph_base, ngraph_to_globset,
                    token_str, validate_globset, vgraph_base)


class UnsupportedDepthError(ValueError):
    pass


class CoproductPreservationError(ValueError):
    pass


SEARCH_CEILING = 64  # grade ceiling for coproduct-component searches


# ---------------------------------------------------------------------------
# monads
# ---------------------------------------------------------------------------

@dataclass
class Monad:
    base: object
    functor: Endofunctor
    unit: Callable          # obj -> Mor  x -> T x
    mult: Callable          # obj -> Mor  T T x -> T x
    name: str = ""
    is_identity: bool = False


def identity_monad(base) -> Monad:
    F = Endofunctor(base, lambda x: x, lambda f: f, "id")
    return Monad(base, F, base.identity, base.identity, "id", is_identity=True)


def writer_monad(elems, op, unit_elem) -> Monad:
    """X maps to M x X for a finite monoid (elems, op, unit_elem)."""
    base = SetBase()
    M = SetObj.plain(tuple(elems))

    def on_obj(x):
        return base.product(M, x)

    def on_mor(f):
        return SetMor(on_obj(f.dom), on_obj(f.cod),
                      lambda t: (t[0], f.fn(t[1])))

    def unit(x):
        return SetMor(x, on_obj(x), lambda t: (unit_elem, t))

    def mult(x):
        return SetMor(on_obj(on_obj(x)), on_obj(x),
                      lambda t: (op(t[0], t[1][0]), t[1][1]))
    F = Endofunctor(base, on_obj, on_mor, "writer")
    return Monad(base, F, unit, mult, "writer")


# ---------------------------------------------------------------------------
# structural helpers
# ---------------------------------------------------------------------------

def stratified_mor(base, dom, cod, fn_for_level, level=0):
    """A morphism given by one token function per structural stratum."""
    f = fn_for_level(level)
    if isinstance(base, SetBase):
        return SetMor(dom, cod, f)
    return GraphMor(dom, cod, f,
                    lambda a, b: stratified_mor(base.inner, dom.hom(a, b),
                                                cod.hom(f(a), f(b)),
                                                fn_for_level, level + 1))


def fan_mor(base, dom, cods, mors):
    """Pair morphisms with a common domain into a flat product."""
    if isinstance(base, SetBase):
        return SetMor(dom, base.product_list(cods),
                      lambda t: tuple(m.fn(t) for m in mors))
    cod = base.product_list(cods)

    def hom(a, b):
        fa = tuple(m.obj_fn(a) for m in mors)
        fb = tuple(m.obj_fn(b) for m in mors)
        return fan_mor(base.inner, dom.hom(a, b),
                       [c.hom(fa[i], fb[i]) for i, c in enumerate(cods)],
                       [m.hom_mor(a, b) for m in mors])
    return GraphMor(dom, cod,
                    lambda a: tuple(m.obj_fn(a) for m in mors), hom)


def invert_mor(base, f, ceiling=SEARCH_CEILING):
    """Lazy inverse of a (bounded-)bijective morphism, by grade search."""
    if isinstance(base, SetBase):
        memo = {}

        def back(t):
            if t not in memo:
                for s in range(ceiling + 1):
                    for u in f.dom.parts(s):
                        if f.fn(u) == t:
                            memo[t] = u
                            break
                    if t in memo:
                        break
                else:
                    raise CoproductPreservationError(
                        "no preimage for %s within grade %d" % (token_str(t), ceiling))
            return memo[t]
        return SetMor(f.cod, f.dom, back)
    memo = {}

    def back_obj(t):
        if t not in memo:
            for s in range(ceiling + 1):
                for u in f.dom.obj_parts(s):
                    if f.obj_fn(u) == t:
                        memo[t] = u
                        break
                if t in memo:
                    break
            else:
                raise CoproductPreservationError(
                    "no object preimage for %s within grade %d" % (token_str(t), ceiling))
        return memo[t]

    def hom(a, b):
        ua, ub = back_obj(a), back_obj(b)
        return invert_mor(base.inner, f.hom_mor(ua, ub), ceiling)
    return GraphMor(f.cod, f.dom, back_obj, hom)


def _apply_top(base, mor, token):
    """Apply a morphism at its top stratum (elements or object tokens)."""
    if isinstance(base, SetBase):
        return mor.fn(token)
    return mor.obj_fn(token)


def _top_parts(base, obj, s):
    if isinstance(base, SetBase):
        return obj.parts(s)
    return obj.obj_parts(s)


# ---------------------------------------------------------------------------
# path homs
# ---------------------------------------------------------------------------

def _objects_upto(A: GraphObj, budget: int):
    return [t for s in range(budget + 1) for t in A.obj_parts(s)]


def _min_top_grade(V, obj, budget):
    for s in range(budget + 1):
        if _top_parts(V, obj, s):
            return s
    return None


def object_paths(V, A: GraphObj, a, b, k: int, budget: int):
    """Object paths of length k from a to b whose homs can carry elements.

    Intermediate objects are drawn from grades <= budget; a step is pruned
    when the hom along it has no parts within the leftover budget (grades
    only add along a product, so such a path contributes nothing).
    """
    if k == 0:
        return [(a,)] if a == b else []
    mids = _objects_upto(A, budget)
    out = []

    def rec(path, used):
        at = path[-1]
        left = k - (len(path) - 1)
        cands = mids if left > 1 else (b,)
        for y in cands:
            mg = _min_top_grade(V, A.hom(at, y), budget - used)
            if mg is None:
                continue
            if left == 1:
                out.append(tuple(path) + (y,))
            else:
                rec(path + [y], used + mg)

    rec([a], 0)
    return out


def _factors(V, A: GraphObj, p, operad):
    homs = [A.hom(p[i], p[i + 1]) for i in range(len(p) - 1)]
    if operad is None:
        return homs
    return [operad.ops(len(p) - 1)] + homs


def path_component(V, A: GraphObj, p, operad):
    """Unshifted product of the factors along one object path."""
    return V.product_list(_factors(V, A, p, operad))


def path_hom(V, A: GraphObj, a, b, operad=None):
    """The free hom object between a and b: tagged, shifted path components.

    Tokens are pairs (object path, payload tuple); the payload is the flat
    product token, led by the operad element when a weighting is present.
    Every length-k component is shifted by k, so grades count composition
    slots plus whatever the factors already carry.
    """
    comp_memo = {}
    kmax = None if operad is None else operad.cap

    def lengths(s):
        top = s if kmax is None else min(s, kmax)
        return range(top + 1)

    def comp(p):
        if p not in comp_memo:
            comp_memo[p] = path_component(V, A, p, operad)
        return comp_memo[p]

    if isinstance(V, SetBase):
        def gen(s):
            for k in lengths(s):
                for p in object_paths(V, A, a, b, k, s - k):
                    for t in comp(p).parts(s - k):
                        yield (p, t)
        return SetObj(GradedParts(gen))

    def obj_gen(s):
        for k in lengths(s):
            for p in object_paths(V, A, a, b, k, s - k):
                for t in comp(p).obj_parts(s - k):
                    yield (p, t)

    def hom(x, y):
        (p, t), (q, u) = x, y
        if p != q:
            return V.inner.initial()
        return V.inner.shift(comp(p).hom(t, u), len(p) - 1)
    return GraphObj(SetObj(GradedParts(obj_gen)), hom)


def _path_dispatch(V, dom, cod, path_fn, comp_mor_of_path):
    """Morphism between path homs acting per component."""
    memo = {}

    def cm(p):
        if p not in memo:
            memo[p] = comp_mor_of_path(p)
        return memo[p]

    if isinstance(V, SetBase):
        return SetMor(dom, cod, lambda t: (path_fn(t[0]), cm(t[0]).fn(t[1])))

    def obj_fn(t):
        return (path_fn(t[0]), cm(t[0]).obj_fn(t[1]))

    def hom(x, y):
        if x[0] != y[0]:
            return V.inner.vacuous(dom.hom(x, y), cod.hom(obj_fn(x), obj_fn(y)))
        return cm(x[0]).hom_mor(x[1], y[1])
    return GraphMor(dom, cod, obj_fn, hom)


# ---------------------------------------------------------------------------
# the path monad (free category / free weighted category)
# ---------------------------------------------------------------------------

def _unit_strata(base, token):
    """Components of a global element, one per structural stratum."""
    if isinstance(base, SetBase):
        return [token]
    return [token[0]] + _unit_strata(base.inner, token[1])


def _flatten_plain(operad):
    """Payload flatten below the top stratum: concat slices, compose weights."""
    def fn(t):
        if operad is None:
            return tuple(x for w in t for x in w)
        pe, ws = t[0], t[1:]
        return (operad.comp(pe, tuple(w[0] for w in ws)),) + \
            tuple(x for w in ws for x in w[1:])
    return fn


def _flatten_top(operad):
    """Flatten a path-of-paths token into a single path token."""
    plain = _flatten_plain(operad)

    def fn(t):
        P, pay = t
        inner = pay if operad is None else pay[1:]
        paths = [w[0] for w in inner]
        flat_path = (P[0],) if not paths else \
            paths[0] + tuple(x for q in paths[1:] for x in q[1:])
        payloads = tuple(w[1] for w in inner)
        if operad is None:
            return (flat_path, tuple(x for w in payloads for x in w))
        PE = pay[0]
        pes = tuple(w[0] for w in payloads)
        return (flat_path,
                (operad.comp(PE, pes),) + tuple(x for w in payloads for x in w[1:]))
    return fn


def path_functor(V, operad=None) -> Endofunctor:
    W = vgraph_base(V)

    def on_obj(A):
        return GraphObj(A.obj, lambda a, b: path_hom(V, A, a, b, operad))

    def on_mor(f):
        A, B = f.dom, f.cod
        FA, FB = on_obj(A), on_obj(B)

        def hom_mor(a, b):
            fa, fb = f.obj_fn(a), f.obj_fn(b)

            def comp_mor(p):
                q = tuple(f.obj_fn(x) for x in p)
                doms = _factors(V, A, p, operad)
                cods = _factors(V, B, q, operad)
                mors = [f.hom_mor(p[i], p[i + 1]) for i in range(len(p) - 1)]
                if operad is not None:
                    mors = [V.identity(operad.ops(len(p) - 1))] + mors
                return V.flat_product_mor(doms, cods, mors)
            return _path_dispatch(V, FA.hom(a, b), FB.hom(fa, fb),
                                  lambda p: tuple(f.obj_fn(x) for x in p),
                                  comp_mor)
        return GraphMor(FA, FB, f.obj_fn, hom_mor)
    name = "fc" if operad is None else "fc[%s]" % getattr(operad, "name", "P")
    return Endofunctor(W, on_obj, on_mor, name, graded=True)


def path_monad(V, operad=None) -> Monad:
    W = vgraph_base(V)
    F = path_functor(V, operad)
    strata = None if operad is None else _unit_strata(V, operad.unit_elem)

    def unit(A):
        FA = F.on_obj(A)

        def hom_mor(a, b):
            def fn(level):
                if level == 0:
                    if operad is None:
                        return lambda t: ((a, b), (t,))
                    return lambda t: ((a, b), (strata[0], t))
                if operad is None:
                    return lambda t: (t,)
                return lambda t, _l=level: (strata[_l], t)
            return stratified_mor(V, A.hom(a, b), FA.hom(a, b), fn)
        return GraphMor(A, FA, lambda a: a, hom_mor)

    def mult(A):
        FA = F.on_obj(A)
        FFA = F.on_obj(FA)
        top = _flatten_top(operad)
        plain = _flatten_plain(operad)

        def hom_mor(a, b):
            def fn(level):
                return top if level == 0 else plain
            return stratified_mor(V, FFA.hom(a, b), FA.hom(a, b), fn)
        return GraphMor(FFA, FA, lambda a: a, hom_mor)
    return Monad(W, F, unit, mult, F.name)


def fc_monad(V) -> Monad:
    """Kelly's free enriched-category monad on V-graphs."""
    return path_monad(V, None)


class GradedHom:
    """A graded fragment of a possibly-infinite hom object."""

    def __init__(self, obj, base):
        self.obj = obj
        self.base = base

    def generator(self, size: int) -> tuple:
        return _top_parts(self.base, self.obj, size)

    def elements(self, bound: int):
        out = []
        for s in range(bound + 1):
            out.extend((t, s) for t in self.generator(s))
        return out


def fc_apply(V, A: GraphObj, a, b, bound: int) -> GradedHom:
    """Free-category hom between a and b, enumerable to the given bound."""
    del bound  # the fragment is lazy; the bound is the caller's probe depth
    return GradedHom(path_hom(V, A, a, b, None), V)


# ---------------------------------------------------------------------------
# lifting a monad to graphs homwise
# ---------------------------------------------------------------------------

def lift_obj(T: Monad, G: GraphObj) -> GraphObj:
    return GraphObj(G.obj, lambda a, b: T.functor.on_obj(G.hom(a, b)))


def lift_monad(T: Monad) -> Monad:
    """Apply a monad to every hom object; identity on object sets."""
    W = vgraph_base(T.base)

    def on_obj(G):
        return lift_obj(T, G)

    def on_mor(f):
        return GraphMor(on_obj(f.dom), on_obj(f.cod), f.obj_fn,
                        lambda a, b: T.functor.on_mor(f.hom_mor(a, b)))

    def unit(G):
        return GraphMor(G, on_obj(G), lambda a: a,
                        lambda a, b: T.unit(G.hom(a, b)))

    def mult(G):
        GG = on_obj(on_obj(G))
        return GraphMor(GG, on_obj(G), lambda a: a,
                        lambda a, b: T.mult(G.hom(a, b)))
    F = Endofunctor(W, on_obj, on_mor, T.name + "*", graded=T.functor.graded)
    return Monad(W, F, unit, mult, T.name + "*", is_identity=T.is_identity)


# ---------------------------------------------------------------------------
# distributive law of the lift over the path monad
# ---------------------------------------------------------------------------

def _operad_action_top(V, T: Monad, operad, k):
    """Token action T(ops(k)) -> ops(k) at the top stratum."""
    if T.is_identity:
        return lambda t: t
    if operad.is_terminal:
        return lambda t: "*"
    act = operad.action(T, k)
    if act is None:
        raise CoproductPreservationError(
            "operad %r carries no algebra action for %s" % (operad.name, T.name))
    return lambda t: _apply_top(V, act, t)


def dist_component(V, T: Monad, X: GraphObj, a, b, operad=None,
                   ceiling=SEARCH_CEILING):
    """Component of the distributive law at one hom: T(SX) -> S(T_* X)."""
    src_hom = path_hom(V, X, a, b, operad)
    dom = T.functor.on_obj(src_hom)
    TX = lift_obj(T, X)
    cod = path_hom(V, TX, a, b, operad)

    comp_memo = {}

    def comp(p):
        if p not in comp_memo:
            c = path_component(V, X, p, operad)
            inj = stratified_mor(
                V, c, src_hom,
                lambda level, _p=p: ((lambda t: (_p, t)) if level == 0
                                     else (lambda t: t)))
            comp_memo[p] = (c, T.functor.on_obj(c), T.functor.on_mor(inj))
        return comp_memo[p]

    table = {}
    scanned = [-1]

    kmax = None if operad is None else operad.cap

    def locate(t):
        if t in table:
            return table[t]
        for budget in range(scanned[0] + 1, ceiling + 1):
            scanned[0] = budget
            ktop = budget if kmax is None else min(budget, kmax)
            for k in range(ktop + 1):
                for p in object_paths(V, X, a, b, k, budget):
                    c, Tc, Tinj = comp(p)
                    for u in _top_parts(V, Tc, budget - k):
                        key = _apply_top(V, Tinj, u)
                        table.setdefault(key, (p, u))
            if t in table:
                return table[t]
        raise CoproductPreservationError(
            "token %s not in the image of any path component (functor %s "
            "does not preserve the coproduct at this probe)"
            % (token_str(t), T.name))

    def result_parts(p, u):
        c, Tc, _ = comp(p)
        facs = _factors(V, X, p, operad)
        k = len(p) - 1
        slots = []
        off = 0
        if operad is not None:
            act = _operad_action_top(V, T, operad, k)
            pr0 = T.functor.on_mor(V.proj(facs, 0))
            slots.append(act(_apply_top(V, pr0, u)))
            off = 1
        for i in range(k):
            pr = T.functor.on_mor(V.proj(facs, off + i))
            slots.append(_apply_top(V, pr, u))
        return (p, tuple(slots))

    if isinstance(V, SetBase):
        return SetMor(dom, cod, lambda t: result_parts(*locate(t)))

    def obj_fn(t):
        return result_parts(*locate(t))

    def hom_mor(x, y):
        (p, u) = locate(x)
        (q, w) = locate(y)
        fx, fy = obj_fn(x), obj_fn(y)
        if p != q:
            return V.inner.vacuous(dom.hom(x, y), cod.hom(fx, fy))
        c, Tc, Tinj = comp(p)
        back = invert_mor(V.inner, Tinj.hom_mor(u, w), ceiling)
        facs = _factors(V, X, p, operad)
        k = len(p) - 1
        mors, cods = [], []
        off = 0
        if operad is not None:
            act = operad.action(T, k) if not T.is_identity else None
            pr0 = T.functor.on_mor(V.proj(facs, 0))
            m0 = pr0.hom_mor(u, w)
            if act is not None:
                m0 = V.inner.compose(m0, act.hom_mor(_apply_top(V, pr0, u),
                                                     _apply_top(V, pr0, w)))
            elif operad.is_terminal and not T.is_identity:
                m0 = V.inner.compose(m0, V.inner.bang(m0.cod))
            mors.append(m0)
            cods.append(m0.cod)
            off = 1
        for i in range(k):
            pr = T.functor.on_mor(V.proj(facs, off + i))
            m = pr.hom_mor(u, w)
            mors.append(m)
            cods.append(m.cod)
        fan = fan_mor(V.inner, back.cod, cods, mors)
        return V.inner.compose(back, fan)
    return GraphMor(dom, cod, obj_fn, hom_mor)


def dist_law(T: Monad, X: GraphObj, operad=None) -> GraphMor:
    """The distributive law component T_*(S X) -> S(T_* X) at a graph X."""
    V = T.base
    S = path_functor(V, operad)
    RX = lift_obj(T, X)
    dom = lift_obj(T, S.on_obj(X))
    cod = S.on_obj(RX)
    return GraphMor(dom, cod, lambda a: a,
                    lambda a, b: dist_component(V, T, X, a, b, operad))


def check_dist_axioms(T: Monad, X: GraphObj, bound: int, operad=None) -> list:
    """Elementwise check of the four distributive-law axioms at a graph.

    Returns the list of failed axiom names (empty when all pass).
    """
    V = T.base
    W = vgraph_base(V)
    S = path_monad(V, operad)
    R = lift_monad(T)
    lam = lambda Y: dist_law(T, Y, operad)
    failures = []

    SX = S.functor.on_obj(X)
    RX = R.functor.on_obj(X)
    # unit-of-R: lam . eta^R_{SX} = S(eta^R_X)
    lhs = W.compose(R.unit(SX), lam(X))
    rhs = S.functor.on_mor(R.unit(X))
    if not W.eq_mor(lhs, rhs, bound):
        failures.append("unit-R")
    # unit-of-S: lam . R(eta^S_X) = eta^S_{RX}
    lhs = W.compose(R.functor.on_mor(S.unit(X)), lam(X))
    rhs = S.unit(RX)
    if not W.eq_mor(lhs, rhs, bound):
        failures.append("unit-S")
    # mult-of-S: lam . R(mu^S_X) = mu^S_{RX} . S(lam_X) . lam_{SX}
    lhs = W.compose(R.functor.on_mor(S.mult(X)), lam(X))
    rhs = W.compose(W.compose(lam(S.functor.on_obj(X)),
                              S.functor.on_mor(lam(X))), S.mult(RX))
    if not W.eq_mor(lhs, rhs, bound):
        failures.append("mult-S")
    # mult-of-R: lam . mu^R_{SX} = S(mu^R_X) . lam_{RX} . R(lam_X)
    lhs = W.compose(R.mult(SX), lam(X))
    rhs = W.compose(W.compose(R.functor.on_mor(lam(X)), lam(RX)),
                    S.functor.on_mor(R.mult(X)))
    if not W.eq_mor(lhs, rhs, bound):
        failures.append("mult-R")
    return failures


# ---------------------------------------------------------------------------
# the composite step and the tower
# ---------------------------------------------------------------------------

def fm_step(V, T: Monad, operad=None):
    """One enrichment step: returns (graph base over V, composite monad).

    The composite is the path monad following the homwise lift of T, with
    multiplication assembled through the distributive law.
    """
    W = vgraph_base(V)
    if T.is_identity and operad is None:
        return W, fc_monad(V)
    S = path_monad(V, operad)
    R = lift_monad(T)

    def on_obj(A):
        return S.functor.on_obj(R.functor.on_obj(A))

    def on_mor(f):
        return S.functor.on_mor(R.functor.on_mor(f))

    def unit(A):
        return W.compose(R.unit(A), S.unit(R.functor.on_obj(A)))

    def mult(A):
        RA = R.functor.on_obj(A)
        RRA = R.functor.on_obj(RA)
        lam = dist_law(T, RA, operad)
        step1 = S.functor.on_mor(lam)
        step2 = S.mult(RRA)
        step3 = S.functor.on_mor(R.mult(A))
        return W.compose(W.compose(step1, step2), step3)
    name = "%s.%s" % (S.name, R.name)
    F = Endofunctor(W, on_obj, on_mor, name, graded=True)
    return W, Monad(W, F, unit, mult, name)


@dataclass
class MonadMorphism:
    """A lax monad morphism: a base functor with a comparison transform."""
    source: Monad
    target: Monad
    H: BaseFunctor
    theta: Callable          # obj x -> Mor  H(T x) -> T'(H x)
    weak: bool = False


def check_weakness(mm: MonadMorphism, x, bound: int) -> bool:
    """Is the comparison component at x a bijection up to the bound?"""
    th = mm.theta(x)
    base = mm.H.cod_base
    dom_el = base.elements(th.dom, bound)
    image = sorted((token_str(base.apply_global(th, t)), s) for t, s in dom_el)
    cod_el = sorted((token_str(t), s) for t, s in base.elements(th.cod, bound))
    return image == cod_el


def fm_step_mor(mm: MonadMorphism, operad=None, operad_target=None) -> MonadMorphism:
    """The enrichment step on monad morphisms.

    Requires the component functor to be token-transparent for products and
    coproducts (true of all truncation functors here); the operad slot is
    carried across unchanged, matching the towers where the target level's
    weighting is the image of the source level's.
    """
    H, T, T2 = mm.H, mm.source, mm.target
    V, V2 = H.dom_base, H.cod_base
    Wsrc, Tplus = fm_step(V, T, operad)
    Wtgt, T2plus = fm_step(V2, T2, operad_target if operad is not None else None)

    def H_obj(G):
        return GraphObj(G.obj, lambda a, b: H.on_obj(G.hom(a, b)))

    def H_mor(f):
        return GraphMor(H_obj(f.dom), H_obj(f.cod), f.obj_fn,
                        lambda a, b: H.on_mor(f.hom_mor(a, b)))
    Hlift = BaseFunctor(Wsrc, Wtgt, H_obj, H_mor, H.name + "*")

    def theta(A):
        HA = H_obj(A)
        dom = H_obj(Tplus.functor.on_obj(A))
        cod = T2plus.functor.on_obj(HA)
        opn = operad_target if operad is not None else None

        def hom_mor(a, b):
            def comp_mor(p):
                k = len(p) - 1
                mors = [mm.theta(A.hom(p[i], p[i + 1])) for i in range(k)]
                doms = [m.dom for m in mors]
                cods = [m.cod for m in mors]
                if opn is not None:
                    mors = [V2.identity(opn.ops(k))] + mors
                    doms = [opn.ops(k)] + doms
                    cods = [opn.ops(k)] + cods
                return V2.flat_product_mor(doms, cods, mors)
            return _path_dispatch(V2, dom.hom(a, b), cod.hom(a, b),
                                  lambda p: p, comp_mor)
        return GraphMor(dom, cod, lambda a: a, hom_mor)
    return MonadMorphism(Tplus, T2plus, Hlift, theta, mm.weak)


@dataclass
class TowerData:
    bases: list
    monads: list
    truncations: list   # truncations[k] : level k+1 -> level k


def objects_functor() -> BaseFunctor:
    """The functor from graphs over sets to sets taking object families."""
    W = vgraph_base(SetBase())

    def on_obj(G):
        return G.obj

    def on_mor(f):
        return SetMor(f.dom.obj, f.cod.obj, f.obj_fn)
    return BaseFunctor(W, SetBase(), on_obj, on_mor, "ob")


def strict_tower(n: int) -> TowerData:
    """Iterated composite monads from the identity on sets, with truncations."""
    if n > 3:
        raise UnsupportedDepthError("tower depth %d exceeds the supported 3" % n)
    base = SetBase()
    bases = [base]
    monads = [identity_monad(base)]
    for k in range(1, n + 1):
        b, t = fm_step(bases[-1], monads[-1])
        bases.append(b)
        monads.append(t)
    truncations = []
    if n >= 1:
        ob = objects_functor()

        def theta1(A):
            # U(T_1 A) and T_0(U A) are both the object family of A
            return SetMor(A.obj, A.obj, lambda t: t)
        truncations.append(MonadMorphism(monads[1], monads[0], ob, theta1, True))
        for k in range(2, n + 1):
            truncations.append(fm_step_mor(truncations[-1]))
    return TowerData(bases, monads, truncations)


def enumerate_tn_cells(n: int, X: GlobSet, d: int, bound: int):
    """Cells of dimension d of the free strict structure on X, to a bound.

    Converts X to an iterated graph, applies the tower monad, and converts
    back with the fixed coproduct choice; identifiers are deterministic.
    """
    if n > 3:
        raise UnsupportedDepthError("tower depth %d exceeds the supported 3" % n)
    if d > n:
        raise DimensionError("dimension %d exceeds %d" % (d, n))
    if X.n != n:
        raise DimensionError("input has dimension %d, expected %d" % (X.n, n))
    v = validate_globset(X)
    if v is not None:
        raise ValueError("invalid globular set: %s" % v.axiom)
    h = globset_to_ngraph(X)
    if n == 0:
        return list(X.cells[0])
    T = strict_tower(n).monads[n]
    out = T.functor.on_obj(h)
    g2 = ngraph_to_globset(out, n, bound)
    return list(g2.cells[d])


# ---------------------------------------------------------------------------
# pasting trees and the independent oracle
# ---------------------------------------------------------------------------

LEAF = "*"


def tree_size(t) -> int:
    if t == LEAF:
        return 0
    return len(t) + sum(tree_size(c) for c in t)


def tree_boundary(t, stage: int):
    """Drop the deepest layer: the shared source and target of a diagram."""
    if stage == 1:
        return LEAF
    return tuple(tree_boundary(c, stage - 1) for c in t)


def trees_of_stage(stage: int, bound: int):
    """All stage-d trees of size <= bound, in a deterministic order."""
    if stage == 0:
        return [LEAF] if bound >= 0 else []
    out = []
    for k in range(bound + 1):
        for kids in _tree_tuples(stage - 1, k, bound - k):
            out.append(kids)
    return out


def _tree_tuples(stage, k, budget):
    if k == 0:
        yield ()
        return
    for first in trees_of_stage(stage, budget):
        fs = tree_size(first)
        for rest in _tree_tuples(stage, k - 1, budget - fs):
            yield (first,) + rest


def tree_extensions(t, stage: int, bound: int):
    """Stage-(d+1) trees of size <= bound whose boundary is the stage-d tree t."""
    return list(_extensions(t, stage, bound))


def _extensions(t, stage, budget):
    if stage == 0:
        for k in range(budget + 1):
            yield (LEAF,) * k
        return
    t = tuple(t)
    k = len(t)
    if budget < k:
        return

    def rec(i, rem):
        if i == k:
            yield ()
            return
        for ext in _extensions(t[i], stage - 1, rem):
            es = tree_size(ext)
            if es > rem:
                continue
            for rest in rec(i + 1, rem - es):
                yield (ext,) + rest
    yield from rec(0, budget - k)


def tree_str(t) -> str:
    if t == LEAF:
        return LEAF
    return "(" + "".join(tree_str(c) for c in t) + ")"


def parse_tree(s: str):
    """Parse the bracket form; the stage is contextual."""
    pos = [0]

    def rec():
        if pos[0] < len(s) and s[pos[0]] == LEAF:
            pos[0] += 1
            return LEAF
        if pos[0] >= len(s) or s[pos[0]] != "(":
            raise ValueError("bad tree string %r at %d" % (s, pos[0]))
        pos[0] += 1
        kids = []
        while pos[0] < len(s) and s[pos[0]] != ")":
            kids.append(rec())
        if pos[0] >= len(s):
            raise ValueError("unbalanced tree string %r" % s)
        pos[0] += 1
        return tuple(kids)
    out = rec()
    if pos[0] != len(s):
        raise ValueError("trailing input in tree string %r" % s)
    return out


def _oracle_slice(g: GlobSet, x, y):
    """Local hom slice for the oracle; deliberately independent of gcore."""
    keep = [[] for _ in range(g.n)]
    for d in range(1, g.n + 1):
        for c in g.cells[d]:
            s, t = c, c
            for k in range(d, 0, -1):
                s = g.src[k][s]
            for k in range(d, 0, -1):
                t = g.tgt[k][t]
            if s == x and t == y:
                keep[d - 1].append(c)
    src = {d: {c: g.src[d + 1][c] for c in keep[d]} for d in range(1, g.n)}
    tgt = {d: {c: g.tgt[d + 1][c] for c in keep[d]} for d in range(1, g.n)}
    return GlobSet(g.n - 1, tuple(tuple(cs) for cs in keep), src, tgt)


def _labeled_diagrams(g: GlobSet, d: int, budget: int):
    """Labeled pasting diagrams of dimension d with size <= budget.

    A d-diagram is a composable row of (d-1)-diagrams in the hom slices;
    its size adds the row length to the column sizes.
    """
    if d == 0:
        return [(c, 0) for c in g.cells[0]]
    out = []
    pts = list(g.cells[0])
    slices = {}

    def hom(x, y):
        if (x, y) not in slices:
            slices[(x, y)] = _oracle_slice(g, x, y)
        return slices[(x, y)]

    def rows(x, k, rem):
        if k == 0:
            yield ((x,), (), 0)
            return
        for y in pts:
            for (path, cols, size) in rows(x, k - 1, rem):
                for (delta, ds) in _labeled_diagrams(hom(path[-1], y), d - 1,
                                                     rem - size):
                    if size + ds <= rem:
                        yield (path + (y,), cols + (delta,), size + ds)

    for k in range(budget + 1):
        for x in pts:
            for (path, cols, size) in rows(x, k, budget - k):
                out.append(((path, cols), k + size))
    return out


def pasting_oracle(n: int, X: GlobSet, d: int, bound: int) -> int:
    """Count labeled d-dimensional pasting diagrams of size <= bound.

    Direct recursive enumeration over the globular set, written without the
    base/monad machinery.
    """
    if n > 3:
        raise UnsupportedDepthError("oracle depth %d exceeds the supported 3" % n)
    if d > n:
        raise DimensionError("dimension %d exceeds %d" % (d, n))
    if X.n != n:
        raise DimensionError("input has dimension %d, expected %d" % (X.n, n))
    v = validate_globset(X)
    if v is not None:
        raise ValueError("invalid globular set: %s" % v.axiom)
    return len(_labeled_diagrams(X, d, bound))


# ---------------------------------------------------------------------------
# algebra and law checking
# ---------------------------------------------------------------------------

@dataclass
class AlgebraViolation:
    law: str
    element: object

    def to_json(self):
        return {"law": self.law, "element": token_str(self.element)}


def first_mor_diff(base, f, g, bound):
    """First element (by grade, then token) where two morphisms differ."""
    if isinstance(base, SetBase):
        for s in range(bound + 1):
            for t in f.dom.parts(s):
                if f.fn(t) != g.fn(t):
                    return t
        return None
    objs = [a for s in range(bound + 1) for a in f.dom.obj_parts(s)]
    for a in objs:
        if f.obj_fn(a) != g.obj_fn(a):
            return a
    for a in objs:
        for b in objs:
            d = first_mor_diff(base.inner, f.hom_mor(a, b), g.hom_mor(a, b), bound)
            if d is not None:
                return (a, b, d)
    return None


def check_algebra(T: Monad, carrier, action, bound: int):
    """Eilenberg-Moore axioms, elementwise; None when they hold."""
    base = T.base
    lhs = base.compose(T.unit(carrier), action)
    bad = first_mor_diff(base, lhs, base.identity(carrier), bound)
    if bad is not None:
        return AlgebraViolation("action.unit = id", bad)
    lhs = base.compose(T.mult(carrier), action)
    rhs = base.compose(T.functor.on_mor(action), action)
    bad = first_mor_diff(base, lhs, rhs, bound)
    if bad is not None:
        return AlgebraViolation("action.mult = action.T(action)", bad)
    return None


@dataclass
class LawReport:
    entries: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(e["ok"] for e in self.entries)

    def to_json(self):
        return {"ok": self.ok, "entries": self.entries}


def check_monad_laws(T: Monad, x, bound: int) -> dict:
    """Left/right unit and associativity at one object, elementwise."""
    base = T.base
    F = T.functor
    Tx = F.on_obj(x)
    idq = base.identity(Tx)
    out = {"ok": True, "failures": []}
    lu = base.compose(T.unit(Tx), T.mult(x))
    d = first_mor_diff(base, lu, idq, bound)
    if d is not None:
        out["ok"] = False
        out["failures"].append({"law": "left-unit", "at": token_str(d)})
    ru = base.compose(F.on_mor(T.unit(x)), T.mult(x))
    d = first_mor_diff(base, ru, idq, bound)
    if d is not None:
        out["ok"] = False
        out["failures"].append({"law": "right-unit", "at": token_str(d)})
    Tm = F.on_mor(T.mult(x))
    a1 = base.compose(Tm, T.mult(x))
    a2 = base.compose(T.mult(F.on_obj(x)), T.mult(x))
    d = first_mor_diff(base, a1, a2, bound)
    if d is not None:
        out["ok"] = False
        out["failures"].append({"law": "associativity", "at": token_str(d)})
    return out


def monad_law_report(T: Monad, objs, bound: int) -> LawReport:
    """Run the law checks over a list of objects; order is the report order."""
    rep = LawReport()
    for i, x in enumerate(objs):
        entry = check_monad_laws(T, x, bound)
        entry["sample"] = i
        rep.entries.append(entry)
    return rep
