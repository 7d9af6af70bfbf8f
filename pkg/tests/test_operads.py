import itertools

import networkx as nx
import pytest

from conftest import mk_graph, seeded_globset, seeded_vgraph
from omegacat.gcore import (SetBase, SetObj, collect_cells, finset_base,
                            globset_to_ngraph, located_id, terminal_globset,
                            token_str, vgraph_base)
from omegacat.monads import (check_monad_laws, fc_apply, fc_monad, path_monad,
                             UnsupportedDepthError)
from omegacat.operads import (AlgebraData, DiscreteModel, FiniteGraphModel,
                              ModelError, OperadCapError,
                              ProductPreservationError, SpaceFunctor,
                              algebra_from_weighted_cat, check_operad_laws,
                              check_space_product_preservation,
                              check_weighted_cat, components_functor,
                              composite_check, dc_step, dm_step,
                              gamma_path_graph, insert_weight_mor,
                              monoid_model_operad, monoid_operad,
                              one_object_algebra_check, pk_monad,
                              points_functor, set_operad, strict_weak_compare,
                              strip_weight_mor, terminal_model_operad,
                              terminal_operad, vp_free_hom, vp_free_monad,
                              weak_tower, weighted_cat_from_algebra)

V = finset_base()


def z2_operad(cap=3):
    return monoid_operad(("0", "1"),
                         lambda a, b: str((int(a) + int(b)) % 2), "0", cap)


# ---------------------------------------------------------------------------
# operad laws
# ---------------------------------------------------------------------------

def test_terminal_operad_laws_over_sets():
    assert check_operad_laws(terminal_operad(V, 3)) is None


def test_terminal_operad_laws_over_graphs():
    W = vgraph_base(V)
    P = terminal_operad(W, 2)
    assert len(P.ops(2).obj_parts(0)) == 1
    assert check_operad_laws(P, 1) is None


def test_monoid_operad_laws():
    assert check_operad_laws(z2_operad()) is None


def test_mutated_comp_fails():
    P = z2_operad(2)
    good = P.comp

    def bad(pe, pes):
        if (pe, tuple(pes)) == ("1", ("1",)):
            return "1"  # should be "0"
        return good(pe, pes)
    P.comp = bad
    v = check_operad_laws(P)
    assert v is not None and v.law in ("associativity", "left-unit", "right-unit")


def test_operad_cap_guard():
    P = terminal_operad(V, 2)
    with pytest.raises(OperadCapError):
        P.ops(3)


# ---------------------------------------------------------------------------
# weighted homs
# ---------------------------------------------------------------------------

def test_vp_hom_terminal_bijects_with_fc(loop_graph):
    P = terminal_operad(V, 3)
    gh = vp_free_hom(loop_graph, P, "v", "v", 3)
    fh = fc_apply(V, loop_graph, "v", "v", 3)
    strip = strip_weight_mor(V, loop_graph, P, "v", "v")
    ins = insert_weight_mor(V, loop_graph, P, "v", "v")
    for s in range(4):
        got = [strip.fn(t) for t in gh.generator(s)]
        assert got == list(fh.generator(s))
        back = [ins.fn(t) for t in fh.generator(s)]
        assert back == list(gh.generator(s))


def test_vp_hom_without_nullary_has_no_identity(loop_graph):
    P = set_operad(2, {0: [], 1: ["u"], 2: ["m"]},
                   {("u", ("u",)): "u"}, "u")
    els = vp_free_hom(loop_graph, P, "v", "v", 2).elements(2)
    sizes = sorted(s for _, s in els)
    assert 0 not in sizes  # the empty path needs a nullary operation
    assert sizes == [1, 2]


def test_vp_hom_counting_formula():
    A = mk_graph(("v",), {("v", "v"): ("x", "y")})
    P = z2_operad(2)
    els = vp_free_hom(A, P, "v", "v", 2).elements(2)
    want = sum(2 * (2 ** k) for k in range(3) if k <= 2)
    assert len(els) == sum(2 * 2 ** k for k in (0, 1, 2))


def test_vp_hom_cap_error(loop_graph):
    with pytest.raises(OperadCapError):
        vp_free_hom(loop_graph, terminal_operad(V, 2), "v", "v", 3)


@pytest.mark.parametrize("seed", range(5))
def test_vp_monad_terminal_equals_fc_elementwise(seed):
    g = seeded_vgraph(seed, max_objects=3, max_edges=4)
    P = terminal_operad(V, 3)
    vp = vp_free_monad(V, P)
    fc = fc_monad(V)
    objs = list(g.obj_parts(0))
    for a in objs:
        for b in objs:
            strip = strip_weight_mor(V, g, P, a, b)
            vph = vp.functor.on_obj(g).hom(a, b)
            fch = fc.functor.on_obj(g).hom(a, b)
            for s in range(4):
                assert [strip.fn(t) for t in vph.parts(s)] == list(fch.parts(s))


def test_vp_monad_laws(loop_graph):
    vp = vp_free_monad(V, z2_operad(3))
    assert check_monad_laws(vp, loop_graph, 2)["ok"]


# ---------------------------------------------------------------------------
# algebras and one-object categories
# ---------------------------------------------------------------------------

def flip_algebra():
    P = z2_operad(2)
    car = SetObj.plain(("p", "q"))

    def act(k, pe, xs):
        flips = (1 if pe == "1" else 0) + sum(1 for x in xs if x == "q")
        return "q" if flips % 2 else "p"
    return AlgebraData(P, car, act)


def test_algebra_axioms_pass():
    assert one_object_algebra_check(flip_algebra()) is None


def test_algebra_mutation_fails():
    alg = flip_algebra()
    good = alg.act

    def bad(k, pe, xs):
        if k == 2 and pe == "0" and xs == ("q", "q"):
            return "q"
        return good(k, pe, xs)
    alg.act = bad
    v = one_object_algebra_check(alg)
    assert v is not None


def test_equivalence_both_directions():
    alg = flip_algebra()
    wc = weighted_cat_from_algebra(alg)
    assert check_weighted_cat(wc) is None
    back = algebra_from_weighted_cat(wc)
    assert one_object_algebra_check(back) is None
    # and a broken category yields a broken algebra
    bad = weighted_cat_from_algebra(alg)
    old_gamma = bad.gamma

    def gamma(path):
        inner = old_gamma(path)

        def fn(pe, es):
            if len(es) == 2 and es == ("q", "q") and pe == "0":
                return "q"
            return inner(pe, es)
        return fn
    bad.gamma = gamma
    assert check_weighted_cat(bad) is not None
    assert one_object_algebra_check(algebra_from_weighted_cat(bad)) is not None


# ---------------------------------------------------------------------------
# space models
# ---------------------------------------------------------------------------

def test_discrete_path_graph():
    dm = DiscreteModel()
    X = dm.space(("x", "y"))
    wc = gamma_path_graph(dm, X, 2)
    sb = SetBase()
    assert len(sb.elements(wc.graph.hom("x", "x"), 2)) == 1
    assert sb.elements(wc.graph.hom("x", "y"), 2) == []
    assert check_weighted_cat(wc, 2) is None


def test_two_cycle_paths():
    fg = FiniteGraphModel()
    X = fg.space(("u", "v"), (("e", "u", "v"), ("f", "v", "u")))
    wc = gamma_path_graph(fg, X, 2)
    sb = SetBase()
    els = sb.elements(wc.graph.hom("u", "u"), 2)
    assert [(t, s) for t, s in els] == [((), 0), (("e", "f"), 2)]


def test_concat_lengths_add():
    fg = FiniteGraphModel()
    X = fg.space(("u", "v", "w"),
                 (("e", "u", "v"), ("f", "v", "w")))
    assert fg.concat((("e",), ("f",))) == ("e", "f")


def test_components_against_networkx():
    # dual route: the model's BFS against networkx on random graphs
    import random
    for seed in range(6):
        rng = random.Random(seed)
        verts = ["v%d" % i for i in range(rng.randint(1, 6))]
        edges = []
        for i in range(rng.randint(0, 7)):
            edges.append(("e%d" % i, rng.choice(verts), rng.choice(verts)))
        fg = FiniteGraphModel()
        X = fg.space(tuple(verts), tuple(edges))
        rep = fg.components(X)
        G = nx.Graph()
        G.add_nodes_from(verts)
        G.add_edges_from((u, v) for _, u, v in edges)
        comps = list(nx.connected_components(G))
        assert len(set(rep.values())) == len(comps)
        for comp in comps:
            assert len({rep[v] for v in comp}) == 1


def test_points_and_components_preserve_strong_products():
    fg = FiniteGraphModel()
    A = fg.space(("a", "b"), (("e", "a", "b"),))
    B = fg.space(("c", "d", "z"), (("f", "c", "d"),))
    assert check_space_product_preservation(fg, points_functor(fg), A, B)
    assert check_space_product_preservation(fg, components_functor(fg), A, B)


def test_dc_step_identity_on_discrete():
    dm = DiscreteModel()
    seed = terminal_model_operad(dm, 2)
    X = dm.space(("x", "y"))
    step = dc_step(V, points_functor(dm), seed, probes=[(X, X)])
    wc = step.pi_plus(X)
    ref = gamma_path_graph(dm, X, 2)
    sb = SetBase()
    for a in ("x", "y"):
        for b in ("x", "y"):
            assert sb.elements(wc.graph.hom(a, b), 2) == \
                sb.elements(ref.graph.hom(a, b), 2)


def test_dc_step_components_collapse():
    fg = FiniteGraphModel()
    seed = terminal_model_operad(fg, 2)
    X = fg.space(("a", "b", "c"), (("e", "a", "b"),))
    step = dc_step(V, components_functor(fg), seed,
                   probes=[(X, X)])
    wc = step.pi_plus(X)
    # objects stay points; homs are component sets of (discrete) path spaces
    assert wc.graph.obj_parts(0) == ("a", "b", "c")
    sb = SetBase()
    assert len(sb.elements(wc.graph.hom("a", "b"), 2)) == 1


def test_dc_step_flags_non_preserving_functor():
    dm = DiscreteModel()
    seed = terminal_model_operad(dm, 2)

    def double(X):
        toks = tuple((i, t) for i in (0, 1) for t in X.vert_list())
        return SetObj.plain(toks)
    bad = SpaceFunctor(dm, "double", double, lambda X, t: (0, t))
    X = dm.space(("x",))
    with pytest.raises(ProductPreservationError):
        dc_step(V, bad, seed, probes=[(X, X)])


def test_hom_level_preservation_fails_on_graph_model():
    # the incoherent points functor does not preserve products at the level
    # of path spaces on the graph model: interleavings multiply
    fg = FiniteGraphModel()
    A = fg.space(("a", "b"), (("e", "a", "b"),))
    B = fg.space(("c", "d"), (("f", "c", "d"),))
    AB = fg.product(A, B)
    paths_prod = fg.path_space(AB, ("a", "c"), ("b", "d")).verts
    lhs = sum(len(paths_prod.parts(s)) for s in range(3))
    pa = fg.path_space(A, "a", "b").verts
    pb = fg.path_space(B, "c", "d").verts
    rhs = sum(len(SetBase().product(pa, pb).parts(s)) for s in range(3))
    assert lhs != rhs


# ---------------------------------------------------------------------------
# weak towers
# ---------------------------------------------------------------------------

def test_weak_tower_depth_cap():
    dm = DiscreteModel()
    with pytest.raises(UnsupportedDepthError):
        weak_tower(dm, terminal_model_operad(dm, 2), 3)


def test_coherent_level0_is_components():
    fg = FiniteGraphModel()
    X = fg.space(("a", "b", "c"), (("e", "a", "b"),))
    lv = weak_tower(fg, terminal_model_operad(fg, 2), 0, mode="coherent-at-0")
    assert lv[0].fundamental(X).parts(0) == ("a", "c")
    lvi = weak_tower(fg, terminal_model_operad(fg, 2), 0)
    assert lvi[0].fundamental(X).parts(0) == ("a", "b", "c")


def test_fundamental_level_compatibility():
    # truncating the level-2 fundamental reproduces the level-1 fundamental
    fg = FiniteGraphModel()
    lv = weak_tower(fg, terminal_model_operad(fg, 3), 2)
    spaces = [
        fg.space(("u",), ()),
        fg.space(("u", "v"), (("e", "u", "v"),)),
        fg.space(("u", "v"), (("e", "u", "v"), ("f", "v", "u"))),
    ]
    for X in spaces:
        f2 = lv[2].fundamental(X)
        f1 = lv[1].fundamental(X)
        # truncate the 2-graph to a 1-graph: objects of each hom graph
        assert f2.obj_parts(0) == f1.obj_parts(0)
        for a in f2.obj_parts(0):
            for b in f2.obj_parts(0):
                got = [t for s in range(3) for t in f2.hom(a, b).obj_parts(s)]
                want = [t for s in range(3) for t in f1.hom(a, b).parts(s)]
                assert got == want


def test_dm_step_terminal_triple_is_level_zero_like():
    # the one-point space stays one point, and the composite monad adds
    # only forced elements over graphs with forced homs
    dm = DiscreteModel()
    lv = weak_tower(dm, terminal_model_operad(dm, 2), 1)
    pt = dm.space(("*",))
    f1 = lv[1].fundamental(pt)
    assert f1.obj_parts(0) == ("*",)
    assert len(f1.hom("*", "*").parts(0)) == 1
    forced = mk_graph(("o",), {("o", "o"): ("*",)})
    out = lv[1].monad.functor.on_obj(forced)
    assert out.obj_parts(0) == ("o",)
    for s in range(3):
        assert len(out.hom("o", "o").parts(s)) == 1


@pytest.mark.parametrize("n", [0, 1, 2])
def test_strict_weak_collapse_terminal(n):
    rep = strict_weak_compare(n, terminal_globset(n), 3)
    assert rep["ok"]


@pytest.mark.parametrize("seed", range(3))
@pytest.mark.parametrize("n", [1, 2])
def test_strict_weak_collapse_random(seed, n):
    rep = strict_weak_compare(n, seeded_globset(seed, n), 3)
    assert rep["ok"]


# ---------------------------------------------------------------------------
# composite characterization
# ---------------------------------------------------------------------------

def levels_for(n, cap=3):
    dm = DiscreteModel()
    return weak_tower(dm, terminal_model_operad(dm, cap), n)


def test_composite_n0_identity():
    g = terminal_globset(0)
    rep = composite_check(levels_for(0), g, 0, 2)
    assert rep.ok and rep.left == ["t0"]


def test_composite_n1_terminal():
    rep = composite_check(levels_for(1), terminal_globset(1), 1, 3)
    assert rep.ok and len(rep.left) == 4


def test_composite_n2_terminal_golden():
    rep = composite_check(levels_for(2), terminal_globset(2), 2, 2)
    assert rep.ok
    assert len(rep.left) == 4  # frozen from the first oracle run


@pytest.mark.parametrize("seed", range(3))
def test_composite_random(seed):
    for n in (1, 2):
        g = seeded_globset(seed, n)
        rep = composite_check(levels_for(n), g, n, 2)
        assert rep.ok


def test_pk_monad_shapes():
    lv = levels_for(2)
    P0 = pk_monad(lv, 2, 0)
    P1 = pk_monad(lv, 2, 1)
    h = globset_to_ngraph(terminal_globset(2))
    out = P0.functor.on_obj(P1.functor.on_obj(h))
    assert out.obj_parts(0) == ("t0",)
    with pytest.raises(ValueError):
        pk_monad(lv, 2, 2)


def test_pushed_monoid_seed_level0():
    # a non-terminal seed pushed through the incoherent level-0 functor
    dm = DiscreteModel()
    seed = monoid_model_operad(dm, ("0", "1"),
                               lambda a, b: str((int(a) + int(b)) % 2), "0", 2)
    lv = weak_tower(dm, seed, 1)
    P = lv[0].weight
    assert check_operad_laws(P) is None
    assert len(P.ops(2).parts(0)) == 2
    # the level-1 monad genuinely weights: two weighted empty paths
    g = mk_graph(("v",), {})
    out = lv[1].monad.functor.on_obj(g)
    assert len(out.hom("v", "v").parts(0)) == 2
