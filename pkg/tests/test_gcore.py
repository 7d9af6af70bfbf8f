import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import mk_graph, seeded_globset
from omegacat.gcore import (CompatibilityError, DimensionError, GlobSet,
                            GraphOfTowers, OmegaTower, SetBase, SetObj,
                            apply_locally, check_distributivity,
                            constant_terminal_functor, diagonal_square_functor,
                            empty_globset, finset_base, globset_from_json,
                            globset_to_json, globset_to_ngraph,
                            identity_functor, make_globset, ngraph_to_globset,
                            roundtrip_witness, slice_globset, terminal_globset,
                            token_str, tower_unwrap, tower_wrap,
                            truncate_globset, validate_globset, vgraph_base)


# ---------------------------------------------------------------------------
# globular sets
# ---------------------------------------------------------------------------

def test_validate_empty_ok():
    assert validate_globset(empty_globset(2)) is None


def test_validate_terminal_ok():
    for n in range(4):
        assert validate_globset(terminal_globset(n)) is None


def test_validate_catches_broken_globularity():
    # two parallel arrows f, g: x -> y and one more arrow h: y -> x;
    # a 2-cell from f to h has mismatched endpoints
    g = make_globset(
        2,
        [("x", "y"), ("f", "g", "h"), ("a",)],
        {1: {"f": "x", "g": "x", "h": "y"}, 2: {"a": "f"}},
        {1: {"f": "y", "g": "y", "h": "x"}, 2: {"a": "h"}},
    )
    v = validate_globset(g)
    assert v is not None
    assert v.cell == "a"
    assert v.axiom in ("ss=st", "ts=tt")


def test_validate_reports_duplicate_ids():
    g = make_globset(1, [("x", "x"), ()], {1: {}}, {1: {}})
    v = validate_globset(g)
    assert v is not None and v.axiom == "unique-ids"


def test_truncate_terminal_to_zero():
    t = truncate_globset(terminal_globset(2), 0)
    assert t.n == 0 and t.cells[0] == ("t0",)


def test_truncate_identity_case():
    g = seeded_globset(3, 2)
    assert truncate_globset(g, g.n) == g


@pytest.mark.parametrize("seed", range(10))
def test_truncate_composes(seed):
    g = seeded_globset(seed, 3)
    assert truncate_globset(truncate_globset(g, 2), 1) == truncate_globset(g, 1)


def test_truncate_above_dimension_errors():
    with pytest.raises(DimensionError):
        truncate_globset(terminal_globset(1), 2)


@pytest.mark.parametrize("seed", range(8))
def test_truncation_preserves_globularity(seed):
    g = seeded_globset(seed, 3)
    for m in range(g.n + 1):
        assert validate_globset(truncate_globset(g, m)) is None


def test_globset_json_roundtrip():
    g = seeded_globset(11, 2)
    assert globset_from_json(globset_to_json(g)) == g


def test_globset_json_rejects_unknown_keys():
    doc = globset_to_json(terminal_globset(1))
    doc["extra"] = 1
    with pytest.raises(ValueError):
        globset_from_json(doc)


# ---------------------------------------------------------------------------
# enrichment bases
# ---------------------------------------------------------------------------

def test_finset_base_units():
    V = finset_base()
    assert len(V.terminal().parts(0)) == 1
    assert len(V.initial().parts(0)) == 0


def test_vgraph_base_terminal():
    W = vgraph_base(finset_base())
    t = W.terminal()
    assert t.obj_parts(0) == ("*",)
    assert len(t.hom("*", "*").parts(0)) == 1


def test_vgraph_product_hom_sizes():
    V = finset_base()
    W = vgraph_base(V)
    g2 = mk_graph(("a",), {("a", "a"): ("x", "y")})
    g3 = mk_graph(("b",), {("b", "b"): ("p", "q", "r")})
    prod = W.product(g2, g3)
    assert len(prod.obj_parts(0)) == 1
    assert len(prod.hom(("a", "b"), ("a", "b")).parts(0)) == 6


def test_vgraph_coproduct_cross_homs_empty():
    V = finset_base()
    W = vgraph_base(V)
    g1 = mk_graph(("a",), {("a", "a"): ("x",)})
    g2 = mk_graph(("b", "c"), {("b", "c"): ("y",)})
    cop = W.coproduct([g1, g2])
    assert len(cop.obj_parts(0)) == 3
    assert len(cop.hom((0, "a"), (1, "b")).parts(0)) == 0
    assert len(cop.hom((1, "b"), (1, "c")).parts(0)) == 1


def _global_count(base, x, bound=0):
    return len(base.elements(x, bound))


@pytest.mark.parametrize("seed", range(6))
def test_base_cardinality_invariants(seed):
    # fuzz over graphs of total size <= 50
    import random
    rng = random.Random(seed)
    V = finset_base()
    W = vgraph_base(V)
    from omegacat.cli import random_vgraph_json, vgraph_from_json
    g1 = vgraph_from_json(random_vgraph_json(rng, 3, 4))
    g2 = vgraph_from_json(random_vgraph_json(rng, 3, 4))
    prod = W.product(g1, g2)
    assert _global_count(W, prod) == _global_count(W, g1) * _global_count(W, g2)
    cop = W.coproduct([g1, g2])
    assert _global_count(W, cop) == _global_count(W, g1) + _global_count(W, g2)
    assert _global_count(W, W.terminal()) == 1
    assert _global_count(W, W.initial()) == 0


@pytest.mark.parametrize("seed", range(5))
def test_distributivity_bijection(seed):
    import random
    rng = random.Random(seed)
    V = finset_base()
    W = vgraph_base(V)
    from omegacat.cli import random_vgraph_json, vgraph_from_json
    gs = [vgraph_from_json(random_vgraph_json(rng, 2, 3)) for _ in range(3)]
    assert check_distributivity(W, gs[0], gs[1:], 1)
    xs = [SetObj.plain(tuple("ab")), SetObj.plain(tuple("cde"))]
    assert check_distributivity(V, SetObj.plain(("u",)), xs, 0)


# ---------------------------------------------------------------------------
# apply_locally
# ---------------------------------------------------------------------------

def test_apply_locally_identity(loop_graph):
    V = finset_base()
    out = apply_locally(identity_functor(V), loop_graph)
    assert out.hom("v", "v").parts(0) == loop_graph.hom("v", "v").parts(0)


def test_apply_locally_constant_terminal(loop_graph):
    V = finset_base()
    out = apply_locally(constant_terminal_functor(V), loop_graph)
    assert len(out.hom("v", "v").parts(0)) == 1


def test_apply_locally_square():
    V = finset_base()
    g = mk_graph(("a", "b"), {("a", "a"): ("x",), ("a", "b"): ("y", "z")})
    out = apply_locally(diagonal_square_functor(V), g)
    assert len(out.hom("a", "a").parts(0)) == 1
    assert len(out.hom("a", "b").parts(0)) == 4


def test_apply_locally_respects_composition(loop_graph):
    V = finset_base()
    H = diagonal_square_functor(V)
    G = constant_terminal_functor(V)
    composite = apply_locally(H, apply_locally(G, loop_graph))
    both = lambda x: H.on_obj(G.on_obj(x))
    from omegacat.gcore import BaseFunctor
    HG = BaseFunctor(V, V, both, lambda f: H.on_mor(G.on_mor(f)))
    direct = apply_locally(HG, loop_graph)
    assert composite.hom("v", "v").parts(0) == direct.hom("v", "v").parts(0)


# ---------------------------------------------------------------------------
# conversions
# ---------------------------------------------------------------------------

def test_terminal_1glob_converts_to_singleton_hom():
    h = globset_to_ngraph(terminal_globset(1))
    assert h.obj_parts(0) == ("t0",)
    assert len(h.hom("t0", "t0").parts(0)) == 1


def test_single_edge_conversion():
    g = make_globset(1, [("x", "y"), ("a",)],
                     {1: {"a": "x"}}, {1: {"a": "y"}})
    h = globset_to_ngraph(g)
    assert h.hom("x", "y").parts(0) == ("a",)
    assert h.hom("y", "x").parts(0) == ()
    assert h.hom("x", "x").parts(0) == ()


@pytest.mark.parametrize("seed", range(10))
def test_roundtrip_is_bijective_relabeling(seed):
    g = seeded_globset(seed, 2)
    g2, witness = roundtrip_witness(g)
    assert validate_globset(g2) is None
    for d in range(g.n + 1):
        imgs = [witness[(d, c)] for c in g.cells[d]]
        assert sorted(imgs) == sorted(g2.cells[d])
        assert len(set(imgs)) == len(imgs)
    # boundary maps commute with the relabeling
    for d in range(1, g.n + 1):
        for c in g.cells[d]:
            assert witness[(d - 1, g.src[d][c])] == g2.src[d][witness[(d, c)]]
            assert witness[(d - 1, g.tgt[d][c])] == g2.tgt[d][witness[(d, c)]]


def test_conversion_rejects_invalid():
    g = make_globset(1, [("x",), ("a",)], {1: {"a": "zzz"}}, {1: {"a": "x"}})
    with pytest.raises(ValueError):
        globset_to_ngraph(g)


# ---------------------------------------------------------------------------
# towers
# ---------------------------------------------------------------------------

def test_constant_tower_unwraps_to_terminal_homs():
    t = OmegaTower.constant_terminal()
    gt = tower_unwrap(t, probe_depth=3)
    assert gt.objects == ("t0",)
    hom = gt.hom("t0", "t0")
    for k in range(3):
        lvl = hom.level(k)
        assert all(len(cs) == 1 for cs in lvl.cells)


@pytest.mark.parametrize("seed", range(5))
def test_wrap_unwrap_roundtrip(seed):
    g = seeded_globset(seed, 3)
    t = OmegaTower.from_globset(g)
    gt = tower_unwrap(t, probe_depth=3)
    t2 = tower_wrap(gt)
    for k in range(4):
        assert t2.level(k) == t.level(k)


@pytest.mark.parametrize("seed", range(5))
def test_unwrap_wrap_roundtrip(seed):
    g = seeded_globset(seed + 100, 3)
    t = OmegaTower.from_globset(g)
    gt = tower_unwrap(t, probe_depth=3)
    gt2 = tower_unwrap(tower_wrap(gt), probe_depth=3)
    assert gt2.objects == gt.objects
    for a in gt.objects:
        for b in gt.objects:
            for k in range(3):
                assert gt2.hom(a, b).level(k) == gt.hom(a, b).level(k)


def test_broken_witness_reports_level():
    def fn(k):
        if k == 2:
            # deliberately drop a cell from level 2's low dimensions
            g = terminal_globset(2)
            return make_globset(2, [(), (), ()], {1: {}, 2: {}}, {1: {}, 2: {}})
        return terminal_globset(k)
    t = OmegaTower(fn)
    with pytest.raises(CompatibilityError) as exc:
        for k in range(3):
            t.check_witness(k)
    assert exc.value.level == 2


def test_wrap_rejects_colliding_ids():
    shared = OmegaTower.from_globset(terminal_globset(2))
    gt = GraphOfTowers(("p", "q"), lambda a, b: shared)
    t = tower_wrap(gt)
    with pytest.raises(CompatibilityError):
        t.level(1)


# ---------------------------------------------------------------------------
# slices
# ---------------------------------------------------------------------------

def test_slice_terminal():
    s = slice_globset(terminal_globset(2), "t0", "t0")
    assert s.n == 1 and s.cells[0] == ("t1",) and s.cells[1] == ("t2",)


@given(st.integers(0, 10 ** 6))
@settings(max_examples=25, deadline=None)
def test_slices_are_globular(seed):
    g = seeded_globset(seed, 3)
    for a in g.cells[0]:
        for b in g.cells[0]:
            assert validate_globset(slice_globset(g, a, b)) is None
