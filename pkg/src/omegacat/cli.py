"""Command-line front end: JSON in, canonical JSON out.

Exit codes partition outcomes: 0 success, 2 parse or schema error, 3 domain
violation (with a JSON violation report on stdout), 4 unsupported depth.
Identical configuration and inputs produce byte-identical output; the only
environment hook is OMEGACAT_FIXTURES, a directory tried when an input path
does not resolve as given.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from importlib import resources

import jsonschema

from . import contractions as coll
from . import operads as ops
from .coalgebra import (adamek_chain, free_monoid_functor, lambek_probe,
                        make_coalgebra, unfold, word_functor, word_prefix)
from .gcore import (DimensionError, GlobSet, GraphObj, SetBase, SetObj,
                    globset_from_json, globset_to_json, make_globset,
                    token_str, truncate_globset, validate_globset)
from .monads import (UnsupportedDepthError, enumerate_tn_cells, fc_apply,
                     fc_monad, identity_monad, monad_law_report,
                     pasting_oracle, writer_monad)


class DomainFailure(Exception):
    """A semantically invalid request; carries the JSON report."""

    def __init__(self, report):
        self.report = report
        super().__init__(json.dumps(report))


def _schema(name):
    text = resources.files("omegacat.schemas").joinpath(name).read_text()
    return json.loads(text)


def load_json(path, schema_name):
    fixed = path
    if not os.path.exists(fixed):
        root = os.environ.get("OMEGACAT_FIXTURES")
        if root and os.path.exists(os.path.join(root, path)):
            fixed = os.path.join(root, path)
    with open(fixed, "r") as fh:
        doc = json.load(fh)
    jsonschema.validate(doc, _schema(schema_name))
    return doc


def emit(obj):
    sys.stdout.write(json.dumps(obj, sort_keys=True, separators=(",", ":")))
    sys.stdout.write("\n")


# ---------------------------------------------------------------------------
# shared builders
# ---------------------------------------------------------------------------

def vgraph_from_json(doc) -> GraphObj:
    objs = tuple(doc["objects"])
    homs = {}
    for key, es in doc.get("hom", {}).items():
        a, b = key.split("|", 1)
        if a not in objs or b not in objs:
            raise DomainFailure({"ok": False, "violation": {
                "axiom": "hom-endpoints", "detail": "unknown object in %r" % key}})
        homs[(a, b)] = SetObj.plain(tuple(es))
    empty = SetObj.plain(())
    return GraphObj(SetObj.plain(objs), lambda a, b: homs.get((a, b), empty))


def vgraph_to_json(G: GraphObj, bound=0) -> dict:
    objs = [t for s in range(bound + 1) for t in G.obj_parts(s)]
    hom = {}
    for a in objs:
        for b in objs:
            es = [t for s in range(bound + 1) for t in G.hom(a, b).parts(s)]
            if es:
                hom["%s|%s" % (a, b)] = [token_str(e) for e in es]
    return {"objects": [token_str(o) for o in objs], "hom": hom}


def operad_from_json(doc) -> ops.FinOperad:
    ops_lists = {int(k): list(v) for k, v in doc["ops"].items()}
    table = {}
    for key, out in doc["comp"].items():
        head, args = key.split("|", 1)
        qs = tuple(q for q in args.split(",") if q != "")
        table[(head, qs)] = out
    return ops.set_operad(doc["cap"], ops_lists, table, doc["unit"])


def space_from_json(doc, model):
    if isinstance(model, ops.DiscreteModel):
        pts = doc.get("points", doc.get("vertices", []))
        return model.space(tuple(pts))
    verts = doc.get("vertices", doc.get("points", []))
    edges = tuple((e[0], e[1], e[2]) for e in doc.get("edges", []))
    return model.space(tuple(verts), edges)


def _model(name):
    if name == "discrete":
        return ops.DiscreteModel()
    if name == "graph":
        return ops.FiniteGraphModel()
    raise ValueError("unknown model %r" % name)


def _permutation(spec, size):
    if spec == "identity":
        return lambda i: i
    if spec == "swap":
        if size != 2:
            raise ValueError("swap needs a 2-symbol alphabet")
        return lambda i: 1 - i
    perm = [int(x) for x in spec.split(",")]
    if sorted(perm) != list(range(size)):
        raise ValueError("map %r is not a permutation of 0..%d" % (spec, size - 1))
    return lambda i: perm[i]


# ---------------------------------------------------------------------------
# random instance generation
# ---------------------------------------------------------------------------

def random_globset(rng: random.Random, n: int, max_cells: int) -> GlobSet:
    cells = []
    src = {d: {} for d in range(1, n + 1)}
    tgt = {d: {} for d in range(1, n + 1)}
    count0 = rng.randint(1, max_cells) if max_cells > 0 else 0
    cells.append(tuple("c0_%d" % i for i in range(count0)))
    for d in range(1, n + 1):
        if not cells[d - 1]:
            cells.append(())
            continue
        count = rng.randint(0, max_cells)
        names = tuple("c%d_%d" % (d, i) for i in range(count))
        cells.append(names)
        for c in names:
            s = rng.choice(cells[d - 1])
            if d == 1:
                t = rng.choice(cells[d - 1])
            else:
                peers = [x for x in cells[d - 1]
                         if src[d - 1][x] == src[d - 1][s]
                         and tgt[d - 1][x] == tgt[d - 1][s]]
                t = rng.choice(peers)
            src[d][c] = s
            tgt[d][c] = t
    return make_globset(n, cells, src, tgt)


def random_vgraph_json(rng: random.Random, max_objects: int, max_edges: int) -> dict:
    count = rng.randint(1, max_objects) if max_objects > 0 else 0
    objs = ["o%d" % i for i in range(count)]
    hom = {}
    if objs:
        for i in range(rng.randint(0, max_edges)):
            a, b = rng.choice(objs), rng.choice(objs)
            hom.setdefault("%s|%s" % (a, b), []).append("e%d" % i)
    return {"objects": objs, "hom": hom}


def random_operad_json(rng: random.Random, cap: int) -> dict:
    """A lawful operad: a cyclic monoid sitting at every arity."""
    import itertools as it
    size = rng.randint(1, 2)
    elems = ["m%d" % i for i in range(size)]
    unit = elems[0]

    def mult(a, b):
        return elems[(elems.index(a) + elems.index(b)) % size]
    ops_lists = {str(k): list(elems) for k in range(cap + 1)}
    table = {}
    for m in range(cap + 1):
        for p in elems:
            for qs in it.product(elems, repeat=m):
                out = p
                for q in qs:
                    out = mult(out, q)
                table["%s|%s" % (p, ",".join(qs))] = out
    return {"cap": cap, "ops": ops_lists, "comp": table, "unit": unit}


# ---------------------------------------------------------------------------
# command handlers
# ---------------------------------------------------------------------------

def cmd_validate(args):
    g = globset_from_json(load_json(args.input, "globset.schema.json"))
    v = validate_globset(g)
    if v is not None:
        raise DomainFailure({"ok": False, "violation": v.to_json()})
    emit({"ok": True})


def cmd_truncate(args):
    g = globset_from_json(load_json(args.input, "globset.schema.json"))
    v = validate_globset(g)
    if v is not None:
        raise DomainFailure({"ok": False, "violation": v.to_json()})
    try:
        out = truncate_globset(g, args.to)
    except DimensionError as e:
        raise DomainFailure({"ok": False, "violation": {
            "axiom": "dimension", "detail": str(e)}})
    emit(globset_to_json(out))


def cmd_free_cat(args):
    G = vgraph_from_json(load_json(args.input, "vgraph.schema.json"))
    gh = fc_apply(SetBase(), G, getattr(args, "from"), args.to, args.bound)
    els = gh.elements(args.bound)
    emit({"count": len(els),
          "elements": [{"token": token_str(t), "size": s} for t, s in els]})


def cmd_tn_cells(args):
    g = globset_from_json(load_json(args.input, "globset.schema.json"))
    cells = enumerate_tn_cells(args.n, g, args.dim, args.bound)
    emit({"count": len(cells), "cells": cells})


def cmd_oracle(args):
    g = globset_from_json(load_json(args.input, "globset.schema.json"))
    emit({"count": pasting_oracle(args.n, g, args.dim, args.bound)})


def cmd_laws(args):
    rng = random.Random(args.seed)
    if args.monad == "fc":
        T = fc_monad(SetBase())
        objs = [vgraph_from_json(random_vgraph_json(rng, 4, 5))
                for _ in range(args.samples)]
    elif args.monad == "identity":
        T = identity_monad(SetBase())
        objs = [SetObj.plain(tuple("x%d" % i for i in range(rng.randint(0, 4))))
                for _ in range(args.samples)]
    elif args.monad == "writer2":
        T = writer_monad(("0", "1"), lambda a, b: str((int(a) + int(b)) % 2), "0")
        objs = [SetObj.plain(tuple("x%d" % i for i in range(rng.randint(0, 4))))
                for _ in range(args.samples)]
    else:
        raise ValueError("unknown monad %r" % args.monad)
    rep = monad_law_report(T, objs, args.bound)
    emit(rep.to_json())
    if not rep.ok:
        raise DomainFailure(rep.to_json())


def _functor(args):
    if args.functor == "word":
        if not args.alphabet:
            raise ValueError("word functor needs --alphabet")
        return word_functor(tuple(args.alphabet.split(",")))
    if args.functor == "freemon":
        return free_monoid_functor()
    if args.functor == "identity":
        from .coalgebra import identity_endofunctor
        return identity_endofunctor(SetBase())
    raise ValueError("unknown functor %r" % args.functor)


def cmd_adamek(args):
    F = _functor(args)
    chain = adamek_chain(F, args.depth)
    bound = args.bound if args.bound is not None else 0
    sizes = []
    for k in range(args.depth + 1):
        st = chain.stage(k)
        sizes.append(sum(len(st.parts(s)) for s in range(bound + 1)))
    out = {"stages": sizes}
    if args.probe_lambek:
        out["lambek"] = lambek_probe(F, args.depth - 1, args.bound).to_json()
    emit(out)


def cmd_unfold(args):
    symbols = tuple(args.alphabet.split(","))
    step = _permutation(args.map, len(symbols))
    F = word_functor(symbols)
    c = make_coalgebra(F, tuple(range(len(symbols))),
                       lambda a: (symbols[a], step(a)))
    prefix = word_prefix(unfold(c, args.start, args.depth), args.depth)
    emit(list(prefix))


def cmd_trimble(args):
    model = _model(args.model)
    if args.seed_operad != "terminal":
        raise ValueError("only the terminal seed operad is built in")
    seed = ops.terminal_model_operad(model, max(args.bound, 2))
    levels = ops.weak_tower(model, seed, args.n, args.mode)
    X = space_from_json(load_json(args.input, "space.schema.json"), model)
    fund = levels[args.n].fundamental(X)
    if args.n == 0:
        cells = {"0": [token_str(t) for s in range(args.bound + 1)
                       for t in fund.parts(s)]}
    else:
        from .gcore import collect_cells, located_id
        located = collect_cells(fund, args.n, args.bound)
        cells = {str(d): [located_id(c, t) for c, t in located[d]]
                 for d in range(args.n + 1)}
    emit({"cells": cells, "counts": {d: len(v) for d, v in cells.items()}})


def cmd_composite_check(args):
    model = _model(args.model)
    if args.seed_operad != "terminal":
        raise ValueError("only the terminal seed operad is built in")
    seed = ops.terminal_model_operad(model, max(args.bound, 2))
    levels = ops.weak_tower(model, seed, args.n)
    g = globset_from_json(load_json(args.input, "globset.schema.json"))
    rep = ops.composite_check(levels, g, args.n, args.bound)
    emit(rep.to_json())
    if not rep.ok:
        raise DomainFailure(rep.to_json())


def cmd_collection_check(args):
    doc = load_json(args.input, "collection.schema.json")
    jsonschema.validate(doc["A"], _schema("globset.schema.json"))
    c = coll.collection_from_json(doc)
    v = coll.check_collection(c)
    if v is not None:
        raise DomainFailure({"ok": False, "violation": v.to_json()})
    if args.lift is None:
        emit({"ok": True})
        return
    table = load_json(args.lift, "lift.schema.json")
    lift = coll.lift_from_table(table)
    if args.incoherent:
        missing = coll.check_incoherent_contraction(c, lift)
    else:
        missing = coll.check_contraction(c, lift, args.mmax)
    if missing:
        raise DomainFailure({"ok": False,
                             "missing": [m.to_json() for m in missing]})
    emit({"ok": True})


def cmd_gen_random(args):
    rng = random.Random(args.seed)
    if args.kind == "globset":
        g = random_globset(rng, args.n, args.max_cells)
        emit(globset_to_json(g))
    elif args.kind == "graph":
        emit(random_vgraph_json(rng, args.max_objects, args.max_edges))
    elif args.kind == "operad":
        emit(random_operad_json(rng, args.cap))
    else:
        raise ValueError("unknown kind %r" % args.kind)


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def build_parser():
    ap = argparse.ArgumentParser(
        prog="omegacat",
        description="Desk-scale higher-category constructions and checkers")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check the globular axioms")
    p.add_argument("--input", required=True)
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("truncate", help="drop cells above a dimension")
    p.add_argument("--input", required=True)
    p.add_argument("--to", type=int, required=True)
    p.set_defaults(fn=cmd_truncate)

    p = sub.add_parser("free-cat", help="free-category hom enumeration")
    p.add_argument("--input", required=True)
    p.add_argument("--from", required=True)
    p.add_argument("--to", required=True)
    p.add_argument("--bound", type=int, default=3)
    p.set_defaults(fn=cmd_free_cat)

    p = sub.add_parser("tn-cells", help="cells of the free strict structure")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--bound", type=int, default=3)
    p.add_argument("--input", required=True)
    p.set_defaults(fn=cmd_tn_cells)

    p = sub.add_parser("oracle", help="independent pasting-diagram count")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--bound", type=int, default=3)
    p.add_argument("--input", required=True)
    p.set_defaults(fn=cmd_oracle)

    p = sub.add_parser("laws", help="monad law report over random instances")
    p.add_argument("--monad", default="fc",
                   choices=["fc", "identity", "writer2"])
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--bound", type=int, default=4)
    p.set_defaults(fn=cmd_laws)

    p = sub.add_parser("adamek", help="approximant chain stages")
    p.add_argument("--functor", required=True,
                   choices=["word", "freemon", "identity"])
    p.add_argument("--alphabet", default="")
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--bound", type=int, default=None)
    p.add_argument("--probe-lambek", action="store_true")
    p.set_defaults(fn=cmd_adamek)

    p = sub.add_parser("unfold", help="anamorphism prefix of a word coalgebra")
    p.add_argument("--functor", default="word", choices=["word"])
    p.add_argument("--alphabet", required=True)
    p.add_argument("--map", default="identity")
    p.add_argument("--start", type=int, default=0)
    p.add_argument("--depth", type=int, default=4)
    p.set_defaults(fn=cmd_unfold)

    p = sub.add_parser("trimble", help="fundamental structure of a model space")
    p.add_argument("--model", default="discrete", choices=["discrete", "graph"])
    p.add_argument("--seed-operad", default="terminal")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--bound", type=int, default=3)
    p.add_argument("--mode", default="incoherent",
                   choices=["incoherent", "coherent-at-0"])
    p.add_argument("--input", required=True)
    p.set_defaults(fn=cmd_trimble)

    p = sub.add_parser("composite-check",
                       help="tower monad against composition-by-levels")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--bound", type=int, default=2)
    p.add_argument("--model", default="discrete", choices=["discrete", "graph"])
    p.add_argument("--seed-operad", default="terminal")
    p.add_argument("--input", required=True)
    p.set_defaults(fn=cmd_composite_check)

    p = sub.add_parser("collection-check", help="collection and contraction data")
    p.add_argument("--input", required=True)
    p.add_argument("--lift", default=None)
    p.add_argument("--mmax", type=int, default=8)
    p.add_argument("--incoherent", action="store_true")
    p.set_defaults(fn=cmd_collection_check)

    p = sub.add_parser("gen-random", help="seeded random valid instances")
    p.add_argument("--kind", required=True, choices=["globset", "graph", "operad"])
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--max-cells", type=int, default=3)
    p.add_argument("--max-objects", type=int, default=4)
    p.add_argument("--max-edges", type=int, default=5)
    p.add_argument("--cap", type=int, default=3)
    p.set_defaults(fn=cmd_gen_random)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        try:
            args.fn(args)
        except (json.JSONDecodeError, jsonschema.ValidationError,
                FileNotFoundError, KeyError) as e:
            sys.stdout.write(json.dumps(
                {"ok": False, "parse_error": str(e)}, sort_keys=True,
                separators=(",", ":")) + "\n")
            return 2
    except UnsupportedDepthError as e:
        sys.stdout.write(json.dumps(
            {"ok": False, "unsupported_depth": str(e)}, sort_keys=True,
            separators=(",", ":")) + "\n")
        return 4
    except DomainFailure as e:
        sys.stdout.write(json.dumps(e.report, sort_keys=True,
                                    separators=(",", ":")) + "\n")
        return 3
    except (DimensionError, ops.OperadCapError, ops.ModelError,
            ops.ProductPreservationError, ValueError) as e:
        sys.stdout.write(json.dumps(
            {"ok": False, "violation": {"axiom": type(e).__name__,
                                        "detail": str(e)}},
            sort_keys=True, separators=(",", ":")) + "\n")
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
