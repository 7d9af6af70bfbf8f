"""Endofunctors, coalgebras, and approximant chains.

An infinite carrier is never materialized: the limit behaviour of a
coalgebra is represented by its depth-d prefixes, obtained by composing the
unique maps into the chain of approximants built from the terminal object.
Functors that are not finitary per stage (the free-monoid functor) carry a
grading; stage enumeration is then per grade under a bound.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from .gcore import (GradedParts, SetBase, SetMor, SetObj, token_str)


@dataclass
class Endofunctor:
    """An endofunctor presented by object and morphism actions.

    ``graded`` marks functors whose stages need a grade bound to be
    enumerated (their stages are infinite but graded-finite).
    """

    base: object
    on_obj: Callable
    on_mor: Callable
    name: str = ""
    graded: bool = False


@dataclass
class CoalgebraInstance:
    """A carrier with a structure map into its functor image."""
    functor: Endofunctor
    carrier: object
    structure: object  # morphism carrier -> F(carrier)


class ApproximantChain:
    """Stages F^k(1) with connecting maps F^k(!) toward the terminal."""

    def __init__(self, functor: Endofunctor):
        self.functor = functor
        self._stages = {}
        self._connects = {}

    def stage(self, k: int):
        if k not in self._stages:
            if k == 0:
                self._stages[0] = self.functor.base.terminal()
            else:
                self._stages[k] = self.functor.on_obj(self.stage(k - 1))
        return self._stages[k]

    def connect(self, k: int):
        """The map stage(k+1) -> stage(k), i.e. F^k applied to !: F1 -> 1."""
        if k not in self._connects:
            if k == 0:
                self._connects[0] = self.functor.base.bang(self.stage(1))
            else:
                self._connects[k] = self.functor.on_mor(self.connect(k - 1))
        return self._connects[k]


def adamek_chain(F: Endofunctor, k: int) -> ApproximantChain:
    """Materialize the approximant chain through stage k."""
    chain = ApproximantChain(F)
    for i in range(k + 1):
        chain.stage(i)
    for i in range(k):
        chain.connect(i)
    return chain


def cone_map(c: CoalgebraInstance, depth: int):
    """The unique map from a coalgebra to stage(depth) of the chain."""
    base = c.functor.base
    chain = ApproximantChain(c.functor)
    u = base.bang(c.carrier)
    for _ in range(depth):
        u = base.compose(c.structure, c.functor.on_mor(u))
    return u


def unfold(c: CoalgebraInstance, a, depth: int):
    """The depth-d prefix of the anamorphism image of a carrier element."""
    return cone_map(c, depth).fn(a)


@dataclass
class LambekReport:
    ok: bool
    depth: int
    cards: dict            # grade -> (|stage(d+1)|, |F(stage(d))|)
    mismatch: Optional[object] = None

    def to_json(self):
        return {"ok": self.ok, "depth": self.depth,
                "cards": {str(k): list(v) for k, v in self.cards.items()},
                "mismatch": token_str(self.mismatch) if self.mismatch is not None else None}


def lambek_probe(F: Endofunctor, depth: int, bound: Optional[int] = None) -> LambekReport:
    """Check that the canonical comparison stage(d+1) -> F(stage(d)) bijects.

    For graded functors a bound is required and the bijection is checked per
    grade; for finitary functors all parts sit at grade 0.
    """
    if F.graded and bound is None:
        raise ValueError("graded functor needs a bound for the probe")
    b = bound if bound is not None else 0
    chain = adamek_chain(F, depth + 1)
    lhs = chain.stage(depth + 1)
    rhs = F.on_obj(chain.stage(depth))
    cards = {}
    for s in range(b + 1):
        left, right = lhs.parts(s), rhs.parts(s)
        cards[s] = (len(left), len(right))
        if sorted(map(token_str, left)) != sorted(map(token_str, right)):
            extra = set(left) ^ set(right)
            return LambekReport(False, depth, cards, next(iter(extra)))
    return LambekReport(True, depth, cards)


# ---------------------------------------------------------------------------
# the two worked functors
# ---------------------------------------------------------------------------

def word_functor(alphabet) -> Endofunctor:
    """X maps to M x X for a finite alphabet M."""
    base = SetBase()
    M = SetObj.plain(tuple(alphabet))

    def on_obj(x):
        return base.product(M, x)

    def on_mor(f):
        return SetMor(on_obj(f.dom), on_obj(f.cod),
                      lambda t: (t[0], f.fn(t[1])))
    return Endofunctor(base, on_obj, on_mor, "word(%s)" % ",".join(map(str, alphabet)))


def word_coalgebra(alphabet, carrier_tokens, label_of, step) -> CoalgebraInstance:
    """Coalgebra for the word functor: a ->  (label_of(a), step(a))."""
    F = word_functor(alphabet)
    carrier = SetObj.plain(tuple(carrier_tokens))
    structure = SetMor(carrier, F.on_obj(carrier),
                       lambda a: (label_of(a), step(a)))
    return CoalgebraInstance(F, carrier, structure)


def make_coalgebra(F: Endofunctor, carrier_tokens, structure_fn) -> CoalgebraInstance:
    carrier = SetObj.plain(tuple(carrier_tokens))
    structure = SetMor(carrier, F.on_obj(carrier), structure_fn)
    return CoalgebraInstance(F, carrier, structure)


def word_prefix(unfolded, depth: int):
    """Flatten the nested pairs of a word-functor prefix into a tuple."""
    out = []
    t = unfolded
    for _ in range(depth):
        out.append(t[0])
        t = t[1]
    return tuple(out)


def free_monoid_functor() -> Endofunctor:
    """X maps to finite strings over X, graded by length plus inner grades."""
    base = SetBase()

    def on_obj(x):
        def gen(s):
            for k in range(s + 1):
                yield from _strings(x, k, s - k)
        return SetObj(GradedParts(gen))

    def on_mor(f):
        return SetMor(on_obj(f.dom), on_obj(f.cod),
                      lambda t: tuple(f.fn(e) for e in t))
    return Endofunctor(base, on_obj, on_mor, "freemon", graded=True)


def _strings(x, k, budget):
    if k == 0:
        if budget == 0:
            yield ()
        return
    for i in range(budget + 1):
        for e in x.parts(i):
            for rest in _strings(x, k - 1, budget - i):
                yield (e,) + rest


def identity_endofunctor(base) -> Endofunctor:
    return Endofunctor(base, lambda x: x, lambda f: f, "id")
