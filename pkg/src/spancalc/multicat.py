"""Finite non-symmetric multicategories and multifunctor law checking.

Contains the two parameter multicategories that encode category-valued rings
on an object set S and modules over them: morphisms of the ring one are chains
(s0, ..., sn) between consecutive pairs, and the module one adds chains whose
first input is a module object.  A multifunctor out of the ring parameter
multicategory into categories is the same data as an enriched category on S;
the checker verifies the laws by exhaustion and emits that repackaging.
"""

from __future__ import annotations

import itertools

from .cats import Category, ProductCategory, CheckReport
from .spans import (span_compose, span_compose_morphisms, span_hom,
                    span_coproduct, formal_unit, SpanMorphism,
                    canonical_span_pool)


class Multicategory:

    objects = ()

    def hom(self, srcs, tgt):
        raise NotImplementedError

    def identity(self, a):
        raise NotImplementedError

    def compose(self, f, gs):
        raise NotImplementedError

    def arity(self, f):
        raise NotImplementedError

    def sources(self, f):
        raise NotImplementedError

    def target(self, f):
        raise NotImplementedError

    def morphisms(self, max_arity):
        """All morphisms of arity <= max_arity, as (srcs, tgt, f)."""
        raise NotImplementedError


def _ring_chain_objects(chain):
    return tuple((chain[i], chain[i + 1]) for i in range(len(chain) - 1))


def _module_chain_objects(chain):
    return (("m", chain[0]),) + _ring_chain_objects(chain)


class RingParamMulticat(Multicategory):
    """Objects S x S; a unique n-ary morphism onto each chain
    (s0,...,sn), including the 0-ary one onto each diagonal object."""

    def __init__(self, S):
        self.S = tuple(S)
        self.objects = tuple(itertools.product(self.S, self.S))

    def hom(self, srcs, tgt):
        if any(not _is_pair(a) for a in srcs) or not _is_pair(tgt):
            return ()
        if not srcs:
            return (("r", (tgt[0],)),) if tgt[0] == tgt[1] else ()
        chain = [srcs[0][0]]
        for a in srcs:
            if a[0] != chain[-1]:
                return ()
            chain.append(a[1])
        if (chain[0], chain[-1]) != tgt:
            return ()
        return (("r", tuple(chain)),)

    def identity(self, a):
        return ("r", (a[0], a[1]))

    def arity(self, f):
        return len(f[1]) - 1

    def sources(self, f):
        return _ring_chain_objects(f[1])

    def target(self, f):
        return (f[1][0], f[1][-1])

    def compose(self, f, gs):
        chain = f[1]
        if len(gs) != len(chain) - 1:
            raise ValueError("wrong number of inputs")
        out = [chain[0]]
        for (s, t), g in zip(_ring_chain_objects(chain), gs):
            kind, gchain = g
            if kind != "r" or gchain[0] != s or gchain[-1] != t:
                raise ValueError("non-composable input %r at (%s,%s)" % (g, s, t))
            out.extend(gchain[1:])
        return ("r", tuple(out))

    def morphisms(self, max_arity):
        for n in range(0, max_arity + 1):
            for chain in itertools.product(self.S, repeat=n + 1):
                f = ("r", chain)
                yield self.sources(f), self.target(f), f


class ModuleParamMulticat(RingParamMulticat):
    """Extends the ring parameter multicategory by module objects ("m", s)
    and the chains acting on them; module objects have no 0-ary morphisms."""

    def __init__(self, S):
        super().__init__(S)
        self.objects = self.objects + tuple(("m", s) for s in self.S)

    def hom(self, srcs, tgt):
        if _is_pair(tgt) and all(_is_pair(a) for a in srcs):
            return super().hom(srcs, tgt)
        if not _is_module(tgt):
            return ()
        if not srcs or not _is_module(srcs[0]):
            return ()
        if any(not _is_pair(a) for a in srcs[1:]):
            return ()
        chain = [srcs[0][1]]
        for a in srcs[1:]:
            if a[0] != chain[-1]:
                return ()
            chain.append(a[1])
        if chain[-1] != tgt[1]:
            return ()
        return (("m", tuple(chain)),)

    def identity(self, a):
        if _is_module(a):
            return ("m", (a[1],))
        return super().identity(a)

    def arity(self, f):
        if f[0] == "m":
            return len(f[1])
        return super().arity(f)

    def sources(self, f):
        if f[0] == "m":
            return _module_chain_objects(f[1])
        return super().sources(f)

    def target(self, f):
        if f[0] == "m":
            return ("m", f[1][-1])
        return super().target(f)

    def compose(self, f, gs):
        if f[0] == "r":
            return super().compose(f, gs)
        chain = f[1]
        if len(gs) != len(chain):
            raise ValueError("wrong number of inputs")
        g0 = gs[0]
        if g0[0] != "m" or g0[1][-1] != chain[0]:
            raise ValueError("non-composable module input %r" % (g0,))
        out = list(g0[1])
        for (s, t), g in zip(_ring_chain_objects(chain), gs[1:]):
            kind, gchain = g
            if kind != "r" or gchain[0] != s or gchain[-1] != t:
                raise ValueError("non-composable input %r at (%s,%s)" % (g, s, t))
            out.extend(gchain[1:])
        return ("m", tuple(out))

    def morphisms(self, max_arity):
        yield from super().morphisms(max_arity)
        for n in range(1, max_arity + 1):
            for chain in itertools.product(self.S, repeat=n):
                f = ("m", chain)
                yield self.sources(f), self.target(f), f


def _is_pair(a):
    return isinstance(a, tuple) and len(a) == 2 and a[0] != "m"


def _is_module(a):
    return isinstance(a, tuple) and len(a) == 2 and a[0] == "m"


def ring_param_multicat(S):
    return RingParamMulticat(S)


def module_param_multicat(S):
    return ModuleParamMulticat(S)


def check_multicategory_axioms(M, max_arity, report=None, max_cases=None):
    """Unit and associativity laws by exhaustion within the arity bound."""
    rep = report or CheckReport("multicategory axioms")
    by_target = {}
    all_morphisms = list(M.morphisms(max_arity))
    for srcs, tgt, f in all_morphisms:
        by_target.setdefault(tgt, []).append(f)
    count = 0
    for srcs, tgt, f in all_morphisms:
        ids = tuple(M.identity(a) for a in srcs)
        if M.arity(f) > 0:
            rep.record(M.compose(f, ids) == f, "right unit law at %r" % (f,))
        rep.record(M.compose(M.identity(tgt), (f,)) == f,
                   "left unit law at %r" % (f,))
    for srcs, tgt, f in all_morphisms:
        n = M.arity(f)
        if n == 0:
            continue
        pools = [by_target.get(a, []) for a in srcs]
        for gs in itertools.product(*pools):
            if sum(M.arity(g) for g in gs) > max_arity:
                continue
            inner_srcs = tuple(itertools.chain.from_iterable(
                M.sources(g) for g in gs))
            composed = M.compose(f, gs)
            for hs in _identity_padded_inner(M, inner_srcs):
                lhs = M.compose(composed, hs)
                split = _split_by_arities(M, gs, hs)
                rhs = M.compose(f, tuple(M.compose(g, part) if M.arity(g) else g
                                         for g, part in zip(gs, split)))
                rep.record(lhs == rhs, "associativity at (%r, %r)" % (f, gs))
                count += 1
                if max_cases and count >= max_cases:
                    return rep
    return rep


def _identity_padded_inner(M, inner_srcs):
    # one nontrivial inner layer suffices alongside identity padding: vary a
    # single slot through all morphisms into it, identities elsewhere
    ids = tuple(M.identity(a) for a in inner_srcs)
    yield ids
    by_target = {}
    for srcs, tgt, f in M.morphisms(2):
        by_target.setdefault(tgt, []).append(f)
    for i, a in enumerate(inner_srcs):
        for f in by_target.get(a, []):
            if f == M.identity(a):
                continue
            yield ids[:i] + (f,) + ids[i + 1:]


def _split_by_arities(M, gs, hs):
    out = []
    pos = 0
    for g in gs:
        k = M.arity(g)
        out.append(tuple(hs[pos:pos + k]))
        pos += k
    return out


# -- category-valued targets ------------------------------------------------------


class CatMulti:
    """An n-ary multimorphism into categories: a functor from the product of
    the source hom-categories.  Compared by evaluation."""

    def __init__(self, srcs, tgt, obj_fn, arr_fn, name="mm"):
        self.srcs = tuple(srcs)
        self.tgt = tgt
        self.obj_fn = obj_fn
        self.arr_fn = arr_fn
        self.name = name

    def obj(self, xs):
        return self.obj_fn(tuple(xs))

    def arr(self, fs):
        return self.arr_fn(tuple(fs))


class CatTarget:
    """Category-valued target: one category (with chosen coproducts) per
    object; multimorphisms are CatMulti values."""

    def __init__(self, cats):
        self.cats = dict(cats)
        self.objects = tuple(self.cats)

    def cat(self, a):
        return self.cats[a]

    def identity(self, a):
        return CatMulti((a,), a, lambda xs: xs[0], lambda fs: fs[0], name="id")

    def compose(self, f, gs):
        arities = [len(g.srcs) for g in gs]

        def obj_fn(xs):
            parts = _split(xs, arities)
            return f.obj(tuple(g.obj(p) for g, p in zip(gs, parts)))

        def arr_fn(fs):
            parts = _split(fs, arities)
            return f.arr(tuple(g.arr(p) for g, p in zip(gs, parts)))

        srcs = tuple(itertools.chain.from_iterable(g.srcs for g in gs))
        return CatMulti(srcs, f.tgt, obj_fn, arr_fn,
                        name="%s(%s)" % (f.name, ",".join(g.name for g in gs)))

    def multi_equal(self, m1, m2, max_tuples=None):
        """Pointwise equality over listed objects and arrows of the domain."""
        if m1.srcs != m2.srcs or m1.tgt != m2.tgt:
            return False
        dom = ProductCategory(tuple(self.cat(a) for a in m1.srcs))
        objs = dom.objects if max_tuples is None else dom.objects[:max_tuples]
        for xs in objs:
            if m1.obj(xs) != m2.obj(xs):
                return False
        for xs in objs:
            for ys in objs:
                for f in dom.hom(xs, ys):
                    if m1.arr(f.data) != m2.arr(f.data):
                        return False
        return True


def _split(xs, arities):
    out, pos = [], 0
    for k in arities:
        out.append(tuple(xs[pos:pos + k]))
        pos += k
    return out


# -- multifunctors ------------------------------------------------------------------


class MultifunctorData:
    """A multifunctor: object map plus morphism map.  The target is either
    another Multicategory or a CatTarget."""

    def __init__(self, source, target, obj_map, mor_map, name="F"):
        self.source = source
        self.target = target
        self.obj_map = obj_map
        self.mor_map = mor_map
        self.name = name

    def obj(self, a):
        return self.obj_map(a)

    def mor(self, f):
        return self.mor_map(f)

    @property
    def cat_valued(self):
        return isinstance(self.target, CatTarget)


def identity_multifunctor(M):
    return MultifunctorData(M, M, lambda a: a, lambda f: f, name="id")


def check_multifunctor(F, max_arity, report=None, max_inner=None):
    """Identity and composition preservation for all composable tuples within
    the arity bound; on failure names the tuple."""
    rep = report or CheckReport("multifunctor %s" % F.name)
    M, T = F.source, F.target

    def equal(x, y):
        if F.cat_valued:
            return T.multi_equal(x, y)
        return x == y

    for a in M.objects:
        rep.record(equal(F.mor(M.identity(a)), T.identity(F.obj(a))),
                   "identity at %r" % (a,))

    by_target = {}
    all_morphisms = list(M.morphisms(max_arity))
    for srcs, tgt, f in all_morphisms:
        by_target.setdefault(tgt, []).append(f)

    for srcs, tgt, f in all_morphisms:
        n = M.arity(f)
        if n == 0:
            continue
        pools = [by_target.get(a, []) for a in srcs]
        seen = 0
        for gs in itertools.product(*pools):
            if sum(M.arity(g) for g in gs) > max_arity:
                continue
            lhs = F.mor(M.compose(f, gs))
            rhs = T.compose(F.mor(f), tuple(F.mor(g) for g in gs))
            rep.record(equal(lhs, rhs),
                       "composition at f=%r with inputs %r" % (f, gs))
            seen += 1
            if max_inner and seen >= max_inner:
                break
    return rep


def check_multinatural(eta, F, G, max_arity, report=None):
    """eta maps each object a to a 1-ary target morphism F(a) -> G(a);
    verifies the naturality square at every n-ary morphism within bounds."""
    rep = report or CheckReport("multinatural transformation")
    M, T = F.source, F.target
    for srcs, tgt, f in M.morphisms(max_arity):
        lhs = T.compose(eta(tgt), (F.mor(f),))
        rhs = T.compose(G.mor(f), tuple(eta(a) for a in srcs))
        if F.cat_valued:
            ok = T.multi_equal(lhs, rhs)
        else:
            ok = lhs == rhs
        rep.record(ok, "naturality at %r" % (f,))
    return rep


# -- repackaging (rings on many objects <-> enriched categories) --------------------


def enriched_from_multifunctor(F):
    """Hom-categories, binary compositions, and units extracted from a
    ring-parameter multifunctor into categories."""
    S = F.source.S
    homcat = {(s, t): F.obj((s, t)) for s in S for t in S}
    comp = {(s, t, r): F.mor(("r", (s, t, r))) for s in S for t in S for r in S}
    unit = {s: F.mor(("r", (s,))).obj(()) for s in S}
    return {"S": S, "hom": homcat, "comp": comp, "unit": unit}


def multifunctor_from_enriched(data, target):
    """Rebuild the multifunctor: chains map to iterated binary compositions
    (left bracketing) and the 0-ary morphisms to the units."""
    S = data["S"]
    source = RingParamMulticat(S)

    def obj_map(a):
        return data["hom"][a]

    def mor_map(f):
        chain = f[1]
        return _chain_multi(data, target, chain)

    return MultifunctorData(source, target, obj_map, mor_map, name="rebuilt")


def _chain_multi(data, target, chain):
    n = len(chain) - 1
    srcs = _ring_chain_objects(chain)
    tgt_obj = (chain[0], chain[-1])
    if n == 0:
        u = data["unit"][chain[0]]
        cat = data["hom"][tgt_obj]
        return CatMulti((), tgt_obj, lambda xs: u,
                        lambda fs: cat.identity(u), name="unit")
    if n == 1:
        return target.identity(tgt_obj)

    def obj_fn(xs):
        acc = xs[0]
        s = chain[0]
        for i in range(1, n):
            acc = data["comp"][(s, chain[i], chain[i + 1])].obj((acc, xs[i]))
        return acc

    def arr_fn(fs):
        acc = fs[0]
        s = chain[0]
        for i in range(1, n):
            acc = data["comp"][(s, chain[i], chain[i + 1])].arr((acc, fs[i]))
        return acc

    return CatMulti(srcs, tgt_obj, obj_fn, arr_fn, name="fold")


def module_data_from_multifunctor(F):
    """Module repackaging of a module-parameter multifunctor: module
    categories and the binary action M_s x R_{s,t} -> M_t (this native
    orientation is the transpose of the ring-acts-on-the-left convention)."""
    S = F.source.S
    modcat = {s: F.obj(("m", s)) for s in S}
    action = {(s, t): F.mor(("m", (s, t))) for s in S for t in S}
    return {"S": S, "mod": modcat, "action": action}


# -- the span-category multifunctor -------------------------------------------------


class SpanCategory(Category):
    """Hom category of spans between two orbits: a finite listed pool with
    computable homs for arbitrary spans."""

    def __init__(self, G, H, K, pool):
        self.G = G
        self.H = tuple(H)
        self.K = tuple(K)
        self.objects = tuple(pool)
        self._hom_cache = {}

    def hom(self, x, y):
        key = (x, y)
        if key not in self._hom_cache:
            self._hom_cache[key] = tuple(span_hom(x, y))
        return self._hom_cache[key]

    def identity(self, x):
        return SpanMorphism.identity(x)

    def then(self, f, g):
        return f.then(g)

    def src(self, f):
        return f.src

    def tgt(self, f):
        return f.dst

    def coproduct(self, x, y):
        return span_coproduct(x, y)

    def cotuple(self, f, g):
        from .gsets import GMap
        c, i1, i2 = span_coproduct(f.src, g.src)
        cm = c.materialize().apex
        vals = [0] * cm.size
        for a in f.src.materialize().apex.elements:
            vals[i1.apex_map(a) - 1] = f(a)
        for a in g.src.materialize().apex.elements:
            vals[i2.apex_map(a) - 1] = g(a)
        tgtapex = f.dst.materialize().apex
        return SpanMorphism(c, f.dst, GMap(cm, tgtapex, vals, check=False),
                            check=False)


def span_multifunctor(G, max_apex=None, max_orbits=1, subgroups=None,
                      include_sums=False):
    """The assignment of span categories and pullback composition, as a
    multifunctor from the ring parameter multicategory on the subgroups."""
    subs = tuple(subgroups) if subgroups is not None else G.subgroups()
    if max_apex is None:
        max_apex = G.order
    cats = {}
    for H in subs:
        for K in subs:
            pool = canonical_span_pool(G, H, K, max_apex,
                                       max_orbits=None if include_sums else max_orbits)
            cats[(H, K)] = SpanCategory(G, H, K, pool)
    target = CatTarget(cats)
    source = RingParamMulticat(subs)

    def mor_map(f):
        chain = f[1]
        n = len(chain) - 1
        srcs = _ring_chain_objects(chain)
        tgt_obj = (chain[0], chain[-1])
        if n == 0:
            u = formal_unit(G, chain[0])
            cat = cats[tgt_obj]
            return CatMulti((), tgt_obj, lambda xs: u,
                            lambda fs: cat.identity(u), name="unit")

        def obj_fn(xs):
            acc = xs[0]
            for x in xs[1:]:
                acc = span_compose(acc, x)
            return acc

        def arr_fn(fs):
            acc = fs[0]
            for f_ in fs[1:]:
                acc = span_compose_morphisms(acc, f_)
            return acc

        return CatMulti(srcs, tgt_obj, obj_fn, arr_fn, name="compose%d" % n)

    return MultifunctorData(source, target, lambda a: cats[a], mor_map,
                            name="span-assignment")
