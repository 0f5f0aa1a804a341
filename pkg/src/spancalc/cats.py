"""Concrete finite categories, functors, and decidable comparison utilities.

A category here has a finite *listed* object set used by exhaustive checks,
while hom sets and composition remain computable on any valid objects (results
of ring multiplications and module actions routinely leave any finite
truncation).  Functor and transformation equality is table equality over the
listed part.
"""

from __future__ import annotations

import itertools


class Arrow:
    """A morphism: (src, tgt, data); the owning category interprets data."""

    __slots__ = ("src", "tgt", "data", "_hash")

    def __init__(self, src, tgt, data):
        self.src = src
        self.tgt = tgt
        self.data = data
        self._hash = None

    def __eq__(self, other):
        return (isinstance(other, Arrow) and self.src == other.src
                and self.tgt == other.tgt and self.data == other.data)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.src, self.tgt, self.data))
        return self._hash

    def __repr__(self):
        return "Arrow(%r: %r -> %r)" % (self.data, self.src, self.tgt)


class Category:
    """Base interface.  Subclasses set ``objects`` and implement hom/identity/
    then/src/tgt (and coproduct/cotuple where the checks need them)."""

    objects = ()

    def hom(self, x, y):
        raise NotImplementedError

    def identity(self, x):
        raise NotImplementedError

    def then(self, f, g):
        """Diagrammatic composite of f: x -> y and g: y -> z."""
        raise NotImplementedError

    def src(self, f):
        return f.src

    def tgt(self, f):
        return f.tgt

    def coproduct(self, x, y):
        raise NotImplementedError("no chosen coproducts in %r" % self)

    def cotuple(self, f, g):
        raise NotImplementedError("no chosen coproducts in %r" % self)

    def arrows(self, objects=None):
        objs = self.objects if objects is None else objects
        for x in objs:
            for y in objs:
                yield from self.hom(x, y)

    def find_inverse(self, f):
        for g in self.hom(self.tgt(f), self.src(f)):
            if (self.then(f, g) == self.identity(self.src(f))
                    and self.then(g, f) == self.identity(self.tgt(f))):
                return g
        return None

    def iso_exists(self, x, y):
        return any(self.find_inverse(f) is not None for f in self.hom(x, y))


class TerminalCategory(Category):

    def __init__(self):
        self.objects = ("*",)

    def hom(self, x, y):
        return (Arrow(x, y, "!"),)

    def identity(self, x):
        return Arrow(x, x, "!")

    def then(self, f, g):
        return Arrow(f.src, g.tgt, "!")

    def coproduct(self, x, y):
        return "*", Arrow(x, "*", "!"), Arrow(y, "*", "!")

    def cotuple(self, f, g):
        return Arrow("*", f.tgt, "!")


class DiscreteCategory(Category):

    def __init__(self, objects):
        self.objects = tuple(objects)

    def hom(self, x, y):
        return (Arrow(x, x, "id"),) if x == y else ()

    def identity(self, x):
        return Arrow(x, x, "id")

    def then(self, f, g):
        return Arrow(f.src, g.tgt, "id")


class TableCategory(Category):
    """Fully tabulated category: hom dict, composition dict, optional
    coproduct tables.  Only listed objects are valid."""

    def __init__(self, objects, hom_table, compose_table, identity_table,
                 coproduct_table=None, cotuple_fn=None):
        self.objects = tuple(objects)
        self._hom = dict(hom_table)
        self._compose = dict(compose_table)
        self._identity = dict(identity_table)
        self._coproduct = coproduct_table
        self._cotuple = cotuple_fn

    def hom(self, x, y):
        return self._hom.get((x, y), ())

    def identity(self, x):
        return self._identity[x]

    def then(self, f, g):
        return self._compose[(f, g)]

    def coproduct(self, x, y):
        if self._coproduct is None:
            raise NotImplementedError
        return self._coproduct[(x, y)]

    def cotuple(self, f, g):
        if self._cotuple is None:
            raise NotImplementedError
        return self._cotuple(f, g)


class SubsetsCategory(Category):
    """Subsets of a finite carrier, ordered by inclusion; coproduct = union.

    Objects are frozensets; there is at most one morphism between two objects.
    A cocartesian poset, convenient as a fully serializable test category.
    """

    def __init__(self, carrier, objects=None):
        self.carrier = frozenset(carrier)
        if objects is None:
            objects = [frozenset(s) for r in range(len(self.carrier) + 1)
                       for s in itertools.combinations(sorted(self.carrier), r)]
        self.objects = tuple(objects)

    def hom(self, x, y):
        return (Arrow(x, y, "incl"),) if x <= y else ()

    def identity(self, x):
        return Arrow(x, x, "incl")

    def then(self, f, g):
        return Arrow(f.src, g.tgt, "incl")

    def coproduct(self, x, y):
        u = x | y
        return u, Arrow(x, u, "incl"), Arrow(y, u, "incl")

    def cotuple(self, f, g):
        return Arrow(f.src | g.src, f.tgt, "incl")


class MultisetCategory(Category):
    """Finite tuples over a label set; morphisms are label-preserving index
    maps.  The free finite-coproduct completion of a discrete category:
    hom(x, y) = {phi: positions(x) -> positions(y) | y[phi(i)] = x[i]}.
    Valid objects are arbitrary tuples over the labels; ``objects`` lists
    tuples up to a length bound for exhaustive checks."""

    def __init__(self, labels, max_len=2):
        self.labels = tuple(labels)
        objs = [()]
        for n in range(1, max_len + 1):
            objs.extend(itertools.product(self.labels, repeat=n))
        self.objects = tuple(objs)

    def hom(self, x, y):
        slots = [[j for j, b in enumerate(y) if b == a] for a in x]
        return tuple(Arrow(x, y, phi) for phi in itertools.product(*slots))

    def identity(self, x):
        return Arrow(x, x, tuple(range(len(x))))

    def then(self, f, g):
        return Arrow(f.src, g.tgt, tuple(g.data[j] for j in f.data))

    def coproduct(self, x, y):
        u = x + y
        return (u, Arrow(x, u, tuple(range(len(x)))),
                Arrow(y, u, tuple(range(len(x), len(u)))))

    def cotuple(self, f, g):
        return Arrow(f.src + g.src, f.tgt, f.data + g.data)


class ProductCategory(Category):
    """Finite product of categories; arrows are tuples of component arrows.
    The empty product is the terminal category with object ()."""

    def __init__(self, factors):
        self.factors = tuple(factors)
        self.objects = tuple(itertools.product(*(c.objects for c in self.factors)))

    def hom(self, x, y):
        per = [c.hom(a, b) for c, a, b in zip(self.factors, x, y)]
        return tuple(Arrow(x, y, combo) for combo in itertools.product(*per))

    def identity(self, x):
        return Arrow(x, x, tuple(c.identity(a) for c, a in zip(self.factors, x)))

    def then(self, f, g):
        return Arrow(f.src, g.tgt,
                     tuple(c.then(a, b) for c, a, b in
                           zip(self.factors, f.data, g.data)))


class FunctorData:
    """A functor given by callables on objects and arrows, compared by
    evaluation over its source's listed objects."""

    def __init__(self, src, tgt, obj_fn, arr_fn, name="F"):
        self.src_cat = src
        self.tgt_cat = tgt
        self.obj_fn = obj_fn
        self.arr_fn = arr_fn
        self.name = name

    def obj(self, x):
        return self.obj_fn(x)

    def arr(self, f):
        return self.arr_fn(f)

    @classmethod
    def identity(cls, cat):
        return cls(cat, cat, lambda x: x, lambda f: f, name="id")

    def then(self, other):
        return FunctorData(self.src_cat, other.tgt_cat,
                           lambda x: other.obj(self.obj(x)),
                           lambda f: other.arr(self.arr(f)),
                           name="%s;%s" % (self.name, other.name))


class CheckReport:
    """Accumulated verdicts of a verification family, with witnesses."""

    def __init__(self, name):
        self.name = name
        self.checks = 0
        self.failures = []

    def record(self, ok, label, detail=""):
        self.checks += 1
        if not ok:
            self.failures.append((label, detail))
        return ok

    def fail(self, label, detail=""):
        self.record(False, label, detail)

    @property
    def ok(self):
        return not self.failures

    def merge(self, other):
        self.checks += other.checks
        self.failures.extend(
            ("%s: %s" % (other.name, lab), det) for lab, det in other.failures)
        return self

    def to_dict(self):
        return {
            "name": self.name,
            "checks": self.checks,
            "passed": self.ok,
            "failures": [{"label": lab, "detail": str(det)[:400]}
                         for lab, det in self.failures[:25]],
        }

    def __repr__(self):
        state = "ok" if self.ok else "%d FAILURES" % len(self.failures)
        return "CheckReport(%s: %d checks, %s)" % (self.name, self.checks, state)


def check_is_functor(F, report=None, objects=None):
    """Identity and composition preservation over the listed source."""
    rep = report or CheckReport("functor %s" % F.name)
    cat, tgt = F.src_cat, F.tgt_cat
    objs = cat.objects if objects is None else objects
    for x in objs:
        rep.record(F.arr(cat.identity(x)) == tgt.identity(F.obj(x)),
                   "identity at %r" % (x,))
    for x in objs:
        for y in objs:
            for f in cat.hom(x, y):
                for z in objs:
                    for g in cat.hom(y, z):
                        lhs = F.arr(cat.then(f, g))
                        rhs = tgt.then(F.arr(f), F.arr(g))
                        rep.record(lhs == rhs, "composition at (%r, %r)" % (f, g))
    return rep


def functors_equal(F, G, objects=None):
    objs = F.src_cat.objects if objects is None else objects
    for x in objs:
        if F.obj(x) != G.obj(x):
            return False
    for f in F.src_cat.arrows(objs):
        if F.arr(f) != G.arr(f):
            return False
    return True


def check_equivalence(F, report=None):
    """Essential surjectivity and full faithfulness by exhaustion over the
    listed objects of source and target."""
    rep = report or CheckReport("equivalence %s" % F.name)
    src, tgt = F.src_cat, F.tgt_cat
    for y in tgt.objects:
        hit = any(tgt.iso_exists(F.obj(x), y) for x in src.objects)
        rep.record(hit, "essential surjectivity at %r" % (y,))
    for x in src.objects:
        for xp in src.objects:
            into = {}
            ok = True
            for f in src.hom(x, xp):
                img = F.arr(f)
                if img in into:
                    ok = False
                into[img] = f
            rep.record(ok, "faithfulness at (%r, %r)" % (x, xp))
            target_hom = set(tgt.hom(F.obj(x), F.obj(xp)))
            rep.record(set(into) <= target_hom and len(into) == len(target_hom),
                       "fullness at (%r, %r)" % (x, xp),
                       "image %d of %d" % (len(into), len(target_hom)))
    return rep


def check_preserves_coproducts(F, report=None, pairs=None):
    """The canonical comparison cotuple(F i1, F i2): F(x)+F(y) -> F(x+y)
    must be an isomorphism (chosen cocones only)."""
    rep = report or CheckReport("coproducts %s" % F.name)
    src, tgt = F.src_cat, F.tgt_cat
    if pairs is None:
        pairs = [(x, y) for x in src.objects for y in src.objects]
    for x, y in pairs:
        c, i1, i2 = src.coproduct(x, y)
        cmp_map = tgt.cotuple(F.arr(i1), F.arr(i2))
        rep.record(tgt.find_inverse(cmp_map) is not None,
                   "coproduct comparison at (%r, %r)" % (x, y))
    return rep


def check_category_axioms(cat, report=None, objects=None):
    """Identity and associativity laws over the listed objects (for table
    categories and negative tests)."""
    rep = report or CheckReport("category axioms")
    objs = cat.objects if objects is None else objects
    for x in objs:
        idx = cat.identity(x)
        for y in objs:
            for f in cat.hom(x, y):
                rep.record(cat.then(idx, f) == f, "left identity at %r" % (f,))
                rep.record(cat.then(f, cat.identity(y)) == f,
                           "right identity at %r" % (f,))
    for w in objs:
        for x in objs:
            for f in cat.hom(w, x):
                for y in objs:
                    for g in cat.hom(x, y):
                        for z in objs:
                            for h in cat.hom(y, z):
                                rep.record(
                                    cat.then(cat.then(f, g), h)
                                    == cat.then(f, cat.then(g, h)),
                                    "associativity at (%r,%r,%r)" % (f, g, h))
    return rep
