"""Finite G-sets on underlying set {1..n} and equivariant maps.

Every G-set lives on {1, ..., n}; the action of group element g is a stored
permutation.  Products, coproducts and pullbacks are given by fixed formulas
(lexicographic enumeration, then 1-based renumbering) so that they are
strictly associative as operations on these concrete models.
"""

from __future__ import annotations

import itertools
from .groups import FiniteGroup


class GSet:
    """A finite G-set.  ``action[g][x-1]`` is g.x, 1-based."""

    __slots__ = ("group", "size", "action", "_hash")

    def __init__(self, group, action, check=True):
        self.group = group
        self.action = tuple(tuple(int(v) for v in row) for row in action)
        self.size = len(self.action[0]) if self.action else 0
        self._hash = None
        if check:
            self._check()

    def _check(self):
        G = self.group
        if len(self.action) != G.order:
            raise ValueError("action table must have one row per group element")
        n = self.size
        for row in self.action:
            if sorted(row) != list(range(1, n + 1)):
                raise ValueError("action rows must be permutations of 1..%d" % n)
        for g in G.elements:
            for h in G.elements:
                gh = G.table[g][h]
                for x in range(1, n + 1):
                    if self.act(g, self.act(h, x)) != self.act(gh, x):
                        raise ValueError(
                            "action is not a homomorphism at g=%d h=%d x=%d" % (g, h, x))
        e = G.identity
        if self.action[e] != tuple(range(1, n + 1)):
            raise ValueError("identity must act trivially")

    def act(self, g, x):
        return self.action[g][x - 1]

    @property
    def elements(self):
        return range(1, self.size + 1)

    def __eq__(self, other):
        return (isinstance(other, GSet) and self.group == other.group
                and self.action == other.action)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.group, self.action))
        return self._hash

    def __repr__(self):
        return "GSet(size=%d over %s)" % (self.size, self.group.name)

    # -- orbit structure ---------------------------------------------------

    def orbit(self, x):
        return tuple(sorted({self.act(g, x) for g in self.group.elements}))

    def orbits(self):
        seen, out = set(), []
        for x in self.elements:
            if x not in seen:
                o = self.orbit(x)
                seen.update(o)
                out.append(o)
        return out

    def stabilizer(self, x):
        return tuple(sorted(g for g in self.group.elements if self.act(g, x) == x))

    def fixed_points(self, H):
        return tuple(x for x in self.elements
                     if all(self.act(h, x) == x for h in H))

    def isotropy_stratum(self, H):
        """Points whose stabilizer is exactly H."""
        Ht = tuple(sorted(H))
        return tuple(x for x in self.elements if self.stabilizer(x) == Ht)

    def restrict_action(self, elems):
        """The induced action on an invariant subset, renumbered in order."""
        elems = sorted(elems)
        pos = {x: i + 1 for i, x in enumerate(elems)}
        action = [[pos[self.act(g, x)] for x in elems] for g in self.group.elements]
        return GSet(self.group, action, check=False)

    def is_transitive(self):
        return self.size > 0 and len(self.orbit(1)) == self.size


class GMap:
    """An equivariant map of G-sets; ``values[x-1]`` is the image of x."""

    __slots__ = ("source", "target", "values", "_hash")

    def __init__(self, source, target, values, check=True):
        self.source = source
        self.target = target
        self.values = tuple(int(v) for v in values)
        self._hash = None
        if check:
            self._check()

    def _check(self):
        if len(self.values) != self.source.size:
            raise ValueError("value list has wrong length")
        if any(not 1 <= v <= self.target.size for v in self.values):
            raise ValueError("values out of range")
        for g in self.source.group.elements:
            for x in self.source.elements:
                if self(self.source.act(g, x)) != self.target.act(g, self(x)):
                    raise ValueError("map is not equivariant at g=%d x=%d" % (g, x))

    def __call__(self, x):
        return self.values[x - 1]

    def __eq__(self, other):
        return (isinstance(other, GMap) and self.source == other.source
                and self.target == other.target and self.values == other.values)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.source, self.target, self.values))
        return self._hash

    def __repr__(self):
        return "GMap(%r -> %r, %s)" % (self.source, self.target, self.values)

    def then(self, other):
        if self.target != other.source:
            raise ValueError("maps are not composable")
        return GMap(self.source, other.target,
                    [other(self(x)) for x in self.source.elements], check=False)

    @classmethod
    def identity(cls, X):
        return cls(X, X, list(X.elements), check=False)

    def is_injective(self):
        return len(set(self.values)) == self.source.size

    def is_bijective(self):
        return self.is_injective() and self.source.size == self.target.size


# -- standard constructions ---------------------------------------------------


def trivial_gset(G, n=1):
    return GSet(G, [list(range(1, n + 1))] * G.order, check=False)


def regular_gset(G):
    """G acting on itself; set element g+1 corresponds to group element g."""
    action = [[G.table[g][x] + 1 for x in G.elements] for g in G.elements]
    return GSet(G, action, check=False)


def coset_gset(G, H):
    """The orbit G/H with cosets ordered by least element.

    Returns (X, quot) where quot is the quotient map from the regular G-set.
    """
    cosets = G.cosets(H)
    index = {c: i + 1 for i, c in enumerate(cosets)}
    reps = [min(c) for c in cosets]
    action = [[index[G.coset_of(G.table[g][r], H)] for r in reps] for g in G.elements]
    X = GSet(G, action, check=False)
    reg = regular_gset(G)
    quot = GMap(reg, X, [index[G.coset_of(g, H)] for g in G.elements], check=False)
    return X, quot


def coset_rep(G, H, x):
    """Least group element representing the x-th coset of G/H."""
    return min(G.cosets(H)[x - 1])


def product_gset(X, Y):
    """X x Y on lexicographically ordered pairs; returns (P, p1, p2)."""
    if X.group != Y.group:
        raise ValueError("mismatched groups")
    pairs = [(x, y) for x in X.elements for y in Y.elements]
    index = {p: i + 1 for i, p in enumerate(pairs)}
    action = [[index[(X.act(g, x), Y.act(g, y))] for (x, y) in pairs]
              for g in X.group.elements]
    P = GSet(X.group, action, check=False)
    p1 = GMap(P, X, [x for (x, _) in pairs], check=False)
    p2 = GMap(P, Y, [y for (_, y) in pairs], check=False)
    return P, p1, p2


def coproduct_gset(X, Y):
    """X disjoint-union Y, X-block first; returns (C, in1, in2)."""
    if X.group != Y.group:
        raise ValueError("mismatched groups")
    n = X.size
    action = [list(X.action[g]) + [v + n for v in Y.action[g]]
              for g in X.group.elements]
    C = GSet(X.group, action, check=False)
    in1 = GMap(X, C, list(X.elements), check=False)
    in2 = GMap(Y, C, [y + n for y in Y.elements], check=False)
    return C, in1, in2


def lex_pullback(f, g):
    """Pullback of f: A -> Z, g: B -> Z over their common target.

    The underlying set is {(a, b) | f(a) = g(b)} enumerated in lexicographic
    order (a most significant) and renumbered 1..m.  Returns (P, pA, pB).
    """
    if f.target != g.target:
        raise ValueError("pullback legs must share a target")
    A, B = f.source, g.source
    pairs = [(a, b) for a in A.elements for b in B.elements if f(a) == g(b)]
    index = {p: i + 1 for i, p in enumerate(pairs)}
    action = [[index[(A.act(h, a), B.act(h, b))] for (a, b) in pairs]
              for h in A.group.elements]
    P = GSet(A.group, action, check=False)
    pA = GMap(P, A, [a for (a, _) in pairs], check=False)
    pB = GMap(P, B, [b for (_, b) in pairs], check=False)
    return P, pA, pB


# -- equivariant map enumeration ----------------------------------------------


def orbit_reps(X):
    return [min(o) for o in X.orbits()]


def hom_gsets(X, Y):
    """All equivariant maps X -> Y.

    Built orbitwise: the image of an orbit representative must be fixed by the
    representative's stabilizer, and determines the map on the whole orbit.
    """
    G = X.group
    reps = orbit_reps(X)
    choices = []
    for r in reps:
        stab = X.stabilizer(r)
        choices.append([y for y in Y.elements
                        if all(Y.act(h, y) == y for h in stab)])
    maps = []
    for combo in itertools.product(*choices):
        values = [0] * X.size
        ok = True
        for r, y in zip(reps, combo):
            for g in G.elements:
                xx = X.act(g, r)
                yy = Y.act(g, y)
                if values[xx - 1] == 0:
                    values[xx - 1] = yy
                elif values[xx - 1] != yy:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            maps.append(GMap(X, Y, values, check=False))
    return maps


def gsets_isomorphic(X, Y):
    """Equivariant bijection X -> Y, or None."""
    if X.size != Y.size:
        return None
    for f in hom_gsets(X, Y):
        if f.is_bijective():
            return f
    return None
