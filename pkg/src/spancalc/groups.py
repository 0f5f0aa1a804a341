"""Finite groups as multiplication tables, with subgroup machinery.

Group elements are the integers 0..order-1.  The multiplication convention is
``mul(a, b) = a*b`` with actions on the left, so ``(a*b).x = a.(b.x)``.
Subgroups are sorted tuples of element indices.
"""

from __future__ import annotations

import itertools
from functools import lru_cache


class SizeError(ValueError):
    """Group order exceeds the configured bound."""


DEFAULT_ORDER_BOUND = 24

Subgroup = tuple  # sorted tuple of element indices


class FiniteGroup:

    def __init__(self, table, name=None, check=True):
        self.table = tuple(tuple(int(v) for v in row) for row in table)
        self.order = len(self.table)
        self.name = name or "G%d" % self.order
        self.identity = self._find_identity()
        self.inverse = tuple(self._find_inverse(a) for a in range(self.order))
        if check:
            self._check()

    # -- construction -----------------------------------------------------

    @classmethod
    def from_generator_perms(cls, degree, generators, name=None):
        """Close permutation generators (0-based perms of {0..degree-1})."""
        idperm = tuple(range(degree))
        gens = [tuple(int(v) for v in p) for p in generators]
        for p in gens:
            if sorted(p) != list(idperm):
                raise ValueError("generator is not a permutation of 0..%d" % (degree - 1))
        elems = [idperm]
        seen = {idperm}
        frontier = [idperm]
        while frontier:
            new = []
            for p in frontier:
                for g in gens:
                    q = tuple(g[p[i]] for i in range(degree))
                    if q not in seen:
                        seen.add(q)
                        new.append(q)
            new.sort()
            elems.extend(new)
            frontier = new
        index = {p: i for i, p in enumerate(elems)}
        table = [
            [index[tuple(a[b[i]] for i in range(degree))] for b in elems]
            for a in elems
        ]
        G = cls(table, name=name)
        G.perms = tuple(elems)
        return G

    @classmethod
    def cyclic(cls, n):
        table = [[(a + b) % n for b in range(n)] for a in range(n)]
        return cls(table, name="C%d" % n)

    @classmethod
    def symmetric(cls, n):
        if n <= 1:
            return cls([[0]], name="S%d" % n)
        gens = [tuple([1, 0] + list(range(2, n)))]
        if n > 2:
            gens.append(tuple(list(range(1, n)) + [0]))
        return cls.from_generator_perms(n, gens, name="S%d" % n)

    @classmethod
    def direct_product(cls, G, H):
        n, m = G.order, H.order
        table = [
            [(G.table[a][c] * m + H.table[b][d]) for c in range(n) for d in range(m)]
            for a in range(n) for b in range(m)
        ]
        return cls(table, name="%sx%s" % (G.name, H.name))

    @classmethod
    def klein_four(cls):
        K = cls.direct_product(cls.cyclic(2), cls.cyclic(2))
        K.name = "C2xC2"
        return K

    # -- internals ---------------------------------------------------------

    def _find_identity(self):
        n = self.order
        for e in range(n):
            if all(self.table[e][a] == a and self.table[a][e] == a for a in range(n)):
                return e
        raise ValueError("no identity element")

    def _find_inverse(self, a):
        e = self.identity
        for b in range(self.order):
            if self.table[a][b] == e and self.table[b][a] == e:
                return b
        raise ValueError("element %d has no inverse" % a)

    def _check(self):
        n = self.order
        for row in self.table:
            if len(row) != n or any(not 0 <= v < n for v in row):
                raise ValueError("malformed multiplication table")
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    if self.table[self.table[a][b]][c] != self.table[a][self.table[b][c]]:
                        raise ValueError("table is not associative at (%d,%d,%d)" % (a, b, c))

    # -- basics ------------------------------------------------------------

    def mul(self, a, b):
        return self.table[a][b]

    def inv(self, a):
        return self.inverse[a]

    def conj(self, g, a):
        """g a g^-1."""
        return self.table[self.table[g][a]][self.inverse[g]]

    @property
    def elements(self):
        return range(self.order)

    def __eq__(self, other):
        return isinstance(other, FiniteGroup) and self.table == other.table

    def __hash__(self):
        return hash(self.table)

    def __repr__(self):
        return "FiniteGroup(%s, order=%d)" % (self.name, self.order)

    # -- subgroups -----------------------------------------------------------

    def closure(self, gens):
        """Subgroup generated by ``gens``, as a sorted tuple."""
        elems = {self.identity}
        frontier = list(set(gens) | {self.identity})
        elems.update(frontier)
        while frontier:
            new = []
            for a in frontier:
                for b in list(elems):
                    for c in (self.table[a][b], self.table[b][a], self.inverse[a]):
                        if c not in elems:
                            elems.add(c)
                            new.append(c)
            frontier = new
        return tuple(sorted(elems))

    def is_subgroup(self, elems):
        s = set(elems)
        if self.identity not in s:
            return False
        return all(self.table[a][b] in s and self.inverse[a] in s for a in s for b in s)

    def subgroups(self, bound=DEFAULT_ORDER_BOUND):
        """All subgroups, sorted by (order, elements).

        Cyclic closures first, then pairwise joins to a fixed point; every
        subgroup is a join of cyclic ones, so this is complete.
        """
        if self.order > bound:
            raise SizeError(
                "group order %d exceeds bound %d" % (self.order, bound))
        return self._subgroups_cached()

    @lru_cache(maxsize=None)
    def _subgroups_cached(self):
        found = {self.closure([a]) for a in self.elements}
        while True:
            new = set()
            for A, B in itertools.combinations(sorted(found), 2):
                J = self.closure(A + B)
                if J not in found:
                    new.add(J)
            if not new:
                break
            found |= new
        return tuple(sorted(found, key=lambda s: (len(s), s)))

    def conjugate_subgroup(self, g, H):
        return tuple(sorted(self.conj(g, h) for h in H))

    def conjugacy_classes_of_subgroups(self, bound=DEFAULT_ORDER_BOUND):
        """Partition of all subgroups into conjugacy classes.

        Returns a list of (representative, members); the representative is the
        least member under (order, elements).
        """
        subs = self.subgroups(bound)
        remaining = list(subs)
        classes = []
        while remaining:
            H = remaining[0]
            members = sorted({self.conjugate_subgroup(g, H) for g in self.elements},
                             key=lambda s: (len(s), s))
            classes.append((members[0], tuple(members)))
            remaining = [K for K in remaining if K not in members]
        classes.sort(key=lambda c: (len(c[0]), c[0]))
        return classes

    def normalizer(self, H):
        Hs = set(H)
        return tuple(sorted(g for g in self.elements
                            if all(self.conj(g, h) in Hs for h in H)))

    def cosets(self, H, ambient=None):
        """Left cosets gH inside ``ambient`` (default: the whole group),
        as frozensets ordered by least element."""
        amb = self.elements if ambient is None else ambient
        seen = set()
        out = []
        for g in amb:
            c = frozenset(self.table[g][h] for h in H)
            if c not in seen:
                seen.add(c)
                out.append(c)
        out.sort(key=min)
        return out

    def coset_of(self, g, H):
        return frozenset(self.table[g][h] for h in H)

    def weyl_group(self, H):
        """N_G(H)/H as a FiniteGroup, with canonical coset representatives.

        Returns (W, reps) where reps[i] is the least element of the i-th coset;
        W element i acts on H-fixed points through reps[i].
        """
        N = self.normalizer(H)
        cosets = self.cosets(H, ambient=N)
        reps = [min(c) for c in cosets]
        index = {c: i for i, c in enumerate(cosets)}
        table = [
            [index[self.coset_of(self.table[a][b], H)] for b in reps]
            for a in reps
        ]
        W = FiniteGroup(table, name="W(%s|%s)" % (self.name, ",".join(map(str, H))))
        return W, tuple(reps)

    def element_order(self, a):
        k, x = 1, a
        while x != self.identity:
            x = self.table[x][a]
            k += 1
        return k
