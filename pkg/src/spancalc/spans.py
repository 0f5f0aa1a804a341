"""Spans of finite G-sets, their strict composition model, and K0 calculus.

A span from P to Q is a diagram P <- A -> Q of G-sets.  Composition takes the
pullback of the inner legs with a fixed enumeration convention: the pairs of
``compose(S1, S2)`` are ordered with the S2-apex coordinate most significant.
Under this convention composition is strictly associative on the nose, the
non-whiskered identity span is a strict left unit (and only that), and the
formal unit object is a strict two-sided unit.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

from .groups import FiniteGroup
from .gsets import (GSet, GMap, coset_gset, product_gset, coproduct_gset,
                    lex_pullback, trivial_gset)


class OrbitMismatchError(ValueError):
    """Spans composed over different middle objects."""


@lru_cache(maxsize=None)
def orbit_gset(G, H):
    return coset_gset(G, H)[0]


class Span:
    """A span left <- apex -> right; ``left_sub``/``right_sub`` record the
    subgroup when the corresponding end is a coset orbit G/H.

    A formal unit span (``unit=True``) carries no apex data, has equal orbit
    ends, and is a strict two-sided unit for composition.
    """

    __slots__ = ("left", "right", "left_sub", "right_sub",
                 "apex", "left_leg", "right_leg", "unit", "_hash")

    def __init__(self, left, right, apex, left_leg, right_leg,
                 left_sub=None, right_sub=None, unit=False, check=True):
        self.left = left
        self.right = right
        self.left_sub = left_sub
        self.right_sub = right_sub
        self.apex = apex
        self.left_leg = left_leg
        self.right_leg = right_leg
        self.unit = unit
        self._hash = None
        if check and not unit:
            if left_leg.source != apex or right_leg.source != apex:
                raise ValueError("legs must start at the apex")
            if left_leg.target != left or right_leg.target != right:
                raise ValueError("legs must land in the stated ends")
        if unit and left != right:
            raise ValueError("formal units need equal ends")

    @property
    def group(self):
        return self.left.group

    def __eq__(self, other):
        if not isinstance(other, Span):
            return False
        if self.unit or other.unit:
            return self.unit == other.unit and self.left == other.left
        return (self.left == other.left and self.right == other.right
                and self.apex == other.apex
                and self.left_leg == other.left_leg
                and self.right_leg == other.right_leg)

    def __hash__(self):
        if self._hash is None:
            if self.unit:
                self._hash = hash(("unit", self.left))
            else:
                self._hash = hash((self.left, self.right, self.apex,
                                   self.left_leg.values, self.right_leg.values))
        return self._hash

    def __repr__(self):
        if self.unit:
            return "Span(unit at %r)" % (self.left,)
        return "Span(apex=%d: %r <- -> %r)" % (self.apex.size, self.left, self.right)

    def materialize(self):
        """The formal unit as the identity span; other spans unchanged."""
        if not self.unit:
            return self
        return identity_span_on(self.left, self.left_sub)


def identity_span_on(X, sub=None):
    idm = GMap.identity(X)
    return Span(X, X, X, idm, idm, left_sub=sub, right_sub=sub, check=False)


def identity_span(G, H):
    """The non-whiskered identity span on G/H (a strict left unit only)."""
    return identity_span_on(orbit_gset(G, tuple(H)), tuple(H))


def formal_unit(G, H):
    X = orbit_gset(G, tuple(H))
    return Span(X, X, None, None, None, left_sub=tuple(H), right_sub=tuple(H),
                unit=True, check=False)


def orbit_span(G, H, K, apex, left_leg, right_leg):
    return Span(orbit_gset(G, tuple(H)), orbit_gset(G, tuple(K)), apex,
                left_leg, right_leg, left_sub=tuple(H), right_sub=tuple(K),
                check=False)


# -- composition ---------------------------------------------------------------


def span_compose(S1, S2):
    """Composite of S1: P -> Q and S2: Q -> R.

    The apex is the pullback of S2's left leg against S1's right leg, pairs
    ordered with the S2 coordinate most significant; this makes composition
    strictly associative and the formal unit a strict two-sided unit.
    """
    if S1.right != S2.left:
        raise OrbitMismatchError("middle objects do not match")
    if S1.unit:
        return S2
    if S2.unit:
        return S1
    P, to2, to1 = lex_pullback(S2.left_leg, S1.right_leg)
    return Span(S1.left, S2.right, P,
                to1.then(S1.left_leg), to2.then(S2.right_leg),
                left_sub=S1.left_sub, right_sub=S2.right_sub, check=False)


def compose_pair_index(S1, S2):
    """Decode/encode between the materialized composite apex and the
    (S2-apex, S1-apex) pairs it enumerates.

    Returns (pairs, index) where pairs[z-1] = (b, a) and index[(b, a)] = z.
    """
    M1, M2 = S1.materialize(), S2.materialize()
    P, to2, to1 = lex_pullback(M2.left_leg, M1.right_leg)
    pairs = [(to2(z), to1(z)) for z in P.elements]
    index = {p: i + 1 for i, p in enumerate(pairs)}
    return pairs, index


def span_coproduct(S, T):
    """Chosen coproduct of parallel spans: apex concatenation."""
    Sm, Tm = S.materialize(), T.materialize()
    if Sm.left != Tm.left or Sm.right != Tm.right:
        raise ValueError("coproduct needs parallel spans")
    C, in1, in2 = coproduct_gset(Sm.apex, Tm.apex)
    ll = GMap(C, Sm.left, [*Sm.left_leg.values, *Tm.left_leg.values], check=False)
    rl = GMap(C, Sm.right, [*Sm.right_leg.values, *Tm.right_leg.values], check=False)
    out = Span(Sm.left, Sm.right, C, ll, rl,
               left_sub=S.left_sub, right_sub=S.right_sub, check=False)
    return out, in1, in2


def empty_span(left, right, left_sub=None, right_sub=None):
    G = left.group
    A = GSet(G, [[] for _ in G.elements], check=False)
    return Span(left, right, A, GMap(A, left, [], check=False),
                GMap(A, right, [], check=False),
                left_sub=left_sub, right_sub=right_sub, check=False)


# -- morphisms of spans ---------------------------------------------------------


class SpanMorphism:
    """A map of parallel spans: an equivariant apex map commuting with both
    legs.  Formal-unit endpoints are handled through their materialization."""

    __slots__ = ("src", "dst", "apex_map", "_hash")

    def __init__(self, src, dst, apex_map, check=True):
        self.src = src
        self.dst = dst
        self.apex_map = apex_map
        self._hash = None
        if check:
            Sm, Tm = src.materialize(), dst.materialize()
            if apex_map.source != Sm.apex or apex_map.target != Tm.apex:
                raise ValueError("apex map endpoints are wrong")
            for a in Sm.apex.elements:
                if (Tm.left_leg(apex_map(a)) != Sm.left_leg(a)
                        or Tm.right_leg(apex_map(a)) != Sm.right_leg(a)):
                    raise ValueError("apex map does not commute with the legs")

    def __call__(self, a):
        return self.apex_map(a)

    def __eq__(self, other):
        return (isinstance(other, SpanMorphism) and self.src == other.src
                and self.dst == other.dst and self.apex_map == other.apex_map)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.src, self.dst, self.apex_map))
        return self._hash

    def __repr__(self):
        return "SpanMorphism(%r -> %r)" % (self.src, self.dst)

    def then(self, other):
        if self.dst != other.src:
            raise ValueError("morphisms not composable")
        return SpanMorphism(self.src, other.dst,
                            self.apex_map.then(other.apex_map), check=False)

    @classmethod
    def identity(cls, S):
        return cls(S, S, GMap.identity(S.materialize().apex), check=False)

    def is_iso(self):
        return self.apex_map.is_bijective()


def span_hom(S, T):
    """All span morphisms S -> T."""
    Sm, Tm = S.materialize(), T.materialize()
    if Sm.left != Tm.left or Sm.right != Tm.right:
        return []
    from .gsets import hom_gsets
    out = []
    for f in hom_gsets(Sm.apex, Tm.apex):
        if all(Tm.left_leg(f(a)) == Sm.left_leg(a)
               and Tm.right_leg(f(a)) == Sm.right_leg(a)
               for a in Sm.apex.elements):
            out.append(SpanMorphism(S, T, f, check=False))
    return out


def _unit_right_ident(S):
    """The renumbering compose(S, Id) -> placement of S, as a SpanMorphism
    compose(S, Id_materialized) <- S.  (Left units are strict, right are not.)"""
    M = S.materialize()
    idm = identity_span_on(M.right, S.right_sub)
    C = span_compose(M, idm)
    pairs, index = compose_pair_index(M, idm)
    f = GMap(M.apex, C.apex, [index[(M.right_leg(a), a)] for a in M.apex.elements],
             check=False)
    return SpanMorphism(S, C, f, check=False)


def span_compose_morphisms(m1, m2):
    """The composition bifunctor on morphisms.

    Given m1: S1 -> S1' and m2: S2 -> S2', returns the induced morphism
    compose(S1, S2) -> compose(S1', S2'), with the canonical identifications
    when any endpoint is a formal unit.
    """
    S1, S1p, S2, S2p = m1.src, m1.dst, m2.src, m2.dst
    src = span_compose(S1, S2)
    dst = span_compose(S1p, S2p)
    # materialized-level map
    M1, M1p, M2, M2p = (S1.materialize(), S1p.materialize(),
                        S2.materialize(), S2p.materialize())
    Cm = span_compose(M1, M2)
    Cmp = span_compose(M1p, M2p)
    pairs, _ = compose_pair_index(M1, M2)
    _, indexp = compose_pair_index(M1p, M2p)
    fm = GMap(Cm.apex, Cmp.apex,
              [indexp[(m2(b), m1(a))] for (b, a) in pairs], check=False)
    phi = SpanMorphism(Cm, Cmp, fm, check=False)
    # identifications src -> Cm and dst -> Cmp
    left_ident = _composition_ident(S1, S2)      # src -> Cm
    right_ident = _composition_ident(S1p, S2p)   # dst -> Cmp
    inv = _invert_span_morphism(right_ident)
    return SpanMorphism(src, dst,
                        left_ident.apex_map.then(phi.apex_map).then(inv.apex_map),
                        check=False)


def _composition_ident(S1, S2):
    """Canonical iso compose(S1, S2) -> compose(materialized) as a morphism."""
    src = span_compose(S1, S2)
    if not S1.unit and not S2.unit:
        return SpanMorphism(src, src, GMap.identity(src.materialize().apex),
                            check=False)
    if S1.unit and S2.unit:
        # compose = formal unit; materialized composite equals Id_mat on the nose
        M = span_compose(S1.materialize(), S2.materialize())
        return SpanMorphism(src, M, GMap.identity(M.apex), check=False)
    if S1.unit:
        # strict left unit: compose(Id_mat, S2) == S2 exactly
        M = span_compose(S1.materialize(), S2.materialize())
        return SpanMorphism(src, M, GMap.identity(M.apex), check=False)
    return _unit_right_ident(S1)


def _invert_span_morphism(m):
    f = m.apex_map
    inv = [0] * f.target.size
    for a in f.source.elements:
        inv[f(a) - 1] = a
    if any(v == 0 for v in inv):
        raise ValueError("morphism is not invertible")
    return SpanMorphism(m.dst, m.src, GMap(f.target, f.source, inv, check=False),
                        check=False)


# -- canonical iso-classes ------------------------------------------------------


def _canon_orbit_label(G, Y, L, y):
    """Canonical representative of (L, y) under simultaneous conjugation."""
    best = None
    for g in G.elements:
        cand = (G.conjugate_subgroup(g, L), Y.act(g, y))
        if best is None or cand < best:
            best = cand
    return best


@lru_cache(maxsize=None)
def orbit_map_classes(Y):
    """Iso-classes of orbit maps into Y: pairs (L, y in Y^L) mod conjugation.

    Deterministic order: larger stabilizers first, then label.
    """
    G = Y.group
    labels = set()
    for L in G.subgroups():
        for y in Y.fixed_points(L):
            labels.add(_canon_orbit_label(G, Y, L, y))
    return tuple(sorted(labels, key=lambda lab: (-len(lab[0]), lab[0], lab[1])))


class SpanClass:
    """Iso-class of a span: multiset of orbit-map labels of its apex over the
    product of the two ends."""

    __slots__ = ("left", "right", "multiset")

    def __init__(self, left, right, multiset):
        self.left = left
        self.right = right
        self.multiset = tuple(sorted(multiset.items()))

    def counts(self):
        return dict(self.multiset)

    def __eq__(self, other):
        return (isinstance(other, SpanClass) and self.left == other.left
                and self.right == other.right and self.multiset == other.multiset)

    def __hash__(self):
        return hash((self.left, self.right, self.multiset))

    def __repr__(self):
        return "SpanClass(%s)" % (self.multiset,)


def canonical_class(S):
    """Decompose the apex into orbits and record each orbit's label.

    Two spans have equal classes iff they are equivariantly isomorphic over
    their ends (validated against brute force in the test suite).
    """
    M = S.materialize()
    G = M.group
    Y, p1, p2 = product_gset(M.left, M.right)
    pair_index = {(p1(z), p2(z)): z for z in Y.elements}
    counts = {}
    for orbit in M.apex.orbits():
        r = min(orbit)
        L = M.apex.stabilizer(r)
        y = pair_index[(M.left_leg(r), M.right_leg(r))]
        lab = _canon_orbit_label(G, Y, L, y)
        counts[lab] = counts.get(lab, 0) + 1
    return SpanClass(M.left, M.right, counts)


def span_isomorphic_bruteforce(S, T):
    """Exhaustive search for an equivariant apex bijection commuting with the
    legs.  Independent of canonical_class; intended for apex size <= 8."""
    Sm, Tm = S.materialize(), T.materialize()
    if (Sm.left, Sm.right) != (Tm.left, Tm.right) or Sm.apex.size != Tm.apex.size:
        return None
    A, B = Sm.apex, Tm.apex
    n = A.size
    G = A.group
    if n == 0:
        return GMap(A, B, [], check=False)

    def close(assign, used, x, y):
        """Force x -> y and its equivariant consequences; None on conflict."""
        stack = [(x, y)]
        while stack:
            a, b = stack.pop()
            if a in assign:
                if assign[a] != b:
                    return None
                continue
            if b in used:
                return None
            if (Tm.left_leg(b) != Sm.left_leg(a)
                    or Tm.right_leg(b) != Sm.right_leg(a)):
                return None
            assign[a] = b
            used.add(b)
            for g in G.elements:
                stack.append((A.act(g, a), B.act(g, b)))
        return assign

    def search(assign, used):
        pending = [x for x in A.elements if x not in assign]
        if not pending:
            return assign
        x = pending[0]
        for y in B.elements:
            if y in used:
                continue
            res = close(dict(assign), set(used), x, y)
            if res is not None:
                full = search(res, {res[k] for k in res})
                if full is not None:
                    return full
        return None

    found = search({}, set())
    if found is None:
        return None
    return GMap(A, B, [found[x] for x in A.elements], check=False)


# -- Burnside basis, composition tensors, table of marks ------------------------


@lru_cache(maxsize=None)
def burnside_basis(G, H, K):
    """Canonical labels for iso-classes of orbit spans from G/H to G/K."""
    Y, _, _ = product_gset(orbit_gset(G, tuple(H)), orbit_gset(G, tuple(K)))
    return orbit_map_classes(Y)


def unit_label(G, H):
    """The label of the identity span's orbit (diagonal of G/H x G/H)."""
    X = orbit_gset(G, tuple(H))
    Y, p1, p2 = product_gset(X, X)
    pair_index = {(p1(z), p2(z)): z for z in Y.elements}
    return _canon_orbit_label(G, Y, tuple(H), pair_index[(1, 1)])


@lru_cache(maxsize=None)
def basis_span(G, H, K, label):
    """Materialize a basis label (L, y) as the orbit span G/L -> G/H x G/K."""
    L, y = label
    XH = orbit_gset(G, tuple(H))
    XK = orbit_gset(G, tuple(K))
    Y, p1, p2 = product_gset(XH, XK)
    A, _ = coset_gset(G, L)
    cosets = G.cosets(L)
    reps = [min(c) for c in cosets]
    ll = GMap(A, XH, [p1(Y.act(r, y)) for r in reps], check=False)
    rl = GMap(A, XK, [p2(Y.act(r, y)) for r in reps], check=False)
    return Span(XH, XK, A, ll, rl, left_sub=tuple(H), right_sub=tuple(K),
                check=False)


def k0_composition(G, H, K, L):
    """Integer tensor T[i][j][k]: composite of the i-th (H,K) basis span with
    the j-th (K,L) basis span, expanded in the (H,L) basis."""
    bHK = burnside_basis(G, tuple(H), tuple(K))
    bKL = burnside_basis(G, tuple(K), tuple(L))
    bHL = burnside_basis(G, tuple(H), tuple(L))
    pos = {lab: i for i, lab in enumerate(bHL)}
    T = []
    for lab1 in bHK:
        row = []
        for lab2 in bKL:
            comp = span_compose(basis_span(G, tuple(H), tuple(K), lab1),
                                basis_span(G, tuple(K), tuple(L), lab2))
            vec = [0] * len(bHL)
            for lab, mult in canonical_class(comp).counts().items():
                vec[pos[lab]] += mult
            row.append(vec)
        T.append(row)
    return T


def expand_in_basis(S):
    """Coordinates of canonical_class(S) in the Burnside basis of its ends."""
    G = S.group
    basis = burnside_basis(G, tuple(S.left_sub), tuple(S.right_sub))
    pos = {lab: i for i, lab in enumerate(basis)}
    vec = [0] * len(basis)
    for lab, mult in canonical_class(S).counts().items():
        vec[pos[lab]] += mult
    return vec


def table_of_marks(G):
    """Matrix m[(H)][(K)] = |(G/H)^K| over subgroup-class representatives,
    ordered by ascending class order; lower triangular, diagonal |WH|."""
    classes = G.conjugacy_classes_of_subgroups()
    reps = [rep for rep, _ in classes]
    matrix = []
    for H in reps:
        X = orbit_gset(G, H)
        matrix.append([len(X.fixed_points(K)) for K in reps])
    return reps, matrix


def tom_dieck_pi0(X):
    """The orbit-level splitting bijection for a finite G-set X.

    Left basis: iso-classes of orbit maps into X.  Right basis: for each
    subgroup-class representative H, the Weyl orbits of X^H.  Returns
    (left, right, pairs) where pairs is the explicit bijection.
    """
    G = X.group
    left = orbit_map_classes(X)
    classes = G.conjugacy_classes_of_subgroups()
    right = []
    weyl = {}
    for H, _ in classes:
        W, reps = G.weyl_group(H)
        weyl[H] = reps
        fp = X.fixed_points(H)
        seen = set()
        for x in fp:
            orb = tuple(sorted({X.act(r, x) for r in reps}))
            if orb not in seen:
                seen.add(orb)
                right.append((H, min(orb)))
    class_rep_of = {}
    for rep, members in classes:
        for M in members:
            class_rep_of[M] = rep
    pairs = []
    for (L, y) in left:
        H0 = class_rep_of[L]
        g0 = min(g for g in G.elements if G.conjugate_subgroup(g, L) == H0)
        x0 = X.act(g0, y)
        orb = {X.act(r, x0) for r in weyl[H0]}
        pairs.append(((L, y), (H0, min(orb))))
    return left, tuple(right), tuple(pairs)


# -- span generation for test pools ---------------------------------------------


def sum_of_basis_spans(G, H, K, labels):
    """Disjoint union of basis spans in the given label order."""
    spans = [basis_span(G, tuple(H), tuple(K), lab) for lab in labels]
    if not spans:
        XH = orbit_gset(G, tuple(H))
        XK = orbit_gset(G, tuple(K))
        return empty_span(XH, XK, tuple(H), tuple(K))
    out = spans[0]
    for nxt in spans[1:]:
        out = span_coproduct(out, nxt)[0]
    return out


def canonical_span_pool(G, H, K, max_apex, max_orbits=None, include_unit=True,
                        include_empty=False):
    """Canonical-form spans from G/H to G/K with apex size <= max_apex:
    all multisets of basis spans within the bound (optionally orbit count
    capped), plus the formal unit on diagonal homs."""
    H, K = tuple(H), tuple(K)
    basis = burnside_basis(G, H, K)
    sizes = {lab: G.order // len(lab[0]) for lab in basis}
    pool = []
    if include_unit and H == K:
        pool.append(formal_unit(G, H))
    if include_empty:
        pool.append(sum_of_basis_spans(G, H, K, []))

    def grow(start, current, total):
        for i in range(start, len(basis)):
            lab = basis[i]
            t = total + sizes[lab]
            if t > max_apex:
                continue
            nxt = current + [lab]
            if max_orbits is None or len(nxt) <= max_orbits:
                pool.append(sum_of_basis_spans(G, H, K, nxt))
                grow(i, nxt, t)

    grow(0, [], 0)
    return pool
