"""Discrete retractive G-sets, their equivariant-functor models, and span
actions.

A retractive object over a G-set X is X plus a finite free part of globally
tagged integer points with an action of the relevant subgroup and an
equivariant projection to X.  The functor model (`HfpObject`) stores, per
coset of the subgroup, a free part, a projection, and the bijections induced
by the contractible-groupoid direction; a cocycle condition and a projection
condition make it a well-defined equivariant functor datum.

Span actions push these around: fibers of one leg index coproducts of values
along the other leg.  Coproducts use fixed injections (Cantor pairing for
fiber-indexed sums, even/odd interleaving for binary wedges); singleton fibers
keep their tags, which makes restriction-type actions and the materialized
identity span act as the literal identity.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

from .groups import FiniteGroup
from .gsets import GSet, GMap, coset_gset, product_gset
from .spans import Span, SpanMorphism, span_compose, compose_pair_index


class InvalidHfpError(ValueError):
    """Functor-datum axioms failed."""


def cantor_pair(a, b):
    return (a + b) * (a + b + 1) // 2 + b


def encode_summand(fiber_size, i, y):
    return y if fiber_size == 1 else cantor_pair(i, y)


@lru_cache(maxsize=None)
def coset_tables(G, K):
    """Shared coset data for the subgroup K: cosets (ordered by least
    element), element->coset index, the left-translation table, canonical
    representatives, and the functor-model representatives (identity coset
    represented by the identity element)."""
    cosets = G.cosets(K)
    elt_to_coset = {}
    for i, c in enumerate(cosets):
        for g in c:
            elt_to_coset[g] = i
    move = [[elt_to_coset[G.mul(u, min(cosets[c]))] for c in range(len(cosets))]
            for u in G.elements]
    reps = tuple(min(c) for c in cosets)
    c0 = elt_to_coset[G.identity]
    model_reps = tuple(G.identity if i == c0 else min(c)
                       for i, c in enumerate(cosets))
    return cosets, elt_to_coset, move, reps, c0, model_reps


# -- retractive objects ---------------------------------------------------------


class RetractiveGSet:
    """X plus a free part of tagged points with an H-action over X."""

    __slots__ = ("group", "subgroup", "base", "free", "action", "proj", "_hash")

    def __init__(self, group, subgroup, base, free, action, proj, check=True):
        self.group = group
        self.subgroup = tuple(subgroup)
        self.base = base
        self.free = tuple(sorted(free))
        self.action = {h: dict(action[h]) for h in self.subgroup}
        self.proj = dict(proj)
        self._hash = None
        if check:
            self._check()

    def _check(self):
        G, H = self.group, self.subgroup
        if not G.is_subgroup(H):
            raise ValueError("not a subgroup")
        tags = set(self.free)
        for h in H:
            if set(self.action[h]) != tags or set(self.action[h].values()) != tags:
                raise ValueError("action rows must permute the free part")
        e = G.identity
        if any(self.action[e][s] != s for s in tags):
            raise ValueError("identity must act trivially")
        for a in H:
            for b in H:
                ab = G.mul(a, b)
                for s in tags:
                    if self.action[a][self.action[b][s]] != self.action[ab][s]:
                        raise ValueError("free-part action is not a homomorphism")
        if set(self.proj) != tags:
            raise ValueError("projection must be defined on the free part")
        for h in H:
            for s in tags:
                if self.proj[self.action[h][s]] != self.base.act(h, self.proj[s]):
                    raise ValueError("projection is not equivariant")

    def act(self, h, s):
        return self.action[h][s]

    def key(self):
        return (self.subgroup, self.base, self.free,
                tuple(tuple(sorted(self.action[h].items())) for h in self.subgroup),
                tuple(sorted(self.proj.items())))

    def __eq__(self, other):
        return isinstance(other, RetractiveGSet) and self.key() == other.key()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.key())
        return self._hash

    def __repr__(self):
        return "RetractiveGSet(|free|=%d over %r)" % (len(self.free), self.base)

    def free_orbits(self):
        seen, out = set(), []
        for s in self.free:
            if s not in seen:
                orb = tuple(sorted({self.act(h, s) for h in self.subgroup}))
                seen.update(orb)
                out.append(orb)
        return out

    def stabilizer(self, s):
        return tuple(sorted(h for h in self.subgroup if self.act(h, s) == s))


class RetractiveMap:
    """A map over and under X: each free point goes to a free point of the
    target (value a tag) or collapses to the basepoint copy of its projection
    (value None).  Cofibration = all tags, injective; weak equivalence =
    bijection of free parts."""

    __slots__ = ("src", "dst", "values", "_hash")

    def __init__(self, src, dst, values, check=True):
        self.src = src
        self.dst = dst
        self.values = dict(values)
        self._hash = None
        if check:
            self._check()

    def _check(self):
        if (self.src.group, self.src.subgroup, self.src.base) != (
                self.dst.group, self.dst.subgroup, self.dst.base):
            raise ValueError("maps must stay over one base and subgroup")
        if set(self.values) != set(self.src.free):
            raise ValueError("map must be defined on the whole free part")
        for s, v in self.values.items():
            if v is not None:
                if v not in set(self.dst.free):
                    raise ValueError("value %r is not a target tag" % (v,))
                if self.dst.proj[v] != self.src.proj[s]:
                    raise ValueError("map does not respect the projection")
        for h in self.src.subgroup:
            for s in self.src.free:
                lhs = self.values[self.src.act(h, s)]
                rhs = self.values[s]
                rhs = None if rhs is None else self.dst.act(h, rhs)
                if lhs != rhs:
                    raise ValueError("map is not equivariant")

    def __call__(self, s):
        return self.values[s]

    def key(self):
        return (self.src.key(), self.dst.key(), tuple(sorted(
            self.values.items(), key=lambda kv: kv[0])))

    def __eq__(self, other):
        return isinstance(other, RetractiveMap) and self.key() == other.key()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.key())
        return self._hash

    def __repr__(self):
        return "RetractiveMap(%r -> %r)" % (self.src, self.dst)

    def then(self, other):
        vals = {}
        for s, v in self.values.items():
            vals[s] = None if v is None else other.values[v]
        return RetractiveMap(self.src, other.dst, vals, check=False)

    @classmethod
    def identity(cls, Y):
        return cls(Y, Y, {s: s for s in Y.free}, check=False)

    def is_cofibration(self):
        vals = [v for v in self.values.values()]
        return all(v is not None for v in vals) and len(set(vals)) == len(vals)

    def is_weak_equivalence(self):
        vals = [v for v in self.values.values()]
        return (all(v is not None for v in vals)
                and sorted(vals) == sorted(self.dst.free))


def wedge(Y, Z):
    """Chosen coproduct over X: even tags from Y, odd tags from Z."""
    free = [2 * s for s in Y.free] + [2 * s + 1 for s in Z.free]
    action = {h: {**{2 * s: 2 * Y.act(h, s) for s in Y.free},
                  **{2 * s + 1: 2 * Z.act(h, s) + 1 for s in Z.free}}
              for h in Y.subgroup}
    proj = {**{2 * s: Y.proj[s] for s in Y.free},
            **{2 * s + 1: Z.proj[s] for s in Z.free}}
    W = RetractiveGSet(Y.group, Y.subgroup, Y.base, free, action, proj, check=False)
    in1 = RetractiveMap(Y, W, {s: 2 * s for s in Y.free}, check=False)
    in2 = RetractiveMap(Z, W, {s: 2 * s + 1 for s in Z.free}, check=False)
    return W, in1, in2


def wedge_cotuple(f, g):
    W, in1, in2 = wedge(f.src, g.src)
    vals = {}
    for s in f.src.free:
        vals[2 * s] = f(s)
    for s in g.src.free:
        vals[2 * s + 1] = g(s)
    return RetractiveMap(W, f.dst, vals, check=False)


def pushout_along_cofibration(c, f):
    """Pushout of Y <-f- Y0 -c-> Z for a cofibration c.

    Returns (P, from_Y, from_Z).  Tags: 2s for Y points, 2t+1 for Z points
    outside the image of c.
    """
    if not c.is_cofibration():
        raise ValueError("pushout requires a cofibration")
    Y0, Z, Y = c.src, c.dst, f.dst
    image = {c(s): s for s in Y0.free}
    rest = [t for t in Z.free if t not in image]
    free = [2 * s for s in Y.free] + [2 * t + 1 for t in rest]

    def glue_z(t):
        if t in image:
            v = f(image[t])
            return None if v is None else 2 * v
        return 2 * t + 1

    action = {}
    for h in Y.subgroup:
        row = {2 * s: 2 * Y.act(h, s) for s in Y.free}
        for t in rest:
            row[2 * t + 1] = 2 * Z.act(h, t) + 1
        action[h] = row
    proj = {**{2 * s: Y.proj[s] for s in Y.free},
            **{2 * t + 1: Z.proj[t] for t in rest}}
    P = RetractiveGSet(Y.group, Y.subgroup, Y.base, free, action, proj, check=False)
    from_Y = RetractiveMap(Y, P, {s: 2 * s for s in Y.free}, check=False)
    from_Z = RetractiveMap(Z, P, {t: glue_z(t) for t in Z.free}, check=False)
    return P, from_Y, from_Z


def cofiber(c):
    """Quotient of a cofibration: free part = complement of the image.

    Returns (C, quotient, splitting) with quotient: Z -> C collapsing the
    image, and the canonical splitting C -> Z including the complement, so
    splitting then quotient is the identity of C.
    """
    if not c.is_cofibration():
        raise ValueError("cofiber requires a cofibration")
    Z = c.dst
    image = {c(s) for s in c.src.free}
    rest = [t for t in Z.free if t not in image]
    action = {h: {t: Z.act(h, t) for t in rest} for h in Z.subgroup}
    proj = {t: Z.proj[t] for t in rest}
    C = RetractiveGSet(Z.group, Z.subgroup, Z.base, rest, action, proj, check=False)
    quotient = RetractiveMap(Z, C, {t: (t if t in set(rest) else None)
                                    for t in Z.free}, check=False)
    splitting = RetractiveMap(C, Z, {t: t for t in rest}, check=False)
    return C, quotient, splitting


def split_cofiber(c):
    """The functorial splitting datum of a cofibration."""
    C, quotient, splitting = cofiber(c)
    assert splitting.then(quotient) == RetractiveMap.identity(C)
    return C, quotient, splitting


def induced_cofiber_map(c, cp, eY, eZ):
    """For cofibrations c: Y -> Z, cp: Y' -> Z' and a weak-equivalence square
    (eY, eZ), the induced map on cofibers."""
    C, _, _ = cofiber(c)
    Cp, qp, _ = cofiber(cp)
    vals = {t: qp(eZ(t)) for t in C.free}
    return RetractiveMap(C, Cp, vals, check=False)


# -- enumeration -----------------------------------------------------------------


@lru_cache(maxsize=None)
def _abstract_subgroup(G, H):
    H = tuple(H)
    pos = {h: i for i, h in enumerate(H)}
    table = [[pos[G.mul(a, b)] for b in H] for a in H]
    return FiniteGroup(table, check=False), pos


def _minimal_generators(A):
    for r in range(0, A.order + 1):
        for gens in itertools.combinations(range(A.order), r):
            if A.closure(gens) == tuple(range(A.order)):
                return gens
    raise AssertionError


def subgroup_actions_on(G, H, n):
    """All actions of the subgroup H on {1..n}, as dicts h -> perm dict."""
    A, pos = _abstract_subgroup(G, tuple(H))
    gens = _minimal_generators(A)
    perms = list(itertools.permutations(range(1, n + 1)))
    out = []
    for images in itertools.product(perms, repeat=len(gens)):
        # grow the full table by closure over words in the generators
        assign = {A.identity: tuple(range(1, n + 1))}
        frontier = [A.identity]
        ok = True
        while frontier and ok:
            new = []
            for a in frontier:
                for gi, g in enumerate(gens):
                    ag = A.mul(g, a)
                    perm = tuple(images[gi][assign[a][x - 1] - 1] for x in range(1, n + 1))
                    if ag in assign:
                        if assign[ag] != perm:
                            ok = False
                            break
                    else:
                        assign[ag] = perm
                        new.append(ag)
                if not ok:
                    break
            frontier = new
        if ok and len(assign) == A.order:
            H = tuple(sorted(pos))
            out.append({h: {x: assign[pos[h]][x - 1] for x in range(1, n + 1)}
                        for h in pos})
    return out


def all_retractive_sets(G, H, X, max_free):
    """All retractive objects over X with canonical tags 1..n, n <= max_free."""
    H = tuple(H)
    out = []
    for n in range(0, max_free + 1):
        for action in subgroup_actions_on(G, H, n):
            tags = list(range(1, n + 1))
            # equivariant projections, built orbitwise
            orbits = []
            seen = set()
            for s in tags:
                if s not in seen:
                    orb = tuple(sorted({action[h][s] for h in H}))
                    seen.update(orb)
                    orbits.append(orb)
            choices = []
            for orb in orbits:
                r = orb[0]
                stab = [h for h in H if action[h][r] == r]
                choices.append([x for x in X.elements
                                if all(X.act(h, x) == x for h in stab)])
            for combo in itertools.product(*choices):
                proj = {}
                ok = True
                for orb, x in zip(orbits, combo):
                    r = orb[0]
                    for h in H:
                        s2, x2 = action[h][r], X.act(h, x)
                        if s2 in proj and proj[s2] != x2:
                            ok = False
                            break
                        proj[s2] = x2
                    if not ok:
                        break
                if ok and len(proj) == n:
                    out.append(RetractiveGSet(G, H, X, tags, action, proj,
                                              check=False))
    return out


def hom_retractive(Y, Z, isos_only=False):
    """All maps (or isomorphisms) of retractive objects, built orbitwise."""
    H = Y.subgroup
    orbits = Y.free_orbits()
    choices = []
    for orb in orbits:
        r = orb[0]
        stab = set(Y.stabilizer(r))
        cand = []
        if not isos_only:
            cand.append(None)
        for t in Z.free:
            if Z.proj[t] != Y.proj[r]:
                continue
            if not stab <= set(Z.stabilizer(t)):
                continue
            cand.append(t)
        choices.append(cand)
    out = []
    for combo in itertools.product(*choices):
        vals = {}
        ok = True
        for orb, v in zip(orbits, combo):
            r = orb[0]
            for h in H:
                s2 = Y.act(h, r)
                v2 = None if v is None else Z.act(h, v)
                if s2 in vals and vals[s2] != v2:
                    ok = False
                    break
                vals[s2] = v2
            if not ok:
                break
        if not ok:
            continue
        m = RetractiveMap(Y, Z, vals, check=False)
        if isos_only and not m.is_weak_equivalence():
            continue
        out.append(m)
    return out


# -- the functor model ------------------------------------------------------------


class HfpObject:
    """Equivariant functor datum over the cosets of a subgroup K: per coset a
    free part and projection, and per (group element, coset) a bijection
    subject to the cocycle and projection conditions."""

    __slots__ = ("group", "subgroup", "base", "free", "proj", "psi", "_hash")

    def __init__(self, group, subgroup, base, free, proj, psi, check=True):
        self.group = group
        self.subgroup = tuple(subgroup)
        self.base = base
        self.free = tuple(tuple(sorted(fp)) for fp in free)
        self.proj = tuple(dict(p) for p in proj)
        self.psi = {k: dict(v) for k, v in psi.items()}
        self._hash = None
        if check:
            self._check()

    def _tables(self):
        return coset_tables(self.group, self.subgroup)

    def _check(self):
        G = self.group
        cosets, _, move, _, _, _ = self._tables()
        nc = len(cosets)
        if len(self.free) != nc or len(self.proj) != nc:
            raise InvalidHfpError("one free part and projection per coset")
        for c in range(nc):
            if set(self.proj[c]) != set(self.free[c]):
                raise InvalidHfpError("projection domain mismatch at coset %d" % c)
            if any(not 1 <= v <= self.base.size for v in self.proj[c].values()):
                raise InvalidHfpError("projection out of range")
        for u in G.elements:
            for c in range(nc):
                b = self.psi.get((u, c))
                if b is None:
                    raise InvalidHfpError("missing bijection at (%d, %d)" % (u, c))
                dest = move[G.inv(u)][c]
                if (sorted(b) != list(self.free[c])
                        or sorted(b.values()) != list(self.free[dest])):
                    raise InvalidHfpError("bijection endpoints wrong at (%d, %d)" % (u, c))
        e = G.identity
        for c in range(nc):
            if any(self.psi[(e, c)][s] != s for s in self.free[c]):
                raise InvalidHfpError("identity bijection must be trivial")
        for u in G.elements:
            for v in G.elements:
                uv = G.mul(u, v)
                for c in range(nc):
                    mid = move[G.inv(u)][c]
                    for s in self.free[c]:
                        if self.psi[(uv, c)][s] != self.psi[(v, mid)][self.psi[(u, c)][s]]:
                            raise InvalidHfpError(
                                "cocycle fails at u=%d v=%d c=%d" % (u, v, c))
        for u in G.elements:
            for c in range(nc):
                dest = move[G.inv(u)][c]
                for s in self.free[c]:
                    if self.proj[c][s] != self.base.act(u, self.proj[dest][self.psi[(u, c)][s]]):
                        raise InvalidHfpError(
                            "projection condition fails at u=%d c=%d" % (u, c))

    def key(self):
        return (self.subgroup, self.base, self.free,
                tuple(tuple(sorted(p.items())) for p in self.proj),
                tuple(sorted((k, tuple(sorted(v.items())))
                             for k, v in self.psi.items())))

    def __eq__(self, other):
        return isinstance(other, HfpObject) and self.key() == other.key()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.key())
        return self._hash

    def __repr__(self):
        return "HfpObject(|free|=%s over %r, K=%s)" % (
            [len(f) for f in self.free], self.base, list(self.subgroup))

    @property
    def identity_coset(self):
        return self._tables()[4]


class HfpMorphism:
    """A map of functor data: per coset, tags to tags (or None to collapse),
    compatible with projections and the structure bijections."""

    __slots__ = ("src", "dst", "comps", "_hash")

    def __init__(self, src, dst, comps, check=True):
        self.src = src
        self.dst = dst
        self.comps = tuple(dict(c) for c in comps)
        self._hash = None
        if check:
            self._check()

    def _check(self):
        if (self.src.group, self.src.subgroup, self.src.base) != (
                self.dst.group, self.dst.subgroup, self.dst.base):
            raise ValueError("morphism endpoints live over different data")
        G = self.src.group
        cosets, _, move, _, _, _ = coset_tables(G, self.src.subgroup)
        nc = len(cosets)
        for c in range(nc):
            if set(self.comps[c]) != set(self.src.free[c]):
                raise ValueError("component domain mismatch at coset %d" % c)
            for s, v in self.comps[c].items():
                if v is not None and self.dst.proj[c][v] != self.src.proj[c][s]:
                    raise ValueError("component breaks the projection at %d" % c)
        for u in G.elements:
            for c in range(nc):
                dest = move[G.inv(u)][c]
                for s in self.src.free[c]:
                    lhs = self.comps[dest][self.src.psi[(u, c)][s]]
                    v = self.comps[c][s]
                    rhs = None if v is None else self.dst.psi[(u, c)][v]
                    if lhs != rhs:
                        raise ValueError("component not compatible at (%d,%d)" % (u, c))

    def __call__(self, c, s):
        return self.comps[c][s]

    def key(self):
        return (self.src.key(), self.dst.key(),
                tuple(tuple(sorted(c.items(), key=lambda kv: kv[0]))
                      for c in self.comps))

    def __eq__(self, other):
        return isinstance(other, HfpMorphism) and self.key() == other.key()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.key())
        return self._hash

    def __repr__(self):
        return "HfpMorphism(%r -> %r)" % (self.src, self.dst)

    def then(self, other):
        comps = []
        for c in range(len(self.comps)):
            row = {}
            for s, v in self.comps[c].items():
                row[s] = None if v is None else other.comps[c][v]
            comps.append(row)
        return HfpMorphism(self.src, other.dst, comps, check=False)

    @classmethod
    def identity(cls, F):
        return cls(F, F, [{s: s for s in fp} for fp in F.free], check=False)

    def is_iso(self):
        for c, fp in enumerate(self.dst.free):
            vals = list(self.comps[c].values())
            if any(v is None for v in vals) or sorted(vals) != list(fp):
                return False
        return True


# -- the equivalence with genuinely equivariant objects -----------------------------


def embed_h_object(Y):
    """The canonical functor datum of an H-equivariant retractive object;
    extracting the action back is the identity on the nose."""
    G, H = Y.group, Y.subgroup
    cosets, _, move, _, c0, mreps = coset_tables(G, H)
    nc = len(cosets)
    free = [Y.free] * nc
    proj = [{s: Y.base.act(mreps[c], Y.proj[s]) for s in Y.free}
            for c in range(nc)]
    psi = {}
    for u in G.elements:
        for c in range(nc):
            dest = move[G.inv(u)][c]
            h = G.mul(G.inv(mreps[dest]), G.mul(G.inv(u), mreps[c]))
            psi[(u, c)] = {s: Y.act(h, s) for s in Y.free}
    return HfpObject(G, H, Y.base, free, proj, psi, check=False)


def extract_h_action(F):
    """The free part at the identity coset with its induced subgroup action;
    raises InvalidHfpError if the functor datum does not give an action."""
    G, H = F.group, F.subgroup
    c0 = F.identity_coset
    action = {h: dict(F.psi[(G.inv(h), c0)]) for h in H}
    try:
        return RetractiveGSet(G, H, F.base, F.free[c0], action, F.proj[c0])
    except ValueError as exc:
        raise InvalidHfpError(str(exc)) from exc


def embed_h_map(m):
    """Functor-morphism induced by a map of retractive objects."""
    Fs, Fd = embed_h_object(m.src), embed_h_object(m.dst)
    nc = len(Fs.free)
    comps = [{s: m(s) for s in m.src.free} for _ in range(nc)]
    return HfpMorphism(Fs, Fd, comps, check=False)


def extract_h_map(chi):
    c0 = chi.src.identity_coset
    return RetractiveMap(extract_h_action(chi.src), extract_h_action(chi.dst),
                         dict(chi.comps[c0]), check=False)


def unembed_iso(F):
    """The explicit natural isomorphism embed(extract(F)) -> F."""
    G = F.group
    cosets, _, move, _, c0, mreps = coset_tables(G, F.subgroup)
    comps = []
    for c in range(len(cosets)):
        comps.append(dict(F.psi[(G.inv(mreps[c]), c0)]))
    return HfpMorphism(embed_h_object(extract_h_action(F)), F, comps,
                       check=False)


def hom_hfp(F, Fp, isos_only=True):
    """Isomorphisms (or maps) of functor data, through the equivalence with
    retractive objects: each component at the identity coset propagates."""
    G = F.group
    cosets, _, move, _, c0, mreps = coset_tables(G, F.subgroup)
    Y, Yp = extract_h_action(F), extract_h_action(Fp)
    out = []
    for m in hom_retractive(Y, Yp, isos_only=isos_only):
        comps = [None] * len(cosets)
        for c in range(len(cosets)):
            # carry the identity-coset component along the structure maps
            u = G.inv(mreps[c])
            row = {}
            for s in F.free[c]:
                back = F.psi[(G.inv(u), c)][s]  # to the identity coset
                v = m.values[back]
                row[s] = None if v is None else Fp.psi[(u, c0)][v]
            comps[c] = row
        try:
            out.append(HfpMorphism(F, Fp, comps))
        except ValueError:
            continue
    return out


# -- span actions -----------------------------------------------------------------


def _act_core(S, F, fiber_leg, value_leg, result_sub):
    """Shared pushforward/pullback core.

    The result free part at a coset c of ``result_sub`` is the fiberwise
    coproduct over ``fiber_leg``-preimages of c of F's free parts at the
    ``value_leg`` image cosets.  Returns (HfpObject, index) where
    index[c][tag] = (apex point, source tag).
    """
    G = F.group
    M = S.materialize()
    A = M.apex
    cosets, _, move, _, _, _ = coset_tables(G, tuple(result_sub))
    nc = len(cosets)
    fibers = [[i for i in A.elements if fiber_leg(i) == c + 1] for c in range(nc)]
    fsize = len(fibers[0]) if fibers else 0
    free, proj, index = [], [], []
    for c in range(nc):
        fp, pr, ix = [], {}, {}
        for i in fibers[c]:
            vc = value_leg(i) - 1
            for y in F.free[vc]:
                t = encode_summand(len(fibers[c]), i, y)
                fp.append(t)
                pr[t] = F.proj[vc][y]
                ix[t] = (i, y)
        free.append(fp)
        proj.append(pr)
        index.append(ix)
    psi = {}
    for u in G.elements:
        uinv = G.inv(u)
        for c in range(nc):
            dest = move[uinv][c]
            row = {}
            for t, (i, y) in index[c].items():
                i2 = A.act(uinv, i)
                y2 = F.psi[(u, value_leg(i) - 1)][y]
                row[t] = encode_summand(len(fibers[dest]), i2, y2)
            psi[(u, c)] = row
    out = HfpObject(G, tuple(result_sub), F.base, free, proj, psi, check=False)
    return out, index


def act_span(S, F):
    """Action of a span from G/H to G/K on an object over H, landing over K
    (pull back along the left leg, push forward along the right)."""
    if S.unit:
        return F
    if tuple(F.subgroup) != tuple(S.left_sub):
        raise ValueError("object lives over the wrong subgroup")
    M = S.materialize()
    return _act_core(S, F, M.right_leg, M.left_leg, S.right_sub)[0]


def act_left(S, F):
    """Module-convention action: a span from G/H to G/K applied to an object
    over K gives one over H (pull back along the right leg, push forward
    along the left)."""
    if S.unit:
        return F
    if tuple(F.subgroup) != tuple(S.right_sub):
        raise ValueError("object lives over the wrong subgroup")
    M = S.materialize()
    return _act_core(S, F, M.left_leg, M.right_leg, S.left_sub)[0]


def act_left_indexed(S, F):
    if S.unit:
        ident = [{s: (None, s) for s in fp} for fp in F.free]
        return F, ident
    M = S.materialize()
    return _act_core(S, F, M.left_leg, M.right_leg, S.left_sub)


def act_left_morphisms(sigma, chi):
    """Bifunctor on morphisms: sigma a span morphism, chi a functor-datum
    morphism over the right subgroup; yields act(S,F) -> act(S',F')."""
    S, Sp = sigma.src, sigma.dst
    F, Fp = chi.src, chi.dst
    src, ix = act_left_indexed(S, F)
    dst, ixp = act_left_indexed(Sp, Fp)
    if S.unit and Sp.unit:
        return HfpMorphism(src, dst, chi.comps, check=False)
    # materialized route; unit endpoints enter through their materialization
    Sm, Spm = S.materialize(), Sp.materialize()
    src_m, ix_m = (src, ix) if not S.unit else act_left_indexed(Sm, F)
    dst_m, ixp_m = (dst, ixp) if not Sp.unit else act_left_indexed(Spm, Fp)
    rev_p = [{pair: t for t, pair in row.items()} for row in ixp_m]
    comps = []
    for c in range(len(src_m.free)):
        row = {}
        for t, (i, y) in ix_m[c].items():
            v = chi.comps[Sm.right_leg(i) - 1][y]
            row[t] = None if v is None else rev_p[c][(sigma(i), v)]
        comps.append(row)
    m = HfpMorphism(src_m, dst_m, comps, check=False)
    if S.unit:
        m = _unit_action_iso(Sm, F).then(m)
    if Sp.unit:
        m = m.then(_invert_hfp(_unit_action_iso(Spm, Fp)))
    return m


def _unit_action_iso(Smat, F):
    """F -> (materialized identity span) * F; singleton fibers keep tags, so
    this is the identity componentwise."""
    dst, ix = act_left_indexed(Smat, F)
    comps = [{s: s for s in fp} for fp in F.free]
    return HfpMorphism(F, dst, comps, check=False)


def _invert_hfp(m):
    comps = []
    for c, row in enumerate(m.comps):
        comps.append({v: s for s, v in row.items()})
    return HfpMorphism(m.dst, m.src, comps, check=False)


def beck_chevalley(S, T, F):
    """The reindexing isomorphism S*(T*F) -> (S composed with T)*F for the
    module-convention action; the identity when either span is formal."""
    if S.unit or T.unit:
        inner = act_left(T, F) if not T.unit else F
        outer = act_left(S, inner) if not S.unit else inner
        return HfpMorphism(outer, outer,
                           [{s: s for s in fp} for fp in outer.free], check=False)
    TF, ixT = act_left_indexed(T, F)
    nested, ixS = act_left_indexed(S, TF)
    ST = span_compose(S, T)
    flat, ixST = act_left_indexed(ST, F)
    pairs, pair_index = compose_pair_index(S, T)
    rev = [{pv: t for t, pv in row.items()} for row in ixST]
    comps = []
    for c in range(len(nested.free)):
        row = {}
        for t, (i, w) in ixS[c].items():
            j, y = ixT[S.materialize().right_leg(i) - 1][w]
            z = pair_index[(j, i)]
            row[t] = rev[c][(z, y)]
        comps.append(row)
    return HfpMorphism(nested, flat, comps, check=False)


def pushforward_base(f, F):
    """Base change along a G-map of base G-sets: tags and structure maps are
    untouched, projections compose with f.  Strictly functorial."""
    if f.source != F.base:
        raise ValueError("base mismatch")
    proj = [{s: f(v) for s, v in p.items()} for p in F.proj]
    return HfpObject(F.group, F.subgroup, f.target, F.free, proj, F.psi,
                     check=False)


def pushforward_base_map(f, chi):
    return HfpMorphism(pushforward_base(f, chi.src), pushforward_base(f, chi.dst),
                       chi.comps, check=False)


def pushforward_retractive(f, Y):
    proj = {s: f(v) for s, v in Y.proj.items()}
    return RetractiveGSet(Y.group, Y.subgroup, f.target, Y.free, Y.action, proj,
                          check=False)


# -- geometric descriptions of orbit-span actions -----------------------------------


def geometric_restrict(L, Y):
    """Restrict the action of Y's subgroup to L: same set, same projection."""
    L = tuple(L)
    action = {h: dict(Y.action[h]) for h in L}
    return RetractiveGSet(Y.group, L, Y.base, Y.free, action, Y.proj, check=False)


def geometric_conjugate(g, L, Y):
    """Transport Y along conjugation: each l in L acts through g l g^-1 (which
    must lie in Y's subgroup) and the projection moves by g^-1.  With
    g L g^-1 a proper subgroup this is a conjugated restriction."""
    G = Y.group
    action = {l: dict(Y.action[G.conj(g, l)]) for l in L}
    proj = {s: Y.base.act(G.inv(g), v) for s, v in Y.proj.items()}
    return RetractiveGSet(G, tuple(L), Y.base, Y.free, action, proj, check=False)


def geometric_induct(K, Y):
    """Induct Y over L up to K >= L, collapsing the induced base copies back:
    the free part becomes (coset of L in K) x (free part), Cantor tagged
    (plain tags when L = K)."""
    G, L = Y.group, Y.subgroup
    cosets = G.cosets(L, ambient=K)
    reps = [min(c) for c in cosets]
    cidx = {}
    for i, c in enumerate(cosets):
        for g in c:
            cidx[g] = i
    single = len(cosets) == 1

    def tag(i, s):
        return s if single else cantor_pair(i, s)

    free = [tag(i, s) for i in range(len(cosets)) for s in Y.free]
    action = {}
    for k in K:
        row = {}
        for i in range(len(cosets)):
            j = cidx[G.mul(k, reps[i])]
            l = G.mul(G.inv(reps[j]), G.mul(k, reps[i]))
            for s in Y.free:
                row[tag(i, s)] = tag(j, Y.act(l, s))
        action[k] = row
    proj = {tag(i, s): Y.base.act(reps[i], Y.proj[s])
            for i in range(len(cosets)) for s in Y.free}
    return RetractiveGSet(G, tuple(K), Y.base, free, action, proj, check=False)


def geometric_span_action(S, Y):
    """Direct description of an orbit span from G/H to G/K acting on a
    retractive object over H, landing over K: a conjugated restriction to the
    stabilizer of the base apex point, then a conjugated induction up to K.
    Specializes to plain restriction / conjugation / induction for the three
    pure orbit-span shapes."""
    M = S.materialize()
    if not M.apex.is_transitive():
        raise ValueError("decompose the apex into orbits first")
    if tuple(Y.subgroup) != tuple(S.left_sub):
        raise ValueError("object lives over the wrong subgroup")
    G = M.group
    L = M.apex.stabilizer(1)
    rho = min(G.cosets(tuple(S.left_sub))[M.left_leg(1) - 1])
    Z = geometric_conjugate(G.inv(rho), L, Y)
    uprime = min(G.cosets(tuple(S.right_sub))[M.right_leg(1) - 1])
    L2 = tuple(sorted(G.conj(G.inv(uprime), l) for l in L))
    Z2 = geometric_conjugate(uprime, L2, Z)
    return geometric_induct(tuple(S.right_sub), Z2)


def span_action_agreement_iso(S, Y):
    """The explicit natural isomorphism from the geometric description to the
    functor-model route extract(act_span(S, embed(Y))).

    Returns (B, A, iso) with B = geometric_span_action(S, Y)."""
    G = Y.group
    M = S.materialize()
    A_obj = extract_h_action(act_span(S, embed_h_object(Y)))
    B_obj = geometric_span_action(S, Y)
    K = tuple(S.right_sub)
    L = M.apex.stabilizer(1)
    rho = min(G.cosets(tuple(S.left_sub))[M.left_leg(1) - 1])
    uprime = min(G.cosets(K)[M.right_leg(1) - 1])
    L2 = tuple(sorted(G.conj(G.inv(uprime), l) for l in L))
    cosets2 = G.cosets(L2, ambient=K)
    gammas = [min(c) for c in cosets2]
    single = len(cosets2) == 1
    mrepsH = coset_tables(G, tuple(S.left_sub))[5]
    fiber_size = len(cosets2)
    vals = {}
    for j, gamma in enumerate(gammas):
        x = G.mul(gamma, G.inv(uprime))
        a_j = M.apex.act(x, 1)
        w = G.mul(G.inv(mrepsH[M.left_leg(a_j) - 1]), G.mul(x, rho))
        for s in Y.free:
            btag = s if single else cantor_pair(j, s)
            atag = encode_summand(fiber_size, a_j, Y.act(w, s))
            vals[btag] = atag
    return B_obj, A_obj, RetractiveMap(B_obj, A_obj, vals)


# -- spans through the retractive route (for the identification check) --------------


def retractive_from_span(S):
    """A span as a retractive object over the product of its ends: the free
    part is the apex, tags are the apex elements."""
    M = S.materialize()
    Y, p1, p2 = product_gset(M.left, M.right)
    pair_index = {(p1(z), p2(z)): z for z in Y.elements}
    G = M.group
    action = {g: {a: M.apex.act(g, a) for a in M.apex.elements}
              for g in G.elements}
    proj = {a: pair_index[(M.left_leg(a), M.right_leg(a))]
            for a in M.apex.elements}
    return RetractiveGSet(G, tuple(sorted(G.elements)), Y,
                          list(M.apex.elements), action, proj, check=False)


def span_from_retractive(R, left, right, left_sub, right_sub):
    """Back from a retractive object over a product to a span; inverse to
    retractive_from_span when tags are 1..n."""
    Y, p1, p2 = product_gset(left, right)
    tags = sorted(R.free)
    pos = {t: i + 1 for i, t in enumerate(tags)}
    G = R.group
    action = [[pos[R.act(g, t)] for t in tags] for g in G.elements]
    A = GSet(G, action, check=False)
    ll = GMap(A, left, [p1(R.proj[t]) for t in tags], check=False)
    rl = GMap(A, right, [p2(R.proj[t]) for t in tags], check=False)
    return Span(left, right, A, ll, rl, left_sub=left_sub, right_sub=right_sub,
                check=False)


def compose_retractive_spans(S1, S2):
    """Composition computed on the retractive models: pair the free parts over
    the middle orbit with the S2 coordinate most significant, then read the
    result back as a span.  Agrees with span_compose on the nose."""
    if S1.unit:
        return S2
    if S2.unit:
        return S1
    R1 = retractive_from_span(S1)
    R2 = retractive_from_span(S2)
    M1, M2 = S1.materialize(), S2.materialize()
    Ymid = M1.right
    pairs = [(b, a) for b in sorted(R2.free) for a in sorted(R1.free)
             if M2.left_leg(b) == M1.right_leg(a)]
    G = R1.group
    Yout, p1o, p2o = product_gset(M1.left, M2.right)
    pair_index = {(p1o(z), p2o(z)): z for z in Yout.elements}
    tags = {p: i + 1 for i, p in enumerate(pairs)}
    action = {g: {tags[(b, a)]: tags[(M2.apex.act(g, b), M1.apex.act(g, a))]
                  for (b, a) in pairs} for g in G.elements}
    proj = {tags[(b, a)]: pair_index[(M1.left_leg(a), M2.right_leg(b))]
            for (b, a) in pairs}
    R = RetractiveGSet(G, tuple(sorted(G.elements)), Yout,
                       list(tags.values()), action, proj, check=False)
    return span_from_retractive(R, M1.left, M2.right, S1.left_sub, S2.right_sub)


def spans_via_retractive_route(G, max_apex):
    """The span-category assignment with composition computed through the
    retractive models; produces the same hom categories and composition
    functors, for the identification check."""
    from .multicat import (MultifunctorData, CatMulti, CatTarget,
                           RingParamMulticat, SpanCategory)
    from .spans import canonical_span_pool, formal_unit, span_compose_morphisms
    subs = G.subgroups()
    cats = {(H, K): SpanCategory(G, H, K, canonical_span_pool(G, H, K, max_apex))
            for H in subs for K in subs}
    target = CatTarget(cats)
    source = RingParamMulticat(subs)

    def mor_map(f):
        chain = f[1]
        n = len(chain) - 1
        srcs = tuple((chain[i], chain[i + 1]) for i in range(n))
        tgt_obj = (chain[0], chain[-1])
        if n == 0:
            u = formal_unit(G, chain[0])
            cat = cats[tgt_obj]
            return CatMulti((), tgt_obj, lambda xs: u,
                            lambda fs: cat.identity(u), name="unit")

        def obj_fn(xs):
            acc = xs[0]
            for x in xs[1:]:
                acc = compose_retractive_spans(acc, x)
            return acc

        def arr_fn(fs):
            acc = fs[0]
            for f_ in fs[1:]:
                acc = span_compose_morphisms(acc, f_)
            return acc

        return CatMulti(srcs, tgt_obj, obj_fn, arr_fn, name="compose-r%d" % n)

    return MultifunctorData(source, target, lambda a: cats[a], mor_map,
                            name="retractive-route")
