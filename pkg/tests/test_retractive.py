import itertools

import pytest

from spancalc.groups import FiniteGroup
from spancalc.gsets import GMap, coset_gset, regular_gset, trivial_gset
from spancalc.spans import (Span, span_compose, formal_unit, identity_span,
                            canonical_span_pool, orbit_gset)
from spancalc.retractive import (RetractiveGSet, RetractiveMap, wedge,
                                 wedge_cotuple, pushout_along_cofibration,
                                 cofiber, split_cofiber, induced_cofiber_map,
                                 all_retractive_sets, hom_retractive,
                                 HfpObject, HfpMorphism, embed_h_object,
                                 extract_h_action, embed_h_map, extract_h_map,
                                 unembed_iso, hom_hfp, act_span, act_left,
                                 act_left_morphisms, beck_chevalley,
                                 pushforward_base, pushforward_base_map,
                                 geometric_restrict, geometric_conjugate,
                                 geometric_induct, geometric_span_action,
                                 span_action_agreement_iso,
                                 compose_retractive_spans, InvalidHfpError)

C2 = FiniteGroup.cyclic(2)
S3 = FiniteGroup.symmetric(3)

TRIV = (0,)


def sub_of_order(G, n):
    return next(s for s in G.subgroups() if len(s) == n)


def c2_bases():
    return [trivial_gset(C2), regular_gset(C2)]


# -- retractive objects and Waldhausen-shadow structure ----------------------------


def test_enumeration_counts_c2_over_point():
    X = trivial_gset(C2)
    whole = (0, 1)
    # sizes 0..3 with a C2-action and unique projection: 1+1+2+4
    objs = all_retractive_sets(C2, whole, X, 3)
    assert len(objs) == 8


def test_enumeration_respects_projection_constraints():
    X = regular_gset(C2)
    whole = (0, 1)
    # no fixed free points can project to a free-action base
    objs = all_retractive_sets(C2, whole, X, 2)
    sizes = sorted(len(o.free) for o in objs)
    assert sizes == [0, 2, 2]


def test_cofibration_weq_classification():
    X = trivial_gset(C2)
    whole = (0, 1)
    objs = all_retractive_sets(C2, whole, X, 2)
    for Y in objs:
        for Z in objs:
            for m in hom_retractive(Y, Z):
                vals = list(m.values.values())
                inj = (all(v is not None for v in vals)
                       and len(set(vals)) == len(vals))
                assert m.is_cofibration() == inj
                assert m.is_weak_equivalence() == (
                    inj and sorted(vals) == sorted(Z.free))


def test_wedge_universal_property():
    X = trivial_gset(C2)
    whole = (0, 1)
    objs = all_retractive_sets(C2, whole, X, 2)
    for Y in objs[:4]:
        for Z in objs[:4]:
            W, i1, i2 = wedge(Y, Z)
            for T in objs[:4]:
                for f in hom_retractive(Y, T):
                    for g in hom_retractive(Z, T):
                        h = wedge_cotuple(f, g)
                        assert i1.then(h) == f and i2.then(h) == g
                        # uniqueness
                        others = [m for m in hom_retractive(W, T)
                                  if i1.then(m) == f and i2.then(m) == g]
                        assert others == [h]


def test_pushout_universal_property_on_instances():
    X = trivial_gset(C2)
    whole = (0, 1)
    objs = all_retractive_sets(C2, whole, X, 2)
    cases = 0
    for Y0 in objs:
        for Z in objs:
            for c in hom_retractive(Y0, Z):
                if not c.is_cofibration():
                    continue
                for Y in objs[:4]:
                    for f in hom_retractive(Y0, Y)[:3]:
                        P, fromY, fromZ = pushout_along_cofibration(c, f)
                        assert f.then(fromY) == c.then(fromZ)
                        for T in objs[:3]:
                            for u in hom_retractive(Y, T)[:2]:
                                for v in hom_retractive(Z, T)[:2]:
                                    if f.then(u) != c.then(v):
                                        continue
                                    ws = [w for w in hom_retractive(P, T)
                                          if fromY.then(w) == u and fromZ.then(w) == v]
                                    assert len(ws) == 1
                                    cases += 1
    assert cases > 0


def test_split_cofiber_retract_identity():
    X = trivial_gset(C2)
    whole = (0, 1)
    objs = all_retractive_sets(C2, whole, X, 3)
    count = 0
    for Y in objs:
        for Z in objs:
            for c in hom_retractive(Y, Z):
                if not c.is_cofibration():
                    continue
                Cf, q, s = split_cofiber(c)
                assert s.then(q) == RetractiveMap.identity(Cf)
                count += 1
    assert count > 0


def split_naturality_cases(G, whole, X, max_free):
    objs = all_retractive_sets(G, whole, X, max_free)
    cofs = []
    for Y in objs:
        for Z in objs:
            cofs.extend(c for c in hom_retractive(Y, Z) if c.is_cofibration())
    checked = 0
    for c in cofs:
        for cp in cofs:
            if (len(c.src.free) != len(cp.src.free)
                    or len(c.dst.free) != len(cp.dst.free)):
                continue
            for eY in hom_retractive(c.src, cp.src, isos_only=True):
                for eZ in hom_retractive(c.dst, cp.dst, isos_only=True):
                    if c.then(eZ) != eY.then(cp):
                        continue
                    _, q, s = split_cofiber(c)
                    _, qp, sp = split_cofiber(cp)
                    eC = induced_cofiber_map(c, cp, eY, eZ)
                    assert eC.is_weak_equivalence()
                    assert s.then(eZ) == eC.then(sp)
                    checked += 1
    return checked


def test_split_cofiber_naturality_c2():
    assert split_naturality_cases(C2, (0, 1), trivial_gset(C2), 3) > 0


def test_identity_cofibration_splits_trivially():
    X = trivial_gset(C2)
    objs = all_retractive_sets(C2, (0, 1), X, 2)
    for Y in objs:
        c = RetractiveMap.identity(Y)
        Cf, q, s = split_cofiber(c)
        assert Cf.free == ()


# -- functor model: embed / extract -------------------------------------------------


def all_hfp(G, K, X, max_free):
    return [embed_h_object(Y) for Y in all_retractive_sets(G, K, X, max_free)]


def test_embed_then_extract_is_identity():
    for G, K in [(C2, (0, 1)), (C2, TRIV), (S3, sub_of_order(S3, 2))]:
        X = coset_gset(G, sub_of_order(G, 2) if G is S3 else TRIV)[0]
        for Y in all_retractive_sets(G, K, X, 3 if G is C2 else 2):
            F = embed_h_object(Y)
            assert extract_h_action(F) == Y


def test_extract_then_embed_isomorphic_via_explicit_iso():
    G, K = C2, (0, 1)
    X = regular_gset(G)
    for Y in all_retractive_sets(G, K, X, 3):
        F = embed_h_object(Y)
        iso = unembed_iso(F)
        assert iso.src == embed_h_object(extract_h_action(F))
        assert iso.dst == F
        assert iso.is_iso()


def test_unembed_iso_on_nonembedded_object():
    # an object whose structure bijections are NOT of embedded form
    G = C2
    K = (0, 1)
    X = trivial_gset(G)
    Y = all_retractive_sets(G, K, X, 2)[-1]
    F0 = embed_h_object(Y)
    # twist: relabel the free part at the identity coset only
    # (builds a valid functor datum not in the image of embed)
    swap = {s: t for s, t in zip(F0.free[0], reversed(F0.free[0]))}
    free = list(F0.free)
    proj = [dict(p) for p in F0.proj]
    proj[0] = {swap[s]: v for s, v in F0.proj[0].items()}
    psi = {}
    for (u, c), row in F0.psi.items():
        row = dict(row)
        if c == 0:
            row = {swap[s]: v for s, v in row.items()}
        dest = None
        psi[(u, c)] = row
    for (u, c), row in list(psi.items()):
        movedest = F0.group  # placeholder, recompute below
    # recompute destinations properly: coset 0 is the identity coset here
    from spancalc.retractive import coset_tables
    _, _, move, _, c0, _ = coset_tables(G, K)
    for (u, c), row in list(psi.items()):
        if move[G.inv(u)][c] == c0:
            psi[(u, c)] = {s: swap[v] for s, v in row.items()}
    try:
        F = HfpObject(G, K, X, free, proj, psi)
    except InvalidHfpError:
        pytest.skip("twisted datum happened to be invalid")
    iso = unembed_iso(F)
    assert iso.is_iso()


def test_hfp_validation_catches_broken_cocycle():
    G, K = C2, (0, 1)
    X = trivial_gset(G)
    Y = all_retractive_sets(G, K, X, 2)[-1]
    F = embed_h_object(Y)
    psi = {k: dict(v) for k, v in F.psi.items()}
    # break one non-identity bijection
    key = (1, 0)
    row = psi[key]
    tags = sorted(row)
    if len(tags) >= 2:
        row[tags[0]], row[tags[1]] = row[tags[1]], row[tags[0]]
        with pytest.raises(InvalidHfpError):
            HfpObject(G, K, X, F.free, F.proj, psi)


def test_embed_naturality_roundtrip_on_maps():
    G, K = C2, (0, 1)
    X = trivial_gset(G)
    objs = all_retractive_sets(G, K, X, 2)
    for Y in objs:
        for Yp in objs:
            for m in hom_retractive(Y, Yp):
                chi = embed_h_map(m)
                assert extract_h_map(chi) == m


def test_hom_hfp_matches_retractive_isos():
    G, K = C2, (0, 1)
    X = regular_gset(G)
    objs = all_retractive_sets(G, K, X, 3)
    for Y in objs:
        for Yp in objs:
            n_iso = len(hom_retractive(Y, Yp, isos_only=True))
            ms = hom_hfp(embed_h_object(Y), embed_h_object(Yp))
            assert len(ms) == n_iso
            assert all(m.is_iso() for m in ms)


# -- span actions ------------------------------------------------------------------


def test_formal_unit_acts_as_identity_on_the_nose():
    G = C2
    K = (0, 1)
    X = regular_gset(G)
    u = formal_unit(G, K)
    for F in all_hfp(G, K, X, 3):
        assert act_left(u, F) is F
        assert act_span(u, F) is F


def test_materialized_identity_acts_as_identity():
    # singleton fibers keep tags: the identity span acts trivially
    G = C2
    K = (0, 1)
    X = regular_gset(G)
    I = identity_span(G, K)
    for F in all_hfp(G, K, X, 3):
        assert act_left(I, F) == F
        assert act_span(I, F) == F


def test_restriction_span_restricts_exactly():
    # span G/H <- G/L -> G/L acting through act_span = restriction on the nose
    G = S3
    H = sub_of_order(G, 6)  # whole group
    L = sub_of_order(G, 2)
    XH = orbit_gset(G, H)
    XL = orbit_gset(G, L)
    proj = GMap(XL, XH, [1] * XL.size)
    S = Span(XH, XL, XL, proj, GMap.identity(XL), left_sub=H, right_sub=L)
    X = coset_gset(G, L)[0]
    for Y in all_retractive_sets(G, H, X, 2):
        out = extract_h_action(act_span(S, embed_h_object(Y)))
        assert out == geometric_restrict(L, Y)


def test_induction_span_cardinality():
    # span G/L <- G/L -> G/K with L <= K: free part grows by [K:L]
    G = C2
    L = TRIV
    K = (0, 1)
    XL = orbit_gset(G, L)
    XK = orbit_gset(G, K)
    proj = GMap(XL, XK, [1] * XL.size)
    S = Span(XL, XK, XL, GMap.identity(XL), proj, left_sub=L, right_sub=K)
    X = trivial_gset(G)
    for Y in all_retractive_sets(G, L, X, 2):
        out = extract_h_action(act_span(S, embed_h_object(Y)))
        assert len(out.free) == 2 * len(Y.free)
    # one-point free part: two points with the swap action
    Y1 = next(Y for Y in all_retractive_sets(G, L, X, 1) if len(Y.free) == 1)
    out = extract_h_action(act_span(S, embed_h_object(Y1)))
    assert len(out.free) == 2
    t = 1  # the nontrivial element of C2
    assert all(out.act(t, s) != s for s in out.free)


def test_conjugation_case_agreement():
    # inner conjugation: explicit iso between the paper formula and act_span
    G = S3
    Hs = [s for s in G.subgroups() if len(s) == 2]
    H, L = Hs[0], Hs[1]
    g = next(g for g in G.elements if G.conjugate_subgroup(g, L) == H)
    XH, XL = orbit_gset(G, H), orbit_gset(G, L)
    # span G/H <- G/L -> G/L with left leg xL -> x g^-1 H
    c0val = None
    cosetsH = G.cosets(H)
    idxH = {c: i + 1 for i, c in enumerate(cosetsH)}
    repsL = [min(c) for c in G.cosets(L)]
    ll = GMap(XL, XH, [idxH[G.coset_of(G.mul(r, G.inv(g)), H)] for r in repsL])
    S = Span(XH, XL, XL, ll, GMap.identity(XL), left_sub=H, right_sub=L)
    X = coset_gset(G, L)[0]
    for Y in all_retractive_sets(G, H, X, 2):
        A = extract_h_action(act_span(S, embed_h_object(Y)))
        B = geometric_conjugate(g, L, Y)
        # explicit iso: act by h0 = g * (least representative of g^-1 H)
        h0 = G.mul(g, min(G.coset_of(G.inv(g), H)))
        assert h0 in set(H)
        iso = RetractiveMap(B, A, {s: Y.act(G.inv(h0), s) for s in B.free})
        assert iso.is_weak_equivalence()


def orbit_spans(G, H, K):
    return [s for s in canonical_span_pool(G, H, K, G.order, max_orbits=1,
                                           include_unit=False)]


def test_geometric_agreement_all_orbit_spans_c2():
    G = C2
    X = regular_gset(G)
    for H in G.subgroups():
        for K in G.subgroups():
            for S in orbit_spans(G, H, K):
                for Y in all_retractive_sets(G, H, X, 2):
                    B, A, iso = span_action_agreement_iso(S, Y)
                    assert iso.is_weak_equivalence()


def test_geometric_agreement_all_orbit_spans_s3():
    G = S3
    X = coset_gset(G, sub_of_order(G, 2))[0]
    for H in G.subgroups():
        for K in G.subgroups():
            for S in orbit_spans(G, H, K):
                for Y in all_retractive_sets(G, H, X, 1):
                    B, A, iso = span_action_agreement_iso(S, Y)
                    assert iso.is_weak_equivalence()


def test_geometric_agreement_is_natural_in_y():
    # the square formed by the agreement isos and induced maps commutes
    G = C2
    X = trivial_gset(G)
    H = (0, 1)
    for K in G.subgroups():
        for S in orbit_spans(G, H, K):
            objs = all_retractive_sets(G, H, X, 2)
            for Y in objs:
                for Yp in objs:
                    for m in hom_retractive(Y, Yp, isos_only=True):
                        B, A, iso = span_action_agreement_iso(S, Y)
                        Bp, Ap, isop = span_action_agreement_iso(S, Yp)
                        act_m = extract_h_map(act_left_morphisms(
                            _span_id(S), embed_h_map(m)))
                        geo_m = _geo_map(S, m, B, Bp)
                        assert geo_m.then(isop) == iso.then(act_m)


def _span_id(S):
    from spancalc.spans import SpanMorphism
    return SpanMorphism.identity(S)


def _geo_map(S, m, B, Bp):
    # geometric action on morphisms: apply m tagwise under the tag scheme
    from spancalc.retractive import cantor_pair
    G = m.src.group
    M = S.materialize()
    K = tuple(S.right_sub)
    L = M.apex.stabilizer(1)
    uprime = min(G.cosets(K)[M.right_leg(1) - 1])
    L2 = tuple(sorted(G.conj(G.inv(uprime), l) for l in L))
    single = len(G.cosets(L2, ambient=K)) == 1
    vals = {}
    for j in range(len(G.cosets(L2, ambient=K))):
        for s in m.src.free:
            btag = s if single else cantor_pair(j, s)
            v = m(s)
            vals[btag] = None if v is None else (v if single else cantor_pair(j, v))
    return RetractiveMap(B, Bp, vals)


def test_act_left_morphism_direction_on_units():
    # acting with a span morphism out of the formal unit
    G = C2
    K = (0, 1)
    X = regular_gset(G)
    from spancalc.spans import span_hom
    u = formal_unit(G, K)
    I = identity_span(G, K)
    sigma = span_hom(u, I)[0]
    for F in all_hfp(G, K, X, 2):
        chi = HfpMorphism.identity(F)
        out = act_left_morphisms(sigma, chi)
        assert out.src == F  # unit acts as identity
        assert out.dst == act_left(I, F)
        assert out.is_iso()


# -- Beck-Chevalley ----------------------------------------------------------------


def test_bc_identity_when_either_span_is_formal():
    G = C2
    K = (0, 1)
    X = regular_gset(G)
    u = formal_unit(G, K)
    I = identity_span(G, K)
    for F in all_hfp(G, K, X, 2):
        bc = beck_chevalley(u, I, F)
        assert bc.src == bc.dst
        assert bc == HfpMorphism.identity(bc.src)


def test_bc_is_an_isomorphism_and_natural():
    G = C2
    X = regular_gset(G)
    subs = G.subgroups()
    for H, K, L in itertools.product(subs, repeat=3):
        spans1 = orbit_spans(G, H, K)[:3]
        spans2 = orbit_spans(G, K, L)[:3]
        for S in spans1:
            for T in spans2:
                for F in all_hfp(G, L, X, 2)[:4]:
                    bc = beck_chevalley(S, T, F)
                    assert bc.is_iso()
                    assert bc.src == act_left(S, act_left(T, F))
                    assert bc.dst == act_left(span_compose(S, T), F)
    # naturality in F
    H, K, L = subs[0], subs[1], subs[0]
    for S in orbit_spans(G, H, K)[:2]:
        for T in orbit_spans(G, K, L)[:2]:
            objs = all_hfp(G, L, X, 2)
            for F in objs[:3]:
                for Fp in objs[:3]:
                    for chi in hom_hfp(F, Fp):
                        lhs = beck_chevalley(S, T, F).then(
                            act_left_morphisms(_span_id(span_compose(S, T)), chi))
                        rhs = act_left_morphisms(
                            _span_id(S), act_left_morphisms(_span_id(T), chi)
                        ).then(beck_chevalley(S, T, Fp))
                        assert lhs == rhs


def test_bc_pentagon_on_triple_composites():
    G = C2
    X = trivial_gset(G)
    subs = G.subgroups()
    for H, K, L, Mx in itertools.product(subs, repeat=4):
        for S in orbit_spans(G, H, K)[:2]:
            for T in orbit_spans(G, K, L)[:2]:
                for U in orbit_spans(G, L, Mx)[:2]:
                    for F in all_hfp(G, Mx, X, 2)[:2]:
                        TU_F = act_left(T, act_left(U, F))
                        route1 = beck_chevalley(S, T, act_left(U, F)).then(
                            beck_chevalley(span_compose(S, T), U, F))
                        route2 = act_left_morphisms(
                            _span_id(S), beck_chevalley(T, U, F)).then(
                            beck_chevalley(S, span_compose(T, U), F))
                        assert route1 == route2


# -- base change -------------------------------------------------------------------


def test_pushforward_base_strict_functoriality():
    G = C2
    K = (0, 1)
    X = regular_gset(G)
    Xp = trivial_gset(G)
    f = GMap(X, Xp, [1, 1])
    fp = GMap(Xp, trivial_gset(G), [1])
    for F in all_hfp(G, K, X, 3):
        lhs = pushforward_base(fp, pushforward_base(f, F))
        rhs = pushforward_base(f.then(fp), F)
        assert lhs == rhs
        assert pushforward_base(GMap.identity(X), F) == F


def test_pushforward_commutes_with_span_action_on_the_nose():
    G = C2
    X = regular_gset(G)
    Xp = trivial_gset(G)
    f = GMap(X, Xp, [1, 1])
    subs = G.subgroups()
    for H in subs:
        for K in subs:
            for S in orbit_spans(G, H, K) + [formal_unit(G, H)] * (H == K):
                for F in all_hfp(G, K, X, 2):
                    assert (pushforward_base(f, act_left(S, F))
                            == act_left(S, pushforward_base(f, F)))


def test_collapse_to_point_keeps_free_part():
    G = C2
    X = regular_gset(G)
    pt = trivial_gset(G)
    f = GMap(X, pt, [1, 1])
    for F in all_hfp(G, (0, 1), X, 3):
        out = pushforward_base(f, F)
        assert out.free == F.free
        assert all(set(p.values()) <= {1} for p in out.proj)


# -- retractive route for spans ------------------------------------------------------


def test_compose_retractive_spans_agrees_with_span_compose():
    G = C2
    subs = G.subgroups()
    for H, K, L in itertools.product(subs, repeat=3):
        for S1 in canonical_span_pool(G, H, K, 4):
            for S2 in canonical_span_pool(G, K, L, 4):
                assert compose_retractive_spans(S1, S2) == span_compose(S1, S2)
