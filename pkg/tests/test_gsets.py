import itertools

import pytest
from hypothesis import given, settings, strategies as st

from spancalc.groups import FiniteGroup
from spancalc.gsets import (GSet, GMap, trivial_gset, regular_gset, coset_gset,
                            product_gset, coproduct_gset, lex_pullback,
                            hom_gsets, gsets_isomorphic)

C2 = FiniteGroup.cyclic(2)
S3 = FiniteGroup.symmetric(3)


def sub_of_order(G, n):
    return next(s for s in G.subgroups() if len(s) == n)


def test_action_homomorphism_is_validated():
    with pytest.raises(ValueError):
        GSet(C2, [[1, 2], [1, 2, 3]])
    with pytest.raises(ValueError):
        # t acting by a non-involution on 3 points
        GSet(FiniteGroup.cyclic(2), [[1, 2, 3], [2, 3, 1]])


def test_coset_gset_sizes():
    X, quot = coset_gset(C2, (0,))
    assert X.size == 2 and X.action[1] == (2, 1)  # t acts as the swap
    Y, _ = coset_gset(S3, sub_of_order(S3, 3))
    assert Y.size == 2
    Z, _ = coset_gset(S3, tuple(S3.elements))
    assert Z.size == 1


def test_coset_quotient_map_is_surjective_and_equivariant():
    H = sub_of_order(S3, 2)
    X, quot = coset_gset(S3, H)
    assert set(quot.values) == set(X.elements)
    quot._check()


def test_fixed_points_examples():
    H = sub_of_order(S3, 2)
    X, _ = coset_gset(S3, H)
    # frozen oracle: cosets gH with g^-1 C2 g = C2, counted directly
    fixed = [x for x in X.elements
             if all(X.act(h, x) == x for h in H)]
    assert X.fixed_points(H) == tuple(fixed)
    assert len(X.fixed_points(H)) == 1
    assert regular_gset(C2).fixed_points((0, 1)) == ()
    XH, _ = coset_gset(S3, H)
    assert 1 in XH.fixed_points(H)  # the identity coset is H-fixed


def test_hom_orbit_counts_fixed_points():
    # |Hom_G(G/H, X)| = |X^H| by enumeration, over several X
    for H in S3.subgroups():
        O, _ = coset_gset(S3, H)
        for X in [trivial_gset(S3), regular_gset(S3), coset_gset(S3, sub_of_order(S3, 2))[0]]:
            assert len(hom_gsets(O, X)) == len(X.fixed_points(H))


def test_isotropy_strata_examples():
    assert regular_gset(C2).isotropy_stratum((0,)) == (1, 2)
    pt = trivial_gset(S3)
    assert pt.isotropy_stratum(tuple(S3.elements)) == (1,)
    X, _ = coset_gset(S3, sub_of_order(S3, 2))
    assert X.isotropy_stratum((0,)) == ()


def test_strata_partition_the_set():
    for X in [regular_gset(S3), coset_gset(S3, sub_of_order(S3, 2))[0],
              product_gset(coset_gset(S3, sub_of_order(S3, 2))[0],
                           coset_gset(S3, sub_of_order(S3, 3))[0])[0]]:
        total = sum(len(X.isotropy_stratum(H)) for H in S3.subgroups())
        assert total == X.size


def test_pullback_of_identities_is_identity_like():
    X, _ = coset_gset(S3, sub_of_order(S3, 2))
    idm = GMap.identity(X)
    P, p1, p2 = lex_pullback(idm, idm)
    assert P.size == X.size
    assert gsets_isomorphic(P, X) is not None


def test_pullback_over_point_is_product():
    X = regular_gset(C2)
    pt = trivial_gset(C2)
    c = GMap(X, pt, [1, 1])
    P, _, _ = lex_pullback(c, c)
    assert P.size == 4


def test_pullback_s3_transitive_of_size_6():
    A, _ = coset_gset(S3, sub_of_order(S3, 2))
    B, _ = coset_gset(S3, sub_of_order(S3, 3))
    pt = trivial_gset(S3)
    f = GMap(A, pt, [1] * A.size)
    g = GMap(B, pt, [1] * B.size)
    P, _, _ = lex_pullback(f, g)
    assert P.size == 6
    assert P.is_transitive()


def test_pullback_strict_associativity_over_cospan_chains():
    # A -> Z <- B -> Z' <- C: both iterated pullbacks must be EQUAL GSets
    # with equal outer projections.
    G = S3
    A, qa = coset_gset(G, sub_of_order(G, 2))
    B = regular_gset(G)
    C, _ = coset_gset(G, sub_of_order(G, 3))
    Z, _ = coset_gset(G, sub_of_order(G, 2))
    Zp, _ = coset_gset(G, sub_of_order(G, 3))
    for f in hom_gsets(A, Z):
        for g in hom_gsets(B, Z):
            for fp in hom_gsets(B, Zp):
                for gp in hom_gsets(C, Zp):
                    P1, a1, b1 = lex_pullback(f, g)
                    Q1, pq1, c1 = lex_pullback(b1.then(fp), gp)
                    P2, b2, c2 = lex_pullback(fp, gp)
                    Q2, a2, pq2 = lex_pullback(f, b2.then(g))
                    assert Q1 == Q2
                    assert pq1.then(a1) == a2
                    assert pq1.then(b1) == pq2.then(b2)
                    assert c1 == pq2.then(c2)


def test_product_and_coproduct_shapes():
    X = regular_gset(C2)
    P, p1, p2 = product_gset(X, X)
    assert P.size == 4
    Cc, i1, i2 = coproduct_gset(X, X)
    assert Cc.size == 4
    assert [i1(x) for x in X.elements] == [1, 2]
    assert [i2(x) for x in X.elements] == [3, 4]


small_groups = st.sampled_from([FiniteGroup.cyclic(2), FiniteGroup.cyclic(3),
                                FiniteGroup.symmetric(3), FiniteGroup.klein_four()])


@given(small_groups, st.integers(min_value=0, max_value=30))
@settings(max_examples=40, deadline=None)
def test_action_is_homomorphism_property(G, seed):
    import random
    rng = random.Random(seed)
    H = rng.choice(G.subgroups())
    X, _ = coset_gset(G, H)
    g = rng.randrange(G.order)
    h = rng.randrange(G.order)
    for x in X.elements:
        assert X.act(g, X.act(h, x)) == X.act(G.mul(g, h), x)
