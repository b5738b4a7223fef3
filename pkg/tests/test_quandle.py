"""Difference structures, morphisms, and the central-function calculus."""

import random
from fractions import Fraction

import pytest

from frobtwist.gaussian import GaussianRational, ONE, ZERO
from frobtwist.quandle import (CentralFunction, DiffMorphism,
                               GroupWithOperators, build_structure,
                               constant_function, coset_quandle, indicator,
                               identity_morphism, inner_product, is_full,
                               is_regular, pullback, pushforward,
                               quandle_fiber_product, trivial_structure)

import structgen as sg


# --- structure axioms -------------------------------------------------------


def test_build_structure_validates_axioms():
    # idempotence broken
    with pytest.raises(ValueError):
        build_structure([[1, 0], [1, 1]])
    # not square
    with pytest.raises(ValueError):
        build_structure([[0, 0], [1]])
    # entry out of range
    with pytest.raises(ValueError):
        build_structure([[0, 5], [1, 1]])


def test_translation_morphism_law_rejected():
    # s^s = s holds but (s^t)^u != (s^u)^(t^u) at (0, 1, 2)
    bad = [[0, 2, 1], [1, 1, 1], [2, 2, 2]]
    with pytest.raises(ValueError):
        build_structure(bad)


def test_conjugation_quandle_of_sym3():
    S = sg.conj_structure(sg.sym3_group())
    assert S.n == 6
    # identity, the three transpositions, the two 3-cycles
    assert sorted(len(d) for d in S.domains()) == [1, 2, 3]
    assert is_regular(S)


def test_trivial_structure_domains_are_singletons():
    T = trivial_structure(5)
    assert T.domains() == [[0], [1], [2], [3], [4]]


# --- coset structures -------------------------------------------------------


def test_coset_quandle_abelian_identity_operator_is_trivial():
    G = sg.cyclic_group(2)
    S = coset_quandle(G, (0, 1))
    assert S.conj == trivial_structure(2).conj


def test_coset_quandle_mu3_squaring_collapses():
    # g -> g^2 on Z/3: twisted conjugacy merges everything
    G = sg.cyclic_group(3)
    S = coset_quandle(G, (0, 2, 1))
    assert len(S.domains()) == 1


def test_coset_quandle_rejects_non_bijective_operator():
    G = sg.cyclic_group(3)
    with pytest.raises(ValueError):
        coset_quandle(G, (0, 0, 0))


def test_group_with_operators_validates():
    with pytest.raises(ValueError):
        GroupWithOperators([[0, 1], [0, 1]])  # not a Latin square
    G = sg.cyclic_group(4)
    with pytest.raises(ValueError):
        G.add_operator("bad", (0, 2, 1, 3))  # not a homomorphism


def test_is_full_on_small_structures():
    flag, witness = is_full(trivial_structure(3))
    assert flag and witness[(0, 1)] == (0, 1, 2)
    flag, _ = is_full(sg.conj_structure(sg.sym3_group()))
    assert flag


# --- central functions ------------------------------------------------------


def test_central_function_constancy_enforced():
    S = sg.conj_structure(sg.sym3_group())
    with pytest.raises(ValueError):
        CentralFunction(S, [0, 1, 0, 0, 0, 0])


def test_indicator_and_inner_product():
    S = sg.conj_structure(sg.sym3_group())
    a0 = indicator(S, 0)
    a1 = indicator(S, 1)
    # disjoint supports pair to zero
    assert inner_product(a0, a1) == ZERO
    # (1_C, 1_C) = |C| / |S|
    size = len(S.domains()[1])
    assert inner_product(a1, a1) == GaussianRational(Fraction(size, 6))
    assert inner_product(constant_function(S), constant_function(S)) == ONE


def test_central_function_algebra():
    S = trivial_structure(3)
    f = CentralFunction(S, [1, 2, 3])
    g = CentralFunction(S, [GaussianRational(0, 1)] * 3)
    assert (f + g).values[2] == GaussianRational(3, 1)
    assert (f * g).values[1] == GaussianRational(0, 2)
    assert (f * GaussianRational(2)).values == tuple(
        GaussianRational(2 * k) for k in (1, 2, 3))


def test_serialization_roundtrip():
    S = sg.conj_structure(sg.klein_group())
    rng = random.Random(5)
    alpha = sg.random_central(S, rng)
    back = CentralFunction.from_json(S, alpha.to_json())
    assert back == alpha


# --- pullback / pushforward oracle cases ------------------------------------


def test_pullback_on_inclusion_of_singleton():
    # indicator of the other element pulls back to the zero function
    T = trivial_structure(2)
    sub, inc = sg.subinclusion(T, [0])
    beta = indicator(T, 1)
    assert pullback(inc, beta).values == (ZERO,)
    assert pullback(identity_morphism(T), beta) == beta


def test_pushforward_surjective_halves():
    # two-element source onto a point, alpha = (1, 0) -> 1/2
    S = trivial_structure(2)
    psi = sg.to_point(S)
    alpha = CentralFunction(S, [1, 0])
    out = pushforward(psi, alpha)
    assert out.values == (GaussianRational(Fraction(1, 2)),)


def test_pushforward_injective_doubles():
    # singleton into a trivial pair: mass 1 spreads as (2, 0)
    T = trivial_structure(2)
    sub, inc = sg.subinclusion(T, [0])
    alpha = CentralFunction(sub, [1])
    out = pushforward(inc, alpha)
    assert out.values == (GaussianRational(2), ZERO)


def test_pushforward_identity_is_identity():
    S = sg.conj_structure(sg.sym3_group())
    alpha = sg.random_central(S, random.Random(11))
    assert pushforward(identity_morphism(S), alpha) == alpha


def test_pushforward_refuses_open_image():
    # image {transposition} is not conjugation-closed in sym3
    S = sg.conj_structure(sg.sym3_group())
    point = trivial_structure(1)
    t_index = S.domains()[1][0]
    psi = DiffMorphism(point, S, (t_index,))
    with pytest.raises(ValueError):
        pushforward(psi, constant_function(point))


# --- fiber products ----------------------------------------------------------


def test_fiber_product_diagonal():
    T = sg.conj_structure(sg.klein_group())
    ident = identity_morphism(T)
    fp = quandle_fiber_product(ident, ident)
    assert not fp.empty
    assert fp.structure.n == T.n
    assert [fp.proj1(i) for i in range(T.n)] == \
        [fp.proj2(i) for i in range(T.n)]


def test_fiber_product_base_change_by_identity():
    T = trivial_structure(2)
    S2, _ = sg.product_structure(T, trivial_structure(2))
    psi2 = sg.projection(S2, [(a, b) for a in range(2) for b in range(2)],
                         T, 1)
    fp = quandle_fiber_product(identity_morphism(T), psi2)
    assert fp.structure.n == S2.n


def test_fiber_product_two_surjections_onto_point():
    point = trivial_structure(1)
    fp = quandle_fiber_product(sg.to_point(trivial_structure(2)),
                               sg.to_point(trivial_structure(2)))
    assert fp.structure.n == 4
    assert not fp.empty
    del point


def test_fiber_product_empty_flagged():
    T = trivial_structure(2)
    sub0, inc0 = sg.subinclusion(T, [0])
    sub1, inc1 = sg.subinclusion(T, [1])
    fp = quandle_fiber_product(inc0, inc1)
    assert fp.empty and fp.structure.n == 0


# --- the four laws on a mini corpus ------------------------------------------


def _projection_formula_ok(psi, alpha, beta):
    lhs = pushforward(psi, alpha * pullback(psi, beta))
    rhs = pushforward(psi, alpha) * beta
    return lhs == rhs


def test_projection_formula_mini_corpus():
    rng = random.Random(303)
    for _ in range(25):
        S = sg.random_structure(rng)
        T, psi_collapse = None, None
        sub, inc = sg.subinclusion(
            S, rng.sample(range(len(S.domains())),
                          rng.randint(1, len(S.domains()))))
        for psi in (inc, sg.to_point(S)):
            src = psi.source
            alpha = sg.random_central(src, rng)
            beta = sg.random_central(psi.target, rng)
            assert _projection_formula_ok(psi, alpha, beta)


def test_reciprocity_both_hypothesis_classes():
    rng = random.Random(52)
    for _ in range(25):
        S = sg.random_structure(rng)
        # injective with regular target
        if is_regular(S):
            ids = rng.sample(range(len(S.domains())),
                             rng.randint(1, len(S.domains())))
            sub, inc = sg.subinclusion(S, ids)
            alpha = sg.random_central(sub, rng)
            beta = sg.random_central(S, rng)
            assert inner_product(alpha, pullback(inc, beta)) == \
                inner_product(pushforward(inc, alpha), beta)
        # surjective with constant fiber: product projection
        F = trivial_structure(rng.randint(1, 2))
        P, pairs = sg.product_structure(S, F)
        proj = sg.projection(P, pairs, S, 1)
        alpha = sg.random_central(P, rng)
        beta = sg.random_central(S, rng)
        assert inner_product(alpha, pullback(proj, beta)) == \
            inner_product(pushforward(proj, alpha), beta)


def test_base_change_on_fiber_squares():
    rng = random.Random(99)
    for _ in range(20):
        T = sg.random_structure(rng, max_n=3)
        F1 = trivial_structure(rng.randint(1, 2))
        F2 = trivial_structure(rng.randint(1, 2))
        S1, pairs1 = sg.product_structure(T, F1)
        S2, pairs2 = sg.product_structure(T, F2)
        psi1 = sg.projection(S1, pairs1, T, 1)
        psi2 = sg.projection(S2, pairs2, T, 1)
        fp = quandle_fiber_product(psi1, psi2)
        alpha = sg.random_central(S1, rng)
        lhs = pushforward(fp.proj2, pullback(fp.proj1, alpha))
        rhs = pullback(psi2, pushforward(psi1, alpha))
        assert lhs == rhs


def test_pullback_functoriality():
    rng = random.Random(7)
    for _ in range(20):
        S = sg.random_structure(rng)
        ids = rng.sample(range(len(S.domains())),
                         rng.randint(1, len(S.domains())))
        mid, inc1 = sg.subinclusion(S, ids)
        ids2 = rng.sample(range(len(mid.domains())),
                          rng.randint(1, len(mid.domains())))
        small, inc2 = sg.subinclusion(mid, ids2)
        comp = inc1.compose(inc2)
        beta = sg.random_central(S, rng)
        assert pullback(comp, beta) == pullback(inc2, pullback(inc1, beta))


def test_pushforward_functoriality_constant_fiber_tower():
    rng = random.Random(8)
    for _ in range(15):
        T = sg.random_structure(rng, max_n=2)
        F1, F2 = trivial_structure(2), trivial_structure(2)
        mid, pairs_m = sg.product_structure(T, F1)
        top, pairs_t = sg.product_structure(mid, F2)
        psi = sg.projection(top, pairs_t, mid, 1)
        phi = sg.projection(mid, pairs_m, T, 1)
        comp = phi.compose(psi)
        alpha = sg.random_central(top, rng)
        assert pushforward(comp, alpha) == \
            pushforward(phi, pushforward(psi, alpha))
