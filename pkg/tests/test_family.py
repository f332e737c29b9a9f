import random

import pytest
from hypothesis import given, settings, strategies as st

from residual_calc import randgen
from residual_calc.class_ring import GradedClass, RingContext, VirtualBundle, twist_by_line
from residual_calc.errors import DegreeOutOfRange, GeometryError, HypothesisViolation
from residual_calc.family import (
    ExpansionInputs, KuranishiModel, chi_line, chi_structure_sheaf, dimension_triple,
    fiber_product_vclass, localized_class, residual_expansion, rank_omega, stabilize,
    tau_class, w_prime_ranks,
)
from residual_calc.lattice import Febd

from conftest import cls, geom

BASE = ("a", "b", "c")


def P(ctx, text):
    return GradedClass.parse(ctx, text)


def k3_with_minus_two_curves(p: int):
    """U + (-2)^p with K = 0, c2 = 24, p_g = 1; curves e_k, C, and D with D.e_k = 2."""
    n = 2 + p
    gram = [[0] * n for _ in range(n)]
    gram[0][1] = gram[1][0] = 1
    for k in range(2, n):
        gram[k][k] = -2
    g = geom(gram, [0] * n, p_g=1, c2=24, dim_base=2)
    es = [cls(*[int(i == k) for i in range(n)], degree_rel=1, febd=Febd.PG) for k in range(2, n)]
    c = cls(1, 1, *[2] * p)
    d = cls(2, 2, *[-1] * p)
    return g, c, es, d


# --- localized class and stabilization --------------------------------------

def test_localized_unobstructed(ring6):
    seg = P(ring6, "1 + a + 2*c - a*b")
    k = KuranishiModel(VirtualBundle.trivial(ring6, 3), VirtualBundle.trivial(ring6), 0, seg)
    assert k.ed == 2
    assert localized_class(k, "z") == seg.degree_part(2)


def test_localized_line_obstruction(ring6):
    w = VirtualBundle.line(P(ring6, "a"))
    k = KuranishiModel(VirtualBundle.trivial(ring6, 2), w, 1, ring6.one())
    # ed = 1 + 2 - 1 - 1 = 1; degree-1 part of 1 + z + a
    assert localized_class(k, "z") == P(ring6, "z + a")


def test_localized_regular_zero_locus(ring6):
    w = VirtualBundle.honest(2, P(ring6, "1 + a + c"))
    normal = twist_by_line(w, "z").ctotal
    k = KuranishiModel(VirtualBundle.trivial(ring6, 3), w, 0, normal.inverse())
    assert k.ed == 0
    assert localized_class(k, "z") == ring6.one()


def test_localized_out_of_range(ring6):
    k = KuranishiModel(VirtualBundle.trivial(ring6, 1), VirtualBundle.trivial(ring6, 2), 0, ring6.one())
    with pytest.raises(DegreeOutOfRange):
        localized_class(k, "z")


def test_stabilize_examples(ring6, rng):
    k = randgen.rand_kuranishi(rng, ring6, BASE)
    one = stabilize(k, VirtualBundle.trivial(ring6, 1), "z")
    assert one.ed == k.ed
    assert localized_class(one, "z") == localized_class(k, "z")
    same = stabilize(k, VirtualBundle.trivial(ring6), "z")
    assert same.moduli_segre == k.moduli_segre and same.ed == k.ed


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_stabilization_invariance(seed):
    rng = random.Random(seed)
    ctx = RingContext.build(6, z=1, a=1, b=1, c=2)
    k = randgen.rand_kuranishi(rng, ctx, BASE)
    g = randgen.rand_honest(rng, ctx, BASE, 3)
    assert localized_class(stabilize(k, g, "z"), "z") == localized_class(k, "z")


def test_model_independence_same_k_theory(ring6, rng):
    # W as a sum of two lines versus one rank-2 bundle with the same total Chern class,
    # and V replaced by another bundle of the same rank.
    for _ in range(20):
        x = randgen.rand_homogeneous(rng, ring6, BASE, 1)
        y = randgen.rand_homogeneous(rng, ring6, BASE, 1)
        w_split = VirtualBundle.line(x) + VirtualBundle.line(y)
        w_whole = VirtualBundle.honest(2, (1 + x) * (1 + y))
        seg = randgen.rand_class(rng, ring6, BASE) + 1
        v1 = randgen.rand_honest(rng, ring6, BASE, 3, min_rank=3)
        v2 = randgen.rand_honest(rng, ring6, BASE, 3, min_rank=3)
        k1 = KuranishiModel(v1, w_split, 2, seg)
        k2 = KuranishiModel(v2, w_whole, 2, seg)
        assert localized_class(k1, "z") == localized_class(k2, "z")


# --- fiber products ---------------------------------------------------------

def test_fiber_product_examples(ring6, rng):
    a, b, c = (randgen.rand_class(rng, ring6, BASE) for _ in range(3))
    assert fiber_product_vclass(a, ring6.one(), ring6.one()) == a
    assert fiber_product_vclass(a, b) == fiber_product_vclass(b, a, ring6.one())
    assert fiber_product_vclass(fiber_product_vclass(a, b), c) == \
        fiber_product_vclass(a, fiber_product_vclass(b, c))
    ins = randgen.rand_class(rng, ring6, BASE)
    assert fiber_product_vclass(a, b, ins) == a * b * ins


# --- Riemann-Roch -----------------------------------------------------------

def test_chi_examples():
    k3 = geom([[-2]], [0], c2=24, p_g=1)
    assert chi_structure_sheaf(k3) == 2
    assert chi_line(cls(1), k3) == 2 + (-2) // 2
    assert chi_line(cls(0), k3) == 2
    abelian = geom([[0, 1], [1, 0]], [0, 0], c2=0)
    assert chi_structure_sheaf(abelian) == 0
    plane = geom([[1]], [-3], c2=3)
    # chi(O(d)) on P^2 is (d+1)(d+2)/2
    assert [chi_line(cls(d), plane) for d in range(4)] == [1, 3, 6, 10]


def test_noether_inconsistent():
    with pytest.raises(GeometryError):
        chi_structure_sheaf(geom([[-2]], [0], c2=23))


# --- rank(omega) and dimensions ---------------------------------------------

def minus_one_plane():
    # P^2 blown up once: H, E with K = -3H + E
    return geom([[1, 0], [0, -1]], [-3, 1], c2=4)


def test_rank_omega_examples():
    g = minus_one_plane()
    e = cls(0, 1, degree_rel=1)
    # e^2 = -1, C.e = -2
    assert rank_omega(cls(0, 2), [e], g) == 1
    k3 = geom([[-2]], [0], c2=24)
    # e^2 = -2, C.e = -2
    assert rank_omega(cls(1), [cls(1, degree_rel=1)], k3) == 0
    g2 = geom([[1, 0, 0], [0, -1, 0], [0, 0, -1]], [-3, 1, 1], c2=5)
    e1, e2 = cls(0, 1, 0), cls(0, 0, 1)
    # e_i^2 = -1, C.e_i = -1, e1.e2 = 0
    assert rank_omega(cls(0, 1, 1), [e1, e2], g2) == 0


def test_rank_omega_independent_of_auxiliary_class():
    g = geom([[1, 0, 0], [0, -1, 0], [0, 0, -1]], [-3, 1, 1], c2=5)
    es = [cls(0, 1, 0), cls(0, 0, 1)]
    c = cls(2, 2, 2)
    values = {rank_omega(c, es, g, cls(*d)) for d in [(1, 0, 0), (3, -1, -1), (0, 2, 1), (5, 1, -4)]}
    assert values == {2}


def test_dimension_triple_examples():
    k3 = geom([[-2]], [0], c2=24, p_g=1, dim_base=2)
    a1, a2, a3 = dimension_triple(cls(1), [cls(1, degree_rel=1)], k3)
    assert a3 == 0
    # a1: C - e = 0 gives dimB - q + p_g = 3; a2 = dimB + (-2)/2 = 1
    assert (a1, a2) == (3, 1)
    g = minus_one_plane()
    a1, a2, a3 = dimension_triple(cls(1, 0), [cls(0, 0)], g)
    assert a3 == 0


def test_w_prime_ranks():
    g = geom([[1, 0, 0], [0, -1, 0], [0, 0, -1]], [-3, 1, 1], c2=5)
    d = cls(3, -1, -1)
    e = cls(0, 1, 0)
    for n in range(6):
        # both are the length of e cap nD, which is n * (e.D) = n
        assert w_prime_ranks(cls(2, 2, 2), e, d, n, g) == (n, n)


# --- tau ----------------------------------------------------------------------

def test_tau_n_free_is_plain_top_chern():
    ctx = RingContext.build(4, z=1, n=0, x=1, y=1)
    f = twist_by_line(VirtualBundle.honest(2, P(ctx, "1 + x + x*y")), "z")
    tau, by_power = tau_class(f, "z", "n")
    # c_2(F (x) H) at z = 1 is c_0 + c_1 + c_2 of F
    assert tau == P(ctx, "1 + x + x*y")
    assert by_power == {0: P(ctx, "x*y"), 1: P(ctx, "x"), 2: ctx.one()}


def test_tau_rank_zero():
    ctx = RingContext.build(3, z=1, n=0, x=1, y=1)
    omega = VirtualBundle.line(P(ctx, "x")) - VirtualBundle.line(P(ctx, "y"))
    tau, by_power = tau_class(omega, "z", "n")
    assert tau == ctx.one() and by_power == {0: ctx.one()}


def test_tau_drops_n_terms():
    ctx = RingContext.build(3, z=1, n=0, x=1, y=1)
    # omega = L_(x + n*y) - L_y + O, rank 1; c = (1 + x + n y)/(1 + y)
    omega = VirtualBundle.line(P(ctx, "x + n*y")) - VirtualBundle.line(P(ctx, "y")) \
        + VirtualBundle.trivial(ctx, 1)
    tau, by_power = tau_class(omega, "z", "n")
    assert tau == P(ctx, "x - y")
    assert by_power == {0: P(ctx, "x - y")}


def test_tau_negative_rank():
    ctx = RingContext.build(3, z=1, n=0)
    with pytest.raises(DegreeOutOfRange):
        tau_class(-VirtualBundle.trivial(ctx, 1), "z", "n")


def test_tau_type_I_reduction(rng):
    ctx = RingContext.build(6, z=1, n=0, x=1, y=1, w=2)
    for r in range(1, 5):
        f = randgen.rand_honest(rng, ctx, ("x", "y", "w"), r, min_rank=r)
        tau, _ = tau_class(twist_by_line(f, "z"), "z", "n")
        assert tau == f.ctotal


# --- dominating term ----------------------------------------------------------

def expansion_ctx(p: int, extra=(), trunc=6):
    degs = {"z": 1, "n": 0, **{f"h{i + 1}": 1 for i in range(p)}}
    degs.update(dict(extra))
    return RingContext.build(trunc, **degs)


def test_dominating_trivial_case():
    g = minus_one_plane()
    e = cls(0, 1, degree_rel=1)
    ctx = expansion_ctx(1)
    rep = residual_expansion(cls(1, 1), [e], g, ExpansionInputs(ctx, d=cls(3, -1)))
    assert rep.rank_omega == 0
    assert rep.dominating == ctx.one()
    assert rep.tau_by_power == {0: ctx.one()}


@pytest.mark.parametrize("p", [1, 2, 3])
def test_k3_dominating_vanishes(p):
    g, c, es, d = k3_with_minus_two_curves(p)
    ctx = expansion_ctx(p, extra={"x": 1, "g1": 1})
    inp = ExpansionInputs(ctx, d=d, pg_class="g1", r2_trivial=True,
                          v_prime_chern=P(ctx, "1 + x"))
    rep = residual_expansion(c, es, g, inp)
    assert rep.rank_omega == 2 * p
    assert not rep.tau_by_power == {}
    assert rep.dominating.is_zero()
    assert rep.notes


def test_k3_without_triviality_keeps_insertion():
    g, c, es, d = k3_with_minus_two_curves(1)
    ctx = expansion_ctx(1, extra={"x": 1, "g1": 1})
    rep = residual_expansion(c, es, g, ExpansionInputs(ctx, d=d, pg_class="g1"))
    assert not rep.dominating.is_zero()
    assert all(coeff.involves("g1") for coeff in rep.dominating_by_power.values())


def test_febd_zero_drops_insertion():
    g, c, es, d = k3_with_minus_two_curves(1)
    es = [cls(*es[0].coords, degree_rel=1, febd=Febd.ZERO)]
    ctx = expansion_ctx(1, extra={"x": 1, "g1": 1})
    rep = residual_expansion(c, es, g, ExpansionInputs(ctx, d=d, pg_class="g1", r2_trivial=True))
    assert not rep.dominating.is_zero()
    assert not rep.dominating.involves("g1")


def test_rational_dominating_nonzero_and_h_free():
    g = geom([[1, 0, 0], [0, -1, 0], [0, 0, -1]], [-3, 1, 1], c2=5, dim_base=2)
    es = [cls(0, 1, 0, degree_rel=1), cls(0, 0, 1, degree_rel=1)]
    ctx = expansion_ctx(2, extra={"a": 1, "b": 2}, trunc=4)
    inp = ExpansionInputs(ctx, d=cls(3, -1, -1),
                          v_chern=(P(ctx, "1 + a + h1"), P(ctx, "1 + n*a")),
                          v_prime_chern=P(ctx, "1 + a + b"))
    rep = residual_expansion(cls(2, 2, 2), es, g, inp)
    assert rep.rank_omega == 2
    assert not rep.dominating.is_zero()
    assert not rep.dominating.involves("h1") and not rep.dominating.involves("h2")
    assert rep.reassemble("z") == rep.full
    # rank V' = sum (C + 10 D).e_i + 1 = 2 * 9; the z^2 coefficient of
    # c((1 + z)^(-18)) is binom(19, 2)
    assert rep.tau_by_power[2] == ctx.const(171)


def test_q_positive_uses_zero_section_class():
    # q = 1: [B]_p is the top Chern class of p copies of a rank-1 bundle
    g = geom([[1, 0], [0, -1]], [-3, 1], c2=4, q=1, dim_base=1)
    e = cls(0, 1, degree_rel=1)
    ctx = expansion_ctx(1, extra={"r": 1})
    inp = ExpansionInputs(ctx, d=cls(3, -1), r1_chern=P(ctx, "1 + r"))
    rep = residual_expansion(cls(0, 3), [e], g, inp)
    # a3 = -1 + 3 = 2, rank = a3 - p q = 1
    assert rep.rank_omega == 1
    assert all(coeff.involves("r") for coeff in rep.dominating_by_power.values())


def test_special_assumption_flag():
    g = minus_one_plane()
    ctx = expansion_ctx(1)
    inp = ExpansionInputs(ctx, d=cls(3, -1), special_assumption=False)
    rep = residual_expansion(cls(1, 1), [cls(0, 1, degree_rel=1)], g, inp)
    assert rep.conditional


def test_eta_tilde_is_a_correction():
    g = minus_one_plane()
    ctx = expansion_ctx(1, extra={"a": 1})
    eta = P(ctx, "a")
    rep = residual_expansion(cls(1, 1), [cls(0, 1, degree_rel=1)], g,
                                 ExpansionInputs(ctx, d=cls(3, -1), eta_tilde=eta))
    labels = [lbl for lbl, _ in rep.corrections]
    assert "eta_tilde" in labels
    assert rep.dominating == ctx.one()


@pytest.mark.parametrize("c, es, field", [
    ((1, -1), [(0, 1)], "C.e"),
    ((0, 4), [(0, 1), (1, 1)], "e_1.e_2"),
])
def test_hypothesis_violations(c, es, field):
    g = minus_one_plane()
    ctx = expansion_ctx(len(es))
    with pytest.raises(HypothesisViolation) as info:
        residual_expansion(cls(*c), [cls(*e, degree_rel=1) for e in es], g,
                               ExpansionInputs(ctx, d=cls(3, -1)))
    assert field in str(info.value)
