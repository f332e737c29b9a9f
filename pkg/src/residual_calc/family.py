"""Enumerative bookkeeping for type II exceptional classes.

Localized top Chern classes of Kuranishi models and their stabilization,
Riemann-Roch rank identities, the tau class, and the dominating-term
expansion of the residual contribution. Moduli Segre classes and virtual
fundamental classes are inputs or opaque symbols; nothing here computes
scheme geometry.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .class_ring import (
    GradedClass, RingContext, Variable, VirtualBundle,
    segre_total, top_chern, twist_by_line,
)
from .errors import (
    DegreeOutOfRange, GeometryError, HypothesisViolation, InternalAssertion,
)
from .lattice import (
    Febd, LatticeClass, SurfaceGeometry, adjunction_numerator, k_dot, lattice_sum, pair,
    square,
)


@dataclass(frozen=True)
class KuranishiModel:
    """Two-term model V -> W over T_B(X) with the Segre class of M in P(V)."""

    v: VirtualBundle
    w: VirtualBundle
    base_dim: int
    moduli_segre: GradedClass

    def __post_init__(self):
        if self.v.vrank < 1 or self.w.vrank < 0:
            raise ValueError("need rank V >= 1 and rank W >= 0")

    @property
    def ed(self) -> int:
        return self.base_dim + self.v.vrank - 1 - self.w.vrank


def localized_class(k: KuranishiModel, z) -> GradedClass:
    """{c(W (x) H) * s(M, P(V))}_ed."""
    ed = k.ed
    trunc = k.moduli_segre.ctx.truncation
    if not 0 <= ed <= trunc:
        raise DegreeOutOfRange("expected dimension outside [0, truncation]",
                               ed=ed, truncation=trunc)
    c = twist_by_line(k.w, z).ctotal
    return (c * k.moduli_segre).degree_part(ed)


def stabilize(k: KuranishiModel, g: VirtualBundle, z) -> KuranishiModel:
    """Replace (V, W) by (V + G, W + G).

    P(V) sits in P(V + G) with normal bundle G (x) H, so the Segre class of
    the moduli space picks up the factor s(G (x) H).
    """
    if not g.is_honest:
        raise ValueError("stabilizing bundle must be honest")
    gh = twist_by_line(g, z)
    return KuranishiModel(k.v + g, k.w + g, k.base_dim, k.moduli_segre * segre_total(gh))


def fiber_product_vclass(a: GradedClass, b: GradedClass,
                         normal_insertion: GradedClass | None = None) -> GradedClass:
    """Diagonal Gysin pullback of a x b, given as a product against the excess class."""
    out = a * b
    if normal_insertion is not None:
        out = out * normal_insertion
    return out


# --------------------------------------------------------------------------
# Riemann-Roch bookkeeping


def chi_structure_sheaf(g: SurfaceGeometry) -> int:
    """Noether: chi(O) = (K^2 + c_2)/12."""
    num = square(g.canonical_class, g) + g.c2
    if num % 12:
        raise GeometryError("K^2 + c_2 is not divisible by 12", K2=num - g.c2, c2=g.c2)
    return num // 12


def chi_line(c: LatticeClass, g: SurfaceGeometry) -> int:
    """chi(O(c)) = chi(O) + (c^2 - K.c)/2."""
    return chi_structure_sheaf(g) + adjunction_numerator(c, g) // 2


def chi_in_n(c: LatticeClass, d: LatticeClass, g: SurfaceGeometry, n_ctx: RingContext):
    """chi(O(c + nD)) as a polynomial in the parameter ``n`` (first generator of n_ctx)."""
    n = n_ctx.var(n_ctx.variables[0])
    for cls in (c, d):
        adjunction_numerator(cls, g)
    # (c + nD)^2 - K.(c + nD) = (c^2 - K.c) + n(2c.D - K.D) + n^2 D^2
    const = Fraction(chi_structure_sheaf(g)) + Fraction(square(c, g) - k_dot(c, g), 2)
    lin = Fraction(2 * pair(c, d, g) - k_dot(d, g), 2)
    quad = Fraction(square(d, g), 2)
    return n_ctx.const(const) + n * lin + n * n * quad


def _n_context() -> RingContext:
    return RingContext((Variable("n", 0),), 0)


def rank_omega_lattice(c: LatticeClass, es: Sequence[LatticeClass], g: SurfaceGeometry) -> int:
    """-q p + sum e_i^2 - C.(sum e_i) + sum_{i<j} e_i.e_j."""
    p = len(es)
    total = -g.q * p
    for i, e in enumerate(es):
        total += square(e, g) - pair(c, e, g)
        for f in es[i + 1:]:
            total += pair(e, f, g)
    return total


def rank_omega_chi(c: LatticeClass, es: Sequence[LatticeClass], g: SurfaceGeometry,
                   d: LatticeClass) -> GradedClass:
    """sum chi(O(e_i + nD)) - chi(O_{sum e}(C + nD)) - p(chi(O(nD)) + q), in n."""
    ctx = _n_context()
    zero = LatticeClass.zero(g.rank)
    big_e = lattice_sum(es, g.rank)
    total = ctx.zero()
    for e in es:
        total = total + chi_in_n(e, d, g, ctx)
    restricted = chi_in_n(c, d, g, ctx) - chi_in_n(c - big_e, d, g, ctx)
    total = total - restricted
    total = total - (chi_in_n(zero, d, g, ctx) + g.q) * len(es)
    return total


def rank_omega(c: LatticeClass, es: Sequence[LatticeClass], g: SurfaceGeometry,
               d: LatticeClass | None = None) -> int:
    """Virtual rank of omega, evaluated by the lattice formula and by Riemann-Roch in n.

    ``d`` is the auxiliary ample class D; the answer does not depend on it.
    """
    if not es:
        raise ValueError("need at least one exceptional class")
    if d is None:
        d = LatticeClass.basis(g.rank, 0)
    lattice_value = rank_omega_lattice(c, es, g)
    poly = rank_omega_chi(c, es, g, d)
    coeffs = poly.coefficients_in("n")
    const = coeffs.get(0, poly.ctx.zero()).constant_term()
    n_terms = {k: str(v) for k, v in coeffs.items() if k > 0 and v}
    if n_terms or const != lattice_value:
        raise InternalAssertion("rank(omega) evaluations disagree",
                                lattice=lattice_value, chi=str(poly))
    return lattice_value


def dimension_triple(c: LatticeClass, es: Sequence[LatticeClass],
                     g: SurfaceGeometry) -> tuple[int, int, int]:
    """(a1, a2, a3) with a1 + a2 - a3 = 2 dim B - q + p_g + (C^2 - K.C)/2 checked."""
    big_e = lattice_sum(es, g.rank)
    a1 = g.dim_base - g.q + g.p_g + adjunction_numerator(c - big_e, g) // 2
    a2 = g.dim_base + sum(adjunction_numerator(e, g) for e in es) // 2
    a3 = 0
    for i, e in enumerate(es):
        a3 += square(e, g) - pair(c, e, g)
        for f in es[i + 1:]:
            a3 += pair(e, f, g)
    rhs = 2 * g.dim_base - g.q + g.p_g + adjunction_numerator(c, g) // 2
    if a1 + a2 - a3 != rhs:
        raise InternalAssertion("dimension identity fails", a1=a1, a2=a2, a3=a3, rhs=rhs)
    return a1, a2, a3


def w_prime_ranks(c: LatticeClass, e: LatticeClass, d: LatticeClass, n: int,
                  g: SurfaceGeometry) -> tuple[int, int]:
    """Ranks of R^0 pi_* O_{e cap nD}(e + nD) and R^0 pi_* O_{e cap nD}(C + nD).

    Both are lengths of the zero-dimensional scheme e cap nD, computed here
    through Riemann-Roch as chi(O_e(L)) - chi(O_e(L - nD)).
    """
    def chi_on_e(L):
        return chi_line(L, g) - chi_line(L - e, g)

    nd = d * n
    r_self = chi_on_e(e + nd) - chi_on_e(e)
    r_c = chi_on_e(c + nd) - chi_on_e(c)
    if r_self != r_c or r_self != n * pair(e, d, g):
        raise InternalAssertion("rank equality fails", self_twist=r_self, c_twist=r_c)
    return r_self, r_c


# --------------------------------------------------------------------------
# tau class


def tau_class(omega: VirtualBundle, z, n) -> tuple[GradedClass, dict[int, GradedClass]]:
    """n-independent part of c_rank(omega), expanded in z; tau = sum over powers."""
    if omega.vrank < 0:
        raise DegreeOutOfRange("omega has negative virtual rank", vrank=omega.vrank)
    ctop = top_chern(omega)
    ctop = ctop.substitute({n: 0})
    by_power = {r: coeff for r, coeff in ctop.coefficients_in(z).items() if coeff}
    tau = omega.ctx.zero()
    for coeff in by_power.values():
        tau = tau + coeff
    return tau, by_power


# --------------------------------------------------------------------------
# dominating-term expansion


VCLASS_RESIDUAL = "[M_{C-sum e}]_vir"
VCLASS_COEXIST = "[M_{e_1..e_p}]_vir"


@dataclass(frozen=True)
class ExpansionInputs:
    """Bundle data for the expansion.

    Ranks of the honest pieces of omega are Riemann-Roch values at the
    integer ``n0``; their Chern classes may depend on the degree-0 generator
    ``n``. Missing Chern data means the trivial class 1.
    """

    ctx: RingContext
    z: str = "z"
    n: str = "n"
    h: tuple[str, ...] = ()
    d: LatticeClass | None = None
    n0: int = 10
    v_chern: tuple[GradedClass, ...] = ()
    v_prime_chern: GradedClass | None = None
    rnd_chern: GradedClass | None = None
    r1_chern: GradedClass | None = None
    pg_class: str | None = None
    r2_trivial: bool = False
    special_assumption: bool = True
    eta_tilde: GradedClass | None = None


@dataclass
class ExpansionReport:
    dominating: GradedClass
    corrections: list[tuple[str, GradedClass]]
    tau_by_power: dict[int, GradedClass]
    dominating_by_power: dict[int, GradedClass]
    full: GradedClass
    a1: int
    a2: int
    a3: int
    rank_omega: int
    conditional: bool
    symbols: tuple[str, str] = (VCLASS_RESIDUAL, VCLASS_COEXIST)
    notes: list[str] = field(default_factory=list)

    def reassemble(self, z) -> GradedClass:
        ctx = self.full.ctx
        zc = ctx.var(z)
        out = ctx.zero()
        for r, coeff in self.dominating_by_power.items():
            out = out + coeff * zc ** r
        for _, corr in self.corrections:
            out = out + corr
        return out


def _check_hypotheses(c, es, g, a3):
    for i, e in enumerate(es):
        v = pair(c, e, g)
        if v >= 0:
            raise HypothesisViolation(f"C.e_{i + 1} < 0 fails", index=i + 1, value=v)
        for j in range(i + 1, len(es)):
            w = pair(e, es[j], g)
            if w < 0:
                raise HypothesisViolation(f"e_{i + 1}.e_{j + 1} >= 0 fails",
                                          pair=[i + 1, j + 1], value=w)
    if a3 - len(es) * g.q < 0:
        raise HypothesisViolation("a3 - p*q >= 0 fails", a3=a3, p=len(es), q=g.q)


def build_omega(c: LatticeClass, es: Sequence[LatticeClass], g: SurfaceGeometry,
                inp: ExpansionInputs) -> VirtualBundle:
    """omega = sum V_i (x) H_i - V' (x) H - sum (C + R^0 O_nD(nD)) (x) H_i."""
    ctx = inp.ctx
    p = len(es)
    d = inp.d if inp.d is not None else LatticeClass.basis(g.rank, 0)
    nd = d * inp.n0
    big_e = lattice_sum(es, g.rank)
    hs = inp.h if inp.h else tuple(f"h{i + 1}" for i in range(p))
    if len(hs) != p:
        raise ValueError("need one hyperplane generator per type II class")
    v_chern = list(inp.v_chern) or [ctx.one()] * p
    if len(v_chern) != p:
        raise ValueError("need one Chern class per V_i")
    rank_v = [chi_line(e + nd, g) for e in es]
    rank_vp = chi_line(c + nd, g) - chi_line(c + nd - big_e, g)
    # trivial C plus R^0 pi_* O_nD(nD) together have rank chi(O(nD)) + q
    rank_rnd = chi_line(nd, g) + g.q - 1
    for name, r in [("V_i", min(rank_v)), ("V'", rank_vp), ("R^0 O_nD(nD)", rank_rnd)]:
        if r < 0:
            raise HypothesisViolation(f"rank of {name} negative at n0={inp.n0}; raise n0",
                                      rank=r, n0=inp.n0)
    omega = VirtualBundle.trivial(ctx)
    for i in range(p):
        vi = VirtualBundle.honest(rank_v[i], v_chern[i])
        omega = omega + twist_by_line(vi, hs[i])
    vp = VirtualBundle.honest(rank_vp, inp.v_prime_chern or ctx.one())
    omega = omega - twist_by_line(vp, inp.z)
    rnd = VirtualBundle.honest(rank_rnd, inp.rnd_chern or ctx.one())
    for i in range(p):
        piece = VirtualBundle.trivial(ctx, 1) + rnd
        omega = omega - twist_by_line(piece, hs[i])
    return omega


def pg_insertion(es: Sequence[LatticeClass], g: SurfaceGeometry, inp: ExpansionInputs):
    """c_{p_g}(R^2 pi_* O) to the power of the number of classes with febd = p_g."""
    ctx = inp.ctx
    count = sum(1 for e in es if e.febd is Febd.PG)
    if g.p_g == 0 or count == 0:
        return ctx.one()
    if inp.r2_trivial:
        return ctx.zero()
    if inp.pg_class is None:
        raise ValueError("p_g > 0 needs a generator standing for c_{p_g}(R^2 pi_* O)")
    var = ctx.variables[ctx.index(inp.pg_class)]
    if var.degree != g.p_g:
        raise ValueError("c_{p_g} generator must have degree p_g")
    if count * g.p_g > ctx.truncation:
        raise DegreeOutOfRange("p_g insertion exceeds truncation",
                               degree=count * g.p_g, truncation=ctx.truncation)
    return ctx.var(inp.pg_class) ** count


def zero_section_class(p: int, g: SurfaceGeometry, inp: ExpansionInputs) -> GradedClass:
    """[B]_p: top Chern class of p copies of R^1 pi_* O (rank q each)."""
    ctx = inp.ctx
    if g.q == 0:
        return ctx.one()
    r1 = VirtualBundle.honest(g.q, inp.r1_chern or ctx.one())
    total = VirtualBundle.trivial(ctx)
    for _ in range(p):
        total = total + r1
    return top_chern(total)


def residual_expansion(c: LatticeClass, es: Sequence[LatticeClass], g: SurfaceGeometry,
                           inp: ExpansionInputs) -> ExpansionReport:
    """Split the residual contribution into the dominating term and corrections.

    The dominating term is the coefficient multiplying both virtual-class
    symbols: the p_g insertion, the zero-section class [B]_p, and tau.
    Restricting to [B]_p trivializes every H_i, so h_i is set to 0 there.
    """
    if not es:
        raise ValueError("need at least one type II class")
    p = len(es)
    a1, a2, a3 = dimension_triple(c, es, g)
    _check_hypotheses(c, es, g, a3)
    d = inp.d if inp.d is not None else LatticeClass.basis(g.rank, 0)
    r_omega = rank_omega(c, es, g, d)
    if r_omega != a3 - p * g.q:
        raise InternalAssertion("rank(omega) != a3 - p q", rank=r_omega, a3=a3)
    omega = build_omega(c, es, g, inp)
    if omega.vrank != r_omega:
        raise InternalAssertion("built omega has the wrong rank",
                                built=omega.vrank, expected=r_omega)
    hs = inp.h if inp.h else tuple(f"h{i + 1}" for i in range(p))
    on_bp = omega.substitute({h: 0 for h in hs})
    ctop = top_chern(on_bp)
    tau, tau_by_power = tau_class(on_bp, inp.z, inp.n)
    insertion = pg_insertion(es, g, inp)
    bp = zero_section_class(p, g, inp)
    coeff = insertion * bp
    dominating = coeff * tau
    dominating_by_power = {r: coeff * t for r, t in tau_by_power.items()}
    ctop_n0 = ctop.substitute({inp.n: 0})
    corrections = [("nD-dependent", coeff * (ctop - ctop_n0))]
    full = coeff * ctop
    if inp.eta_tilde is not None:
        corrections.append(("eta_tilde", inp.eta_tilde * bp * ctop))
        full = full + inp.eta_tilde * bp * ctop
    notes = []
    if not inp.special_assumption:
        notes.append("special assumption not asserted: expansion is conditional")
    if g.p_g and inp.r2_trivial and insertion.is_zero():
        notes.append("c_{p_g}(R^2 pi_* O) vanishes: mixed invariants with type II classes are 0")
    report = ExpansionReport(
        dominating=dominating, corrections=corrections, tau_by_power=tau_by_power,
        dominating_by_power=dominating_by_power, full=full, a1=a1, a2=a2, a3=a3,
        rank_omega=r_omega, conditional=not inp.special_assumption, notes=notes,
    )
    if report.reassemble(inp.z) != full:
        raise InternalAssertion("expansion does not reassemble")
    return report
