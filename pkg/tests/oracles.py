"""Independent sympy oracles for the graded ring.

Classes become elements of a sympy sparse polynomial ring over QQ; truncation
filters monomials by weighted degree. Inversion uses the geometric series,
which is independent of the degree-by-degree recursion in the package.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from sympy import QQ, binomial
from sympy.polys.rings import ring

from residual_calc.class_ring import GradedClass, RingContext


@lru_cache(maxsize=None)
def poly_ring(ctx: RingContext):
    R, *gens = ring(",".join(ctx.names), QQ)
    return R, dict(zip(ctx.names, gens))


def symbols(ctx: RingContext):
    return poly_ring(ctx)[1]


def wdeg(ctx: RingContext, monom) -> int:
    return sum(e * d for e, d in zip(monom, ctx.degrees))


def to_sympy(c: GradedClass):
    R, _ = poly_ring(c.ctx)
    return R({m: QQ(q.numerator, q.denominator) for m, q in c.terms.items()})


def truncate(p, ctx: RingContext):
    R, _ = poly_ring(ctx)
    return R({m: q for m, q in p.items() if wdeg(ctx, m) <= ctx.truncation})


def inverse(p, ctx: RingContext):
    """1/(1 + u) as the truncated geometric series sum (-u)^k."""
    R, _ = poly_ring(ctx)
    zero = (0,) * len(ctx.names)
    if p.coeff(1) != 1 or any(wdeg(ctx, m) == 0 and m != zero for m in p.keys()):
        raise ValueError("degree-0 part must be 1")
    u = p - 1
    out, power = R.one, R.one
    for _ in range(ctx.truncation):
        power = truncate(-power * u, ctx)
        out += power
    return out


def degree_piece(p, ctx: RingContext, d: int):
    R, _ = poly_ring(ctx)
    return R({m: q for m, q in p.items() if wdeg(ctx, m) == d})


def substitute(p, ctx: RingContext, values: dict):
    R, gens = poly_ring(ctx)
    out = p
    for name, v in values.items():
        out = out.compose(gens[name], R(v))
    return out


def from_sympy(p, ctx: RingContext) -> GradedClass:
    return GradedClass(ctx, {tuple(m): Fraction(int(q.numerator), int(q.denominator))
                             for m, q in p.items()})


def twisted_chern(c, rank: int, l, ctx: RingContext):
    """Sum_k Sum_j binom(r-j, k-j) c_j l^(k-j), with c_j read off by degree."""
    R, _ = poly_ring(ctx)
    parts = [degree_piece(c, ctx, j) for j in range(rank + 1)]
    out = R.zero
    for k in range(rank + 1):
        for j in range(k + 1):
            out += int(binomial(rank - j, k - j)) * parts[j] * l ** (k - j)
    return out
