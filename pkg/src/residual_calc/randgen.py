"""Seeded random instances for property checks (CLI tasks and tests)."""
from __future__ import annotations

import random
from fractions import Fraction
from itertools import product
from typing import Sequence

from .class_ring import BundlePiece, GradedClass, RingContext, VirtualBundle, twist_by_line
from .family import KuranishiModel
from .lattice import LatticeClass, SurfaceGeometry, pair


def rand_fraction(rng: random.Random, size: int = 5) -> Fraction:
    num = rng.randint(-size, size)
    return Fraction(num, rng.randint(1, 3))


def monomials_of_degree(ctx: RingContext, names: Sequence[str], d: int) -> list[tuple[int, ...]]:
    idx = [ctx.index(n) for n in names]
    degs = [ctx.degrees[i] for i in idx]
    bounds = [d // dg if dg else 0 for dg in degs]
    out = []
    for exps in product(*(range(b + 1) for b in bounds)):
        if sum(e * dg for e, dg in zip(exps, degs)) == d:
            full = [0] * len(ctx.variables)
            for i, e in zip(idx, exps):
                full[i] = e
            out.append(tuple(full))
    return out


def rand_homogeneous(rng, ctx: RingContext, names: Sequence[str], d: int,
                     density: float = 0.6) -> GradedClass:
    terms = {m: rand_fraction(rng) for m in monomials_of_degree(ctx, names, d)
             if rng.random() < density}
    return GradedClass(ctx, terms)


def rand_chern(rng, ctx: RingContext, names: Sequence[str], rank: int) -> GradedClass:
    """Random total Chern class 1 + c_1 + ... + c_rank (capped at truncation)."""
    c = ctx.one()
    for k in range(1, min(rank, ctx.truncation) + 1):
        c = c + rand_homogeneous(rng, ctx, names, k)
    return c


def rand_honest(rng, ctx: RingContext, names: Sequence[str], max_rank: int,
                min_rank: int = 0) -> VirtualBundle:
    r = rng.randint(min_rank, max_rank)
    return VirtualBundle.honest(r, rand_chern(rng, ctx, names, r))


def rand_class(rng, ctx: RingContext, names: Sequence[str]) -> GradedClass:
    c = ctx.zero()
    for d in range(ctx.truncation + 1):
        c = c + rand_homogeneous(rng, ctx, names, d, density=0.4)
    return c


def rand_kuranishi(rng, ctx: RingContext, names: Sequence[str], max_v: int = 4,
                   max_w: int = 3) -> KuranishiModel:
    v = rand_honest(rng, ctx, names, max_v, min_rank=1)
    w = rand_honest(rng, ctx, names, max_w)
    shift = v.vrank - 1 - w.vrank
    base_dim = rng.randint(max(0, -shift), ctx.truncation - shift)
    return KuranishiModel(v, w, base_dim, rand_class(rng, ctx, names) + 1)


def characteristic_vector(gram) -> tuple[int, ...]:
    """A 0/1 vector v with gram.v = diag(gram) mod 2 (exists for every symmetric gram)."""
    n = len(gram)
    for bits in product((0, 1), repeat=n):
        if all((sum(gram[i][j] * bits[j] for j in range(n)) - gram[i][i]) % 2 == 0
               for i in range(n)):
            return bits
    raise AssertionError("no characteristic vector")


def rand_geometry(rng, max_rank: int = 5) -> SurfaceGeometry:
    """Random symmetric lattice with characteristic K and Noether-consistent c_2."""
    n = rng.randint(1, max_rank)
    gram = [[0] * n for _ in range(n)]
    for i in range(n):
        gram[i][i] = rng.randint(-3, 2)
        for j in range(i):
            gram[i][j] = gram[j][i] = rng.randint(-1, 2)
    base = characteristic_vector(gram)
    k = tuple(b + 2 * rng.randint(-1, 1) for b in base)
    k2 = sum(k[i] * gram[i][j] * k[j] for i in range(n) for j in range(n))
    c2 = 12 * rng.randint(0, 3) - k2
    return SurfaceGeometry(tuple(map(tuple, gram)), k, p_g=rng.randint(0, 2),
                           q=rng.randint(0, 2), c2=c2, dim_base=rng.randint(0, 4))


def rand_vector(rng, n: int, size: int = 2) -> LatticeClass:
    return LatticeClass(tuple(rng.randint(-size, size) for _ in range(n)),
                        degree_rel=rng.randint(1, 3))


def rand_admissible(rng, g: SurfaceGeometry, max_p: int = 3, tries: int = 400):
    """(C, [e_i]) with C.e_i < 0 and e_i.e_j >= 0, or None if sampling fails."""
    for _ in range(tries):
        p = rng.randint(1, max_p)
        c = rand_vector(rng, g.rank)
        es = [rand_vector(rng, g.rank) for _ in range(p)]
        if any(not any(e.coords) for e in es):
            continue
        if all(pair(c, e, g) < 0 for e in es) and all(
                pair(es[i], es[j], g) >= 0 for i in range(p) for j in range(i + 1, p)):
            return c, es
    return None


def rand_instance(rng, max_rank: int = 5, max_p: int = 3):
    """Geometry plus an admissible (C, [e_i]); resamples the geometry when needed."""
    while True:
        g = rand_geometry(rng, max_rank)
        found = rand_admissible(rng, g, max_p)
        if found is not None:
            return (g, *found)


def rand_exceptional_candidates(rng, g: SurfaceGeometry, count: int, size: int = 2):
    return [rand_vector(rng, g.rank, size) for _ in range(count)]


def rand_omega_pieces(rng, ctx: RingContext, names: Sequence[str], n: str, z: str,
                      max_pieces: int = 3, max_rank: int = 3):
    """Signed honest pieces (sign, rank, n-free Chern, n-part, twisted-by-z flag)."""
    pieces = []
    for _ in range(rng.randint(1, max_pieces)):
        sign = rng.choice((1, -1))
        r = rng.randint(0, max_rank)
        base = rand_chern(rng, ctx, names, r)
        pieces.append((sign, r, base, rand_n_part(rng, ctx, names, n, r), rng.random() < 0.7))
    return pieces


def rand_n_part(rng, ctx: RingContext, names: Sequence[str], n: str, r: int) -> GradedClass:
    """n * (random classes of degree 1..r): the explicitly n-dependent Chern summands."""
    nv = ctx.var(n)
    part = ctx.zero()
    for k in range(1, min(r, ctx.truncation) + 1):
        part = part + nv * rand_homogeneous(rng, ctx, names, k) \
            + nv * nv * rand_homogeneous(rng, ctx, names, k, density=0.3)
    return part


def assemble_omega(ctx: RingContext, pieces, z: str, with_n: bool = True) -> VirtualBundle:
    omega = VirtualBundle.trivial(ctx)
    for sign, r, base, n_part, twisted in pieces:
        c = base + n_part if with_n else base
        b = VirtualBundle.from_pieces(ctx, [BundlePiece(r, c, 1)])
        if twisted:
            b = twist_by_line(b, z)
        omega = omega + b if sign > 0 else omega - b
    return omega
