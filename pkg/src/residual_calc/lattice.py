"""Integer lattice arithmetic for curve classes on a surface fibration.

All values are immutable; classes are plain integer vectors in the divisor
lattice of the fiber surface, paired through the Gram matrix.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .errors import DimensionMismatch, GeometryError, NotTypeIError, ParityError


class Febd(str, Enum):
    """Formal excess base dimension mode: 0 or p_g."""

    ZERO = "zero"
    PG = "pg"


class TypeTag(str, Enum):
    TYPE_I = "typeI"
    TYPE_II = "typeII"
    ORDINARY = "ordinary"


@dataclass(frozen=True)
class SurfaceGeometry:
    """Numerical invariants of the fiber surface M and the base B.

    ``canonical`` is the coordinate vector of K_{X/B}. ``canonical_degree_rel``
    is only needed for :func:`satisfies_degree_assumption`.
    """

    gram: tuple[tuple[int, ...], ...]
    canonical: tuple[int, ...]
    p_g: int = 0
    q: int = 0
    c2: int = 0
    dim_base: int = 0
    canonical_degree_rel: int | None = None

    def __post_init__(self):
        gram = tuple(tuple(int(x) for x in row) for row in self.gram)
        object.__setattr__(self, "gram", gram)
        object.__setattr__(self, "canonical", tuple(int(x) for x in self.canonical))
        n = len(gram)
        if n == 0:
            raise GeometryError("lattice rank must be positive", field="gram")
        for i, row in enumerate(gram):
            if len(row) != n:
                raise DimensionMismatch("gram must be square", field="gram", row=i)
        for i in range(n):
            for j in range(i):
                if gram[i][j] != gram[j][i]:
                    raise GeometryError("gram must be symmetric", field="gram", entry=[i, j])
        if len(self.canonical) != n:
            raise DimensionMismatch(
                "canonical class length differs from lattice rank",
                field="canonical", expected=n, got=len(self.canonical),
            )
        for name in ("p_g", "q", "dim_base"):
            if getattr(self, name) < 0:
                raise GeometryError(f"{name} must be nonnegative", field=name)

    @property
    def rank(self) -> int:
        return len(self.gram)

    @property
    def canonical_class(self) -> LatticeClass:
        return LatticeClass(self.canonical)


@dataclass(frozen=True)
class LatticeClass:
    """A curve class: integer coordinates plus bookkeeping tags.

    Arithmetic on classes acts on coordinates and relative degree; the tags
    of the left operand are kept.
    """

    coords: tuple[int, ...]
    degree_rel: int = 0
    febd: Febd = Febd.PG
    type_tag: TypeTag = TypeTag.ORDINARY

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(int(x) for x in self.coords))
        object.__setattr__(self, "febd", Febd(self.febd))
        object.__setattr__(self, "type_tag", TypeTag(self.type_tag))

    @classmethod
    def zero(cls, rank: int) -> LatticeClass:
        return cls((0,) * rank)

    @classmethod
    def basis(cls, rank: int, i: int, degree_rel: int = 0) -> LatticeClass:
        return cls(tuple(int(j == i) for j in range(rank)), degree_rel)

    def __len__(self):
        return len(self.coords)

    def _check(self, other):
        if len(self.coords) != len(other.coords):
            raise DimensionMismatch(
                "lattice classes of different length",
                left=len(self.coords), right=len(other.coords),
            )

    def __add__(self, other: LatticeClass) -> LatticeClass:
        self._check(other)
        return LatticeClass(
            tuple(a + b for a, b in zip(self.coords, other.coords)),
            self.degree_rel + other.degree_rel, self.febd, self.type_tag,
        )

    def __sub__(self, other: LatticeClass) -> LatticeClass:
        return self + (-other)

    def __neg__(self) -> LatticeClass:
        return LatticeClass(tuple(-a for a in self.coords), -self.degree_rel,
                            self.febd, self.type_tag)

    def __mul__(self, k: int) -> LatticeClass:
        return LatticeClass(tuple(k * a for a in self.coords), k * self.degree_rel,
                            self.febd, self.type_tag)

    __rmul__ = __mul__


def lattice_sum(classes: Sequence[LatticeClass], rank: int) -> LatticeClass:
    total = LatticeClass.zero(rank)
    for c in classes:
        total = total + c
    return total


def pair(a: LatticeClass, b: LatticeClass, g: SurfaceGeometry) -> int:
    """Intersection number a^T * gram * b."""
    n = g.rank
    if len(a.coords) != n or len(b.coords) != n:
        raise DimensionMismatch(
            "class length differs from lattice rank",
            expected=n, left=len(a.coords), right=len(b.coords),
        )
    return sum(
        a.coords[i] * g.gram[i][j] * b.coords[j]
        for i in range(n) if a.coords[i]
        for j in range(n) if b.coords[j]
    )


def square(e: LatticeClass, g: SurfaceGeometry) -> int:
    return pair(e, e, g)


def k_dot(e: LatticeClass, g: SurfaceGeometry) -> int:
    return pair(g.canonical_class, e, g)


def adjunction_numerator(e: LatticeClass, g: SurfaceGeometry) -> int:
    """e^2 - K.e, checked to be even."""
    num = square(e, g) - k_dot(e, g)
    if num % 2:
        raise ParityError("e^2 - K.e is odd", e2=square(e, g), Ke=k_dot(e, g))
    return num


def is_exceptional(e: LatticeClass, g: SurfaceGeometry) -> bool:
    """Negative fiberwise self-intersection and positive relative degree."""
    return square(e, g) < 0 and e.degree_rel > 0


def expected_dimension(e: LatticeClass, g: SurfaceGeometry) -> int:
    """dim B + [p_g] + (e^2 - K.e)/2; the p_g term is dropped when febd is zero."""
    shift = g.p_g if e.febd is Febd.PG else 0
    return g.dim_base + shift + adjunction_numerator(e, g) // 2


def typeI_codimension(e: LatticeClass, g: SurfaceGeometry) -> int:
    """Codimension -(e^2 - K.e)/2 of a type I class, cross-checked against -e^2 - 1."""
    e2 = square(e, g)
    ke = k_dot(e, g)
    num = e2 - ke
    if num % 2:
        raise ParityError("e^2 - K.e is odd", e2=e2, Ke=ke)
    codim = -num // 2
    if codim != -e2 - 1:
        raise NotTypeIError(
            "class violates K.e = -e^2 - 2",
            e2=e2, Ke=ke, from_adjunction=codim, from_square=-e2 - 1,
        )
    return codim


def adjunction_delta(L_sq: int) -> int:
    """Number of nodes delta with L^2 = 2*delta - 2."""
    if L_sq % 2 or L_sq < -2:
        raise ParityError("L^2 must be even and at least -2", L_sq=L_sq)
    return L_sq // 2 + 1


def satisfies_degree_assumption(e: LatticeClass, g: SurfaceGeometry) -> bool:
    """deg_{X/B}(K - e) < 0; requires the relative degree of K."""
    if g.canonical_degree_rel is None:
        raise GeometryError("canonical_degree_rel not supplied", field="canonical_degree_rel")
    return g.canonical_degree_rel - e.degree_rel < 0


def is_characteristic(g: SurfaceGeometry) -> bool:
    """True when x^2 = K.x mod 2 for every x, i.e. adjunction parity always holds."""
    gk = [sum(g.gram[i][j] * g.canonical[j] for j in range(g.rank)) for i in range(g.rank)]
    return all((g.gram[i][i] - gk[i]) % 2 == 0 for i in range(g.rank))
