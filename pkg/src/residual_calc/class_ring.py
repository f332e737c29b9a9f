"""Truncated graded polynomial algebra over Q and Chern/Segre calculus.

A :class:`RingContext` fixes the named generators (each with a degree) and
the truncation degree; every product silently drops terms above it.
Generators of degree 0 are allowed and act as polynomial parameters (used
for the multiplicity ``n`` of ``nD``); they never affect the grading.

Sign convention: the total Segre class of a bundle is the formal inverse of
its total Chern class, so ``s_1 = -c_1``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping, Union

from .errors import ContextMismatch, DegreeOutOfRange, UndeclaredRank

Scalar = Union[int, Fraction]

_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


@dataclass(frozen=True)
class Variable:
    name: str
    degree: int = 1

    def __post_init__(self):
        if not _NAME.match(self.name):
            raise ValueError(f"invalid variable name {self.name!r}")
        if self.degree < 0:
            raise ValueError(f"variable {self.name!r} has negative degree")


@dataclass(frozen=True)
class RingContext:
    variables: tuple[Variable, ...]
    truncation: int

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        names = [v.name for v in self.variables]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in {names}")
        if self.truncation < 0:
            raise ValueError("truncation must be nonnegative")

    @classmethod
    def build(cls, truncation: int, **degrees: int) -> RingContext:
        """``RingContext.build(6, z=1, a=1, b=2)``."""
        return cls(tuple(Variable(k, d) for k, d in degrees.items()), truncation)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(v.degree for v in self.variables)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise ContextMismatch(f"unknown variable {name!r}", variable=name) from None

    def var(self, name) -> GradedClass:
        if isinstance(name, Variable):
            name = name.name
        i = self.index(name)
        exps = tuple(int(j == i) for j in range(len(self.variables)))
        return GradedClass(self, {exps: Fraction(1)})

    def const(self, x: Scalar) -> GradedClass:
        return GradedClass(self, {(0,) * len(self.variables): Fraction(x)})

    def one(self) -> GradedClass:
        return self.const(1)

    def zero(self) -> GradedClass:
        return GradedClass(self, {})

    def mono_degree(self, exps: tuple[int, ...]) -> int:
        return sum(e * d for e, d in zip(exps, self.degrees))

    def mono_str(self, exps: tuple[int, ...]) -> str:
        parts = []
        for v, e in zip(self.variables, exps):
            if e == 1:
                parts.append(v.name)
            elif e > 1:
                parts.append(f"{v.name}^{e}")
        return "*".join(parts) if parts else "1"

    def parse_mono(self, s: str) -> tuple[int, ...]:
        exps = [0] * len(self.variables)
        s = s.strip()
        if s == "1":
            return tuple(exps)
        for factor in s.split("*"):
            name, _, power = factor.strip().partition("^")
            exps[self.index(name)] += int(power) if power else 1
        return tuple(exps)

    def to_json(self):
        return {"truncation": self.truncation,
                "variables": [[v.name, v.degree] for v in self.variables]}

    @classmethod
    def from_json(cls, data) -> RingContext:
        return cls(tuple(Variable(n, int(d)) for n, d in data["variables"]),
                   int(data["truncation"]))


def _frac(x) -> Fraction:
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


def _fmt(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


class GradedClass:
    """An element of the truncated ring: monomial exponent tuples -> rationals."""

    __slots__ = ("ctx", "_terms", "_hash")

    def __init__(self, ctx: RingContext, terms: Mapping[tuple[int, ...], Scalar] = ()):
        self.ctx = ctx
        clean = {}
        nvars = len(ctx.variables)
        for exps, c in dict(terms).items():
            exps = tuple(exps)
            if len(exps) != nvars:
                raise ContextMismatch("monomial length differs from variable count")
            c = Fraction(c)
            if c and ctx.mono_degree(exps) <= ctx.truncation:
                clean[exps] = c
        self._terms = clean
        self._hash = None

    @property
    def terms(self) -> Mapping[tuple[int, ...], Fraction]:
        return MappingProxyType(self._terms)

    # --- arithmetic -------------------------------------------------------
    def _coerce(self, other) -> GradedClass:
        if isinstance(other, GradedClass):
            if other.ctx != self.ctx:
                raise ContextMismatch("operands live in different ring contexts")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ctx.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out.get(k, 0) + c
        return GradedClass(self.ctx, out)

    __radd__ = __add__

    def __neg__(self):
        return GradedClass(self.ctx, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return GradedClass(self.ctx, {k: c * other for k, c in self._terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        degs = self.ctx.degrees
        top = self.ctx.truncation
        out: dict[tuple[int, ...], Fraction] = {}
        right = [(k, c, self.ctx.mono_degree(k)) for k, c in other._terms.items()]
        for k1, c1 in self._terms.items():
            d1 = sum(e * d for e, d in zip(k1, degs))
            for k2, c2, d2 in right:
                if d1 + d2 > top:
                    continue
                k = tuple(a + b for a, b in zip(k1, k2))
                out[k] = out.get(k, 0) + c1 * c2
        return GradedClass(self.ctx, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers: use inverse()")
        result = self.ctx.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ctx.const(other)
        if not isinstance(other, GradedClass):
            return NotImplemented
        return self.ctx == other.ctx and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ctx, frozenset(self._terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self._terms)

    # --- structure --------------------------------------------------------
    def is_zero(self) -> bool:
        return not self._terms

    def degree_part(self, d: int) -> GradedClass:
        if not 0 <= d <= self.ctx.truncation:
            raise DegreeOutOfRange("degree outside [0, truncation]",
                                   degree=d, truncation=self.ctx.truncation)
        return GradedClass(self.ctx, {k: c for k, c in self._terms.items()
                                      if self.ctx.mono_degree(k) == d})

    def max_degree(self) -> int:
        return max((self.ctx.mono_degree(k) for k in self._terms), default=-1)

    def constant_term(self) -> Fraction:
        return self._terms.get((0,) * len(self.ctx.variables), Fraction(0))

    def involves(self, name) -> bool:
        i = self.ctx.index(name.name if isinstance(name, Variable) else name)
        return any(k[i] for k in self._terms)

    def coefficients_in(self, name) -> dict[int, GradedClass]:
        """Expand as a polynomial in one generator: {power: coefficient}."""
        i = self.ctx.index(name.name if isinstance(name, Variable) else name)
        out: dict[int, dict] = {}
        for k, c in self._terms.items():
            rest = k[:i] + (0,) + k[i + 1:]
            out.setdefault(k[i], {})[rest] = c
        return {p: GradedClass(self.ctx, t) for p, t in sorted(out.items())}

    def substitute(self, values: Mapping) -> GradedClass:
        """Ring homomorphism sending the named generators to the given values."""
        idx = {}
        for name, val in values.items():
            if isinstance(name, Variable):
                name = name.name
            idx[self.ctx.index(name)] = val if isinstance(val, GradedClass) else self.ctx.const(val)
        for val in idx.values():
            if val.ctx != self.ctx:
                raise ContextMismatch("substituted value lives in another context")
        result = self.ctx.zero()
        powers: dict[tuple[int, int], GradedClass] = {}
        for k, c in self._terms.items():
            kept = tuple(0 if i in idx else e for i, e in enumerate(k))
            term = GradedClass(self.ctx, {kept: c})
            for i, e in enumerate(k):
                if i in idx and e:
                    if (i, e) not in powers:
                        powers[(i, e)] = idx[i] ** e
                    term = term * powers[(i, e)]
            result = result + term
        return result

    def inverse(self) -> GradedClass:
        """Multiplicative inverse; requires the degree-0 part to be exactly 1."""
        if self.degree_part(0) != self.ctx.one():
            raise ValueError("only classes with degree-0 part equal to 1 are inverted here")
        parts = [self.degree_part(d) for d in range(self.ctx.truncation + 1)]
        inv = [self.ctx.one()]
        for d in range(1, self.ctx.truncation + 1):
            acc = self.ctx.zero()
            for j in range(1, d + 1):
                if parts[j]:
                    acc = acc - parts[j] * inv[d - j]
            inv.append(acc)
        total = self.ctx.zero()
        for x in inv:
            total = total + x
        return total

    # --- serialization ----------------------------------------------------
    def sorted_terms(self) -> list[tuple[tuple[int, ...], Fraction]]:
        return sorted(self._terms.items(),
                      key=lambda kc: (self.ctx.mono_degree(kc[0]), tuple(-e for e in kc[0])))

    def to_terms(self) -> list[list[str]]:
        return [[self.ctx.mono_str(k), _fmt(c)] for k, c in self.sorted_terms()]

    def to_json(self):
        return {**self.ctx.to_json(), "terms": self.to_terms()}

    @classmethod
    def from_terms(cls, ctx: RingContext, terms: Iterable) -> GradedClass:
        out: dict[tuple[int, ...], Fraction] = {}
        for mono, coeff in terms:
            k = ctx.parse_mono(mono)
            out[k] = out.get(k, 0) + _frac(coeff)
        return cls(ctx, out)

    @classmethod
    def from_json(cls, data) -> GradedClass:
        return cls.from_terms(RingContext.from_json(data), data["terms"])

    @classmethod
    def parse(cls, ctx: RingContext, text: str) -> GradedClass:
        """Parse ``"1 + a - 3/2*a*b^2"``."""
        s = text.replace(" ", "")
        if not s:
            raise ValueError("empty expression")
        terms = re.findall(r"[+-]?[^+-]+", s)
        if "".join(terms) != s:
            raise ValueError(f"cannot parse {text!r}")
        out: dict[tuple[int, ...], Fraction] = {}
        for t in terms:
            sign = -1 if t[0] == "-" else 1
            t = t.lstrip("+-")
            coeff = Fraction(sign)
            exps = [0] * len(ctx.variables)
            for factor in t.split("*"):
                if re.fullmatch(r"\d+(/\d+)?", factor):
                    coeff *= Fraction(factor)
                else:
                    name, _, power = factor.partition("^")
                    exps[ctx.index(name)] += int(power) if power else 1
            k = tuple(exps)
            out[k] = out.get(k, 0) + coeff
        return cls(ctx, out)

    def __str__(self):
        if not self._terms:
            return "0"
        pieces = []
        for k, c in self.sorted_terms():
            mono = self.ctx.mono_str(k)
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if mono == "1":
                body = str(a)
            elif a == 1:
                body = mono
            else:
                body = f"{a}*{mono}"
            pieces.append((sign, body))
        first_sign, first = pieces[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in pieces[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"GradedClass({self})"


def mul(a: GradedClass, b: GradedClass) -> GradedClass:
    return a * b


def degree_part(a: GradedClass, d: int) -> GradedClass:
    return a.degree_part(d)


# --------------------------------------------------------------------------
# virtual bundles


@dataclass(frozen=True)
class BundlePiece:
    """An honest bundle of declared rank entering a virtual bundle with a sign."""

    rank: int
    ctotal: GradedClass
    sign: int = 1

    def __post_init__(self):
        if self.rank < 0:
            raise ValueError("honest rank must be nonnegative")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        if self.ctotal.degree_part(0) != self.ctotal.ctx.one():
            raise ValueError("total Chern class must start with 1")
        if self.ctotal.max_degree() > self.rank:
            raise ValueError(
                f"honest rank-{self.rank} bundle has Chern classes above its rank")


@dataclass(frozen=True)
class VirtualBundle:
    """Formal difference of bundles: virtual rank and total Chern class.

    ``pieces`` records the honest summands when known; without them the
    bundle cannot be twisted by a line bundle.
    """

    vrank: int
    ctotal: GradedClass
    pieces: tuple[BundlePiece, ...] | None = None

    def __post_init__(self):
        if self.ctotal.degree_part(0) != self.ctotal.ctx.one():
            raise ValueError("total Chern class must have constant term exactly 1")

    @property
    def ctx(self) -> RingContext:
        return self.ctotal.ctx

    @classmethod
    def honest(cls, rank: int, ctotal: GradedClass) -> VirtualBundle:
        return cls.from_pieces(ctotal.ctx, [BundlePiece(rank, ctotal)])

    @classmethod
    def trivial(cls, ctx: RingContext, rank: int = 0) -> VirtualBundle:
        return cls.honest(rank, ctx.one())

    @classmethod
    def line(cls, c1: GradedClass) -> VirtualBundle:
        return cls.honest(1, c1.ctx.one() + c1)

    @classmethod
    def from_pieces(cls, ctx: RingContext, pieces: Iterable[BundlePiece]) -> VirtualBundle:
        pieces = tuple(pieces)
        vrank = 0
        c = ctx.one()
        for p in pieces:
            if p.ctotal.ctx != ctx:
                raise ContextMismatch("bundle pieces live in different contexts")
            vrank += p.sign * p.rank
            c = c * (p.ctotal if p.sign > 0 else p.ctotal.inverse())
        return cls(vrank, c, pieces)

    @property
    def is_honest(self) -> bool:
        return self.pieces is not None and all(p.sign > 0 for p in self.pieces)

    def __add__(self, other: VirtualBundle) -> VirtualBundle:
        return whitney_sum(self, other)

    def __neg__(self) -> VirtualBundle:
        pieces = None
        if self.pieces is not None:
            pieces = tuple(BundlePiece(p.rank, p.ctotal, -p.sign) for p in self.pieces)
        return VirtualBundle(-self.vrank, self.ctotal.inverse(), pieces)

    def __sub__(self, other: VirtualBundle) -> VirtualBundle:
        return self + (-other)

    def chern(self, k: int) -> GradedClass:
        return self.ctotal.degree_part(k)

    def substitute(self, values: Mapping) -> VirtualBundle:
        pieces = None
        if self.pieces is not None:
            pieces = tuple(BundlePiece(p.rank, p.ctotal.substitute(values), p.sign)
                           for p in self.pieces)
        return VirtualBundle(self.vrank, self.ctotal.substitute(values), pieces)


def whitney_sum(e: VirtualBundle, f: VirtualBundle) -> VirtualBundle:
    """Ranks add, total Chern classes multiply."""
    if e.ctx != f.ctx:
        raise ContextMismatch("bundles live in different contexts")
    pieces = None
    if e.pieces is not None and f.pieces is not None:
        pieces = e.pieces + f.pieces
    return VirtualBundle(e.vrank + f.vrank, e.ctotal * f.ctotal, pieces)


def segre_total(e: VirtualBundle) -> GradedClass:
    return e.ctotal.inverse()


def _line_class(ctx: RingContext, l) -> GradedClass:
    if isinstance(l, (Variable, str)):
        l = ctx.var(l)
    if l.ctx != ctx:
        raise ContextMismatch("line class lives in another context")
    if l != l.degree_part(1):
        raise ValueError("first Chern class of a line bundle must be homogeneous of degree 1")
    return l


def _twist_piece(p: BundlePiece, l: GradedClass) -> BundlePiece:
    # c(E (x) L) = sum_j c_j(E) (1 + l)^(r - j)
    ctx = l.ctx
    one_l = ctx.one() + l
    c = ctx.zero()
    for j in range(p.rank + 1):
        cj = p.ctotal.degree_part(j) if j <= ctx.truncation else ctx.zero()
        if cj:
            c = c + cj * one_l ** (p.rank - j)
    return BundlePiece(p.rank, c, p.sign)


def twist_by_line(e: VirtualBundle, l) -> VirtualBundle:
    """Tensor with a line bundle whose first Chern class is ``l``.

    ``l`` is a degree-1 :class:`Variable`, a generator name, or a homogeneous
    degree-1 class such as ``z + h1``.
    """
    if e.pieces is None:
        raise UndeclaredRank("twist needs the honest pieces of the bundle", vrank=e.vrank)
    lc = _line_class(e.ctx, l)
    return VirtualBundle.from_pieces(e.ctx, [_twist_piece(p, lc) for p in e.pieces])


def top_chern(e: VirtualBundle) -> GradedClass:
    """Chern class at the virtual rank."""
    if not 0 <= e.vrank <= e.ctx.truncation:
        raise DegreeOutOfRange("virtual rank outside [0, truncation]",
                               vrank=e.vrank, truncation=e.ctx.truncation)
    return e.ctotal.degree_part(e.vrank)


def projective_pushforward(a: GradedClass, v: VirtualBundle, z) -> GradedClass:
    """Push a polynomial in z = c_1(O(1)) forward along P(V) -> base.

    z^(r-1+i) * alpha maps to s_i(V) * alpha and lower powers of z map to 0.
    """
    zname = z.name if isinstance(z, Variable) else z
    if a.ctx != v.ctx:
        raise ContextMismatch("class and bundle live in different contexts")
    r = v.vrank
    if r < 1:
        raise ValueError("projective bundle needs rank at least 1")
    if v.ctotal.involves(zname):
        raise ValueError("bundle Chern classes must not involve the hyperplane class")
    s = segre_total(v)
    out = a.ctx.zero()
    for k, alpha in a.coefficients_in(zname).items():
        i = k - (r - 1)
        if 0 <= i <= a.ctx.truncation:
            out = out + s.degree_part(i) * alpha
    return out
