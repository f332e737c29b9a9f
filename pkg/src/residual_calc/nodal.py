"""Yau-Zaslow generating series and the K3 type II vanishing check."""
from __future__ import annotations

from dataclasses import dataclass

from .lattice import adjunction_delta


@dataclass(frozen=True)
class CoeffSeries:
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if not self.coeffs or self.coeffs[0] != 1:
            raise ValueError("series must start with 1")

    @property
    def delta_max(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, delta: int) -> int:
        return self.coeffs[delta]

    def to_text(self) -> str:
        return "".join(f"{d} {n}\n" for d, n in enumerate(self.coeffs))


def _sigma(k: int) -> int:
    total = 0
    i = 1
    while i * i <= k:
        if k % i == 0:
            total += i
            if i * i != k:
                total += k // i
        i += 1
    return total


def yau_zaslow_series(c2: int, delta_max: int) -> CoeffSeries:
    """Coefficients of prod_{i>=1} (1 - q^i)^(-c2) through q^delta_max.

    Uses the logarithmic-derivative recurrence m a_m = c2 sum_k sigma(k) a_{m-k}.
    """
    if c2 < 1:
        raise ValueError("c2 must be positive")
    if delta_max < 0:
        raise ValueError("delta_max must be nonnegative")
    sig = [0] + [_sigma(k) for k in range(1, delta_max + 1)]
    a = [1]
    for m in range(1, delta_max + 1):
        s = sum(sig[k] * a[m - k] for k in range(1, m + 1))
        a.append(c2 * s // m)
    return CoeffSeries(tuple(a))


def k3_type2_vanishing(pg: int, r2_c1_is_zero: bool, p_typeII: int) -> bool:
    """True when the c_{p_g}^p insertion forces every mixed type II invariant to vanish."""
    if p_typeII < 1:
        raise ValueError("need at least one type II class")
    return pg >= 1 and bool(r2_c1_is_zero)


def virtual_count_report(L_sq: int, c2: int) -> tuple[int, int]:
    """(delta, n_delta) for a class with self-intersection L_sq."""
    delta = adjunction_delta(L_sq)
    return delta, yau_zaslow_series(c2, delta)[delta]
