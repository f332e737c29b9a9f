"""Collections of exceptional classes, their cone order, and the blowup schedule.

Cone membership is decided by bounded exhaustive search: a target t lies in
the cone of generators g_1..g_k when t = sum a_i g_i with integers
0 <= a_i <= max|t_j| * rank. Exceptional classes in practice have small
coordinates, so the bound is generous.

The linear order breaks ties by collection size (larger first) and then by
member indices; it is a deterministic stand-in for the orderings used in the
type I theory.
"""
from __future__ import annotations

from dataclasses import dataclass
from graphlib import CycleError, TopologicalSorter
from itertools import combinations
from typing import Sequence

from .errors import OrderCycle
from .lattice import LatticeClass, SurfaceGeometry, is_exceptional, pair


@dataclass(frozen=True)
class Collection:
    indices: tuple[int, ...]
    members: tuple[LatticeClass, ...]

    @property
    def generators(self) -> tuple[tuple[int, ...], ...]:
        return tuple(m.coords for m in self.members)

    def __len__(self):
        return len(self.indices)


@dataclass(frozen=True)
class Schedule:
    ordered: tuple[Collection, ...]
    order_relation: tuple[tuple[int, int], ...]

    @property
    def blowup_order(self) -> tuple[Collection, ...]:
        return tuple(reversed(self.ordered))

    def to_json(self):
        return {
            "ordered": [list(c.indices) for c in self.ordered],
            "blowup_order": [list(c.indices) for c in self.blowup_order],
        }


def is_admissible(c: LatticeClass, members: Sequence[LatticeClass], g: SurfaceGeometry) -> bool:
    if any(not is_exceptional(e, g) or pair(c, e, g) >= 0 for e in members):
        return False
    return all(pair(a, b, g) >= 0 for a, b in combinations(members, 2))


def enumerate_collections(c: LatticeClass, candidates: Sequence[LatticeClass],
                          g: SurfaceGeometry, max_size: int) -> list[Collection]:
    """All admissible subsets of ``candidates`` up to ``max_size``, lexicographic by index."""
    if max_size < 1:
        raise ValueError("max_size must be at least 1")
    usable = [i for i, e in enumerate(candidates)
              if is_exceptional(e, g) and pair(c, e, g) < 0]
    ok = {(i, j): pair(candidates[i], candidates[j], g) >= 0
          for i, j in combinations(usable, 2)}
    found: list[tuple[int, ...]] = []

    def extend(chosen: tuple[int, ...], start: int):
        for pos in range(start, len(usable)):
            i = usable[pos]
            if all(ok[(j, i)] for j in chosen):
                nxt = chosen + (i,)
                found.append(nxt)
                if len(nxt) < max_size:
                    extend(nxt, pos + 1)

    extend((), 0)
    found.sort()
    return [Collection(ix, tuple(candidates[i] for i in ix)) for ix in found]


def in_cone(target: Sequence[int], generators: Sequence[Sequence[int]]) -> bool:
    """Is ``target`` a nonnegative integer combination of ``generators``?"""
    target = tuple(target)
    if not any(target):
        return True
    if not generators:
        return False
    bound = max(abs(t) for t in target) * len(target)
    gens = [tuple(gv) for gv in generators]
    k = len(gens)

    def search(i: int, rest: tuple[int, ...]) -> bool:
        if not any(rest):
            return True
        if i == k:
            return False
        gv = gens[i]
        for a in range(bound + 1):
            if search(i + 1, tuple(r - a * x for r, x in zip(rest, gv))):
                return True
        return False

    return search(0, target)


def cone_contains(big: Collection, small: Collection) -> bool:
    return all(in_cone(gv, big.generators) for gv in small.generators)


def cone_partial_order(cs: Sequence[Collection]) -> list[tuple[int, int]]:
    """Edges (a, b) with cone(cs[a]) strictly inside cone(cs[b])."""
    n = len(cs)
    contains = [[a == b or cone_contains(cs[b], cs[a]) for b in range(n)] for a in range(n)]
    return [(a, b) for a in range(n) for b in range(n)
            if a != b and contains[a][b] and not contains[b][a]]


def _tiebreak(c: Collection):
    return (-len(c), c.indices)


def linearize(cs: Sequence[Collection], po: Sequence[tuple[int, int]]) -> Schedule:
    """Topological sort of the collections; reversing gives the blowup order."""
    ts: TopologicalSorter = TopologicalSorter()
    for i in range(len(cs)):
        ts.add(i)
    for a, b in po:
        ts.add(b, a)
    try:
        ts.prepare()
    except CycleError as exc:
        raise OrderCycle("cone order has a cycle", cycle=list(exc.args[1])) from None
    order: list[int] = []
    pool: list[int] = []
    while ts.is_active():
        pool.extend(ts.get_ready())
        i = min(pool, key=lambda j: _tiebreak(cs[j]))
        pool.remove(i)
        order.append(i)
        ts.done(i)
    return Schedule(tuple(cs[i] for i in order), tuple(tuple(e) for e in po))


def schedule(c: LatticeClass, candidates: Sequence[LatticeClass], g: SurfaceGeometry,
             max_size: int) -> tuple[list[Collection], list[tuple[int, int]], Schedule]:
    cs = enumerate_collections(c, candidates, g, max_size)
    po = cone_partial_order(cs)
    return cs, po, linearize(cs, po)
