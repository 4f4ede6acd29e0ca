"""Exact finite/cofinite region sets.

A region is either finite (fixed id inventory) or omega-indexed.  A
RegionSet stores one part per region: finite regions get plain frozensets;
omega regions get FIN (exactly these indices) or COFIN (all but these).
All Boolean operations stay in this normal form, so every set built from
them has a finite-or-cofinite trace on every omega region.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, Optional, Tuple

FIN = "fin"
COFIN = "cofin"


@dataclass(frozen=True)
class Region:
    name: str
    ids: Optional[tuple] = None     # None marks an omega-indexed region

    @property
    def is_omega(self) -> bool:
        return self.ids is None


class Part:
    """One region's contribution: (mode, members/exceptions)."""

    __slots__ = ("mode", "items")

    def __init__(self, mode: str, items: Iterable):
        self.mode = mode
        self.items = frozenset(items)

    def __eq__(self, other):
        return (isinstance(other, Part) and self.mode == other.mode
                and self.items == other.items)

    def __hash__(self):
        return hash((self.mode, self.items))

    def __repr__(self):
        inner = sorted(self.items, key=repr)
        return f"{self.mode}{inner}"


EMPTY_PART = Part(FIN, ())


def _complement(region: Region, p: Part) -> Part:
    if region.is_omega:
        return Part(COFIN if p.mode == FIN else FIN, p.items)
    return Part(FIN, set(region.ids) - p.items)


def _intersect(p: Part, q: Part) -> Part:
    if p.mode == FIN and q.mode == FIN:
        return Part(FIN, p.items & q.items)
    if p.mode == FIN:
        return Part(FIN, p.items - q.items)
    if q.mode == FIN:
        return Part(FIN, q.items - p.items)
    return Part(COFIN, p.items | q.items)


def _union(p: Part, q: Part) -> Part:
    if p.mode == FIN and q.mode == FIN:
        return Part(FIN, p.items | q.items)
    if p.mode == COFIN and q.mode == COFIN:
        return Part(COFIN, p.items & q.items)
    cof, fin = (p, q) if p.mode == COFIN else (q, p)
    return Part(COFIN, cof.items - fin.items)


class RegionSet:
    """Immutable union of per-region parts over a fixed schema."""

    __slots__ = ("schema", "parts")

    def __init__(self, schema: Tuple[Region, ...], parts: Dict[str, Part]):
        self.schema = schema
        clean = {}
        for r in schema:
            p = parts.get(r.name, EMPTY_PART)
            if p.mode == FIN and not p.items:
                continue
            clean[r.name] = p
        self.parts = clean

    def _region(self, name: str) -> Region:
        for r in self.schema:
            if r.name == name:
                return r
        raise KeyError(name)

    def part(self, name: str) -> Part:
        return self.parts.get(name, EMPTY_PART)

    def complement(self) -> "RegionSet":
        return RegionSet(self.schema, {
            r.name: _complement(r, self.part(r.name)) for r in self.schema})

    def intersect(self, other: "RegionSet") -> "RegionSet":
        return RegionSet(self.schema, {
            r.name: _intersect(self.part(r.name), other.part(r.name))
            for r in self.schema})

    def union(self, other: "RegionSet") -> "RegionSet":
        return RegionSet(self.schema, {
            r.name: _union(self.part(r.name), other.part(r.name))
            for r in self.schema})

    def difference(self, other: "RegionSet") -> "RegionSet":
        return self.intersect(other.complement())

    def is_empty(self) -> bool:
        return not self.parts

    def contains(self, region: str, item) -> bool:
        p = self.part(region)
        if p.mode == FIN:
            return item in p.items
        return item not in p.items

    def min_index(self, region: str) -> Optional[int]:
        """Smallest omega index in the part; None when empty."""
        p = self.part(region)
        if p.mode == FIN:
            return min(p.items) if p.items else None
        i = 0
        while i in p.items:
            i += 1
        return i

    def max_index(self, region: str):
        """Largest omega index, or math.inf for cofinite parts."""
        p = self.part(region)
        if p.mode == COFIN:
            return float("inf")
        return max(p.items) if p.items else None

    def iter_window(self, region: str, bound: int):
        """Indices of an omega part inside [0, bound]."""
        p = self.part(region)
        for i in range(bound + 1):
            if (i in p.items) != (p.mode == COFIN):
                yield i

    def __eq__(self, other):
        return isinstance(other, RegionSet) and self.parts == other.parts

    def __hash__(self):
        return hash(tuple(sorted(self.parts.items())))

    def __repr__(self):
        if not self.parts:
            return "RegionSet(empty)"
        body = ", ".join(f"{n}={p!r}" for n, p in sorted(self.parts.items()))
        return f"RegionSet({body})"


def fin(items) -> Part:
    return Part(FIN, items)


def cofin(exceptions=()) -> Part:
    return Part(COFIN, exceptions)
