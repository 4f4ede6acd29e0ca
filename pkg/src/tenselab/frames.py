"""Finite frames and general frames over bitmask adjacency rows.

World sets are Python ints used as bitsets (bit i = world at position i).
Rows give successors; the transpose is precomputed so backward images are
as cheap as forward ones.  General frames carry their internal-set family
as a partition of the world set: the family is exactly the unions of
blocks, which keeps even powerset-sized families representable.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence


class FrameError(ValueError):
    pass


def bits(mask: int) -> Iterator[int]:
    while mask:
        b = mask & -mask
        yield b.bit_length() - 1
        mask ^= b


def popcount(mask: int) -> int:
    return bin(mask).count("1")


class Frame:
    """Finite Kripke frame: ordered world ids plus a relation bitmatrix."""

    __slots__ = ("worlds", "rows", "brows", "n", "full", "_index")

    def __init__(self, worlds: Sequence[str], rows: Sequence[int]):
        self.worlds = tuple(str(w) for w in worlds)
        if len(set(self.worlds)) != len(self.worlds):
            raise FrameError("duplicate world id")
        self.n = len(self.worlds)
        if len(rows) != self.n:
            raise FrameError("relation dimensions do not match world count")
        self.full = (1 << self.n) - 1
        self.rows = tuple(int(r) & self.full for r in rows)
        brows = [0] * self.n
        for i, r in enumerate(self.rows):
            for j in bits(r):
                brows[j] |= 1 << i
        self.brows = tuple(brows)
        self._index = {w: i for i, w in enumerate(self.worlds)}

    # -- construction -----------------------------------------------------

    @staticmethod
    def make(worlds: Sequence[str], edges: Iterable[tuple]) -> "Frame":
        worlds = [str(w) for w in worlds]
        index = {}
        for w in worlds:
            if w in index:
                raise FrameError(f"duplicate world id {w!r}")
            index[w] = len(index)
        rows = [0] * len(worlds)
        for a, b in edges:
            a, b = str(a), str(b)
            if a not in index or b not in index:
                raise FrameError(f"unknown world id in edge ({a!r}, {b!r})")
            rows[index[a]] |= 1 << index[b]
        return Frame(worlds, rows)

    def index(self, world: str) -> int:
        try:
            return self._index[str(world)]
        except KeyError:
            raise FrameError(f"unknown world id {world!r}") from None

    def edges(self):
        return [(self.worlds[i], self.worlds[j])
                for i in range(self.n) for j in bits(self.rows[i])]

    def __eq__(self, other):
        return (isinstance(other, Frame) and self.worlds == other.worlds
                and self.rows == other.rows)

    def __hash__(self):
        return hash((self.worlds, self.rows))

    def __repr__(self):
        return f"Frame({list(self.worlds)}, edges={self.edges()})"

    # -- relational operators ---------------------------------------------

    def image(self, mask: int, direction: str = "fwd") -> int:
        rows = self.rows if direction == "fwd" else self.brows
        out = 0
        for i in bits(mask):
            out |= rows[i]
        return out

    def reach_sharp(self, x: int, k: Optional[int] = None) -> int:
        """R-sharp ball around world position x; k=None means the fixpoint."""
        cur = 1 << x
        steps = 0
        while True:
            if k is not None and steps >= k:
                return cur
            nxt = cur | self.image(cur, "fwd") | self.image(cur, "bwd")
            if nxt == cur:
                return cur
            cur = nxt
            steps += 1

    def rdg_of(self, x: int) -> int:
        cur = 1 << x
        k = 0
        while True:
            nxt = cur | self.image(cur, "fwd") | self.image(cur, "bwd")
            if nxt == cur:
                return k
            cur = nxt
            k += 1

    def rooted(self) -> bool:
        return self.n > 0 and self.reach_sharp(0) == self.full

    def transpose(self) -> "Frame":
        return Frame(self.worlds, self.brows)

    def is_reflexive(self) -> bool:
        return all(self.rows[i] >> i & 1 for i in range(self.n))

    def is_symmetric(self) -> bool:
        return self.rows == self.brows

    def is_transitive(self) -> bool:
        for i in range(self.n):
            out = self.image(self.rows[i], "fwd")
            if out & ~self.rows[i]:
                return False
        return True

    def closure(self, kind: str) -> "Frame":
        rows = list(self.rows)
        if kind == "reflexive":
            rows = [r | (1 << i) for i, r in enumerate(rows)]
        elif kind == "symmetric":
            rows = [r | b for r, b in zip(rows, self.brows)]
        elif kind == "transitive":
            rows = _transitive_rows(rows, self.n)
        elif kind == "reflexive_transitive":
            rows = [r | (1 << i) for i, r in enumerate(rows)]
            rows = _transitive_rows(rows, self.n)
        else:
            raise FrameError(f"unknown closure kind {kind!r}")
        return Frame(self.worlds, rows)

    def restrict(self, mask: int) -> "Frame":
        if not mask:
            raise FrameError("cannot restrict to an empty world set")
        keep = list(bits(mask))
        pos = {w: i for i, w in enumerate(keep)}
        rows = []
        for w in keep:
            r = 0
            for j in bits(self.rows[w] & mask):
                r |= 1 << pos[j]
            rows.append(r)
        return Frame([self.worlds[w] for w in keep], rows)

    # -- structural metrics -------------------------------------------------

    def clusters(self) -> list:
        """Cluster partition (transitive frames): C(x) = (R[x] & Rb[x]) | {x}."""
        if not self.is_transitive():
            raise FrameError("clusters require a transitive frame")
        seen = 0
        out = []
        for i in range(self.n):
            if seen >> i & 1:
                continue
            c = (self.rows[i] & self.brows[i]) | (1 << i)
            out.append(c)
            seen |= c
        return out

    def canonical_form(self) -> tuple:
        """Smallest (n, adjacency bits) over all world permutations."""
        best = None
        for perm in itertools.permutations(range(self.n)):
            code = 0
            pos = 0
            for i in perm:
                row = self.rows[i]
                for j in perm:
                    code |= ((row >> j) & 1) << pos
                    pos += 1
            if best is None or code < best:
                best = code
        return (self.n, best)


def _transitive_rows(rows, n):
    rows = list(rows)
    for j in range(n):
        bit = 1 << j
        rj = rows[j]
        for i in range(n):
            if rows[i] & bit:
                rows[i] |= rj
    # one pass of Warshall is enough with column order, but iterate to be safe
    changed = True
    while changed:
        changed = False
        for i in range(n):
            out = 0
            for j in bits(rows[i]):
                out |= rows[j]
            if out & ~rows[i]:
                rows[i] |= out
                changed = True
    return rows


# ---------------------------------------------------------------------------
# metrics
# ---------------------------------------------------------------------------

@dataclass
class FrameMetrics:
    rdg_per_world: tuple
    rdg: int
    rooted: bool
    dep_per_world: Optional[tuple]
    wid_plus: Optional[tuple]
    wid_minus: Optional[tuple]
    clusters: Optional[list]


def max_antichain(frame: Frame, mask: int) -> int:
    """Size of the largest antichain inside `mask` (pairwise unrelated)."""
    elems = list(bits(mask))
    best = 0

    def grow(i, chosen, count):
        nonlocal best
        if count + (len(elems) - i) <= best:
            return
        if i == len(elems):
            best = max(best, count)
            return
        w = elems[i]
        # w joins only if unrelated (both ways) to everything chosen
        ok = all(not (frame.rows[v] >> w & 1) and not (frame.rows[w] >> v & 1)
                 for v in chosen)
        if ok:
            grow(i + 1, chosen + [w], count + 1)
        grow(i + 1, chosen, count)

    grow(0, [], 0)
    return best


def _depths(frame: Frame) -> tuple:
    """dep(x): longest strict chain in the subframe on R[x]; 0 when empty.

    On a transitive frame a strict chain picks at most one point per
    cluster, so this is the longest path in the cluster condensation.
    """
    clusters = frame.clusters()
    cl_of = {}
    for ci, c in enumerate(clusters):
        for w in bits(c):
            cl_of[w] = ci
    m = len(clusters)
    succ = [set() for _ in range(m)]
    for ci, c in enumerate(clusters):
        x = next(bits(c))
        for j in bits(frame.rows[x] & ~c):
            succ[ci].add(cl_of[j])

    def down_len(ci, memo):
        if memo[ci]:
            return memo[ci]
        best = 1
        for cj in succ[ci]:
            best = max(best, 1 + down_len(cj, memo))
        memo[ci] = best
        return best

    memo = [0] * m
    for ci in range(m):
        down_len(ci, memo)

    deps = []
    for x in range(frame.n):
        r = frame.rows[x]
        if not r:
            deps.append(0)
            continue
        present = {cl_of[w] for w in bits(r)}
        # chains must stay inside R[x]; since R[x] is successor-closed on a
        # transitive frame, the global downward lengths apply
        deps.append(max(memo[ci] for ci in present))
    return tuple(deps)


def metrics(frame: Frame) -> FrameMetrics:
    rdgs = tuple(frame.rdg_of(x) for x in range(frame.n))
    rooted = frame.rooted()
    if frame.is_transitive():
        deps = _depths(frame)
        widp = tuple(max_antichain(frame, frame.rows[x]) for x in range(frame.n))
        widm = tuple(max_antichain(frame, frame.brows[x]) for x in range(frame.n))
        cls = frame.clusters()
    else:
        deps = widp = widm = cls = None
    return FrameMetrics(rdgs, max(rdgs, default=0), rooted, deps, widp, widm, cls)


def transitive_metrics(frame: Frame) -> FrameMetrics:
    if not frame.is_transitive():
        raise FrameError("depth/width/cluster metrics require a transitive frame")
    return metrics(frame)


# ---------------------------------------------------------------------------
# general frames
# ---------------------------------------------------------------------------

class GeneralFrame:
    """Frame plus internal-set family, stored as a block partition.

    The family is exactly the set of unions of blocks; `blocks == None`
    means the full powerset (all singletons).  This representation is
    closed under the four operators by construction of `close_internal`.
    """

    __slots__ = ("frame", "blocks")

    def __init__(self, frame: Frame, blocks: Optional[Sequence[int]] = None):
        self.frame = frame
        if blocks is not None:
            blocks = tuple(sorted(int(b) for b in blocks))
            total = 0
            for b in blocks:
                if b & total:
                    raise FrameError("internal blocks must partition the worlds")
                total |= b
            if total != frame.full:
                raise FrameError("internal blocks must cover the worlds")
        self.blocks = blocks

    @property
    def n_blocks(self) -> int:
        return self.frame.n if self.blocks is None else len(self.blocks)

    def family_size(self) -> int:
        return 1 << self.n_blocks

    def internal_sets(self, limit: Optional[int] = None) -> Iterator[int]:
        """All internal sets in canonical order (ascending as bitsets)."""
        if self.blocks is None:
            n = 1 << self.frame.n
            count = n if limit is None else min(n, limit)
            for m in range(count):
                yield m
            return
        masks = sorted(_union(self.blocks, sel)
                       for sel in range(1 << len(self.blocks)))
        if limit is not None:
            masks = masks[:limit]
        yield from masks

    def is_internal(self, mask: int) -> bool:
        if self.blocks is None:
            return True
        rest = mask
        for b in self.blocks:
            if rest & b:
                if (rest & b) != b:
                    return False
                rest &= ~b
        return rest == 0

    def __repr__(self):
        fam = "powerset" if self.blocks is None else f"{len(self.blocks)} blocks"
        return f"GeneralFrame({self.frame!r}, internal={fam})"


def _union(blocks, sel):
    m = 0
    for i in bits(sel):
        m |= blocks[i]
    return m


def as_general(f) -> GeneralFrame:
    return f if isinstance(f, GeneralFrame) else GeneralFrame(f)


def close_internal(frame: Frame, generators: Iterable[int]) -> GeneralFrame:
    """Least internal family containing the generators (and the empty set).

    Both images are additive, so the closure under intersection, complement
    and images is the Boolean algebra of a partition: start from the
    overlap partition of the generators and refine by block images until
    every block image is a union of blocks.
    """
    blocks = [frame.full] if frame.full else []
    for g in generators:
        g &= frame.full
        nxt = []
        for b in blocks:
            if b & g and b & ~g:
                nxt.append(b & g)
                nxt.append(b & ~g)
            else:
                nxt.append(b)
        blocks = nxt
    changed = True
    while changed:
        changed = False
        for b in list(blocks):
            for img in (frame.image(b, "fwd"), frame.image(b, "bwd")):
                nxt = []
                for c in blocks:
                    if c & img and c & ~img:
                        nxt.append(c & img)
                        nxt.append(c & ~img)
                        changed = True
                    else:
                        nxt.append(c)
                blocks = nxt
    return GeneralFrame(frame, blocks)


def verify_closed(gf: GeneralFrame, sample_limit: int = 4096) -> bool:
    """Re-check the four closure conditions pointwise on the family."""
    fr = gf.frame
    if gf.blocks is None:
        return True
    fam = list(gf.internal_sets(limit=sample_limit))
    if 0 not in fam:
        return False
    for u in fam:
        if not gf.is_internal(fr.full & ~u):
            return False
        if not gf.is_internal(fr.image(u, "fwd")):
            return False
        if not gf.is_internal(fr.image(u, "bwd")):
            return False
    for u, v in itertools.islice(itertools.combinations(fam, 2), 20000):
        if not gf.is_internal(u & v):
            return False
    return True


def subframe(gf: GeneralFrame, mask: int) -> GeneralFrame:
    """Induced subframe; the internal family restricts blockwise."""
    if not mask:
        raise FrameError("subframe requires a nonempty world set")
    fr = gf.frame.restrict(mask)
    if gf.blocks is None:
        return GeneralFrame(fr)
    keep = list(bits(mask))
    pos = {w: i for i, w in enumerate(keep)}
    restricted = set()
    for b in gf.blocks:
        r = 0
        for j in bits(b & mask):
            r |= 1 << pos[j]
        if r:
            restricted.add(r)
    # restricted blocks stay disjoint (they come from a partition)
    return GeneralFrame(fr, sorted(restricted))


def point_generated(gf: GeneralFrame, x: int) -> GeneralFrame:
    return subframe(gf, gf.frame.reach_sharp(x))


# ---------------------------------------------------------------------------
# JSON round trip
# ---------------------------------------------------------------------------

def frame_to_json(f) -> dict:
    gf = f if isinstance(f, GeneralFrame) else None
    fr = gf.frame if gf else f
    doc = {"worlds": list(fr.worlds), "edges": [[a, b] for a, b in fr.edges()]}
    if gf is not None and gf.blocks is not None:
        doc["generators"] = [[fr.worlds[i] for i in bits(b)] for b in gf.blocks]
    return doc


def frame_from_json(doc: dict):
    fr = Frame.make(doc["worlds"], [tuple(e) for e in doc["edges"]])
    for kind in doc.get("closures", []):
        fr = fr.closure(kind)
    if "generators" in doc:
        gens = []
        for g in doc["generators"]:
            m = 0
            for w in g:
                m |= 1 << fr.index(w)
            gens.append(m)
        return close_internal(fr, gens)
    return fr


def load_frame(path: str):
    with open(path) as fh:
        return frame_from_json(json.load(fh))


def dump_frame(f, path: str):
    with open(path, "w") as fh:
        json.dump(frame_to_json(f), fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# small-frame enumeration (suites)
# ---------------------------------------------------------------------------

def all_frames(n: int) -> Iterator[Frame]:
    """All labeled frames on worlds 0..n-1."""
    names = [str(i) for i in range(n)]
    for code in range(1 << (n * n)):
        rows = [(code >> (n * i)) & ((1 << n) - 1) for i in range(n)]
        yield Frame(names, rows)


_CANON_TABLES: dict = {}


def _canonical_codes(n: int):
    """numpy table mapping every n-world relation code to its canonical code."""
    import numpy as np

    tab = _CANON_TABLES.get(n)
    if tab is not None:
        return tab
    codes = np.arange(1 << (n * n), dtype=np.uint32)
    best = codes.copy()
    for perm in itertools.permutations(range(n)):
        out = np.zeros_like(codes)
        for i in range(n):
            for j in range(n):
                src = n * perm[i] + perm[j]
                dst = n * i + j
                out |= ((codes >> np.uint32(src)) & np.uint32(1)) << np.uint32(dst)
        np.minimum(best, out, out=best)
    _CANON_TABLES[n] = best
    return best


def frames_up_to_iso(n: int, predicate=None) -> list:
    """Canonical representatives of frames on exactly n worlds."""
    if n == 0:
        return []
    if n <= 4:
        import numpy as np

        tab = _canonical_codes(n)
        codes = np.unique(tab)
        names = [str(i) for i in range(n)]
        width = (1 << n) - 1
        out = []
        for code in codes.tolist():
            rows = [(code >> (n * i)) & width for i in range(n)]
            f = Frame(names, rows)
            if predicate is None or predicate(f):
                out.append(f)
        return out
    seen = set()
    out = []
    for f in all_frames(n):
        if predicate is not None and not predicate(f):
            continue
        key = f.canonical_form()
        if key not in seen:
            seen.add(key)
            out.append(f)
    return out
