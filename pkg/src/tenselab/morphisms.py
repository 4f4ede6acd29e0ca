"""t-morphisms: checking, backtracking search, image enumeration, sufficiency.

A t-morphism must match forward and backward image sets exactly at every
world (not merely commute like a graph homomorphism), which gives strong
local pruning: once a world is mapped, its mapped neighborhood must stay
inside the target's neighborhood, and whatever is missing must still be
coverable by unmapped neighbors.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Optional, Tuple

from .frames import (Frame, FrameError, GeneralFrame, as_general, bits,
                     frames_up_to_iso)


@dataclass
class TMorphism:
    source: GeneralFrame
    target: GeneralFrame
    mapping: Tuple[int, ...]          # source position -> target position
    verified: bool = False

    def apply(self, world: str) -> str:
        src = self.source.frame
        return self.target.frame.worlds[self.mapping[src.index(world)]]

    def image_mask(self, mask: int) -> int:
        out = 0
        for i in bits(mask):
            out |= 1 << self.mapping[i]
        return out

    def as_dict(self) -> dict:
        src = self.source.frame
        tgt = self.target.frame
        return {src.worlds[i]: tgt.worlds[t] for i, t in enumerate(self.mapping)}


def check(src, tgt, mapping, diagnose: bool = False):
    """Verify the forth/back image conditions and internal-set admissibility.

    Returns a verified TMorphism, or (None, reason) when diagnosing.
    """
    sg = as_general(src)
    tg = as_general(tgt)
    sf, tf = sg.frame, tg.frame
    if isinstance(mapping, dict):
        mapping = tuple(tf.index(mapping[w]) for w in sf.worlds)
    mapping = tuple(mapping)
    if len(mapping) != sf.n:
        raise FrameError("map must be total on the source worlds")

    def img(mask):
        out = 0
        for i in bits(mask):
            out |= 1 << mapping[i]
        return out

    for x in range(sf.n):
        fx = mapping[x]
        if img(sf.rows[x]) != tf.rows[fx]:
            if diagnose:
                return None, f"forth condition fails at {sf.worlds[x]}"
            return None
        if img(sf.brows[x]) != tf.brows[fx]:
            if diagnose:
                return None, f"back condition fails at {sf.worlds[x]}"
            return None
    # admissibility: preimages of target-internal sets are source-internal
    pre = [0] * tf.n
    for i, t in enumerate(mapping):
        pre[t] |= 1 << i
    if tg.blocks is None:
        blocks = [1 << t for t in range(tf.n)]
    else:
        blocks = tg.blocks
    for b in blocks:
        mask = 0
        for t in bits(b):
            mask |= pre[t]
        if not sg.is_internal(mask):
            if diagnose:
                return None, "admissibility fails for a target internal set"
            return None
    m = TMorphism(sg, tg, mapping, verified=True)
    return (m, "ok") if diagnose else m


def _bfs_order(frame: Frame) -> List[int]:
    seen = [False] * frame.n
    order = []
    for start in range(frame.n):
        if seen[start]:
            continue
        queue = [start]
        seen[start] = True
        while queue:
            x = queue.pop(0)
            order.append(x)
            nbrs = frame.rows[x] | frame.brows[x]
            for y in bits(nbrs):
                if not seen[y]:
                    seen[y] = True
                    queue.append(y)
    return order


def find_surjections(src: Frame, tgt: Frame, limit: int = 1,
                     require_admissible: bool = True) -> List[TMorphism]:
    """Backtracking search for surjective t-morphisms, deterministic order.

    Worlds are assigned in BFS order; targets are tried in index order.
    Pruning per assignment: mapped neighborhoods must embed in the target
    neighborhoods, missing target neighbors must be coverable by the still
    unmapped source neighbors, and the remaining source worlds must be able
    to cover the missing targets.
    """
    sg = as_general(src)
    tg = as_general(tgt)
    sf, tf = (sg.frame, tg.frame)
    if tf.n == 0 or sf.n == 0:
        return []
    order = _bfs_order(sf)
    found: List[TMorphism] = []
    mapping = [-1] * sf.n
    hit = [0] * tf.n   # how many source worlds map onto each target

    def feasible(x, t):
        # forth/back conditions restricted to already-assigned worlds:
        # mapped neighbors must land inside the target neighborhood, and if
        # the whole neighborhood is mapped its image must cover it exactly
        for rows, trows in ((sf.rows, tf.rows), (sf.brows, tf.brows)):
            timg = trows[t]
            covered = 0
            open_nbr = False
            for y in bits(rows[x]):
                ty = mapping[y]
                if ty >= 0:
                    if not (timg >> ty) & 1:
                        return False
                    covered |= 1 << ty
                else:
                    open_nbr = True
            if not open_nbr and covered != timg:
                return False
        # mirror: x entering the neighborhoods of assigned worlds
        for y in range(sf.n):
            ty = mapping[y]
            if ty < 0:
                continue
            if (sf.rows[y] >> x) & 1 and not (tf.rows[ty] >> t) & 1:
                return False
            if (sf.brows[y] >> x) & 1 and not (tf.brows[ty] >> t) & 1:
                return False
        return True

    def completable(depth):
        missing = sum(1 for t in range(tf.n) if hit[t] == 0)
        return missing <= sf.n - depth

    def exact_when_done():
        for x in range(sf.n):
            fx = mapping[x]
            img_f = 0
            for y in bits(sf.rows[x]):
                img_f |= 1 << mapping[y]
            if img_f != tf.rows[fx]:
                return False
            img_b = 0
            for y in bits(sf.brows[x]):
                img_b |= 1 << mapping[y]
            if img_b != tf.brows[fx]:
                return False
        return True

    def rec(depth):
        if len(found) >= limit:
            return
        if depth == sf.n:
            if all(hit[t] for t in range(tf.n)) and exact_when_done():
                m = check(sg, tg, tuple(mapping)) if require_admissible \
                    else TMorphism(sg, tg, tuple(mapping), verified=True)
                if m is not None:
                    found.append(m)
            return
        x = order[depth]
        for t in range(tf.n):
            if not feasible(x, t):
                continue
            mapping[x] = t
            hit[t] += 1
            if completable(depth + 1):
                rec(depth + 1)
            hit[t] -= 1
            mapping[x] = -1
            if len(found) >= limit:
                return

    rec(0)
    return found


def is_image(src: Frame, tgt: Frame) -> bool:
    return bool(find_surjections(src, tgt, limit=1))


def images_up_to(src: Frame, max_size: int) -> List[Frame]:
    """All t-morphic images with at most max_size worlds, up to isomorphism.

    Candidates are generated canonically rather than as quotients, because a
    quotient relation need not be a t-morphic image.
    """
    out = []
    for m in range(1, max_size + 1):
        for cand in frames_up_to_iso(m):
            if is_image(src, cand):
                out.append(cand)
    return out


def compose(f: TMorphism, g: TMorphism) -> TMorphism:
    """g after f (f: A->B, g: B->C)."""
    if f.target.frame.worlds != g.source.frame.worlds:
        raise FrameError("morphisms do not compose")
    mapping = tuple(g.mapping[t] for t in f.mapping)
    return TMorphism(f.source, g.target, mapping)


def is_sufficient(src, tgt: Frame, morphism: TMorphism, z_mask: int) -> bool:
    """Sufficiency of Z: every z in Z has u, v in Z with the same image whose
    forward (resp. backward) neighborhoods stay inside Z."""
    if not morphism.verified:
        raise FrameError("is_sufficient requires a verified t-morphism")
    sf = morphism.source.frame
    for z in bits(z_mask):
        fz = morphism.mapping[z]
        ok_u = ok_v = False
        for u in bits(z_mask):
            if morphism.mapping[u] != fz:
                continue
            if not ok_u and not (sf.rows[u] & ~z_mask):
                ok_u = True
            if not ok_v and not (sf.brows[u] & ~z_mask):
                ok_v = True
            if ok_u and ok_v:
                break
        if not (ok_u and ok_v):
            return False
    return True
