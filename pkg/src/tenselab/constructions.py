"""Frame combinators: point-glue combination, reflective unfolding, the
bilayer de-symmetrizer, and the r-degree booster built from them.

Copy k of world x is named "x@k"; gluing keeps the left-hand id.  Those
deterministic names make the Figure-style regression pins exact.
"""

from __future__ import annotations

from typing import Optional, Tuple

from .formulas import Formula
from .frames import Frame, FrameError, bits
from .morphisms import TMorphism, check


def combine(left: Frame, w: str, right: Frame, u: str,
            transitive: bool = False) -> Frame:
    """Glue `right` onto `left`, identifying right's u with left's w.

    The glued world keeps the id w; u's in/out edges are rerouted through
    it.  Colliding right-hand ids are renamed with a ~ suffix.
    """
    wi = left.index(w)
    ui = right.index(u)
    taken = set(left.worlds)
    rename = {}
    for x in right.worlds:
        if x == u:
            continue
        nx = x
        while nx in taken:
            nx = nx + "~"
        rename[x] = nx
        taken.add(nx)
    worlds = list(left.worlds) + [rename[x] for x in right.worlds if x != u]
    edges = list(left.edges())
    for a, b in right.edges():
        if a == u and b == u:
            edges.append((w, w))
        elif a == u:
            edges.append((w, rename[b]))
        elif b == u:
            edges.append((rename[a], w))
        else:
            edges.append((rename[a], rename[b]))
    out = Frame.make(worlds, edges)
    return out.closure("transitive") if transitive else out


def _copy(frame: Frame, k: int) -> Frame:
    worlds = [f"{x}@{k}" for x in frame.worlds]
    return Frame(worlds, frame.rows)


def unfold(frame: Frame, w: str, u: str, n: int,
           transitive: bool = False) -> Frame:
    """n-step reflective unfolding by the glue pair (w, u).

    Even steps glue a fresh copy at the u-points, odd steps at the w-points,
    so consecutive copies alternate which designated point they share.
    """
    if w == u:
        raise FrameError("unfolding needs two distinct glue points")
    frame.index(w), frame.index(u)
    if n < 1:
        raise FrameError("n must be >= 1")
    cur = _copy(frame, 0)
    for step in range(2, n + 1):
        fresh = _copy(frame, step - 1)
        if step % 2 == 0:           # step = 2k+2: glue u_{2k} + u_{2k+1}
            cur = combine(cur, f"{u}@{step - 2}", fresh, f"{u}@{step - 1}")
        else:                       # step = 2k+3: glue w_{2k+1} + w_{2k+2}
            cur = combine(cur, f"{w}@{step - 2}", fresh, f"{w}@{step - 1}")
    return cur.closure("transitive") if transitive else cur


def projection(frame: Frame, w: str, u: str, n: int,
               transitive: bool = False) -> TMorphism:
    """The copy-collapsing map of the unfolding, verified as a t-morphism.

    In transitive mode the source is the transitive closure of the
    unfolding and the base frame must itself be transitive.
    """
    if transitive and not frame.is_transitive():
        raise FrameError("transitive projection requires a transitive base")
    unf = unfold(frame, w, u, n, transitive=transitive)
    mapping = tuple(frame.index(copy_base(x)) for x in unf.worlds)
    m = check(unf, frame, mapping)
    if m is None:
        raise FrameError("unfolding projection failed the t-morphism check")
    return m


def bilayer(cluster: Frame) -> Tuple[Frame, TMorphism]:
    """Two-layer de-symmetrization of a non-degenerate cluster.

    Worlds are (x, layer) with an edge whenever the layers are ordered;
    the first-coordinate projection is returned, verified.
    """
    n = cluster.n
    if n == 0 or any(cluster.rows[i] != cluster.full for i in range(n)):
        raise FrameError("bilayer input must be a non-degenerate full cluster")
    worlds = [f"{x}@0" for x in cluster.worlds] + [f"{x}@1" for x in cluster.worlds]
    rows = []
    lower = (1 << n) - 1
    upper = lower << n
    for _ in range(n):
        rows.append(lower | upper)      # layer 0 sees both layers
    for _ in range(n):
        rows.append(upper)              # layer 1 sees only itself
    out = Frame(worlds, rows)
    mapping = tuple(list(range(n)) + list(range(n)))
    m = check(out, cluster, mapping)
    if m is None:
        raise FrameError("bilayer projection failed the t-morphism check")
    return out, m


def boost_rdg(frame: Frame, y: str, phi: Formula, n: int,
              mode: str = "plain") -> Frame:
    """(4n+2)-fold unfolding that pushes r-degree to at least n while the
    copy-0 image of y keeps satisfying phi (callers verify satisfaction).

    plain mode glues at the first two worlds in file order; transitive mode
    requires a transitive frame and glues at the first lexicographic pair
    outside the relation, then closes transitively.
    """
    frame.index(y)
    copies = 4 * n + 2
    if mode == "plain":
        if frame.n < 2:
            raise FrameError("plain boost needs at least two worlds")
        w, u = frame.worlds[0], frame.worlds[1]
        return unfold(frame, w, u, copies)
    if mode == "transitive":
        if not frame.is_transitive():
            raise FrameError("transitive boost needs a transitive frame")
        pair: Optional[Tuple[str, str]] = None
        for i in range(frame.n):
            for j in range(frame.n):
                if i != j and not (frame.rows[i] >> j) & 1:
                    pair = (frame.worlds[i], frame.worlds[j])
                    break
            if pair:
                break
        if pair is None:
            raise FrameError("no glue pair outside the transitive relation")
        return unfold(frame, pair[0], pair[1], copies, transitive=True)
    raise ValueError(f"unknown boost mode {mode!r}")


def copy_index(world: str) -> int:
    """Copy number of an unfolded world id ("x@3" -> 3)."""
    return int(world.rsplit("@", 1)[1].rstrip("~"))


def copy_base(world: str) -> str:
    return world.rsplit("@", 1)[0]
