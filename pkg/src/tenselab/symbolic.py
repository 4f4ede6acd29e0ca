"""Exact symbolic representation of the two infinite general frames.

Both families combine a finite frame F_L (glued at its designated world
u_L) with an infinite ladder part.  Images are computed by threshold
arithmetic on finite/cofinite region parts, so truth sets of arbitrary
formulas (under region-valued valuations) are exact; nothing is sampled
except admissible-set generation, which is exact the other way around:
every sample is a provable member of the internal family.

The Kt ladder's bridge orientation follows the truth lemma it must
satisfy, not the combination formula as printed (the two disagree; see
the project notes): every chain point sees u_L, and u_L heads a short
internal tail u_L -> a -> w_L.
"""

from __future__ import annotations

import random
from typing import Dict, List, Optional, Tuple

from .families import bd
from .formulas import BOT, BOTTOM, IMP, PDIA, VAR, Formula, neg, past_box
from .frames import (Frame, FrameError, GeneralFrame, bits, close_internal,
                     frame_from_json, frame_to_json)
from .regions import COFIN, Part, Region, RegionSet, cofin, fin
from .regions import _union as part_union
from .semantics import satisfiable_at


class SymbolicFrame:
    """Shared machinery: generic truth sets over family-specific images."""

    schema: Tuple[Region, ...]

    # -- region set constructors -----------------------------------------

    def empty(self) -> RegionSet:
        return RegionSet(self.schema, {})

    def full(self) -> RegionSet:
        return self.empty().complement()

    def make(self, **parts) -> RegionSet:
        out = {}
        for name, val in parts.items():
            if isinstance(val, Part):
                out[name] = val
            else:
                out[name] = fin(val)
        return RegionSet(self.schema, out)

    def singleton(self, region: str, item) -> RegionSet:
        return self.make(**{region: [item]})

    # -- semantics --------------------------------------------------------

    def image(self, rs: RegionSet, direction: str) -> RegionSet:
        raise NotImplementedError

    def truth_set(self, f: Formula,
                  valuation: Optional[Dict[int, RegionSet]] = None) -> RegionSet:
        val = valuation or {}
        memo: dict = {}

        def go(h):
            r = memo.get(id(h))
            if r is not None:
                return r
            k = h.kind
            if k == BOT:
                r = self.empty()
            elif k == VAR:
                r = val[h.arg]
            elif k == IMP:
                r = go(h.left).complement().union(go(h.right))
            elif k == PDIA:
                r = self.image(go(h.arg), "fwd")
            else:   # BOX
                r = self.image(go(h.arg).complement(), "bwd").complement()
            memo[id(h)] = r
            return r

        return go(f)

    def valid(self, f: Formula,
              valuation: Optional[Dict[int, RegionSet]] = None) -> bool:
        return self.truth_set(f, valuation).complement().is_empty()

    # -- admissible sampling ----------------------------------------------

    def generator_sets(self, rng: random.Random) -> RegionSet:
        raise NotImplementedError

    def sample_admissible(self, seed: int, depth: int) -> RegionSet:
        """Seeded random element of the internal family.

        Applies at most `depth` closure operations to random generators, so
        membership holds by construction.
        """
        rng = random.Random(seed)
        pool = [self.empty(), self.generator_sets(rng)]
        for _ in range(depth):
            op = rng.randrange(5)
            if op == 0:
                pool.append(rng.choice(pool).complement())
            elif op == 1:
                pool.append(rng.choice(pool).intersect(rng.choice(pool)))
            elif op == 2:
                pool.append(self.image(rng.choice(pool), "fwd"))
            elif op == 3:
                pool.append(self.image(rng.choice(pool), "bwd"))
            else:
                pool.append(self.generator_sets(rng))
        return pool[-1]

    # -- shared sharp-reachability helpers ---------------------------------

    def sharp_step(self, rs: RegionSet) -> RegionSet:
        return rs.union(self.image(rs, "fwd")).union(self.image(rs, "bwd"))

    def sharp_ball(self, rs: RegionSet, k: int) -> RegionSet:
        for _ in range(k):
            rs = self.sharp_step(rs)
        return rs


# ---------------------------------------------------------------------------
# Kt ladder
# ---------------------------------------------------------------------------

def default_kt_base() -> Tuple[Frame, str, str, Formula]:
    """Default F_L: the tail u_L -> a -> w_L with phi_L = past-box-bottom.

    w_L refutes phi_L (it has a predecessor) and sits at sharp distance two
    from u_L, outside the md(phi_L)=1 ball.
    """
    fl = Frame.make(["uL", "a", "wL"], [("uL", "a"), ("a", "wL")])
    return fl, "uL", "wL", past_box(BOTTOM)


class KtLadder(SymbolicFrame):
    """The omega chain with stars, glued to F_L at u_L.

    Relation: n->m iff n<m; i*->j iff i<=j (i in I); n->u_L for every
    chain point n; F_L's own edges internally.
    """

    family = "kt"

    def __init__(self, I, fl: Optional[Frame] = None, ul: str = "uL",
                 wl: str = "wL", phi_l: Optional[Formula] = None,
                 k: Optional[int] = None):
        if fl is None:
            fl, ul, wl, default_phi = default_kt_base()
            phi_l = phi_l if phi_l is not None else default_phi
        if phi_l is None:
            raise ValueError("phi_l is required with a custom F_L")
        self.I = frozenset(int(i) for i in I)
        if any(i < 1 for i in self.I):
            raise ValueError("I must contain positive integers")
        self.fl = fl
        self.ul = ul
        self.wl = wl
        self.phi_l = phi_l
        self.k = k if k is not None else fl.n + 6
        self.schema = (
            Region("XL", tuple(fl.worlds)),
            Region("omega"),
            Region("star", tuple(sorted(self.I))),
        )
        self._ul_bit = 1 << fl.index(ul)
        self.validate()

    # images ---------------------------------------------------------------

    def image(self, rs: RegionSet, direction: str) -> RegionSet:
        return self._fwd(rs) if direction == "fwd" else self._bwd(rs)

    def _fwd(self, rs: RegionSet) -> RegionSet:
        parts: Dict[str, Part] = {}
        xl = rs.part("XL")
        out_xl = 0
        for w in xl.items:
            out_xl |= self.fl.rows[self.fl.index(w)]
        omega_out: Part = fin(())
        om = rs.part("omega")
        if om.mode == COFIN or om.items:
            m = rs.min_index("omega")
            omega_out = cofin(range(m + 1))       # {j : j > m}
            out_xl |= self._ul_bit                # every chain point sees u_L
        st = rs.part("star")
        if st.items:
            i0 = min(st.items)
            omega_out = _union_omega(omega_out, cofin(range(i0)))  # {j : j >= i0}
        parts["XL"] = fin(self.fl.worlds[i] for i in bits(out_xl))
        parts["omega"] = omega_out
        return RegionSet(self.schema, parts)

    def _bwd(self, rs: RegionSet) -> RegionSet:
        parts: Dict[str, Part] = {}
        xl = rs.part("XL")
        out_xl = 0
        for w in xl.items:
            out_xl |= self.fl.brows[self.fl.index(w)]
        omega_out: Part = fin(())
        stars_out = set()
        if self.ul in xl.items:
            omega_out = cofin()                   # all chain points see u_L
        om = rs.part("omega")
        if om.mode == COFIN:
            omega_out = cofin()                   # unbounded above
            stars_out |= set(self.I)
        elif om.items:
            mx = max(om.items)
            omega_out = _union_omega(omega_out, fin(range(mx)))  # {n : n < mx}
            stars_out |= {i for i in self.I if i <= mx}
        parts["XL"] = fin(self.fl.worlds[i] for i in bits(out_xl))
        parts["omega"] = omega_out
        parts["star"] = fin(stars_out)
        return RegionSet(self.schema, parts)

    # generators: the internal family is generated by P(X_L) --------------

    def generator_sets(self, rng: random.Random) -> RegionSet:
        sub = [w for w in self.fl.worlds if rng.random() < 0.5]
        return self.make(XL=sub)

    # truncation ------------------------------------------------------------

    def world_name(self, region: str, item) -> str:
        if region == "XL":
            return str(item)
        if region == "omega":
            return str(item)
        return f"{item}*"

    def truncate(self, n_max: int) -> GeneralFrame:
        if self.I and n_max < max(self.I) + 2:
            raise FrameError("window must reach max(I) + 2")
        names: List[str] = [str(w) for w in self.fl.worlds]
        desc: List[Tuple[str, object]] = [("XL", w) for w in self.fl.worlds]
        for n in range(n_max + 1):
            names.append(str(n))
            desc.append(("omega", n))
        for i in sorted(self.I):
            names.append(f"{i}*")
            desc.append(("star", i))
        edges = []
        for ai, (ra, xa) in enumerate(desc):
            for bi, (rb, xb) in enumerate(desc):
                if self._related(ra, xa, rb, xb):
                    edges.append((names[ai], names[bi]))
        frame = Frame.make(names, edges)
        gens = [1 << frame.index(str(w)) for w in self.fl.worlds]
        return close_internal(frame, gens)

    def _related(self, ra, xa, rb, xb) -> bool:
        if ra == "XL" and rb == "XL":
            return bool(self.fl.rows[self.fl.index(xa)] >> self.fl.index(xb) & 1)
        if ra == "omega" and rb == "omega":
            return xa < xb
        if ra == "omega" and rb == "XL":
            return xb == self.ul
        if ra == "star" and rb == "omega":
            return xa <= xb
        return False

    def descriptors(self, n_max: int):
        out = [("XL", w) for w in self.fl.worlds]
        out += [("omega", n) for n in range(n_max + 1)]
        out += [("star", i) for i in sorted(self.I)]
        return out

    # validation ------------------------------------------------------------

    def validate(self):
        if not self.fl.rooted():
            raise FrameError("F_L must be rooted")
        if self.fl.n >= self.k:
            raise FrameError("k must exceed |F_L|")
        md = self.phi_l.md
        ball = self.fl.reach_sharp(self.fl.index(self.wl), md)
        if ball >> self.fl.index(self.ul) & 1:
            raise FrameError("u_L must lie outside the md(phi_L) ball of w_L")
        if satisfiable_at(self.fl, self.wl, neg(self.phi_l)) is None:
            raise FrameError("phi_L must be refuted at w_L")
        # k-transitivity on representatives of every region
        reps = [self.singleton("XL", w) for w in self.fl.worlds]
        reps += [self.singleton("omega", n) for n in (0, 1, 2, self.k + 3)]
        reps += [self.singleton("star", i) for i in sorted(self.I)]
        full = self.full()
        for rs in reps:
            if self.sharp_ball(rs, self.k) != full:
                raise FrameError("frame is not k-transitive at a representative")

    def to_json(self) -> dict:
        return {"family": "kt", "I": sorted(self.I),
                "FL": frame_to_json(self.fl), "uL": self.ul, "wL": self.wl,
                "k": self.k}


def _union_omega(p: Part, q: Part) -> Part:
    return part_union(p, q)


# ---------------------------------------------------------------------------
# S4 ladder
# ---------------------------------------------------------------------------

HEADS = ("x0", "x1", "x2", "y0", "y1", "r0", "r1", "rp")


def default_s4_base() -> Tuple[Frame, str, str, Formula]:
    """Default F_L: a reflexive-transitive zigzag.

    w_L -> m1 -> m2 gives the strict 3-chain that refutes bd_2 at w_L; the
    zigzag m2 <- z -> t <- u_L keeps u_L four comparability steps from w_L,
    outside the md(bd_2) = 3 ball.
    """
    base = Frame.make(["wL", "m1", "m2", "z", "t", "uL"],
                      [("wL", "m1"), ("m1", "m2"), ("z", "m2"), ("z", "t"),
                       ("uL", "t")])
    return base.closure("reflexive_transitive"), "uL", "wL", bd(2)


class S4Ladder(SymbolicFrame):
    """The reflexive-transitive ladder of the S4 separation construction.

    Closed-form reachability (pinned by tests against the generator
    closure on truncations):
      a_i -> a_j iff i >= j;   a_i -> b_j iff i > j;
      b_i -> b_j iff i >= j;   b_i -> a_j iff i >= j+2;
      c_i -> c_j iff i >= j;   c_i -> a_j iff i in I and i >= j;
      c_i -> b_j iff i in I and i > j;
      x0 -> {x0,x1}; x2 -> {x2,x1,a0}; y1 -> {y1,y0,b0};
      r0 -> {r0,r1,rp} + A + B + C;  u_L -> r1 (and F_L internally).
    """

    family = "s4t"

    def __init__(self, I, fl: Optional[Frame] = None, ul: str = "uL",
                 wl: str = "wL", phi_l: Optional[Formula] = None,
                 k: Optional[int] = None):
        if fl is None:
            fl, ul, wl, default_phi = default_s4_base()
            phi_l = phi_l if phi_l is not None else default_phi
        if phi_l is None:
            raise ValueError("phi_l is required with a custom F_L")
        self.I = frozenset(int(i) for i in I)
        if any(i < 1 for i in self.I):
            raise ValueError("I must contain positive integers")
        self.fl = fl
        self.ul = ul
        self.wl = wl
        self.phi_l = phi_l
        self.k = k if k is not None else fl.n + 6
        self.c_ids = tuple(sorted(self.I | {0}))
        self.schema = (
            Region("XL", tuple(fl.worlds)),
            Region("H", HEADS),
            Region("A"),
            Region("B"),
            Region("C", self.c_ids),
        )
        # F_L worlds whose cone reaches u_L pick up the glue edge to r1
        self._pre_ul = frozenset(
            fl.worlds[i] for i in range(fl.n)
            if fl.rows[i] >> fl.index(ul) & 1)
        self.validate()

    # images ----------------------------------------------------------------

    def _fwd(self, rs: RegionSet) -> RegionSet:
        xl_out = 0
        heads = set()
        a_out: Part = fin(())
        b_out: Part = fin(())
        c_out = set()

        for w in rs.part("XL").items:
            xl_out |= self.fl.rows[self.fl.index(w)]
            if w in self._pre_ul:
                heads.add("r1")
        for h in rs.part("H").items:
            if h == "x0":
                heads |= {"x0", "x1"}
            elif h == "x1":
                heads.add("x1")
            elif h == "x2":
                heads |= {"x2", "x1"}
                a_out = _union_omega(a_out, fin((0,)))
            elif h == "y0":
                heads.add("y0")
            elif h == "y1":
                heads |= {"y1", "y0"}
                b_out = _union_omega(b_out, fin((0,)))
            elif h == "r0":
                heads |= {"r0", "r1", "rp"}
                a_out = cofin()
                b_out = cofin()
                c_out |= set(self.c_ids)
            elif h == "r1":
                heads.add("r1")
            elif h == "rp":
                heads.add("rp")
        ap = rs.part("A")
        if ap.mode == COFIN or ap.items:
            m = rs.max_index("A")
            if m == float("inf"):
                a_out = cofin()
                b_out = cofin()
            else:
                a_out = _union_omega(a_out, fin(range(m + 1)))
                if m >= 1:
                    b_out = _union_omega(b_out, fin(range(m)))
        bp = rs.part("B")
        if bp.mode == COFIN or bp.items:
            m = rs.max_index("B")
            if m == float("inf"):
                a_out = cofin()
                b_out = cofin()
            else:
                b_out = _union_omega(b_out, fin(range(m + 1)))
                if m >= 2:
                    a_out = _union_omega(a_out, fin(range(m - 1)))
        for i in rs.part("C").items:
            c_out |= {j for j in self.c_ids if j <= i}
            if i in self.I:
                a_out = _union_omega(a_out, fin(range(i + 1)))
                b_out = _union_omega(b_out, fin(range(i)))
        return RegionSet(self.schema, {
            "XL": fin(self.fl.worlds[i] for i in bits(xl_out)),
            "H": fin(heads), "A": a_out, "B": b_out, "C": fin(c_out)})

    def _bwd(self, rs: RegionSet) -> RegionSet:
        xl_out = 0
        heads = set()
        a_out: Part = fin(())
        b_out: Part = fin(())
        c_out = set()

        for w in rs.part("XL").items:
            xl_out |= self.fl.brows[self.fl.index(w)]
        hp = rs.part("H").items
        if "x1" in hp:
            heads |= {"x0", "x1", "x2"}
        if "x0" in hp:
            heads.add("x0")
        if "x2" in hp:
            heads.add("x2")
        if "y0" in hp:
            heads |= {"y0", "y1"}
        if "y1" in hp:
            heads.add("y1")
        if "r0" in hp:
            heads.add("r0")
        if "rp" in hp:
            heads |= {"rp", "r0"}
        if "r1" in hp:
            heads |= {"r1", "r0"}
            for w in self._pre_ul:
                xl_out |= 1 << self.fl.index(w)
        ap = rs.part("A")
        if ap.mode == COFIN or ap.items:
            m = rs.min_index("A")
            heads.add("r0")
            a_out = _union_omega(a_out, cofin(range(m)))         # i >= m
            b_out = _union_omega(b_out, cofin(range(m + 2)))     # i >= m+2
            c_out |= {i for i in self.I if i >= m}
            if rs.contains("A", 0):
                heads.add("x2")
        bp = rs.part("B")
        if bp.mode == COFIN or bp.items:
            m = rs.min_index("B")
            heads.add("r0")
            b_out = _union_omega(b_out, cofin(range(m)))         # i >= m
            a_out = _union_omega(a_out, cofin(range(m + 1)))     # i >= m+1
            c_out |= {i for i in self.I if i > m}
            if rs.contains("B", 0):
                heads.add("y1")
        cp = rs.part("C")
        if cp.items:
            heads.add("r0")
            mn = min(cp.items)
            c_out |= {i for i in self.c_ids if i >= mn}
        return RegionSet(self.schema, {
            "XL": fin(self.fl.worlds[i] for i in bits(xl_out)),
            "H": fin(heads), "A": a_out, "B": b_out, "C": fin(c_out)})

    def image(self, rs: RegionSet, direction: str) -> RegionSet:
        return self._fwd(rs) if direction == "fwd" else self._bwd(rs)

    def generator_sets(self, rng: random.Random) -> RegionSet:
        sub = [w for w in self.fl.worlds if rng.random() < 0.5]
        return self.make(XL=sub)

    # truncation ------------------------------------------------------------

    def world_name(self, region: str, item) -> str:
        if region == "XL":
            return str(item)
        if region == "H":
            return str(item)
        return f"{region.lower()}{item}"

    def descriptors(self, n_max: int):
        out = [("XL", w) for w in self.fl.worlds]
        out += [("H", h) for h in HEADS]
        out += [("A", i) for i in range(n_max + 1)]
        out += [("B", i) for i in range(n_max + 1)]
        out += [("C", i) for i in self.c_ids]
        return out

    def truncate(self, n_max: int) -> GeneralFrame:
        if self.I and n_max < max(self.I) + 2:
            raise FrameError("window must reach max(I) + 2")
        desc = self.descriptors(n_max)
        names = [self.world_name(r, x) for r, x in desc]
        edges = []
        for ai, (ra, xa) in enumerate(desc):
            for bi, (rb, xb) in enumerate(desc):
                if self.related(ra, xa, rb, xb):
                    edges.append((names[ai], names[bi]))
        frame = Frame.make(names, edges)
        gens = [1 << frame.index(str(w)) for w in self.fl.worlds]
        return close_internal(frame, gens)

    def related(self, ra, xa, rb, xb) -> bool:
        """Closed-form reachability between two descriptors."""
        if (ra, xa) == (rb, xb):
            return True
        if ra == "XL":
            if rb == "XL":
                return bool(self.fl.rows[self.fl.index(xa)]
                            >> self.fl.index(xb) & 1)
            return rb == "H" and xb == "r1" and xa in self._pre_ul
        if ra == "H":
            cone = {
                "x0": {("H", "x1")},
                "x1": set(),
                "x2": {("H", "x1"), ("A", 0)},
                "y0": set(),
                "y1": {("H", "y0"), ("B", 0)},
                "r1": set(),
                "rp": set(),
            }
            if xa == "r0":
                return (rb, xb) in {("H", "r1"), ("H", "rp")} or rb in ("A", "B", "C")
            return (rb, xb) in cone[xa]
        if ra == "A":
            if rb == "A":
                return xa >= xb
            return rb == "B" and xa > xb
        if ra == "B":
            if rb == "B":
                return xa >= xb
            return rb == "A" and xa >= xb + 2
        if ra == "C":
            if rb == "C":
                return xa >= xb
            if xa in self.I:
                if rb == "A":
                    return xa >= xb
                if rb == "B":
                    return xa > xb
            return False
        return False

    def generator_truncation(self, n_max: int) -> Frame:
        """Reflexive-transitive closure of the generator edges on the window.

        Independent oracle for the closed-form table: the generators are
        the construction's listed edges (with the c_i -> a_i column edges
        and the r0 fan-out, and u_L glued in place of r2).
        """
        desc = self.descriptors(n_max)
        names = [self.world_name(r, x) for r, x in desc]
        edges = set()
        fl = self.fl
        for i in range(fl.n):
            for j in bits(fl.rows[i]):
                edges.add((str(fl.worlds[i]), str(fl.worlds[j])))
        for w in self._pre_ul:
            edges.add((str(w), "r1"))
        edges |= {("x0", "x1"), ("x2", "x1"), ("x2", "a0"), ("y1", "y0"),
                  ("y1", "b0"), ("r0", "rp"), ("r0", "r1")}
        for i in range(n_max + 1):
            for j in range(n_max + 1):
                if i > j:
                    edges.add((f"a{i}", f"a{j}"))
                    edges.add((f"a{i}", f"b{j}"))
                    edges.add((f"b{i}", f"b{j}"))
                if i > j + 1:
                    edges.add((f"b{i}", f"a{j}"))
        for i in self.c_ids:
            for j in self.c_ids:
                if i > j:
                    edges.add((f"c{i}", f"c{j}"))
        for i in sorted(self.I):
            edges.add((f"c{i}", f"a{i}"))
        for i in range(n_max + 1):
            edges.add(("r0", f"a{i}"))
            edges.add(("r0", f"b{i}"))
        for i in self.c_ids:
            edges.add(("r0", f"c{i}"))
        frame = Frame.make(names, sorted(edges))
        return frame.closure("reflexive_transitive")

    # validation ------------------------------------------------------------

    def validate(self):
        if not (self.fl.is_reflexive() and self.fl.is_transitive()):
            raise FrameError("F_L must be reflexive and transitive")
        if not self.fl.rooted():
            raise FrameError("F_L must be rooted")
        if self.fl.n + 5 >= self.k:
            raise FrameError("k must exceed |F_L| + 5")
        md = self.phi_l.md
        ball = self.fl.reach_sharp(self.fl.index(self.wl), md)
        if ball >> self.fl.index(self.ul) & 1:
            raise FrameError("u_L must lie outside the md(phi_L) ball of w_L")
        if satisfiable_at(self.fl, self.wl, neg(self.phi_l)) is None:
            raise FrameError("phi_L must be refuted at w_L")
        reps = [self.singleton("XL", w) for w in self.fl.worlds]
        reps += [self.singleton("H", h) for h in HEADS]
        reps += [self.singleton("A", n) for n in (0, 1, self.k + 3)]
        reps += [self.singleton("B", n) for n in (0, 1, self.k + 3)]
        reps += [self.singleton("C", i) for i in self.c_ids]
        full = self.full()
        for rs in reps:
            if self.sharp_ball(rs, self.k) != full:
                raise FrameError("frame is not k-transitive at a representative")

    def chain_condition(self, rs: RegionSet) -> bool:
        """The admissible-set shape: finite or cofinite on every chain.

        Within one column the representation enforces it; across the
        interleaved a/b chains it needs the two modes to agree.
        """
        a_cof = rs.part("A").mode == COFIN
        b_cof = rs.part("B").mode == COFIN
        a_inf, b_inf = a_cof, b_cof
        a_co_inf, b_co_inf = not a_cof, not b_cof
        if (a_inf and b_co_inf) or (b_inf and a_co_inf):
            return False
        return True

    def to_json(self) -> dict:
        return {"family": "s4t", "I": sorted(self.I),
                "FL": frame_to_json(self.fl), "uL": self.ul, "wL": self.wl,
                "k": self.k}


def symbolic_from_json(doc: dict):
    fl = frame_from_json(doc["FL"])
    if isinstance(fl, GeneralFrame):
        fl = fl.frame
    cls = {"kt": KtLadder, "s4t": S4Ladder}[doc["family"]]
    phi = doc.get("phiL")
    if phi is not None:
        from .formulas import parse
        phi = parse(phi)
    return cls(doc["I"], fl=fl, ul=doc["uL"], wl=doc["wL"], phi_l=phi,
               k=doc.get("k"))
