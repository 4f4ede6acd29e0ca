"""Truth sets, validity and satisfiability on finite (general) frames.

`truth_set` is the single source of semantic truth; it memoizes on shared
subterms so the deeply nested formula families stay polynomial.  `valid`
enumerates valuations exhaustively in a fixed canonical order, so
counterexamples are deterministic.  For the verification suites there is a
slot-parallel evaluator that runs one formula over a whole batch of
valuations using big-integer bitboards.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence, Union

from .formulas import BOT, BOX, IMP, PDIA, VAR, Formula
from .frames import Frame, FrameError, GeneralFrame, as_general

FrameLike = Union[Frame, GeneralFrame]


class UnassignedVariable(KeyError):
    pass


def truth_set(g: FrameLike, valuation: Mapping[int, int], f: Formula) -> int:
    """Bitmask of worlds where f is true under the valuation."""
    gf = as_general(g)
    fr = gf.frame
    full = fr.full
    memo: dict = {}

    def go(h):
        r = memo.get(id(h))
        if r is not None:
            return r
        k = h.kind
        if k == BOT:
            r = 0
        elif k == VAR:
            try:
                r = valuation[h.arg] & full
            except KeyError:
                raise UnassignedVariable(h.arg) from None
        elif k == IMP:
            r = (full ^ go(h.left)) | go(h.right)
        elif k == PDIA:
            r = fr.image(go(h.arg), "fwd")
        elif k == BOX:
            r = full ^ fr.image(full ^ go(h.arg), "bwd")
        memo[id(h)] = r
        return r

    return go(f)


# ---------------------------------------------------------------------------
# validity verdicts
# ---------------------------------------------------------------------------

@dataclass
class Valid:
    tried: int

    def __bool__(self):
        return True


@dataclass
class Counter:
    valuation: dict
    world: str

    def __bool__(self):
        return False


@dataclass
class BudgetExceeded:
    tried: int

    def __bool__(self):
        return False


Verdict = Union[Valid, Counter, BudgetExceeded]


def _valuations(gf: GeneralFrame, variables: Sequence[int]):
    """Canonical valuation order: family sorted ascending, leftmost variable
    slowest (lexicographic over the variable tuple)."""
    family = list(gf.internal_sets())
    if not variables:
        yield {}
        return
    idx = [0] * len(variables)
    nfam = len(family)
    while True:
        yield {v: family[idx[i]] for i, v in enumerate(variables)}
        j = len(idx) - 1
        while j >= 0:
            idx[j] += 1
            if idx[j] < nfam:
                break
            idx[j] = 0
            j -= 1
        if j < 0:
            return


def valid(g: FrameLike, f: Formula, budget: int = 10 ** 6,
          at: Optional[str] = None) -> Verdict:
    """Exhaustive validity; `at` restricts to point validity at that world."""
    gf = as_general(g)
    fr = gf.frame
    variables = sorted(f.variables)
    total = gf.family_size() ** len(variables)
    if total > budget:
        return BudgetExceeded(total)
    want = fr.full if at is None else (1 << fr.index(at))
    tried = 0
    for val in _valuations(gf, variables):
        tried += 1
        t = truth_set(gf, val, f)
        if want & ~t:
            world = fr.worlds[_lowest(want & ~t)]
            named = {f"p{v}": [fr.worlds[i] for i in _bits(m)]
                     for v, m in val.items()}
            return Counter(named, world)
    return Valid(tried)


def _lowest(mask: int) -> int:
    return (mask & -mask).bit_length() - 1


def _bits(mask: int):
    while mask:
        b = mask & -mask
        yield b.bit_length() - 1
        mask ^= b


def sampled_valid(g: FrameLike, f: Formula, trials: int, seed: int,
                  at: Optional[str] = None) -> Verdict:
    """Seeded falsification search; never claims validity."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    gf = as_general(g)
    fr = gf.frame
    family = list(gf.internal_sets())
    variables = sorted(f.variables)
    rng = random.Random(seed)
    want = fr.full if at is None else (1 << fr.index(at))
    for _ in range(trials):
        val = {v: rng.choice(family) for v in variables}
        t = truth_set(gf, val, f)
        if want & ~t:
            world = fr.worlds[_lowest(want & ~t)]
            named = {f"p{v}": [fr.worlds[i] for i in _bits(m)]
                     for v, m in val.items()}
            return Counter(named, world)
    return BudgetExceeded(trials)


def satisfiable_at(g: FrameLike, x: str, f: Formula,
                   budget: int = 10 ** 6) -> Optional[dict]:
    """Valuation making f true at x, or None.  (Refutes ~f at x.)"""
    gf = as_general(g)
    fr = gf.frame
    variables = sorted(f.variables)
    total = gf.family_size() ** len(variables)
    if total > budget:
        raise ValueError(f"satisfiable_at would need {total} valuations")
    bit = 1 << fr.index(x)
    for val in _valuations(gf, variables):
        if truth_set(gf, val, f) & bit:
            return {f"p{v}": [fr.worlds[i] for i in _bits(m)]
                    for v, m in val.items()}
    return None


def frame_class_check(f: Frame, cls: str) -> bool:
    """Structural membership tests for K4t / S4t / S5t frame classes."""
    if cls == "K4t":
        return f.is_transitive()
    if cls == "S4t":
        return f.is_transitive() and f.is_reflexive()
    if cls == "S5t":
        if not f.rooted():
            raise FrameError("S5t check requires a rooted frame")
        if f.n == 1:
            return f.rows[0] == 1
        return all(f.rows[i] == f.full for i in range(f.n))
    raise ValueError(f"unknown frame class {cls!r}")


# ---------------------------------------------------------------------------
# slot-parallel batch evaluation
# ---------------------------------------------------------------------------

class BatchEvaluator:
    """Evaluates formulas over many valuations at once.

    Truth sets across the batch live in one big integer: slot s holds the
    w-bit truth mask for valuation s.  All connectives are slotwise bit
    operations; images expand one world bit per row into a full slot mask.
    """

    def __init__(self, frame: Frame, n_slots: int):
        self.frame = frame
        self.w = frame.n
        self.n_slots = n_slots
        w = self.w
        self.slot_full = (1 << (w * n_slots)) - 1
        self.lsb = self._broadcast(1)
        self.rows_b = [self._broadcast(r) for r in frame.rows]
        self.brows_b = [self._broadcast(r) for r in frame.brows]

    def _broadcast(self, mask: int) -> int:
        # replicate by doubling, then trim to the slot count
        out = mask & ((1 << self.w) - 1)
        span = self.w
        width = self.w * self.n_slots
        while span < width:
            out |= out << span
            span *= 2
        return out & ((1 << width) - 1)

    def broadcast(self, mask: int) -> int:
        return self._broadcast(mask)

    def pack(self, masks: Sequence[int]) -> int:
        out = 0
        for s, m in enumerate(masks):
            out |= (m & ((1 << self.w) - 1)) << (s * self.w)
        return out

    def unpack(self, board: int):
        w = self.w
        m = (1 << w) - 1
        return [(board >> (s * w)) & m for s in range(self.n_slots)]

    def fold_all(self, board: int) -> int:
        """AND of all slots, by halving (pads the tail with ones)."""
        w = self.w
        slots = self.n_slots
        span = 1
        while span < slots:
            span *= 2
        board |= ((1 << (w * span)) - 1) ^ self.slot_full
        while span > 1:
            span //= 2
            board &= board >> (w * span)
        return board & ((1 << w) - 1)

    def periodic_boards(self, family, n_vars: int):
        """Boards for the full valuation grid family^n_vars, leftmost
        variable slowest (matching the canonical enumeration order)."""
        nfam = len(family)
        w = self.w
        boards = []
        for vi in range(n_vars):
            stride = nfam ** (n_vars - 1 - vi)
            period = 0
            for j, m in enumerate(family):
                period |= _repeat(m, w, stride) << (j * stride * w)
            reps = self.n_slots // (stride * nfam)
            boards.append(_repeat(period, stride * nfam * w, reps))
        return boards

    def image(self, board: int, rows_b) -> int:
        out = 0
        lsb = self.lsb
        for y in range(self.w):
            sel = (board >> y) & lsb
            out |= ((sel << self.w) - sel) & rows_b[y]
        return out

    def run(self, f: Formula, var_boards: Mapping[int, int]) -> int:
        full = self.slot_full
        memo: dict = {}

        def go(h):
            r = memo.get(id(h))
            if r is not None:
                return r
            k = h.kind
            if k == BOT:
                r = 0
            elif k == VAR:
                try:
                    r = var_boards[h.arg]
                except KeyError:
                    raise UnassignedVariable(h.arg) from None
            elif k == IMP:
                r = (full ^ go(h.left)) | go(h.right)
            elif k == PDIA:
                r = self.image(go(h.arg), self.rows_b)
            else:
                r = full ^ self.image(full ^ go(h.arg), self.brows_b)
            memo[id(h)] = r
            return r

        return go(f)


def _repeat(chunk: int, width: int, count: int) -> int:
    """chunk (width bits) repeated count times, by doubling."""
    if count <= 0:
        return 0
    out = chunk & ((1 << width) - 1)
    total = width * count
    span = width
    while span < total:
        out |= out << span
        span *= 2
    return out & ((1 << total) - 1)


def validity_profile(g: FrameLike, f: Formula, batch: int = 512) -> int:
    """Bitmask of worlds where f is point-valid (all valuations).

    Exhausts the internal family batchwise with the slot-parallel
    evaluator; intended for small frames in the verification suites.
    """
    gf = as_general(g)
    fr = gf.frame
    variables = sorted(f.variables)
    if not variables:
        return truth_set(gf, {}, f)
    family = list(gf.internal_sets())
    nfam = len(family)
    total = nfam ** len(variables)
    profile = fr.full
    ev = None
    pos = 0
    while pos < total and profile:
        size = min(batch, total - pos)
        if ev is None or ev.n_slots != size:
            ev = BatchEvaluator(fr, size)
        boards = {}
        for vi, v in enumerate(variables):
            stride = nfam ** (len(variables) - 1 - vi)
            masks = [family[((pos + s) // stride) % nfam] for s in range(size)]
            boards[v] = ev.pack(masks)
        out = ev.run(f, boards)
        for m in ev.unpack(out):
            profile &= m
            if not profile:
                break
        pos += size
    return profile
