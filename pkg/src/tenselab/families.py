"""Builders for the parameterized formula schemes.

Everything here is a pure constructor over the interned AST, so repeated
members (the phi family nests its predecessors many times) share subterms
and evaluators stay polynomial.
"""

from __future__ import annotations

from .formulas import (BOTTOM, TOP, Formula, box, conj, conj_all, dia, dia_n,
                       disj, disj_all, implies, neg, past_box, past_box_n,
                       past_dia, substitute, var)
from .frames import Frame, FrameError


def delta(n: int, psi: Formula, phi: Formula) -> Formula:
    """Delta^n_psi phi, by the literal inductive clauses."""
    cur = conj(psi, phi)
    for _ in range(n):
        step = conj(psi, cur)
        cur = disj(cur, disj(dia(step), past_dia(step)))
    return cur


def nabla(n: int, psi: Formula, phi: Formula) -> Formula:
    return neg(delta(n, psi, neg(phi)))


def delta_top(n: int, phi: Formula) -> Formula:
    return delta(n, TOP, phi)


def nabla_top(n: int, phi: Formula) -> Formula:
    return neg(delta_top(n, neg(phi)))


def delta_via(n: int, psi: Formula, phi: Formula) -> Formula:
    """Reach phi within n sharp-steps with psi at the interior points.

    Differs from `delta` in not constraining the endpoints: the path's
    start and final point need not satisfy psi.  The relativized members
    of the phi family need this reading; with the literal `delta` their
    target conjunction (psi and phi) is unsatisfiable on reflexive frames
    whenever phi forbids psi in its own past.
    """
    if n == 0:
        return phi
    g = phi
    for _ in range(n - 1):
        g = disj(phi, conj(psi, disj(dia(g), past_dia(g))))
    return disj(phi, disj(dia(g), past_dia(g)))


# ---------------------------------------------------------------------------
# axiom schemes
# ---------------------------------------------------------------------------

def axiom_t() -> Formula:
    return implies(box(var(0)), var(0))


def axiom_4() -> Formula:
    return implies(box(var(0)), box(box(var(0))))


def axiom_5() -> Formula:
    return implies(dia(var(0)), box(dia(var(0))))


def alt_plus(n: int) -> Formula:
    _positive(n)
    parts = [box(var(0))]
    for j in range(1, n + 1):
        ante = conj_all([var(i) for i in range(j)])
        parts.append(box(implies(ante, var(j))))
    return disj_all(parts)


def alt_minus(n: int) -> Formula:
    _positive(n)
    parts = [past_box(var(0))]
    for j in range(1, n + 1):
        ante = conj_all([var(i) for i in range(j)])
        parts.append(past_box(implies(ante, var(j))))
    return disj_all(parts)


def bz(n: int) -> Formula:
    _positive(n)
    return implies(delta_top(n + 1, var(0)), delta_top(n, var(0)))


def bw_plus(n: int) -> Formula:
    _positive(n)
    ante = conj_all([dia(var(i)) for i in range(n + 1)])
    parts = [dia(conj(var(i), disj(var(j), dia(var(j)))))
             for i in range(n + 1) for j in range(n + 1) if i != j]
    return implies(ante, disj_all(parts))


def bw_minus(n: int) -> Formula:
    _positive(n)
    ante = conj_all([past_dia(var(i)) for i in range(n + 1)])
    parts = [past_dia(conj(var(i), disj(var(j), past_dia(var(j)))))
             for i in range(n + 1) for j in range(n + 1) if i != j]
    return implies(ante, disj_all(parts))


def bd(n: int) -> Formula:
    _positive(n)
    f = implies(dia(box(var(0))), var(0))
    for j in range(1, n):
        f = implies(dia(conj(box(var(j)), neg(f))), var(j))
    return f


def grz_plus() -> Formula:
    p = var(0)
    return implies(box(implies(box(implies(p, box(p))), p)), p)


def grz_minus() -> Formula:
    p = var(0)
    return implies(past_box(implies(past_box(implies(p, past_box(p))), p)), p)


def seriality() -> Formula:
    return disj(dia(TOP), past_dia(TOP))


_AXIOMS = {
    "T": axiom_t, "4": axiom_4, "5": axiom_5,
    "grzPlus": grz_plus, "grzMinus": grz_minus, "seriality": seriality,
}
_INDEXED = {
    "altPlus": alt_plus, "altMinus": alt_minus, "bz": bz,
    "bwPlus": bw_plus, "bwMinus": bw_minus, "bd": bd,
}


def axiom(name: str, n: int = None) -> Formula:
    if name in _AXIOMS:
        return _AXIOMS[name]()
    if name in _INDEXED:
        if n is None:
            raise ValueError(f"axiom {name!r} needs an index")
        return _INDEXED[name](n)
    raise ValueError(f"unknown axiom {name!r}")


def _positive(n):
    if n < 1:
        raise ValueError("index must be >= 1")


# ---------------------------------------------------------------------------
# gamma family
# ---------------------------------------------------------------------------

def gamma(n: int, k: int) -> Formula:
    """gamma_n for chain parameter k; variable-free."""
    if k < 1:
        raise ValueError("k must be >= 1")
    g = conj_all([past_box(BOTTOM),
                  dia(past_box_n(BOTTOM, 2)),
                  dia_n(past_box_n(BOTTOM, k + 1), k)])
    for _ in range(n):
        g = conj(past_dia(g), past_box_n(neg(g), 2))
    return g


def gamma_star(m: int, k: int) -> Formula:
    if m < 1:
        raise ValueError("m must be >= 1")
    return conj_all([dia(gamma(m, k)),
                     box(neg(gamma(m - 1, k))),
                     past_box(BOTTOM),
                     box(dia_n(TOP, k))])


# ---------------------------------------------------------------------------
# Jankov formulas
# ---------------------------------------------------------------------------

def jankov(frame: Frame, k: int) -> Formula:
    """Jankov formula of the finite rooted frame, of degree k >= 1.

    Worlds are enumerated in frame order; world i gets variable p_i.
    """
    if k < 1:
        raise ValueError("Jankov degree must be >= 1")
    if not frame.rooted():
        raise FrameError("Jankov formula requires a rooted frame")
    n = frame.n
    clauses = [nabla_top(k, disj_all([var(i) for i in range(n)]))]
    for i in range(n):
        for j in range(n):
            if i != j:
                clauses.append(nabla_top(k, implies(var(i), neg(var(j)))))
    for i in range(n):
        for j in range(n):
            if frame.rows[i] >> j & 1:
                clauses.append(nabla_top(
                    k - 1, conj(implies(var(i), dia(var(j))),
                                implies(var(j), past_dia(var(i))))))
            else:
                clauses.append(nabla_top(
                    k - 1, conj(implies(var(i), neg(dia(var(j)))),
                                implies(var(j), neg(past_dia(var(i)))))))
    return conj_all(clauses)


def jankov_pullback_valuation(frame: Frame) -> dict:
    """The identity valuation V(p_i) = {x_i} used to refute ~J^k(F) on F."""
    return {i: 1 << i for i in range(frame.n)}


# ---------------------------------------------------------------------------
# phi family (S4 ladder separation formulas)
# ---------------------------------------------------------------------------

class PhiFamily:
    """The separation formulas over a refuted formula phi_L.

    Variable allocation: p and q_0..q_k are the k+2 smallest indices not
    free in phi_L (p first).  `mapping` reports the chosen indices.

    Construction notes (recorded here because they differ from the naive
    transcription; each is forced by the truth-pinning claims the suite
    checks, and each is exercised by tests):
      * the relativized reaches use `delta_via` (interior-only guard);
      * phi_y0's second conjunct is the nabla form (no phi_x0 within 6);
      * phi_x2 / phi_a0 / phi_b0 / phi_b1 carry one extra exclusion each
        (x0, x1, y0, y1 respectively) to cut the other endpoint of their
        modal link;
      * phi_AB excludes the 2-ball of phi_x0.
    """

    def __init__(self, k: int, phi_l: Formula):
        if k < 1:
            raise ValueError("k must be >= 1")
        self.k = k
        self.phi_l = phi_l
        used = phi_l.variables
        fresh = []
        i = 0
        while len(fresh) < k + 2:
            if i not in used:
                fresh.append(i)
            i += 1
        self.p = fresh[0]
        self.q = fresh[1:]
        self.mapping = {"p": self.p, "q": list(self.q)}
        self._cache: dict = {}

    def _bd_q(self) -> Formula:
        base = bd(self.k)
        return substitute(base, {i: var(self.q[i]) for i in range(self.k)})

    @property
    def phi0(self) -> Formula:
        if "phi0" not in self._cache:
            self._cache["phi0"] = conj(neg(self._bd_q()),
                                       past_box(neg(var(self.p))))
        return self._cache["phi0"]

    @property
    def x0(self) -> Formula:
        if "x0" not in self._cache:
            self._cache["x0"] = conj_all([
                delta_top(self.k, neg(self.phi_l)),
                delta_via(4, var(self.p), self.phi0),
                nabla_top(3, neg(self.phi0))])
        return self._cache["x0"]

    @property
    def x1(self) -> Formula:
        if "x1" not in self._cache:
            self._cache["x1"] = conj(past_dia(self.x0), neg(self.x0))
        return self._cache["x1"]

    @property
    def x2(self) -> Formula:
        if "x2" not in self._cache:
            self._cache["x2"] = conj_all(
                [dia(self.x1), neg(self.x1), neg(self.x0)])
        return self._cache["x2"]

    @property
    def y0(self) -> Formula:
        if "y0" not in self._cache:
            self._cache["y0"] = conj(
                delta_via(7, var(self.p), self.x0),
                nabla_top(6, neg(self.x0)))
        return self._cache["y0"]

    @property
    def y1(self) -> Formula:
        if "y1" not in self._cache:
            self._cache["y1"] = conj(dia(self.y0), neg(self.y0))
        return self._cache["y1"]

    @property
    def ab(self) -> Formula:
        if "ab" not in self._cache:
            hook = dia(past_dia(dia(past_dia(self.x0))))
            self._cache["ab"] = conj(
                box(disj_all([self.b(0), self.b(1), hook])),
                nabla_top(2, neg(self.x0)))
        return self._cache["ab"]

    def a(self, l: int) -> Formula:
        key = ("a", l)
        if key not in self._cache:
            if l == 0:
                f = conj_all([past_dia(self.x2), neg(self.x2), neg(self.x1)])
            else:
                f = conj_all([self.ab, dia(self.a(l - 1)), dia(self.b(l - 1)),
                              box(neg(self.b(l)))])
            self._cache[key] = f
        return self._cache[key]

    def b(self, l: int) -> Formula:
        key = ("b", l)
        if key not in self._cache:
            if l == 0:
                f = conj_all([past_dia(self.y1), neg(self.y1), neg(self.y0)])
            elif l == 1:
                f = conj_all([dia(self.b(0)), box(neg(self.a(0))),
                              neg(self.b(0)), neg(self.y1)])
            else:
                f = conj_all([self.ab, dia(self.a(l - 2)), dia(self.b(l - 1)),
                              box(neg(self.a(l - 1)))])
            self._cache[key] = f
        return self._cache[key]

    def c(self, n: int) -> Formula:
        if n < 1:
            raise ValueError("c_n needs n >= 1")
        key = ("c", n)
        if key not in self._cache:
            self._cache[key] = conj_all([
                neg(self.ab), dia(self.a(n)), box(neg(self.a(n + 1)))])
        return self._cache[key]

    def member(self, name: str, index: int = None) -> Formula:
        if name == "phi0":
            return self.phi0
        if name in ("x0", "x1", "x2", "y0", "y1"):
            return getattr(self, name)
        if name == "AB":
            return self.ab
        if name == "a":
            return self.a(index)
        if name == "b":
            return self.b(index)
        if name == "c":
            return self.c(index)
        raise ValueError(f"unknown phi family member {name!r}")
