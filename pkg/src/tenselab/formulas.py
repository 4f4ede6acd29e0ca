"""Formula AST for the tense language, with parser and printer.

Primitives are Bottom, Implies, Box (future necessity) and PastDia (past
possibility); everything else is definitional sugar that expands at
construction time.  Nodes are hash-consed: structurally equal formulas are
the same object, so `is` / `==` coincide and evaluators may memoize on id().
"""

from __future__ import annotations

from typing import Iterable, Mapping

VAR = "var"
BOT = "bot"
IMP = "imp"
BOX = "box"
PDIA = "pdia"

_TABLE: dict = {}


class Formula:
    """Interned AST node. Build only through the module constructors."""

    __slots__ = ("kind", "arg", "left", "right", "_md", "_vars")

    def __init__(self, kind, arg=None, left=None, right=None):
        self.kind = kind
        self.arg = arg          # Var index, or unary child
        self.left = left
        self.right = right
        self._md = None
        self._vars = None

    def __repr__(self):
        return to_text(self)

    @property
    def md(self) -> int:
        """Modal degree: every Box/PastDia adds one, Implies takes the max."""
        if self._md is None:
            if self.kind in (VAR, BOT):
                self._md = 0
            elif self.kind == IMP:
                self._md = max(self.left.md, self.right.md)
            else:
                self._md = self.arg.md + 1
        return self._md

    @property
    def variables(self) -> frozenset:
        if self._vars is None:
            if self.kind == VAR:
                self._vars = frozenset((self.arg,))
            elif self.kind == BOT:
                self._vars = frozenset()
            elif self.kind == IMP:
                self._vars = self.left.variables | self.right.variables
            else:
                self._vars = self.arg.variables
        return self._vars


def _intern(kind, arg=None, left=None, right=None) -> Formula:
    key = (kind, arg if not isinstance(arg, Formula) else id(arg),
           id(left) if left is not None else None,
           id(right) if right is not None else None)
    f = _TABLE.get(key)
    if f is None:
        f = Formula(kind, arg, left, right)
        _TABLE[key] = f
    return f


def var(i: int) -> Formula:
    if i < 0:
        raise ValueError("variable index must be a natural")
    return _intern(VAR, i)


BOTTOM = _intern(BOT)


def bottom() -> Formula:
    return BOTTOM


def implies(a: Formula, b: Formula) -> Formula:
    return _intern(IMP, None, a, b)


def box(a: Formula) -> Formula:
    return _intern(BOX, a)


def past_dia(a: Formula) -> Formula:
    return _intern(PDIA, a)


# -- derived connectives (expand exactly per the definitional equations) --

def neg(a: Formula) -> Formula:
    return implies(a, BOTTOM)


TOP = neg(BOTTOM)


def top() -> Formula:
    return TOP


def conj(a: Formula, b: Formula) -> Formula:
    return neg(implies(a, neg(b)))


def disj(a: Formula, b: Formula) -> Formula:
    return implies(neg(a), b)


def dia(a: Formula) -> Formula:
    return neg(box(neg(a)))


def past_box(a: Formula) -> Formula:
    return neg(past_dia(neg(a)))


def conj_all(fs: Iterable[Formula]) -> Formula:
    fs = list(fs)
    if not fs:
        return TOP
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = conj(f, out)
    return out


def disj_all(fs: Iterable[Formula]) -> Formula:
    fs = list(fs)
    if not fs:
        return BOTTOM
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = disj(f, out)
    return out


def box_n(a: Formula, n: int) -> Formula:
    for _ in range(n):
        a = box(a)
    return a


def dia_n(a: Formula, n: int) -> Formula:
    for _ in range(n):
        a = dia(a)
    return a


def past_box_n(a: Formula, n: int) -> Formula:
    for _ in range(n):
        a = past_box(a)
    return a


def past_dia_n(a: Formula, n: int) -> Formula:
    for _ in range(n):
        a = past_dia(a)
    return a


def modal_degree(f: Formula) -> int:
    return f.md


def free_variables(f: Formula) -> frozenset:
    return f.variables


def substitute(f: Formula, s: Mapping[int, Formula]) -> Formula:
    """Homomorphic variable replacement; indices absent from s are kept."""
    memo = {}

    def go(g):
        r = memo.get(id(g))
        if r is not None:
            return r
        if g.kind == VAR:
            r = s.get(g.arg, g)
        elif g.kind == BOT:
            r = g
        elif g.kind == IMP:
            r = implies(go(g.left), go(g.right))
        elif g.kind == BOX:
            r = box(go(g.arg))
        else:
            r = past_dia(go(g.arg))
        memo[id(g)] = r
        return r

    return go(f)


def simplify_top(f: Formula) -> Formula:
    """Optional normalizer: rewrites T&x and x&T to x, bottom-up.

    Used to state the expanded Delta examples compactly; never applied
    implicitly by any builder.
    """
    memo = {}

    def go(g):
        r = memo.get(id(g))
        if r is not None:
            return r
        if g.kind in (VAR, BOT):
            r = g
        elif g.kind == BOX:
            r = box(go(g.arg))
        elif g.kind == PDIA:
            r = past_dia(go(g.arg))
        else:
            a, b = go(g.left), go(g.right)
            r = implies(a, b)
            parts = _match_conj(r)
            if parts is not None:
                x, y = parts
                if x is TOP:
                    r = y
                elif y is TOP:
                    r = x
        memo[id(g)] = r
        return r

    return go(f)


def _match_conj(f):
    # conj(a, b) == ((a -> (b -> #f)) -> #f)
    if f.kind == IMP and f.right is BOTTOM and f.left.kind == IMP:
        inner = f.left
        if inner.right.kind == IMP and inner.right.right is BOTTOM:
            return inner.left, inner.right.left
    return None


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

class ParseError(ValueError):
    """Syntax error with byte offset and the set of expected tokens."""

    def __init__(self, offset: int, expected, found: str):
        self.offset = offset
        self.expected = sorted(expected)
        self.found = found
        super().__init__(
            f"syntax error at offset {offset}: found {found!r},"
            f" expected one of {self.expected}")


_UNARY = {"~": neg, "[]": box, "<>": dia, "[P]": past_box, "<P>": past_dia}


def _tokenize(text: str):
    toks = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c == "p" and i + 1 < n and text[i + 1].isdigit():
            j = i + 1
            while j < n and text[j].isdigit():
                j += 1
            toks.append(("var", int(text[i + 1:j]), i))
            i = j
        elif text.startswith("#t", i):
            toks.append(("top", None, i)); i += 2
        elif text.startswith("#f", i):
            toks.append(("bot", None, i)); i += 2
        elif text.startswith("->", i):
            toks.append(("->", None, i)); i += 2
        elif text.startswith("[]", i):
            toks.append(("[]", None, i)); i += 2
        elif text.startswith("<>", i):
            toks.append(("<>", None, i)); i += 2
        elif text.startswith("[P]", i):
            toks.append(("[P]", None, i)); i += 3
        elif text.startswith("<P>", i):
            toks.append(("<P>", None, i)); i += 3
        elif c in "~&|()":
            toks.append((c, None, i)); i += 1
        else:
            raise ParseError(i, {"token"}, text[i:i + 3])
    toks.append(("end", None, n))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.toks[self.pos]

    def take(self, kind):
        tok = self.toks[self.pos]
        if tok[0] != kind:
            raise ParseError(tok[2], {kind}, tok[0])
        self.pos += 1
        return tok

    def impl(self):
        left = self.disj()
        if self.peek()[0] == "->":
            self.take("->")
            return implies(left, self.impl())
        return left

    def disj(self):
        out = self.conj()
        while self.peek()[0] == "|":
            self.take("|")
            out = disj(out, self.conj())
        return out

    def conj(self):
        out = self.unary()
        while self.peek()[0] == "&":
            self.take("&")
            out = conj(out, self.unary())
        return out

    def unary(self):
        kind, _, _ = self.peek()
        if kind in _UNARY:
            self.take(kind)
            return _UNARY[kind](self.unary())
        return self.atom()

    def atom(self):
        kind, val, off = self.peek()
        if kind == "var":
            self.take("var")
            return var(val)
        if kind == "top":
            self.take("top")
            return TOP
        if kind == "bot":
            self.take("bot")
            return BOTTOM
        if kind == "(":
            self.take("(")
            f = self.impl()
            self.take(")")
            return f
        raise ParseError(off, {"var", "#t", "#f", "(", "~", "[]", "<>", "[P]", "<P>"}, kind)


def parse(text: str) -> Formula:
    p = _Parser(text)
    f = p.impl()
    tok = p.peek()
    if tok[0] != "end":
        raise ParseError(tok[2], {"end"}, tok[0])
    return f


# ---------------------------------------------------------------------------
# printing
# ---------------------------------------------------------------------------

def _match_sugar(f):
    """Recognize the definitional patterns so output stays readable.

    Any recognized form reparses to the same interned node, so the
    parse/print round trip is exact either way.
    """
    if f is TOP:
        return ("top",)
    if f.kind == IMP and f.right is BOTTOM:
        a = f.left
        if a.kind == BOX and a.arg.kind == IMP and a.arg.arg is None \
                and a.arg.right is BOTTOM:
            return ("dia", a.arg.left)
        if a.kind == PDIA and a.arg.kind == IMP and a.arg.right is BOTTOM:
            return ("pbox", a.arg.left)
        if a.kind == IMP and a.right.kind == IMP and a.right.right is BOTTOM:
            return ("conj", a.left, a.right.left)
        return ("neg", a)
    if f.kind == IMP and f.left.kind == IMP and f.left.right is BOTTOM:
        return ("disj", f.left.left, f.right)
    return None


# precedence levels: 0 impl, 1 disj, 2 conj, 3 unary/atom
def _print(f, level) -> str:
    sugar = _match_sugar(f)
    if sugar is not None:
        tag = sugar[0]
        if tag == "top":
            return "#t"
        if tag == "neg":
            return "~" + _print(sugar[1], 3)
        if tag == "dia":
            return "<>" + _print(sugar[1], 3)
        if tag == "pbox":
            return "[P]" + _print(sugar[1], 3)
        if tag == "conj":
            # grammar folds & and | to the left; our builders fold right,
            # so the right operand is parenthesized when compound
            s = _print(sugar[1], 3) + " & " + _print(sugar[2], 3)
            return "(" + s + ")" if level > 2 else s
        if tag == "disj":
            s = _print(sugar[1], 2) + " | " + _print(sugar[2], 2)
            return "(" + s + ")" if level > 1 else s
    if f.kind == VAR:
        return f"p{f.arg}"
    if f.kind == BOT:
        return "#f"
    if f.kind == BOX:
        return "[]" + _print(f.arg, 3)
    if f.kind == PDIA:
        return "<P>" + _print(f.arg, 3)
    s = _print(f.left, 1) + " -> " + _print(f.right, 0)
    return "(" + s + ")" if level > 0 else s


def to_text(f: Formula) -> str:
    return _print(f, 0)
