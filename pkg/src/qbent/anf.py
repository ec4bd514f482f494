"""Algebraic normal form expressions: parsing and canonical rendering.

Grammar (whitespace ignored)::

    expr := term ('+' term)*
    term := '1' | '0' | var ('*' var)*
    var  := 'x' integer          # 1 <= integer <= n

``+`` is XOR, so repeated monomials cancel in pairs.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

_TOKEN = re.compile(r"\s*(?:(x)(\d+)|(\d+)|([+*]))")


class AnfSyntaxError(ValueError):
    def __init__(self, msg: str, text: str, pos: int):
        super().__init__(f"{msg} at position {pos} in {text!r}")
        self.text = text
        self.pos = pos


@dataclass(frozen=True)
class AnfExpr:
    n: int
    terms: frozenset[frozenset[int]]

    @property
    def degree(self) -> int:
        return max((len(t) for t in self.terms), default=0)

    def monomials(self) -> list[tuple[int, ...]]:
        """Monomials ordered by descending degree, then lexicographically."""
        return sorted((tuple(sorted(t)) for t in self.terms), key=lambda m: (-len(m), m))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return "+".join("*".join(f"x{i}" for i in m) if m else "1" for m in self.monomials())

    def masks(self) -> list[int]:
        return [sum(1 << (i - 1) for i in t) for t in self.terms]

    @classmethod
    def from_masks(cls, n: int, masks) -> AnfExpr:
        return cls(n, frozenset(frozenset(i + 1 for i in range(n) if (m >> i) & 1) for m in masks))


def _tokens(text: str):
    pos = 0
    end = len(text.rstrip())
    while pos < end:
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise AnfSyntaxError(f"unexpected character {text[bad]!r}", text, bad)
        start = m.start(1) if m.group(1) else m.start(3) if m.group(3) else m.start(4)
        if m.group(1):
            yield "var", int(m.group(2)), start
        elif m.group(3):
            yield "const", int(m.group(3)), start
        else:
            yield m.group(4), None, start
        pos = m.end()


def parse(text: str, n: int) -> AnfExpr:
    toks = list(_tokens(text))
    if not toks:
        raise AnfSyntaxError("empty expression", text, 0)
    terms: set[frozenset[int]] = set()
    i = 0

    def expect_operand():
        if i >= len(toks):
            raise AnfSyntaxError("expected a term", text, len(text))
        return toks[i]

    while True:
        kind, val, pos = expect_operand()
        i += 1
        if kind == "const":
            if val not in (0, 1):
                raise AnfSyntaxError(f"constant must be 0 or 1, got {val}", text, pos)
            mono = frozenset() if val == 1 else None
        elif kind == "var":
            vars_ = set()
            while True:
                if not 1 <= val <= n:
                    raise AnfSyntaxError(f"variable x{val} out of range 1..{n}", text, pos)
                vars_.add(val)  # idempotent: x*x = x
                if i < len(toks) and toks[i][0] == "*":
                    i += 1
                    kind, val, pos = expect_operand()
                    if kind != "var":
                        raise AnfSyntaxError("expected a variable after '*'", text, pos)
                    i += 1
                    continue
                break
            mono = frozenset(vars_)
        else:
            raise AnfSyntaxError(f"unexpected {kind!r}", text, pos)
        if mono is not None:
            terms ^= {mono}
        if i == len(toks):
            break
        kind, _, pos = toks[i]
        if kind != "+":
            raise AnfSyntaxError(f"expected '+', got {kind!r}", text, pos)
        i += 1
    return AnfExpr(n, frozenset(terms))
