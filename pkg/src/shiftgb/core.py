"""Sparse exact-rational polynomials over a doubly indexed variable grid.

Variables ``x[i,j]`` carry a row index ``i`` (bounded by a ring width fixed
by context) and an unbounded column index ``j``.  This module provides the
monomial/polynomial arithmetic, the column-major shift order, the action of
strictly increasing column maps, canonical column compression, and the text
syntax used throughout the package.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import IntEnum
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Mapping, NamedTuple, Optional, Tuple, Union

__all__ = [
    "Ordering",
    "Monomial",
    "Term",
    "Polynomial",
    "ShiftMap",
    "cmp_shift",
    "monomial_key",
    "leading_term",
    "apply_shift",
    "compose_shifts",
    "compress",
    "ParseError",
    "parse_polynomial",
    "format_monomial",
    "format_polynomial",
]


class Ordering(IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


# Internal variable key: (col, row).  Columns are the significant index, rows
# break ties, so sorting keys descending puts the largest variable first.
VarKey = Tuple[int, int]


@dataclass(frozen=True)
class Monomial:
    """Finite-support exponent vector over grid variables.

    ``exps`` holds ``((col, row), exponent)`` pairs sorted descending by
    ``(col, row)``; exponents are strictly positive.  The tuple doubles as
    the comparison key of the shift order, so monomial comparison is plain
    tuple comparison on ``exps``.
    """

    exps: Tuple[Tuple[VarKey, int], ...] = ()

    @staticmethod
    def make(exponents: Mapping[Tuple[int, int], int]) -> "Monomial":
        """Build from a ``{(row, col): exponent}`` mapping; zeros dropped."""
        items = []
        for (row, col), e in exponents.items():
            if e == 0:
                continue
            if e < 0:
                raise ValueError(f"negative exponent {e} at x[{row},{col}]")
            if row < 1 or col < 1:
                raise ValueError(f"variable indices must be positive, got x[{row},{col}]")
            items.append(((col, row), e))
        items.sort(reverse=True)
        return Monomial(tuple(items))

    @staticmethod
    def variable(row: int, col: int, exp: int = 1) -> "Monomial":
        return Monomial.make({(row, col): exp})

    @staticmethod
    def one() -> "Monomial":
        return Monomial(())

    def is_one(self) -> bool:
        return not self.exps

    def degree(self) -> int:
        return sum(e for _, e in self.exps)

    def exponent(self, row: int, col: int) -> int:
        key = (col, row)
        for k, e in self.exps:
            if k == key:
                return e
        return 0

    def variables(self) -> Iterator[Tuple[int, int, int]]:
        """Yield ``(row, col, exp)`` ascending by ``(col, row)``."""
        for (col, row), e in reversed(self.exps):
            yield row, col, e

    def columns(self) -> Tuple[int, ...]:
        return tuple(sorted({col for (col, _), _ in self.exps}))

    def max_col(self) -> int:
        return self.exps[0][0][0] if self.exps else 0

    def max_row(self) -> int:
        return max((row for (_, row), _ in self.exps), default=0)

    def column_blocks(self) -> Tuple[Tuple[int, Tuple[Tuple[int, int], ...]], ...]:
        """Per-column exponent profiles ``(col, ((row, exp), ...))`` ascending."""
        blocks: dict[int, list[Tuple[int, int]]] = {}
        for (col, row), e in self.exps:
            blocks.setdefault(col, []).append((row, e))
        return tuple(
            (col, tuple(sorted(blocks[col]))) for col in sorted(blocks)
        )

    def mul(self, other: "Monomial") -> "Monomial":
        merged = dict(self.exps)
        for k, e in other.exps:
            merged[k] = merged.get(k, 0) + e
        return Monomial(tuple(sorted(merged.items(), reverse=True)))

    def divides(self, other: "Monomial") -> bool:
        """Plain componentwise divisibility (no shifting)."""
        theirs = dict(other.exps)
        return all(theirs.get(k, 0) >= e for k, e in self.exps)

    def div(self, other: "Monomial") -> "Monomial":
        """Exact quotient ``self / other``; raises if not divisible."""
        merged = dict(self.exps)
        for k, e in other.exps:
            left = merged.get(k, 0) - e
            if left < 0:
                raise ValueError("monomial division is not exact")
            if left == 0:
                merged.pop(k, None)
            else:
                merged[k] = left
        return Monomial(tuple(sorted(merged.items(), reverse=True)))

    def lcm(self, other: "Monomial") -> "Monomial":
        merged = dict(self.exps)
        for k, e in other.exps:
            if merged.get(k, 0) < e:
                merged[k] = e
        return Monomial(tuple(sorted(merged.items(), reverse=True)))

    def coprime(self, other: "Monomial") -> bool:
        theirs = {k for k, _ in other.exps}
        return all(k not in theirs for k, _ in self.exps)

    def apply(self, shift: "ShiftMap") -> "Monomial":
        if shift.is_identity():
            return self
        items = tuple(
            sorted((((shift.apply(col), row), e) for (col, row), e in self.exps), reverse=True)
        )
        return Monomial(items)

    def apply_diagonal(self, shift: "ShiftMap") -> "Monomial":
        """Apply the shift to both indices (grid reinterpretation)."""
        if shift.is_identity():
            return self
        items = tuple(
            sorted(
                (((shift.apply(col), shift.apply(row)), e) for (col, row), e in self.exps),
                reverse=True,
            )
        )
        return Monomial(items)

    def __str__(self) -> str:
        return format_monomial(self)


def monomial_key(m: Monomial) -> Tuple[Tuple[VarKey, int], ...]:
    """Sort key realizing the shift order (column-major lexicographic)."""
    return m.exps


def cmp_shift(a: Monomial, b: Monomial) -> Ordering:
    """Total order: compare at the largest variable where exponents differ.

    Variable significance is ``(col, row)`` descending, so ``x[i,j]``
    precedes ``x[k,l]`` exactly when ``j < l`` or (``j == l`` and ``i < k``).
    """
    if a.exps == b.exps:
        return Ordering.EQUAL
    return Ordering.GREATER if a.exps > b.exps else Ordering.LESS


class Term(NamedTuple):
    coeff: Fraction
    mono: Monomial


CoeffLike = Union[Fraction, int]


@dataclass(frozen=True)
class Polynomial:
    """Exact-rational combination of monomials, leading term first.

    ``terms`` is sorted descending under the shift order and carries no zero
    coefficients; the zero polynomial is the empty tuple.
    """

    terms: Tuple[Tuple[Monomial, Fraction], ...] = ()

    @staticmethod
    def from_terms(pairs: Iterable[Tuple[Monomial, CoeffLike]]) -> "Polynomial":
        acc: dict[Monomial, Fraction] = {}
        for mono, coeff in pairs:
            c = acc.get(mono, Fraction(0)) + Fraction(coeff)
            if c:
                acc[mono] = c
            else:
                acc.pop(mono, None)
        ordered = sorted(acc.items(), key=lambda t: t[0].exps, reverse=True)
        return Polynomial(tuple(ordered))

    @staticmethod
    def zero() -> "Polynomial":
        return Polynomial(())

    @staticmethod
    def constant(c: CoeffLike) -> "Polynomial":
        c = Fraction(c)
        return Polynomial(((Monomial.one(), c),)) if c else Polynomial(())

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def leading(self) -> Optional[Term]:
        if not self.terms:
            return None
        mono, coeff = self.terms[0]
        return Term(coeff, mono)

    def tail(self) -> "Polynomial":
        """Everything below the leading term."""
        return Polynomial(self.terms[1:])

    def num_terms(self) -> int:
        return len(self.terms)

    def coefficient(self, mono: Monomial) -> Fraction:
        for m, c in self.terms:
            if m == mono:
                return c
        return Fraction(0)

    def __add__(self, other: "Polynomial") -> "Polynomial":
        if not isinstance(other, Polynomial):
            return NotImplemented
        return Polynomial.from_terms(list(self.terms) + list(other.terms))

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        if not isinstance(other, Polynomial):
            return NotImplemented
        return Polynomial.from_terms(
            list(self.terms) + [(m, -c) for m, c in other.terms]
        )

    def __neg__(self) -> "Polynomial":
        return Polynomial(tuple((m, -c) for m, c in self.terms))

    def scale(self, c: CoeffLike) -> "Polynomial":
        c = Fraction(c)
        if not c:
            return Polynomial(())
        return Polynomial(tuple((m, coeff * c) for m, coeff in self.terms))

    def mul_term(self, coeff: CoeffLike, mono: Monomial) -> "Polynomial":
        """Multiply by a single term; scaling by a monomial preserves order."""
        coeff = Fraction(coeff)
        if not coeff:
            return Polynomial(())
        return Polynomial(tuple((m.mul(mono), c * coeff) for m, c in self.terms))

    def monic(self) -> "Polynomial":
        lead = self.leading
        if lead is None or lead.coeff == 1:
            return self
        return self.scale(1 / lead.coeff)

    def apply(self, shift: "ShiftMap") -> "Polynomial":
        if shift.is_identity():
            return self
        return Polynomial(
            tuple(
                sorted(
                    ((m.apply(shift), c) for m, c in self.terms),
                    key=lambda t: t[0].exps,
                    reverse=True,
                )
            )
        )

    def columns(self) -> Tuple[int, ...]:
        cols = set()
        for m, _ in self.terms:
            cols.update(m.columns())
        return tuple(sorted(cols))

    def max_col(self) -> int:
        return max((m.max_col() for m, _ in self.terms), default=0)

    def max_row(self) -> int:
        return max((m.max_row() for m, _ in self.terms), default=0)

    def degree(self) -> int:
        return max((m.degree() for m, _ in self.terms), default=0)

    def __str__(self) -> str:
        return format_polynomial(self)


def leading_term(f: Polynomial) -> Optional[Term]:
    """Largest term under the shift order; ``None`` for the zero polynomial."""
    return f.leading


@dataclass(frozen=True)
class ShiftMap:
    """Strictly increasing self-map of the positive column indices.

    Stored as canonical ``(domain, image)`` breakpoints: columns below the
    first breakpoint map to themselves, and between or beyond breakpoints the
    map continues with slope one from the nearest breakpoint on the left.
    Construction rejects data that cannot extend to a strictly increasing
    self-map of the positive integers.
    """

    pairs: Tuple[Tuple[int, int], ...] = ()

    @staticmethod
    def from_pairs(
        pairs: Union[Mapping[int, int], Iterable[Tuple[int, int]]]
    ) -> "ShiftMap":
        if isinstance(pairs, Mapping):
            raw = sorted(set(pairs.items()))
        else:
            raw = sorted(set(pairs))
        canon: list[Tuple[int, int]] = []
        prev_d = prev_i = None
        for d, i in raw:
            if d < 1 or i < 1:
                raise ValueError(f"shift entries must be positive, got {d}->{i}")
            if prev_d is None:
                if i < d:
                    raise ValueError(
                        f"{d}->{i} cannot extend to a strictly increasing self-map"
                    )
            else:
                if d == prev_d:
                    raise ValueError(f"conflicting images for column {d}")
                if i - prev_i < d - prev_d:
                    raise ValueError(
                        f"{prev_d}->{prev_i}, {d}->{i} leaves no room for the "
                        f"columns in between"
                    )
            predicted = d if not canon else canon[-1][1] + (d - canon[-1][0])
            if i != predicted:
                canon.append((d, i))
            prev_d, prev_i = d, i
        return ShiftMap(tuple(canon))

    @staticmethod
    def identity() -> "ShiftMap":
        return ShiftMap(())

    @staticmethod
    def from_image(image: Iterable[int]) -> "ShiftMap":
        """Map ``[w]`` onto the given strictly increasing image tuple."""
        return ShiftMap.from_pairs((k + 1, v) for k, v in enumerate(image))

    def is_identity(self) -> bool:
        return not self.pairs

    @cached_property
    def _domains(self) -> Tuple[int, ...]:
        return tuple(d for d, _ in self.pairs)

    def apply(self, col: int) -> int:
        if col < 1:
            raise ValueError("columns are positive")
        doms = self._domains
        # rightmost breakpoint at or below col
        lo, hi = 0, len(doms)
        while lo < hi:
            mid = (lo + hi) // 2
            if doms[mid] <= col:
                lo = mid + 1
            else:
                hi = mid
        if lo == 0:
            return col
        d, i = self.pairs[lo - 1]
        return i + (col - d)

    def max_domain(self) -> int:
        return self.pairs[-1][0] if self.pairs else 0

    def describe(self, upto: int = 0) -> str:
        """Render as ``1->2, 2->3`` over ``[1, upto]`` (or the breakpoints)."""
        upto = max(upto, self.max_domain())
        if upto == 0:
            return "id"
        return ", ".join(f"{c}->{self.apply(c)}" for c in range(1, upto + 1))

    def __str__(self) -> str:
        return self.describe()


def apply_shift(shift: ShiftMap, f: Polynomial) -> Polynomial:
    """Replace every ``x[i,j]`` by ``x[i, shift(j)]``; coefficients unchanged."""
    return f.apply(shift)


def compose_shifts(p2: ShiftMap, p1: ShiftMap) -> ShiftMap:
    """The map ``c -> p2(p1(c))``, again strictly increasing."""
    if p1.is_identity():
        return p2
    if p2.is_identity():
        return p1
    d1 = p1.max_domain()
    d2 = p2.max_domain()
    # beyond C both factors run with slope one, so the composite does too
    if p1.apply(d1) >= d2:
        c2 = 1
        while p1.apply(c2) < d2:
            c2 += 1
    else:
        c2 = d1 + (d2 - p1.apply(d1))
    upto = max(d1, c2)
    return ShiftMap.from_pairs((c, p2.apply(p1.apply(c))) for c in range(1, upto + 1))


def map_columns(f: Polynomial, mapping: Mapping[int, int]) -> Polynomial:
    """Relabel columns by an arbitrary injective map (not necessarily increasing)."""
    out = []
    for m, c in f.terms:
        items = tuple(
            sorted((((mapping[col], row), e) for (col, row), e in m.exps), reverse=True)
        )
        out.append((Monomial(items), c))
    return Polynomial.from_terms(out)


def compress(f: Polynomial) -> Tuple[Polynomial, ShiftMap]:
    """Canonical column form: renumber the support columns to ``1..w``.

    Returns ``(g, pi)`` with ``apply_shift(pi, g) == f`` and ``pi`` the
    order-preserving bijection onto the original columns.
    """
    if f.is_zero():
        raise ValueError("cannot compress the zero polynomial")
    cols = f.columns()
    mapping = {c: k + 1 for k, c in enumerate(cols)}
    g = map_columns(f, mapping)
    pi = ShiftMap.from_pairs((k + 1, c) for k, c in enumerate(cols))
    return g, pi


# ---------------------------------------------------------------------------
# Text syntax: x[i,j]^e factors joined by '*', terms joined by '+'/'-',
# rational coefficients as p/q.  parse/format round-trip exactly.
# ---------------------------------------------------------------------------


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


_TOKEN = re.compile(r"(\d+)|(x)|(\[)|(\])|(,)|(\^)|(\*)|(/)|(\+)|(-)|(\S)")


def _tokenize(text: str) -> list[Tuple[str, str, int]]:
    tokens = []
    for m in _TOKEN.finditer(text):
        pos = m.start()
        if m.group(1):
            tokens.append(("int", m.group(1), pos))
        elif m.group(2):
            tokens.append(("x", "x", pos))
        elif m.group(3):
            tokens.append(("[", "[", pos))
        elif m.group(4):
            tokens.append(("]", "]", pos))
        elif m.group(5):
            tokens.append((",", ",", pos))
        elif m.group(6):
            tokens.append(("^", "^", pos))
        elif m.group(7):
            tokens.append(("*", "*", pos))
        elif m.group(8):
            tokens.append(("/", "/", pos))
        elif m.group(9):
            tokens.append(("+", "+", pos))
        elif m.group(10):
            tokens.append(("-", "-", pos))
        else:
            raise ParseError(f"unexpected character {m.group(11)!r}", pos)
    return tokens


class _Parser:
    def __init__(self, text: str, ring_width: Optional[int]):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0
        self.ring_width = ring_width

    def peek(self) -> Optional[Tuple[str, str, int]]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self) -> Tuple[str, str, int]:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", len(self.text))
        self.pos += 1
        return tok

    def expect(self, kind: str) -> Tuple[str, str, int]:
        tok = self.next()
        if tok[0] != kind:
            raise ParseError(f"expected {kind!r}, got {tok[1]!r}", tok[2])
        return tok

    def parse_int(self) -> int:
        tok = self.expect("int")
        return int(tok[1])

    def parse_variable(self) -> Monomial:
        self.expect("x")
        self.expect("[")
        row_tok = self.expect("int")
        row = int(row_tok[1])
        self.expect(",")
        col_tok = self.expect("int")
        col = int(col_tok[1])
        self.expect("]")
        if row < 1:
            raise ParseError(f"row index must be positive, got {row}", row_tok[2])
        if col < 1:
            raise ParseError(f"column index must be positive, got {col}", col_tok[2])
        if self.ring_width is not None and row > self.ring_width:
            raise ParseError(
                f"row {row} exceeds ring width {self.ring_width}", row_tok[2]
            )
        exp = 1
        tok = self.peek()
        if tok and tok[0] == "^":
            self.next()
            exp = self.parse_int()
        return Monomial.make({(row, col): exp})

    def parse_factor(self) -> Tuple[Fraction, Optional[Monomial]]:
        tok = self.peek()
        if tok is None:
            raise ParseError("expected a factor", len(self.text))
        if tok[0] == "int":
            num = self.parse_int()
            den = 1
            nxt = self.peek()
            if nxt and nxt[0] == "/":
                self.next()
                den_tok = self.expect("int")
                den = int(den_tok[1])
                if den == 0:
                    raise ParseError("zero denominator", den_tok[2])
            return Fraction(num, den), None
        if tok[0] == "x":
            return Fraction(1), self.parse_variable()
        raise ParseError(f"expected a coefficient or variable, got {tok[1]!r}", tok[2])

    def parse_term(self) -> Tuple[Fraction, Monomial]:
        coeff, mono = self.parse_factor()
        mono = mono or Monomial.one()
        while True:
            tok = self.peek()
            if tok is None or tok[0] != "*":
                break
            self.next()
            c, m = self.parse_factor()
            coeff *= c
            if m is not None:
                mono = mono.mul(m)
        return coeff, mono

    def parse(self) -> Polynomial:
        terms: list[Tuple[Monomial, Fraction]] = []
        sign = Fraction(1)
        tok = self.peek()
        if tok is None:
            raise ParseError("empty input", 0)
        if tok[0] in ("+", "-"):
            self.next()
            sign = Fraction(-1) if tok[0] == "-" else Fraction(1)
        while True:
            coeff, mono = self.parse_term()
            terms.append((mono, sign * coeff))
            tok = self.peek()
            if tok is None:
                break
            if tok[0] not in ("+", "-"):
                raise ParseError(f"expected '+' or '-', got {tok[1]!r}", tok[2])
            self.next()
            sign = Fraction(-1) if tok[0] == "-" else Fraction(1)
        return Polynomial.from_terms(terms)


def parse_polynomial(text: str, ring_width: Optional[int] = None) -> Polynomial:
    """Parse the text syntax; raises :class:`ParseError` with a position."""
    return _Parser(text, ring_width).parse()


def format_monomial(m: Monomial) -> str:
    if m.is_one():
        return "1"
    parts = []
    for row, col, e in m.variables():
        parts.append(f"x[{row},{col}]" if e == 1 else f"x[{row},{col}]^{e}")
    return "*".join(parts)


def format_polynomial(f: Polynomial) -> str:
    if f.is_zero():
        return "0"
    chunks = []
    for idx, (mono, coeff) in enumerate(f.terms):
        negative = coeff < 0
        mag = -coeff if negative else coeff
        if mono.is_one():
            body = str(mag)
        elif mag == 1:
            body = format_monomial(mono)
        else:
            body = f"{mag}*{format_monomial(mono)}"
        if idx == 0:
            chunks.append(f"-{body}" if negative else body)
        else:
            chunks.append(f"- {body}" if negative else f"+ {body}")
    return " ".join(chunks)
