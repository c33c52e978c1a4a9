"""Exact two-variable integer Laurent polynomials in ``z`` and ``w``.

Polynomials are immutable maps from exponent pairs ``(a, b)`` (meaning
``z^a w^b``) to nonzero Python integers.  The module also provides the text
grammar used everywhere in the package, exact determinants of small Laurent
matrices, and Newton polygon geometry.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence

__all__ = [
    "Exponent",
    "LaurentPoly2",
    "LaurentMatrix",
    "NewtonPolygon",
    "UnivariatePoly",
    "ParseError",
    "CoefficientOverflow",
    "parse_poly",
    "format_poly",
    "poly_arith",
    "evaluate",
    "substitute_monomial",
    "determinant",
    "newton_polygon",
    "face_polynomials",
    "equivalence",
    "DETERMINANT_CAP",
]

# Coefficients are unbounded Python ints; this only guards runaway growth.
MAX_COEFF_BITS = 1 << 14
MAX_POWER = 4096
DETERMINANT_CAP = 16


class ParseError(ValueError):
    """Raised for malformed polynomial text; ``position`` is a 0-based offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class CoefficientOverflow(ArithmeticError):
    pass


class Exponent(NamedTuple):
    a: int  # power of z
    b: int  # power of w


def _check(c: int) -> int:
    if c.bit_length() > MAX_COEFF_BITS:
        raise CoefficientOverflow(f"coefficient exceeds {MAX_COEFF_BITS} bits")
    return c


class LaurentPoly2:
    """An element of Z[z, 1/z, w, 1/w]."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[tuple[int, int], int] | None = None):
        clean: dict[Exponent, int] = {}
        if terms:
            for (a, b), c in terms.items():
                c = int(c)
                if c:
                    clean[Exponent(int(a), int(b))] = _check(c)
        self._terms = clean
        self._hash: int | None = None

    # construction helpers
    @classmethod
    def constant(cls, c: int) -> LaurentPoly2:
        return cls({(0, 0): c})

    @classmethod
    def monomial(cls, a: int, b: int, c: int = 1) -> LaurentPoly2:
        return cls({(a, b): c})

    @classmethod
    def z(cls) -> LaurentPoly2:
        return cls.monomial(1, 0)

    @classmethod
    def w(cls) -> LaurentPoly2:
        return cls.monomial(0, 1)

    @property
    def terms(self) -> dict[Exponent, int]:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[Exponent, int]]:
        return iter(sorted(self._terms.items()))

    def support(self) -> list[Exponent]:
        return sorted(self._terms)

    def coefficient(self, a: int, b: int) -> int:
        return self._terms.get(Exponent(a, b), 0)

    def is_zero(self) -> bool:
        return not self._terms

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            other = LaurentPoly2.constant(other)
        if not isinstance(other, LaurentPoly2):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __repr__(self) -> str:
        return f"LaurentPoly2('{format_poly(self)}')"

    def __str__(self) -> str:
        return format_poly(self)

    # ring operations
    @staticmethod
    def _coerce(other) -> LaurentPoly2:
        if isinstance(other, LaurentPoly2):
            return other
        if isinstance(other, int):
            return LaurentPoly2.constant(other)
        return NotImplemented

    def __add__(self, other) -> LaurentPoly2:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = out.get(e, 0) + c
        return LaurentPoly2(out)

    __radd__ = __add__

    def __neg__(self) -> LaurentPoly2:
        return LaurentPoly2({e: -c for e, c in self._terms.items()})

    def __sub__(self, other) -> LaurentPoly2:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> LaurentPoly2:
        return (-self) + other

    def __mul__(self, other) -> LaurentPoly2:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict[tuple[int, int], int] = {}
        for (a1, b1), c1 in self._terms.items():
            for (a2, b2), c2 in other._terms.items():
                key = (a1 + a2, b1 + b2)
                out[key] = out.get(key, 0) + c1 * c2
        return LaurentPoly2(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> LaurentPoly2:
        if k < 0:
            if not self.is_monomial() or abs(next(iter(self._terms.values()))) != 1:
                raise ValueError("negative powers only exist for unit monomials")
            (a, b), c = next(iter(self._terms.items()))
            return LaurentPoly2.monomial(a * k, b * k, c ** (-k))
        if k > MAX_POWER:
            raise CoefficientOverflow(f"power {k} exceeds {MAX_POWER}")
        result = LaurentPoly2.constant(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # geometry of the support
    def degree_range(self, var: int) -> tuple[int, int]:
        """(min, max) exponent of ``z`` (var=0) or ``w`` (var=1)."""
        if not self._terms:
            raise ValueError("zero polynomial has no degree")
        vals = [e[var] for e in self._terms]
        return min(vals), max(vals)

    def shift(self, da: int, db: int) -> LaurentPoly2:
        return LaurentPoly2({(a + da, b + db): c for (a, b), c in self._terms.items()})

    def normalized(self) -> LaurentPoly2:
        """Translate so the minimal exponents in both variables are zero."""
        if not self._terms:
            return self
        amin = min(e.a for e in self._terms)
        bmin = min(e.b for e in self._terms)
        return self.shift(-amin, -bmin)

    def content(self) -> int:
        g = 0
        for c in self._terms.values():
            g = math.gcd(g, c)
        return g

    def swap(self) -> LaurentPoly2:
        return LaurentPoly2({(b, a): c for (a, b), c in self._terms.items()})

    def __call__(self, z: complex, w: complex) -> complex:
        return evaluate(self, z, w)


@dataclass(frozen=True)
class UnivariatePoly:
    """Integer polynomial, coefficients lowest degree first."""

    coefficients: tuple[int, ...]

    def __post_init__(self):
        coeffs = [int(c) for c in self.coefficients]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        object.__setattr__(self, "coefficients", tuple(coeffs))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def is_zero(self) -> bool:
        return not self.coefficients

    def __str__(self) -> str:
        return format_poly(LaurentPoly2({(k, 0): c for k, c in enumerate(self.coefficients)}))


@dataclass(frozen=True)
class LaurentMatrix:
    rows: int
    cols: int
    entries: tuple[tuple[LaurentPoly2, ...], ...]

    def __post_init__(self):
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise ValueError(f"expected a {self.rows}x{self.cols} grid of entries")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[LaurentPoly2 | int | str]]) -> LaurentMatrix:
        def conv(x):
            if isinstance(x, LaurentPoly2):
                return x
            if isinstance(x, str):
                return parse_poly(x)
            return LaurentPoly2.constant(x)

        grid = tuple(tuple(conv(x) for x in r) for r in rows)
        ncols = len(grid[0]) if grid else 0
        return cls(len(grid), ncols, grid)

    def __getitem__(self, ij: tuple[int, int]) -> LaurentPoly2:
        i, j = ij
        return self.entries[i][j]

    def evaluate(self, z: complex, w: complex) -> list[list[complex]]:
        return [[evaluate(e, z, w) if e else 0 for e in row] for row in self.entries]


@dataclass(frozen=True)
class NewtonPolygon:
    vertices: tuple[Exponent, ...]
    edges: tuple[tuple[Exponent, Exponent], ...]


# ---------------------------------------------------------------------------
# Text grammar

_TOKEN = re.compile(r"\s*(?:(\d+)|([zw])|(\*\*|[-+*^()]))")


def _tokenize(text: str) -> list[tuple[str, object, int]]:
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(m.lastindex)
        if m.group(1) is not None:
            if len(m.group(1)) * math.log2(10) > MAX_COEFF_BITS + 4:
                raise CoefficientOverflow(f"integer literal at position {start} exceeds {MAX_COEFF_BITS} bits")
            tokens.append(("int", int(m.group(1)), start))
        elif m.group(2) is not None:
            tokens.append(("var", m.group(2), start))
        else:
            op = m.group(3)
            tokens.append(("op", "^" if op == "**" else op, start))
        pos = m.end()
    tokens.append(("end", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, val, pos = self.take()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}", pos)

    def parse(self) -> LaurentPoly2:
        kind, _, pos = self.peek()
        if kind == "end":
            raise ParseError("empty expression", pos)
        result = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected token {val!r}", pos)
        return result

    def expr(self) -> LaurentPoly2:
        result = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                rhs = self.term()
                result = result + rhs if val == "+" else result - rhs
            else:
                return result

    def term(self) -> LaurentPoly2:
        result = self.unary()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val == "*":
                self.take()
                result = result * self.unary()
            else:
                return result

    def unary(self) -> LaurentPoly2:
        kind, val, _ = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            inner = self.unary()
            return -inner if val == "-" else inner
        return self.power()

    def power(self) -> LaurentPoly2:
        base = self.atom()
        kind, val, pos = self.peek()
        if kind == "op" and val == "^":
            self.take()
            sign = 1
            kind, val, pos = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                sign = -1 if val == "-" else 1
                kind, val, pos = self.peek()
            if kind == "op" and val == "(":
                # allow z^(-1)
                self.take()
                inner_sign = 1
                k2, v2, p2 = self.peek()
                if k2 == "op" and v2 in "+-":
                    self.take()
                    inner_sign = -1 if v2 == "-" else 1
                k2, v2, p2 = self.take()
                if k2 != "int":
                    raise ParseError("exponent must be an integer", p2)
                self.expect_op(")")
                exp = sign * inner_sign * v2
            else:
                kind, val, pos = self.take()
                if kind != "int":
                    raise ParseError("exponent must be an integer", pos)
                exp = sign * val
            try:
                return base ** exp
            except ValueError as exc:
                raise ParseError(str(exc), pos) from None
        return base

    def atom(self) -> LaurentPoly2:
        kind, val, pos = self.take()
        if kind == "int":
            return LaurentPoly2.constant(_check(val))
        if kind == "var":
            return LaurentPoly2.z() if val == "z" else LaurentPoly2.w()
        if kind == "op" and val == "(":
            inner = self.expr()
            self.expect_op(")")
            return inner
        if kind == "end":
            raise ParseError("unexpected end of input", pos)
        raise ParseError(f"unexpected token {val!r}", pos)


def parse_poly(text: str) -> LaurentPoly2:
    """Parse an expression in ``z`` and ``w``, e.g. ``"4 + z + z^-1 + w + w^-1"``."""
    return _Parser(text).parse()


def _monomial_str(a: int, b: int) -> str:
    parts = []
    for var, e in (("z", a), ("w", b)):
        if e == 1:
            parts.append(var)
        elif e:
            parts.append(f"{var}^{e}")
    return "*".join(parts)


def format_poly(p: LaurentPoly2) -> str:
    """Canonical text: terms ascending by (z-power, w-power), no ``1*``."""
    if p.is_zero():
        return "0"
    out = []
    for (a, b), c in p.items():
        mono = _monomial_str(a, b)
        mag = abs(c)
        if not mono:
            body = str(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{mag}*{mono}"
        if not out:
            out.append(body if c > 0 else f"-{body}")
        else:
            out.append(f"+ {body}" if c > 0 else f"- {body}")
    return " ".join(out)


# ---------------------------------------------------------------------------
# Operations


def poly_arith(p: LaurentPoly2, q: LaurentPoly2, op: str) -> LaurentPoly2:
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        return p * q
    raise ValueError(f"unknown operation {op!r}")


def evaluate(p: LaurentPoly2, z: complex, w: complex) -> complex:
    if z == 0 or w == 0:
        raise ZeroDivisionError("Laurent polynomials are evaluated on the torus (C*)^2")
    total = 0j
    for (a, b), c in p.items():
        total += c * (z ** a) * (w ** b)
    return total


def substitute_monomial(
    p: LaurentPoly2,
    matrix: Sequence[Sequence[int]],
    sign: int = 1,
    shift: tuple[int, int] = (0, 0),
) -> LaurentPoly2:
    """Replace z by z^M11 w^M21 and w by z^M12 w^M22, then scale by sign*z^s0*w^s1."""
    (m11, m12), (m21, m22) = matrix
    if m11 * m22 - m12 * m21 == 0:
        raise ValueError("substitution matrix is singular")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    out = {}
    for (a, b), c in p.items():
        key = (m11 * a + m12 * b + shift[0], m21 * a + m22 * b + shift[1])
        out[key] = out.get(key, 0) + sign * c
    return LaurentPoly2(out)


def determinant(m: LaurentMatrix, cap: int = DETERMINANT_CAP) -> LaurentPoly2:
    """Exact determinant by first-row cofactor expansion over memoized minors."""
    if m.rows != m.cols:
        raise ValueError(f"determinant of a non-square {m.rows}x{m.cols} matrix")
    n = m.rows
    if n > cap:
        raise ValueError(f"matrix side {n} exceeds the determinant cap {cap}")
    if n == 0:
        return LaurentPoly2.constant(1)
    nonzero = [[j for j in range(n) if m.entries[i][j]] for i in range(n)]
    memo: dict[int, LaurentPoly2] = {}
    zero = LaurentPoly2()

    def minor(row: int, cols: int) -> LaurentPoly2:
        # determinant of rows row..n-1 restricted to the column set `cols`
        if row == n:
            return LaurentPoly2.constant(1)
        if cols in memo:
            return memo[cols]
        total = zero
        for j in nonzero[row]:
            if not cols >> j & 1:
                continue
            # sign from the position of j among the remaining columns
            pos = bin(cols & ((1 << j) - 1)).count("1")
            sub = minor(row + 1, cols & ~(1 << j))
            if sub.is_zero():
                continue
            term = m.entries[row][j] * sub
            total = total - term if pos & 1 else total + term
        memo[cols] = total
        return total

    return minor(0, (1 << n) - 1)


def _cross(o, a, b) -> int:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _hull(points: Iterable[tuple[int, int]]) -> list[Exponent]:
    pts = sorted(set(points))
    if len(pts) <= 2:
        return [Exponent(*p) for p in pts]
    lower: list = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) == 2 and hull[0] == hull[1]:
        hull = hull[:1]
    return [Exponent(*p) for p in hull]


def newton_polygon(p: LaurentPoly2) -> NewtonPolygon:
    """Counterclockwise hull of the support, starting at the lexicographically least vertex."""
    if p.is_zero():
        raise ValueError("the zero polynomial has no Newton polygon")
    verts = _hull(p.support())
    if len(verts) == 1:
        return NewtonPolygon(tuple(verts), ())
    edges = tuple((verts[i], verts[(i + 1) % len(verts)]) for i in range(len(verts)))
    return NewtonPolygon(tuple(verts), edges)


def face_polynomials(p: LaurentPoly2) -> list[tuple[tuple[Exponent, Exponent], UnivariatePoly]]:
    """One polynomial per Newton polygon side, read in lattice steps from the side's start.

    The result is normalized up to units of Z[t, 1/t]: a leading sign of -1 and
    the lowest power of t are divided out.  Positive content is kept because it
    contributes to the Mahler measure.
    """
    poly = newton_polygon(p)
    out = []
    for start, end in poly.edges:
        da, db = end.a - start.a, end.b - start.b
        g = math.gcd(da, db)
        step = (da // g, db // g)
        coeffs = [p.coefficient(start.a + k * step[0], start.b + k * step[1]) for k in range(g + 1)]
        while coeffs and coeffs[0] == 0:
            coeffs.pop(0)
        if coeffs and coeffs[-1] < 0:
            coeffs = [-c for c in coeffs]
        out.append(((start, end), UnivariatePoly(tuple(coeffs))))
    return out


def _unimodular_matrices(bound: int) -> Iterator[tuple[tuple[int, int], tuple[int, int]]]:
    rng = range(-bound, bound + 1)
    for a, b, c, d in itertools.product(rng, repeat=4):
        if abs(a * d - b * c) == 1:
            yield ((a, b), (c, d))


def _canonical_key(p: LaurentPoly2) -> frozenset:
    q = p.normalized()
    lead = q.items().__next__()[1]
    if lead < 0:
        q = -q
    return frozenset(q.terms.items())


def equivalence(p: LaurentPoly2, q: LaurentPoly2, bound: int = 3):
    """Find a transformation taking ``p`` to ``q`` up to ``±z^a w^b``.

    Allowed moves are unimodular monomial substitutions and the sign changes
    ``z -> -z``, ``w -> -w``; all of them preserve the Mahler measure.  Returns
    ``(matrix, (sz, sw))`` or None when nothing with entries of absolute value
    at most ``bound`` works.
    """
    if p.is_zero() or q.is_zero():
        return (((1, 0), (0, 1)), (1, 1)) if p == q else None
    if len(p) != len(q):
        return None
    target = _canonical_key(q)
    for sz, sw in itertools.product((1, -1), repeat=2):
        flipped = LaurentPoly2({(a, b): c * sz ** (a & 1) * sw ** (b & 1) for (a, b), c in p.items()})
        for mat in _unimodular_matrices(bound):
            if _canonical_key(substitute_monomial(flipped, mat)) == target:
                return mat, (sz, sw)
    return None
