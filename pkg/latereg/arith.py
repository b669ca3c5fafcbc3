"""Exact coefficient arithmetic, monomials and homogeneous polynomials.

Coefficients live in the prime field F_p (default p = 32003) and are stored as
plain ints in ``range(p)``. Monomials are exponent tuples over the ring's
variables, ordered x_0 > ... > x_n > y_1 > ... > y_N, compared under
degrevlex.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from tokenize import TokenError
from typing import Iterable, Iterator, Mapping, Optional

import sympy
from sympy.parsing.sympy_parser import (
    convert_xor,
    parse_expr,
    standard_transformations,
)
from sympy.polys.monomials import monomial_mul
from sympy.polys.orderings import grevlex
from sympy.polys.polyerrors import CoercionFailed, PolynomialError

Monomial = tuple[int, ...]

DEFAULT_PRIME = 32003


class HomogeneityError(ValueError):
    """Raised when an element that must be homogeneous is not."""


class RingMismatchError(ValueError):
    """Raised when monomials or polynomials from different rings meet."""


class PolynomialSyntaxError(ValueError):
    """Raised when polynomial text cannot be parsed."""


def monomial_compare(a: Monomial, b: Monomial, order: str = "degrevlex") -> int:
    """Compare two monomials, returning -1, 0 or 1.

    Raises:
        RingMismatchError: If the exponent vectors have different lengths.
    """
    if len(a) != len(b):
        raise RingMismatchError(f"cannot compare monomials {a} and {b}")
    if order != "degrevlex":
        raise ValueError(f"unsupported monomial order '{order}'")
    ka, kb = grevlex(a), grevlex(b)
    return (ka > kb) - (ka < kb)


def big_binomial(a: int, b: int) -> int:
    """Exact binomial coefficient with binom(a, b) = 0 for b > a.

    Raises:
        ValueError: If either argument is negative.
    """
    if a < 0 or b < 0:
        raise ValueError(f"binomial arguments must be non-negative, got ({a}, {b})")
    if b > a:
        return 0
    return math.comb(a, b)


def monomials_of_degree(nvars: int, d: int) -> Iterator[Monomial]:
    """All exponent vectors of length ``nvars`` and sum ``d``, lex descending."""
    if nvars == 0:
        if d == 0:
            yield ()
        return
    if nvars == 1:
        yield (d,)
        return
    for first in range(d, -1, -1):
        for rest in monomials_of_degree(nvars - 1, d - first):
            yield (first, *rest)


@dataclass(frozen=True)
class PrimeField:
    """The coefficient field F_p."""

    p: int = DEFAULT_PRIME

    def __post_init__(self) -> None:
        if self.p < 3 or not sympy.isprime(self.p):
            raise ValueError(f"characteristic must be an odd prime, got {self.p}")

    def inv(self, a: int) -> int:
        """Multiplicative inverse.

        Raises:
            ZeroDivisionError: If ``a`` is zero modulo p.
        """
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, -1, self.p)

    def symmetric(self, a: int) -> int:
        """Representative of ``a`` in (-p/2, p/2]."""
        a %= self.p
        return a - self.p if a > self.p // 2 else a


@dataclass(frozen=True)
class RingContext:
    """The graded ring F_p[x_0..x_n, y_1..y_N]; N = 0 is the subring R."""

    n: int
    N: int = 0
    prime: int = DEFAULT_PRIME
    order: str = "degrevlex"
    field: PrimeField = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.n < 0 or self.N < 0:
            raise ValueError(f"invalid ring shape n={self.n}, N={self.N}")
        if self.order != "degrevlex":
            raise ValueError(f"unsupported monomial order '{self.order}'")
        object.__setattr__(self, "field", PrimeField(self.prime))

    @property
    def nvars(self) -> int:
        return self.n + 1 + self.N

    @property
    def names(self) -> tuple[str, ...]:
        xs = tuple(f"x{i}" for i in range(self.n + 1))
        ys = tuple(f"y{i}" for i in range(1, self.N + 1))
        return xs + ys

    @property
    def one(self) -> Monomial:
        return (0,) * self.nvars

    def x(self, i: int, power: int = 1) -> Monomial:
        """The monomial x_i^power."""
        m = [0] * self.nvars
        m[i] = power
        return tuple(m)

    def y(self, i: int, power: int = 1) -> Monomial:
        """The monomial y_i^power, 1-based like the variable names."""
        m = [0] * self.nvars
        m[self.n + i] = power
        return tuple(m)

    def y_monomial(self, alpha: Monomial, x0_power: int = 0) -> Monomial:
        """x_0^x0_power * y^alpha for a y-exponent vector alpha."""
        if len(alpha) != self.N:
            raise RingMismatchError(f"y-exponent {alpha} does not fit N={self.N}")
        return (x0_power,) + (0,) * self.n + tuple(alpha)

    def subring(self) -> RingContext:
        """R = S / (y_1, ..., y_N), viewed as F_p[x_0..x_n]."""
        return RingContext(self.n, 0, self.prime, self.order)

    def lift_monomial(self, m: Monomial) -> Monomial:
        """Embed an x-only monomial of the subring into this ring."""
        if len(m) != self.n + 1:
            raise RingMismatchError(f"monomial {m} is not in the x-subring")
        return tuple(m) + (0,) * self.N

    def format_monomial(self, m: Monomial) -> str:
        parts = []
        for name, e in zip(self.names, m):
            if e == 1:
                parts.append(name)
            elif e > 1:
                parts.append(f"{name}^{e}")
        return "*".join(parts) if parts else "1"

    def check(self, m: Monomial) -> Monomial:
        if len(m) != self.nvars:
            raise RingMismatchError(
                f"monomial {m} has {len(m)} exponents, ring has {self.nvars} variables"
            )
        return m


class Polynomial:
    """A homogeneous polynomial with terms sorted descending under degrevlex."""

    __slots__ = ("ring", "terms", "degree", "_hash")

    ring: RingContext
    terms: tuple[tuple[Monomial, int], ...]
    degree: Optional[int]

    def __init__(
        self, ring: RingContext, coefficients: Mapping[Monomial, int] | None = None
    ) -> None:
        """Build a polynomial from a monomial -> coefficient mapping.

        Coefficients are reduced modulo p and zero terms dropped.

        Raises:
            HomogeneityError: If the surviving terms have different degrees.
        """
        p = ring.prime
        clean = {}
        for m, c in (coefficients or {}).items():
            c %= p
            if c:
                clean[ring.check(tuple(m))] = c
        degrees = {sum(m) for m in clean}
        if len(degrees) > 1:
            raise HomogeneityError(f"polynomial mixes degrees {sorted(degrees)}")
        self.ring = ring
        self.terms = tuple(
            sorted(clean.items(), key=lambda t: grevlex(t[0]), reverse=True)
        )
        self.degree = degrees.pop() if degrees else None
        self._hash: Optional[int] = None

    @classmethod
    def monomial(cls, ring: RingContext, m: Monomial, c: int = 1) -> Polynomial:
        return cls(ring, {m: c})

    @classmethod
    def zero(cls, ring: RingContext) -> Polynomial:
        return cls(ring)

    def is_zero(self) -> bool:
        return not self.terms

    def as_dict(self) -> dict[Monomial, int]:
        return dict(self.terms)

    @property
    def lead(self) -> tuple[Monomial, int]:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        return self.terms[0]

    def is_constant(self) -> bool:
        return self.degree == 0

    def _same_ring(self, other: Polynomial) -> None:
        if self.ring != other.ring:
            raise RingMismatchError("polynomials live in different rings")

    def __add__(self, other: Polynomial) -> Polynomial:
        self._same_ring(other)
        acc = self.as_dict()
        for m, c in other.terms:
            acc[m] = acc.get(m, 0) + c
        return Polynomial(self.ring, acc)

    def __neg__(self) -> Polynomial:
        return self.scale(-1)

    def __sub__(self, other: Polynomial) -> Polynomial:
        return self + (-other)

    def scale(self, c: int) -> Polynomial:
        return Polynomial(self.ring, {m: a * c for m, a in self.terms})

    def mul_monomial(self, m: Monomial, c: int = 1) -> Polynomial:
        return Polynomial(
            self.ring, {monomial_mul(t, m): a * c for t, a in self.terms}
        )

    def __mul__(self, other: Polynomial) -> Polynomial:
        self._same_ring(other)
        acc: dict[Monomial, int] = {}
        for m1, c1 in self.terms:
            for m2, c2 in other.terms:
                m = monomial_mul(m1, m2)
                acc[m] = acc.get(m, 0) + c1 * c2
        return Polynomial(self.ring, acc)

    def monic(self) -> Polynomial:
        if not self.terms:
            return self
        return self.scale(self.ring.field.inv(self.terms[0][1]))

    def lift(self, ring: RingContext) -> Polynomial:
        """View an R-polynomial as an element of the larger ring ``ring``."""
        return Polynomial(ring, {ring.lift_monomial(m): c for m, c in self.terms})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.ring, self.terms))
        return self._hash

    def __str__(self) -> str:
        return format_polynomial(self)

    def __repr__(self) -> str:
        return f"Polynomial({format_polynomial(self)!r})"


def poly_combine(f: Polynomial, g: Polynomial, c: int, m: Monomial) -> Polynomial:
    """Return f - c*m*g, the primitive step of every reduction.

    Raises:
        HomogeneityError: If deg(f) != deg(m) + deg(g) for nonzero f and g.
    """
    if f.ring != g.ring:
        raise RingMismatchError("poly_combine across rings")
    f.ring.check(m)
    if g.is_zero():
        return f
    if not f.is_zero() and f.degree != sum(m) + (g.degree or 0):
        raise HomogeneityError(
            f"degree mismatch: deg f = {f.degree}, deg(m*g) = {sum(m) + (g.degree or 0)}"
        )
    acc = f.as_dict()
    for t, a in g.terms:
        key = monomial_mul(t, m)
        acc[key] = acc.get(key, 0) - c * a
    return Polynomial(f.ring, acc)


def format_polynomial(f: Polynomial) -> str:
    """Render ``f`` in the text syntax; coefficients use the symmetric range."""
    if f.is_zero():
        return "0"
    out: list[str] = []
    for m, c in f.terms:
        c = f.ring.field.symmetric(c)
        sign = "-" if c < 0 else "+"
        c = abs(c)
        mono = f.ring.format_monomial(m)
        if mono == "1":
            body = str(c)
        elif c == 1:
            body = mono
        else:
            body = f"{c}*{mono}"
        if not out:
            out.append(body if sign == "+" else f"-{body}")
        else:
            out.append(f" {sign} {body}")
    return "".join(out)


_TRANSFORMATIONS = standard_transformations + (convert_xor,)

# parse_expr evaluates its input, so only these tokens may reach it.
_POLYNOMIAL_TEXT = re.compile(r"(?:\s*(?:[xy]\d+|\d+|\*\*|[-+*^()]))*\s*")


def parse_polynomial(text: str, ring: RingContext) -> Polynomial:
    """Parse the text syntax into a homogeneous polynomial of ``ring``.

    Only variable names, integers, ``+ - * ^ **`` and parentheses are accepted.

    Raises:
        PolynomialSyntaxError: For malformed input or unknown variables.
        HomogeneityError: For non-homogeneous input.
    """
    if not _POLYNOMIAL_TEXT.fullmatch(text):
        raise PolynomialSyntaxError(f"unexpected characters in polynomial '{text}'")
    symbols = sympy.symbols(ring.names) if ring.names else ()
    table = {s.name: s for s in symbols}
    try:
        expr = parse_expr(
            text.strip() or "0", local_dict=table, transformations=_TRANSFORMATIONS
        )
    except (SyntaxError, TypeError, sympy.SympifyError, TokenError) as e:
        raise PolynomialSyntaxError(f"cannot parse polynomial '{text}': {e}") from e
    unknown = {s.name for s in expr.free_symbols} - set(table)
    if unknown:
        raise PolynomialSyntaxError(
            f"unknown variables {sorted(unknown)} in '{text}' for ring {ring.names}"
        )
    try:
        poly = sympy.Poly(expr, *symbols, modulus=ring.prime)
    except (PolynomialError, CoercionFailed) as e:
        raise PolynomialSyntaxError(f"'{text}' is not a polynomial: {e}") from e
    return Polynomial(ring, {tuple(m): int(c) for m, c in poly.terms()})


def ring_from_names(names: Iterable[str], prime: int = DEFAULT_PRIME) -> RingContext:
    """Smallest ring containing the given variable names."""
    n, N = 0, 0
    for name in names:
        if name.startswith("x"):
            n = max(n, int(name[1:]))
        elif name.startswith("y"):
            N = max(N, int(name[1:]))
    return RingContext(n, N, prime)

