"""Twisted graded free modules, their elements, degree-0 maps and complexes.

A free module is the list of its generator degrees: twists (0, 1, 1) stands
for S ⊕ S(-1)^2. Matrices are stored column-sparse, one module element of the
target per source generator.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Literal, Mapping, Optional, Sequence

from sympy.polys.monomials import monomial_mul
from sympy.polys.orderings import grevlex

from latereg.arith import (
    HomogeneityError,
    Monomial,
    Polynomial,
    RingContext,
    RingMismatchError,
    format_polynomial,
    parse_polynomial,
)

Term = tuple[int, Monomial]


class GradedMapError(ValueError):
    """Raised when a map or element violates its grading."""


@dataclass(frozen=True)
class GradedFreeModule:
    """⊕ S(-twists[i]); generator e_i sits in degree twists[i]."""

    ring: RingContext
    twists: tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.twists)

    def dual(self) -> GradedFreeModule:
        return GradedFreeModule(self.ring, tuple(-t for t in self.twists))

    def twisted(self, s: int) -> GradedFreeModule:
        return GradedFreeModule(self.ring, tuple(t + s for t in self.twists))

    def __add__(self, other: GradedFreeModule) -> GradedFreeModule:
        if self.ring != other.ring:
            raise RingMismatchError("direct sum across rings")
        return GradedFreeModule(self.ring, self.twists + other.twists)

    def __repr__(self) -> str:
        return f"GradedFreeModule(rank={self.rank}, twists={list(self.twists)})"


class ModuleElement:
    """A homogeneous element of a graded free module.

    Terms are kept as a (coordinate, monomial) -> coefficient mapping and
    listed in position-over-term order (smaller coordinate first, degrevlex
    within a coordinate).
    """

    __slots__ = ("module", "_terms", "degree")

    module: GradedFreeModule
    degree: Optional[int]

    def __init__(
        self, module: GradedFreeModule, terms: Mapping[Term, int] | None = None
    ) -> None:
        p = module.ring.prime
        clean: dict[Term, int] = {}
        degrees = set()
        for (i, m), c in (terms or {}).items():
            c %= p
            if not c:
                continue
            if not 0 <= i < module.rank:
                raise GradedMapError(f"coordinate {i} outside rank {module.rank}")
            module.ring.check(m)
            clean[(i, m)] = c
            degrees.add(sum(m) + module.twists[i])
        if len(degrees) > 1:
            raise HomogeneityError(f"module element mixes degrees {sorted(degrees)}")
        self.module = module
        self._terms = clean
        self.degree = degrees.pop() if degrees else None

    @classmethod
    def unchecked(
        cls, module: GradedFreeModule, terms: dict[Term, int], degree: Optional[int]
    ) -> ModuleElement:
        # Engine fast path: terms already reduced, nonzero and homogeneous.
        obj = cls.__new__(cls)
        obj.module = module
        obj._terms = terms
        obj.degree = degree if terms else None
        return obj

    @classmethod
    def basis(cls, module: GradedFreeModule, i: int) -> ModuleElement:
        return cls(module, {(i, module.ring.one): 1})

    @classmethod
    def from_entries(
        cls, module: GradedFreeModule, entries: Mapping[int, Polynomial]
    ) -> ModuleElement:
        terms: dict[Term, int] = {}
        for i, f in entries.items():
            for m, c in f.terms:
                terms[(i, m)] = c
        return cls(module, terms)

    @property
    def term_map(self) -> Mapping[Term, int]:
        """The underlying term mapping; callers must not mutate it."""
        return self._terms

    def as_dict(self) -> dict[Term, int]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def terms(self) -> list[tuple[int, Monomial, int]]:
        """Terms in position-over-term order."""
        keyed = sorted(self._terms.items(), key=lambda t: (-t[0][0], grevlex(t[0][1])))
        return [(i, m, c) for (i, m), c in reversed(keyed)]

    def entry(self, i: int) -> Polynomial:
        return Polynomial(
            self.module.ring, {m: c for (j, m), c in self._terms.items() if j == i}
        )

    def entries(self) -> dict[int, Polynomial]:
        coords = sorted({i for i, _ in self._terms})
        return {i: self.entry(i) for i in coords}

    def _check(self, other: ModuleElement) -> None:
        if self.module != other.module:
            raise GradedMapError("elements of different free modules")

    def __add__(self, other: ModuleElement) -> ModuleElement:
        self._check(other)
        acc = dict(self._terms)
        for t, c in other._terms.items():
            acc[t] = acc.get(t, 0) + c
        return ModuleElement(self.module, acc)

    def __neg__(self) -> ModuleElement:
        return self.scale(-1)

    def __sub__(self, other: ModuleElement) -> ModuleElement:
        return self + (-other)

    def scale(self, c: int) -> ModuleElement:
        return ModuleElement(self.module, {t: a * c for t, a in self._terms.items()})

    def mul_monomial(self, m: Monomial, c: int = 1) -> ModuleElement:
        return ModuleElement(
            self.module,
            {(i, monomial_mul(t, m)): a * c for (i, t), a in self._terms.items()},
        )

    def mul_polynomial(self, f: Polynomial) -> ModuleElement:
        acc: dict[Term, int] = {}
        for m, c in f.terms:
            for (i, t), a in self._terms.items():
                key = (i, monomial_mul(t, m))
                acc[key] = acc.get(key, 0) + a * c
        return ModuleElement(self.module, acc)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ModuleElement):
            return NotImplemented
        return self.module == other.module and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self.module, frozenset(self._terms.items())))

    def __repr__(self) -> str:
        body = ", ".join(
            f"{i}: {format_polynomial(f)}" for i, f in self.entries().items()
        )
        return f"ModuleElement({{{body}}})"


class GradedMatrix:
    """A degree-0 map source -> target given by its columns."""

    __slots__ = ("source", "target", "columns")

    source: GradedFreeModule
    target: GradedFreeModule
    columns: tuple[ModuleElement, ...]

    def __init__(
        self,
        source: GradedFreeModule,
        target: GradedFreeModule,
        columns: Sequence[ModuleElement],
    ) -> None:
        """Build a matrix, validating ranks and the degree of every column.

        Raises:
            GradedMapError: If a column is not in the target or is not
                homogeneous of degree source.twists[j].
        """
        if source.ring != target.ring:
            raise RingMismatchError("matrix source and target live in different rings")
        if len(columns) != source.rank:
            raise GradedMapError(
                f"{len(columns)} columns given for a source of rank {source.rank}"
            )
        for j, col in enumerate(columns):
            if col.module != target:
                raise GradedMapError(f"column {j} does not lie in the target module")
            if col.degree is not None and col.degree != source.twists[j]:
                raise GradedMapError(
                    f"column {j} has degree {col.degree}, expected {source.twists[j]}"
                )
        self.source = source
        self.target = target
        self.columns = tuple(columns)

    @property
    def ring(self) -> RingContext:
        return self.source.ring

    @property
    def shape(self) -> tuple[int, int]:
        return self.target.rank, self.source.rank

    @classmethod
    def zero(cls, source: GradedFreeModule, target: GradedFreeModule) -> GradedMatrix:
        return cls(source, target, [ModuleElement(target) for _ in source.twists])

    @classmethod
    def identity(cls, module: GradedFreeModule) -> GradedMatrix:
        return cls(
            module, module, [ModuleElement.basis(module, i) for i in range(module.rank)]
        )

    @classmethod
    def row(cls, ring: RingContext, entries: Sequence[Polynomial], twist: int = 0) -> GradedMatrix:
        """The 1 x s matrix S(-deg f_1) ⊕ ... -> S(-twist) of the given forms."""
        target = GradedFreeModule(ring, (twist,))
        cols = []
        degrees = []
        for f in entries:
            if f.is_zero():
                raise GradedMapError("zero entries have no degree in a row matrix")
            cols.append(ModuleElement.from_entries(target, {0: f}))
            degrees.append((f.degree or 0) + twist)
        return cls(GradedFreeModule(ring, tuple(degrees)), target, cols)

    def entry(self, i: int, j: int) -> Polynomial:
        return self.columns[j].entry(i)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.columns)

    def transpose(self) -> GradedMatrix:
        """The dual map target* -> source*."""
        new_source = self.target.dual()
        new_target = self.source.dual()
        buckets: list[dict[Term, int]] = [{} for _ in range(self.target.rank)]
        for j, col in enumerate(self.columns):
            for (i, m), c in col._terms.items():
                buckets[i][(j, m)] = c
        cols = [ModuleElement(new_target, b) for b in buckets]
        return GradedMatrix(new_source, new_target, cols)

    def compose(self, other: GradedMatrix) -> GradedMatrix:
        """self ∘ other.

        Raises:
            GradedMapError: If other.target differs from self.source.
        """
        if other.target != self.source:
            raise GradedMapError("matrices are not composable")
        return GradedMatrix(
            other.source, self.target, [apply(self, col) for col in other.columns]
        )

    def twisted(self, s: int) -> GradedMatrix:
        source = self.source.twisted(s)
        target = self.target.twisted(s)
        cols = [ModuleElement(target, c._terms) for c in self.columns]
        return GradedMatrix(source, target, cols)

    def lift_to(self, ring: RingContext) -> GradedMatrix:
        """View a matrix over the x-subring as a matrix over ``ring``."""
        source = GradedFreeModule(ring, self.source.twists)
        target = GradedFreeModule(ring, self.target.twists)
        cols = [
            ModuleElement(
                target, {(i, ring.lift_monomial(m)): c for (i, m), c in col._terms.items()}
            )
            for col in self.columns
        ]
        return GradedMatrix(source, target, cols)

    @classmethod
    def hstack(cls, blocks: Sequence[GradedMatrix]) -> GradedMatrix:
        """Concatenate the columns of matrices that share a target."""
        if not blocks:
            raise GradedMapError("hstack needs at least one block")
        target = blocks[0].target
        source = blocks[0].source
        cols = list(blocks[0].columns)
        for b in blocks[1:]:
            if b.target != target:
                raise GradedMapError("hstack blocks have different targets")
            source = source + b.source
            cols.extend(b.columns)
        return cls(source, target, cols)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GradedMatrix):
            return NotImplemented
        return (
            self.source == other.source
            and self.target == other.target
            and self.columns == other.columns
        )

    def __repr__(self) -> str:
        return f"GradedMatrix({list(self.target.twists)} <- {list(self.source.twists)})"


def apply(m: GradedMatrix, v: ModuleElement) -> ModuleElement:
    """Image of v under m.

    Raises:
        GradedMapError: If v does not lie in the source of m.
    """
    if v.module != m.source:
        raise GradedMapError("vector does not lie in the source of the matrix")
    acc: dict[Term, int] = {}
    for (j, t), c in v._terms.items():
        for (i, u), a in m.columns[j]._terms.items():
            key = (i, monomial_mul(u, t))
            acc[key] = acc.get(key, 0) + a * c
    return ModuleElement(m.target, acc)


@dataclass(frozen=True)
class ComplexCheck:
    """Outcome of ``compose_is_zero``; position is 1-based (d_i ∘ d_{i+1})."""

    ok: bool
    position: Optional[int] = None
    reason: Optional[Literal["noncomposable", "nonzero"]] = None

    def __bool__(self) -> bool:
        return self.ok


class Complex:
    """A finite chain F_0 <- F_1 <- ... of graded free modules.

    ``maps[i]`` is d_{i+1}: F_{i+1} -> F_i. A complex without maps still knows
    its F_0 through ``base``.
    """

    __slots__ = ("maps", "base")

    maps: tuple[GradedMatrix, ...]
    base: GradedFreeModule

    def __init__(
        self, maps: Sequence[GradedMatrix], base: Optional[GradedFreeModule] = None
    ) -> None:
        if not maps and base is None:
            raise GradedMapError("an empty complex needs its base module")
        self.maps = tuple(maps)
        self.base = maps[0].target if maps else base  # type: ignore[assignment]

    @property
    def ring(self) -> RingContext:
        return self.base.ring

    @property
    def length(self) -> int:
        return len(self.maps)

    def module(self, i: int) -> GradedFreeModule:
        if i == 0:
            return self.base
        if 1 <= i <= len(self.maps):
            return self.maps[i - 1].source
        return GradedFreeModule(self.ring, ())

    @property
    def modules(self) -> list[GradedFreeModule]:
        return [self.module(i) for i in range(len(self.maps) + 1)]

    def ranks(self) -> list[int]:
        return [m.rank for m in self.modules]

    def __iter__(self) -> Iterator[GradedMatrix]:
        return iter(self.maps)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Complex):
            return NotImplemented
        return self.base == other.base and self.maps == other.maps

    def __repr__(self) -> str:
        return f"Complex(ranks={self.ranks()})"


def compose_is_zero(c: Complex) -> ComplexCheck:
    """Check d_i ∘ d_{i+1} = 0 for every adjacent pair of differentials."""
    for i in range(len(c.maps) - 1):
        lower, upper = c.maps[i], c.maps[i + 1]
        if upper.target != lower.source:
            return ComplexCheck(False, i + 1, "noncomposable")
        for col in upper.columns:
            if not apply(lower, col).is_zero():
                return ComplexCheck(False, i + 1, "nonzero")
    return ComplexCheck(True)


def dualize(c: Complex) -> Complex:
    """Hom(-, S) of a complex, reindexed so the old last module is F_0."""
    if not c.maps:
        return Complex([], base=c.base.dual())
    return Complex([m.transpose() for m in reversed(c.maps)])


def twist_complex(c: Complex, s: int) -> Complex:
    """Add s to every twist; the matrix entries are unchanged."""
    if not c.maps:
        return Complex([], base=c.base.twisted(s))
    return Complex([m.twisted(s) for m in c.maps])


# Text format --------------------------------------------------------------

_HEADER = re.compile(r"^matrix\s*(?P<target>[-\d\s]*)<-(?P<source>[-\d\s]*)$")
_RING = re.compile(r"^ring\s+n\s*=\s*(?P<n>\d+)(\s+N\s*=\s*(?P<N>\d+))?\s*$")


def format_matrix(m: GradedMatrix, with_ring: bool = False) -> str:
    """Render a matrix: a header line, then one line per column."""
    lines = []
    if with_ring:
        lines.append(f"ring n={m.ring.n} N={m.ring.N}")
    target = " ".join(str(t) for t in m.target.twists)
    source = " ".join(str(t) for t in m.source.twists)
    lines.append(f"matrix {target} <- {source}".rstrip())
    for col in m.columns:
        if col.is_zero():
            lines.append("0")
        else:
            lines.append(
                "; ".join(f"{i}: {format_polynomial(f)}" for i, f in col.entries().items())
            )
    return "\n".join(lines) + "\n"


def infer_ring_shape(text: str) -> tuple[int, int]:
    """(n, N) from an optional ring line or the highest variable indices used."""
    for line in text.splitlines():
        match = _RING.match(line.strip())
        if match:
            return int(match["n"]), int(match["N"] or 0)
    xs = [int(i) for i in re.findall(r"\bx(\d+)", text)]
    ys = [int(i) for i in re.findall(r"\by(\d+)", text)]
    return (max(xs) if xs else 0), (max(ys) if ys else 0)


def parse_matrix(text: str, ring: RingContext) -> GradedMatrix:
    """Parse the matrix text format.

    Raises:
        GradedMapError: For a malformed header or column count mismatch.
    """
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#") and not _RING.match(ln)]
    if not lines:
        raise GradedMapError("empty matrix text")
    header = _HEADER.match(lines[0])
    if not header:
        raise GradedMapError(f"bad matrix header '{lines[0]}'")
    target = GradedFreeModule(ring, tuple(int(t) for t in header["target"].split()))
    source = GradedFreeModule(ring, tuple(int(t) for t in header["source"].split()))
    body = lines[1:]
    if len(body) != source.rank:
        raise GradedMapError(f"expected {source.rank} column lines, found {len(body)}")
    columns = []
    for line in body:
        entries: dict[int, Polynomial] = {}
        if line != "0":
            for chunk in line.split(";"):
                coord, _, poly = chunk.partition(":")
                if not _:
                    raise GradedMapError(f"bad column entry '{chunk.strip()}'")
                entries[int(coord)] = parse_polynomial(poly, ring)
        columns.append(ModuleElement.from_entries(target, entries))
    return GradedMatrix(source, target, columns)
