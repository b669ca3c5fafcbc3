"""Minimal graded free resolutions, Betti tables and closed-form oracles."""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Iterator, Mapping, Optional, Sequence

from pydantic import BaseModel, PositiveInt
from sympy.polys.monomials import monomial_div, monomial_divides, monomial_lcm, monomial_mul

from latereg.arith import Monomial, Polynomial, RingContext, big_binomial
from latereg.freemod import (
    Complex,
    GradedFreeModule,
    GradedMatrix,
    ModuleElement,
    Term,
)
from latereg.groebner import (
    BudgetExceeded,
    Strategy,
    buchberger,
    check_deadline,
    schreyer_basis,
)

logger = logging.getLogger(__name__)

__all__ = [
    "BettiTable",
    "BudgetExceeded",
    "CompleteIntersection",
    "DegreeSequence",
    "NonMinimalError",
    "ResolutionError",
    "betti_numerator",
    "betti_table",
    "complete_intersection",
    "free_resolution",
    "hilbert_check",
    "hilbert_numerator",
    "ideal_table",
    "koszul_complex",
    "max_degree_sequence",
    "min_degree_sequence",
    "minimize",
    "power_ideal_betti",
    "regularity",
    "resolve",
    "tensor_complexes",
]

DegreeSequence = tuple[int, ...]


class NonMinimalError(ValueError):
    """Raised when a Betti table is requested for a non-minimal complex."""


class ResolutionError(RuntimeError):
    """Raised when a resolution runs past its maximal length."""


class BettiEntry(BaseModel):
    i: int
    j: int
    beta: PositiveInt


class BettiTableModel(BaseModel):
    """JSON form of a Betti table."""

    entries: list[BettiEntry]
    pd: Optional[int] = None
    reg: Optional[int] = None


class BettiTable:
    """Graded Betti numbers β_{i,j}; absent entries are zero."""

    __slots__ = ("_entries",)

    def __init__(self, entries: Mapping[tuple[int, int], int] | None = None) -> None:
        clean = {}
        for (i, j), beta in (entries or {}).items():
            if beta < 0:
                raise ValueError(f"negative Betti number at ({i}, {j})")
            if beta:
                clean[(i, j)] = beta
        self._entries = dict(sorted(clean.items()))

    @property
    def entries(self) -> dict[tuple[int, int], int]:
        return dict(self._entries)

    def __getitem__(self, key: tuple[int, int]) -> int:
        return self._entries.get(key, 0)

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(self._entries)

    def __bool__(self) -> bool:
        return bool(self._entries)

    def _require(self) -> None:
        if not self._entries:
            raise ValueError("empty Betti table")

    @property
    def pd(self) -> int:
        self._require()
        return max(i for i, _ in self._entries)

    def column(self, i: int) -> dict[int, int]:
        return {j: b for (k, j), b in self._entries.items() if k == i}

    def totals(self) -> list[int]:
        """Total Betti numbers β_0, ..., β_pd."""
        if not self._entries:
            return []
        return [sum(self.column(i).values()) for i in range(self.pd + 1)]

    def regularity(self) -> int:
        self._require()
        return max(j - i for i, j in self._entries)

    def max_degree_sequence(self) -> DegreeSequence:
        self._require()
        return tuple(max(self.column(i)) for i in range(self.pd + 1) if self.column(i))

    def min_degree_sequence(self) -> DegreeSequence:
        self._require()
        return tuple(min(self.column(i)) for i in range(self.pd + 1) if self.column(i))

    def is_pure(self) -> bool:
        return bool(self._entries) and all(
            len(self.column(i)) <= 1 for i in range(self.pd + 1)
        )

    def shifted(self, s: int) -> BettiTable:
        """Table of the twist M(-s): every degree j becomes j + s."""
        return BettiTable({(i, j + s): b for (i, j), b in self._entries.items()})

    def dual(self) -> BettiTable:
        """Table of the dual complex, β'_{i,j} = β_{pd-i, -j}."""
        if not self._entries:
            return BettiTable()
        r = self.pd
        return BettiTable({(r - i, -j): b for (i, j), b in self._entries.items()})

    def __add__(self, other: BettiTable) -> BettiTable:
        acc = self.entries
        for key, b in other._entries.items():
            acc[key] = acc.get(key, 0) + b
        return BettiTable(acc)

    def difference(self, other: BettiTable) -> dict[tuple[int, int], tuple[int, int]]:
        """Entries where the tables disagree, as (self, other) pairs."""
        keys = sorted(set(self._entries) | set(other._entries))
        return {k: (self[k], other[k]) for k in keys if self[k] != other[k]}

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BettiTable):
            return NotImplemented
        return self._entries == other._entries

    def __hash__(self) -> int:
        return hash(frozenset(self._entries.items()))

    def __repr__(self) -> str:
        return f"BettiTable({self._entries})"

    def to_model(self) -> BettiTableModel:
        return BettiTableModel(
            entries=[BettiEntry(i=i, j=j, beta=b) for (i, j), b in self._entries.items()],
            pd=self.pd if self else None,
            reg=self.regularity() if self else None,
        )

    def to_json(self, indent: Optional[int] = None) -> str:
        return self.to_model().model_dump_json(indent=indent)

    @classmethod
    def from_model(cls, model: BettiTableModel) -> BettiTable:
        return cls({(e.i, e.j): e.beta for e in model.entries})

    @classmethod
    def from_json(cls, text: str) -> BettiTable:
        return cls.from_model(BettiTableModel.model_validate_json(text))


def regularity(b: BettiTable) -> int:
    """max(j - i) over the nonzero entries.

    Raises:
        ValueError: For an empty table.
    """
    return b.regularity()


def max_degree_sequence(b: BettiTable) -> DegreeSequence:
    return b.max_degree_sequence()


def min_degree_sequence(b: BettiTable) -> DegreeSequence:
    return b.min_degree_sequence()


def ideal_table(quotient: BettiTable) -> BettiTable:
    """Table of J from the table of S/J: drop column 0 and shift down by one."""
    return BettiTable({(i - 1, j): b for (i, j), b in quotient.entries.items() if i > 0})


# Resolutions -------------------------------------------------------------


def free_resolution(
    presentation: GradedMatrix,
    max_length: Optional[int] = None,
    strategy: Strategy = "degree",
    deadline: Optional[float] = None,
) -> Complex:
    """Schreyer resolution of coker(presentation); exact but not minimal.

    The first differential is the Gröbner basis of the image, every later one
    the Schreyer syzygies of the one before.

    Raises:
        ResolutionError: If more than ``max_length`` differentials are needed.
        BudgetExceeded: If ``deadline`` passes.
    """
    base = presentation.target
    if max_length is None:
        max_length = base.ring.nvars
    gb = buchberger(
        presentation.columns, module=base, strategy=strategy, deadline=deadline
    )
    if not len(gb):
        return Complex([], base=base)
    maps = [gb.matrix()]
    current = gb
    while True:
        check_deadline(deadline)
        current = schreyer_basis(current, deadline)
        if not len(current):
            break
        if len(maps) >= max_length:
            raise ResolutionError(
                f"resolution does not stop after {max_length} steps"
            )
        maps.append(current.matrix())
    logger.info("Schreyer resolution ranks %s", [base.rank] + [m.source.rank for m in maps])
    return Complex(maps)


def minimize(c: Complex) -> Complex:
    """Split off every trivial summand S(-a) -> S(-a) of a resolution.

    Differentials are scanned from d_1 upward; in each, the first unit entry
    in column-major order is the pivot. Clearing its row by column operations
    leaves the Schur complement on the remaining rows and columns, and the
    matching row of d_{i+1} and column of d_{i-1} simply drop out.
    """
    ring = c.ring
    p = ring.prime
    one = ring.one
    length = c.length
    twists = [list(c.module(i).twists) for i in range(length + 1)]
    alive = [[True] * len(t) for t in twists]
    cols: list[list[dict[Term, int]]] = [[]] + [
        [dict(col.term_map) for col in d.columns] for d in c.maps
    ]

    def find_unit(i: int) -> Optional[tuple[int, int, int]]:
        for j, col in enumerate(cols[i]):
            if not alive[i][j]:
                continue
            rows = [r for (r, m) in col if m == one and alive[i - 1][r]]
            if rows:
                r = min(rows)
                return j, r, col[(r, one)]
        return None

    for i in range(1, length + 1):
        removed = 0
        while (pivot := find_unit(i)) is not None:
            j, r, u = pivot
            inv = pow(u, -1, p)
            pivot_col = cols[i][j]
            for jj, col in enumerate(cols[i]):
                if jj == j or not alive[i][jj]:
                    continue
                f = [(m, a) for (row, m), a in col.items() if row == r]
                for fm, fc in f:
                    scale = fc * inv % p
                    for (row2, m2), c2 in pivot_col.items():
                        key = (row2, monomial_mul(m2, fm))
                        val = (col.get(key, 0) - scale * c2) % p
                        if val:
                            col[key] = val
                        else:
                            col.pop(key, None)
            alive[i][j] = False
            alive[i - 1][r] = False
            cols[i][j] = {}
            if i < length:
                for k, col in enumerate(cols[i + 1]):
                    cols[i + 1][k] = {t: a for t, a in col.items() if t[0] != j}
            if i > 1:
                cols[i - 1][r] = {}
            removed += 1
        if removed:
            logger.info("minimize: %d pivots removed at d_%d", removed, i)

    renumber = [
        {old: new for new, old in enumerate(k for k, ok in enumerate(flags) if ok)}
        for flags in alive
    ]
    modules = [
        GradedFreeModule(ring, tuple(t for t, ok in zip(twists[i], alive[i]) if ok))
        for i in range(length + 1)
    ]
    maps = []
    for i in range(1, length + 1):
        source, target = modules[i], modules[i - 1]
        columns = []
        for j, col in enumerate(cols[i]):
            if not alive[i][j]:
                continue
            terms = {
                (renumber[i - 1][row], m): a
                for (row, m), a in col.items()
                if alive[i - 1][row]
            }
            columns.append(ModuleElement.unchecked(target, terms, source.twists[len(columns)]))
        maps.append(GradedMatrix(source, target, columns))
    while maps and maps[-1].source.rank == 0:
        maps.pop()
    if not maps:
        return Complex([], base=modules[0])
    return Complex(maps)


def resolve(
    presentation: GradedMatrix,
    max_length: Optional[int] = None,
    strategy: Strategy = "degree",
    deadline: Optional[float] = None,
) -> Complex:
    """Minimal free resolution of coker(presentation)."""
    return minimize(free_resolution(presentation, max_length, strategy, deadline))


def betti_table(c: Complex) -> BettiTable:
    """β_{i,j} = number of generators of degree j in F_i of a minimal complex.

    Raises:
        NonMinimalError: If some differential has a nonzero constant entry.
    """
    one = c.ring.one
    for i, d in enumerate(c.maps, start=1):
        for j, col in enumerate(d.columns):
            if any(m == one for (_, m) in col.term_map):
                raise NonMinimalError(f"unit entry in column {j} of d_{i}; minimize first")
    entries: dict[tuple[int, int], int] = {}
    for i, module in enumerate(c.modules):
        for t in module.twists:
            entries[(i, t)] = entries.get((i, t), 0) + 1
    return BettiTable(entries)


# Koszul and tensor complexes ----------------------------------------------


def koszul_complex(
    elems: Sequence[Polynomial], ring: Optional[RingContext] = None
) -> Complex:
    """Koszul complex of homogeneous forms f_1..f_q.

    F_i has basis e_T for the i-subsets T in lex order, in degree Σ deg f_t,
    and d(e_T) = Σ_s (-1)^s f_{t_s} e_{T minus t_s}.
    """
    if ring is None:
        if not elems:
            raise ValueError("ring must be given for an empty Koszul complex")
        ring = elems[0].ring
    q = len(elems)
    degs = [f.degree or 0 for f in elems]
    subsets = [list(itertools.combinations(range(q), i)) for i in range(q + 1)]
    modules = [
        GradedFreeModule(ring, tuple(sum(degs[t] for t in T) for T in level))
        for level in subsets
    ]
    if q == 0:
        return Complex([], base=modules[0])
    maps = []
    for i in range(1, q + 1):
        index = {T: k for k, T in enumerate(subsets[i - 1])}
        target = modules[i - 1]
        columns = []
        for T in subsets[i]:
            terms: dict[Term, int] = {}
            for s, t in enumerate(T):
                row = index[T[:s] + T[s + 1:]]
                sign = -1 if s % 2 else 1
                for m, a in elems[t].terms:
                    terms[(row, m)] = terms.get((row, m), 0) + sign * a
            columns.append(ModuleElement(target, terms))
        maps.append(GradedMatrix(modules[i], target, columns))
    return Complex(maps)


def tensor_complexes(a: Complex, b: Complex) -> Complex:
    """Total complex of a ⊗ b.

    Position i is ⊕_{p+q=i} A_p ⊗ B_q, ordered by p, with basis e_k ⊗ f_l
    ordered by (k, l); d(x ⊗ y) = dx ⊗ y + (-1)^p x ⊗ dy.
    """
    if a.ring != b.ring:
        raise ValueError("tensor product across rings")
    ring = a.ring
    la, lb = a.length, b.length

    def blocks(i: int) -> list[tuple[int, int, int]]:
        """(p, q, offset) for each summand of position i."""
        out = []
        offset = 0
        for pa in range(max(0, i - lb), min(i, la) + 1):
            qb = i - pa
            out.append((pa, qb, offset))
            offset += a.module(pa).rank * b.module(qb).rank
        return out

    modules = []
    for i in range(la + lb + 1):
        twists: list[int] = []
        for pa, qb, _ in blocks(i):
            for ta in a.module(pa).twists:
                twists.extend(ta + tb for tb in b.module(qb).twists)
        modules.append(GradedFreeModule(ring, tuple(twists)))
    if la + lb == 0:
        return Complex([], base=modules[0])

    maps = []
    for i in range(1, la + lb + 1):
        target = modules[i - 1]
        lower = {(pa, qb): off for pa, qb, off in blocks(i - 1)}
        columns = []
        for pa, qb, _ in blocks(i):
            rb = b.module(qb).rank
            for k in range(a.module(pa).rank):
                for w in range(rb):
                    terms: dict[Term, int] = {}
                    if pa >= 1:
                        off = lower[(pa - 1, qb)]
                        for (r, m), c in a.maps[pa - 1].columns[k].term_map.items():
                            key = (off + r * rb + w, m)
                            terms[key] = terms.get(key, 0) + c
                    if qb >= 1:
                        off = lower[(pa, qb - 1)]
                        rb_low = b.module(qb - 1).rank
                        sign = -1 if pa % 2 else 1
                        for (s, m), c in b.maps[qb - 1].columns[w].term_map.items():
                            key = (off + k * rb_low + s, m)
                            terms[key] = terms.get(key, 0) + sign * c
                    columns.append(ModuleElement(target, terms))
        maps.append(GradedMatrix(modules[i], target, columns))
    while maps and maps[-1].source.rank == 0:
        maps.pop()
    if not maps:
        return Complex([], base=modules[0])
    return Complex(maps)


# Oracles -------------------------------------------------------------------


def power_ideal_betti(q: int, a: int) -> BettiTable:
    """Betti table of (y_1..y_q)^a as a module: linear, β_{i, a+i}.

    β_i = Σ_{m=i+1}^{q} binom(a+m-2, a-1) * binom(m-1, i).
    """
    if q < 1 or a < 1:
        raise ValueError(f"power_ideal_betti needs q, a >= 1, got ({q}, {a})")
    entries = {}
    for i in range(q):
        beta = sum(
            big_binomial(a + m - 2, a - 1) * big_binomial(m - 1, i)
            for m in range(i + 1, q + 1)
        )
        entries[(i, a + i)] = beta
    return BettiTable(entries)


def _minimal_generators(gens: Sequence[Monomial]) -> list[Monomial]:
    out: list[Monomial] = []
    for g in sorted(set(gens), key=lambda m: (sum(m), m)):
        if not any(monomial_divides(h, g) for h in out):
            out.append(g)
    return out


def _kpoly(gens: tuple[Monomial, ...], memo: dict) -> dict[int, int]:
    """K-polynomial of S/(gens) by recursive inclusion-exclusion."""
    if gens in memo:
        return memo[gens]
    if not gens:
        result = {0: 1}
    elif any(sum(g) == 0 for g in gens):
        result = {}
    else:
        *rest, last = gens
        head = _kpoly(tuple(_minimal_generators(rest)), memo)
        colon = _minimal_generators([monomial_div(monomial_lcm(g, last), last) for g in rest])
        inner = _kpoly(tuple(colon), memo)
        result = dict(head)
        shift = sum(last)
        for deg, c in inner.items():
            result[deg + shift] = result.get(deg + shift, 0) - c
        result = {d: c for d, c in result.items() if c}
    memo[gens] = result
    return result


def hilbert_numerator(presentation: GradedMatrix, strategy: Strategy = "degree") -> dict[int, int]:
    """HS(coker) * (1 - t)^nvars from the leading terms of the image."""
    target = presentation.target
    gb = buchberger(presentation.columns, module=target, strategy=strategy)
    per_coord: dict[int, list[Monomial]] = {c: [] for c in range(target.rank)}
    for c, m in gb.leads:
        per_coord[c].append(m)
    memo: dict = {}
    total: dict[int, int] = {}
    for c, gens in per_coord.items():
        k = _kpoly(tuple(_minimal_generators(gens)), memo)
        for deg, a in k.items():
            key = deg + target.twists[c]
            total[key] = total.get(key, 0) + a
    return {d: a for d, a in sorted(total.items()) if a}


def betti_numerator(b: BettiTable) -> dict[int, int]:
    """Σ_i (-1)^i Σ_j β_{i,j} t^j."""
    total: dict[int, int] = {}
    for (i, j), beta in b.entries.items():
        total[j] = total.get(j, 0) + (-1) ** i * beta
    return {d: a for d, a in sorted(total.items()) if a}


def hilbert_check(presentation: GradedMatrix, b: BettiTable) -> bool:
    """Compare the alternating Betti sum with the Hilbert numerator of coker."""
    ok = hilbert_numerator(presentation) == betti_numerator(b)
    if not ok:
        logger.warning("Hilbert numerators differ for table %s", b)
    return ok


@dataclass(frozen=True)
class CompleteIntersection:
    """Koszul prediction and engine result for S/(f_1..f_c)."""

    koszul: BettiTable
    computed: BettiTable

    @property
    def agree(self) -> bool:
        return self.koszul == self.computed

    @property
    def ideal_regularity(self) -> int:
        return self.computed.regularity() + 1


def complete_intersection(
    forms: Sequence[Polynomial], strategy: Strategy = "degree"
) -> CompleteIntersection:
    """Resolve S/(forms) both as a Koszul complex and with the engine."""
    if not forms:
        raise ValueError("complete_intersection needs at least one form")
    ring = forms[0].ring
    koszul = betti_table(koszul_complex(forms, ring))
    computed = betti_table(resolve(GradedMatrix.row(ring, forms), strategy=strategy))
    return CompleteIntersection(koszul=koszul, computed=computed)
