"""Gröbner bases of submodules of graded free modules and Schreyer syzygies.

Module orders are encoded as frames: generator e_j is sent to the coordinate
``base[j]`` of the first free module, multiplied by ``shift[j]``, with the
chain of indices it passed through kept in ``tail[j]``. Position-over-term is
the trivial frame; every Schreyer order is the frame of the previous one
composed with the leading terms of a basis.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Literal, Optional, Sequence

from sympy.polys.monomials import monomial_div, monomial_divides, monomial_lcm, monomial_mul
from sympy.polys.orderings import grevlex

from latereg.arith import Monomial, Polynomial, RingContext
from latereg.freemod import GradedFreeModule, GradedMatrix, ModuleElement, Term

logger = logging.getLogger(__name__)

Strategy = Literal["degree", "fifo"]
Vector = dict[Term, int]


class GroebnerError(RuntimeError):
    """Raised when a basis is used outside its module or is not a Gröbner basis."""


class BudgetExceeded(RuntimeError):
    """Raised when a computation passes its cooperative deadline."""


def check_deadline(deadline: Optional[float]) -> None:
    if deadline is not None and time.monotonic() > deadline:
        raise BudgetExceeded("time budget exhausted")


@dataclass(frozen=True)
class ModuleOrder:
    """A monomial order on the terms m*e_j of a free module."""

    base: tuple[int, ...]
    shift: tuple[Monomial, ...]
    tail: tuple[tuple[int, ...], ...]
    _keys: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    @classmethod
    def position_over_term(cls, module: GradedFreeModule) -> ModuleOrder:
        one = module.ring.one
        return cls(
            base=tuple(range(module.rank)),
            shift=(one,) * module.rank,
            tail=((),) * module.rank,
        )

    @property
    def is_schreyer(self) -> bool:
        return any(self.tail)

    def key(self, term: Term) -> tuple:
        k = self._keys.get(term)
        if k is None:
            j, m = term
            k = (-self.base[j], grevlex(monomial_mul(m, self.shift[j])), self.tail[j])
            self._keys[term] = k
        return k

    def leading(self, v: Vector) -> Term:
        return max(v, key=self.key)

    def induced(self, leads: Sequence[Term]) -> ModuleOrder:
        """The Schreyer order of a basis whose leading terms are ``leads``.

        m*e_j is compared through m*lead_j in the old order; ties go to the
        smaller index.
        """
        return ModuleOrder(
            base=tuple(self.base[c] for c, _ in leads),
            shift=tuple(monomial_mul(m, self.shift[c]) for c, m in leads),
            tail=tuple(self.tail[c] + (-j,) for j, (c, _) in enumerate(leads)),
        )


@dataclass
class GroebnerBasis:
    """A Gröbner basis of a submodule of ``module`` under ``order``.

    Elements are monic and arranged by coordinate of the leading term, and
    within a coordinate by descending lex order of the leading monomial.
    ``provenance[i]`` is the input generator an element was reduced from, or
    None when it came from an S-pair.
    """

    module: GradedFreeModule
    order: ModuleOrder
    elements: list[ModuleElement]
    leads: list[Term]
    provenance: list[Optional[int]]

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[ModuleElement]:
        return iter(self.elements)

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(e.degree for e in self.elements)  # type: ignore[misc]

    def lead_terms(self) -> set[Term]:
        return set(self.leads)

    def matrix(self) -> GradedMatrix:
        """The map ⊕ S(-deg g_i) -> module sending e_i to g_i."""
        source = GradedFreeModule(self.module.ring, self.degrees)
        return GradedMatrix(source, self.module, self.elements)

    def contains(self, v: ModuleElement) -> bool:
        return normal_form(v, self).is_zero()


class _Reducer:
    """Division against a fixed list of (monic) vectors grouped by lead coordinate."""

    def __init__(self, order: ModuleOrder, p: int) -> None:
        self.order = order
        self.p = p
        self.vectors: list[Vector] = []
        self.leads: list[Term] = []
        self.by_coord: dict[int, list[int]] = {}

    def add(self, v: Vector, lead: Term) -> int:
        idx = len(self.vectors)
        self.vectors.append(v)
        self.leads.append(lead)
        self.by_coord.setdefault(lead[0], []).append(idx)
        return idx

    def replace(self, idx: int, v: Vector) -> None:
        self.vectors[idx] = v

    def divisor(self, term: Term, active: Optional[set[int]] = None) -> Optional[int]:
        c, m = term
        for idx in self.by_coord.get(c, ()):
            if active is not None and idx not in active:
                continue
            if monomial_divides(self.leads[idx][1], m):
                return idx
        return None

    def reduce(
        self,
        v: Vector,
        active: Optional[set[int]] = None,
        quotients: Optional[dict[int, dict[Monomial, int]]] = None,
    ) -> Vector:
        """Full reduction of v; quotient multipliers are accumulated when asked."""
        p = self.p
        work = dict(v)
        rest: Vector = {}
        while work:
            t = max(work, key=self.order.key)
            idx = self.divisor(t, active)
            coeff = work[t]
            if idx is None:
                rest[t] = coeff
                del work[t]
                continue
            q = monomial_div(t[1], self.leads[idx][1])
            for (i, u), a in self.vectors[idx].items():
                key = (i, monomial_mul(u, q))
                val = (work.get(key, 0) - coeff * a) % p
                if val:
                    work[key] = val
                else:
                    work.pop(key, None)
            if quotients is not None:
                bucket = quotients.setdefault(idx, {})
                bucket[q] = (bucket.get(q, 0) + coeff) % p
        return rest


def _monic(v: Vector, order: ModuleOrder, p: int) -> tuple[Vector, Term]:
    lead = order.leading(v)
    inv = pow(v[lead], -1, p)
    return {t: c * inv % p for t, c in v.items()}, lead


def _s_vector(f: Vector, lf: Term, g: Vector, lg: Term, p: int) -> Vector:
    lcm = monomial_lcm(lf[1], lg[1])
    qf = monomial_div(lcm, lf[1])
    qg = monomial_div(lcm, lg[1])
    out: Vector = {}
    for (i, u), a in f.items():
        out[(i, monomial_mul(u, qf))] = a
    for (i, u), a in g.items():
        key = (i, monomial_mul(u, qg))
        val = (out.get(key, 0) - a) % p
        if val:
            out[key] = val
        else:
            out.pop(key, None)
    return out


def _arranged(leads: Sequence[Term]) -> list[int]:
    return sorted(range(len(leads)), key=lambda i: (leads[i][0], [-e for e in leads[i][1]]))


def _as_vector(v: ModuleElement, module: GradedFreeModule) -> Vector:
    if v.module != module:
        raise GroebnerError("element does not lie in the basis module")
    return dict(v.term_map)


def _degree(module: GradedFreeModule, v: Vector) -> int:
    (c, m) = next(iter(v))
    return sum(m) + module.twists[c]


def normal_form(v: ModuleElement, basis: GroebnerBasis) -> ModuleElement:
    """Fully reduce v modulo ``basis``; the result has no term divisible by a lead.

    Raises:
        GroebnerError: If v lives in a different free module.
    """
    vec = _as_vector(v, basis.module)
    if not basis.elements or not vec:
        return v
    reducer = _Reducer(basis.order, basis.module.ring.prime)
    for e, lead in zip(basis.elements, basis.leads):
        reducer.add(dict(e.term_map), lead)
    rest = reducer.reduce(vec)
    return ModuleElement.unchecked(basis.module, rest, v.degree)


def buchberger(
    gens: Iterable[ModuleElement],
    module: Optional[GradedFreeModule] = None,
    order: Optional[ModuleOrder] = None,
    strategy: Strategy = "degree",
    deadline: Optional[float] = None,
) -> GroebnerBasis:
    """Reduced Gröbner basis of the submodule generated by ``gens``.

    The ``degree`` strategy works degree by degree, smallest S-pair first, and
    tail-reduces each finished degree. ``fifo`` treats pairs in creation order
    and interreduces at the end. Both end at the same reduced basis.

    Pairs are pruned with the Gebauer-Möller update: the chain criterion
    always, the coprime criterion only for ideals (rank 1).

    Raises:
        GroebnerError: If generators lie in different modules.
        BudgetExceeded: If ``deadline`` passes.
    """
    gens = [g for g in gens]
    if module is None:
        if not gens:
            raise GroebnerError("module must be given for an empty generator list")
        module = gens[0].module
    if order is None:
        order = ModuleOrder.position_over_term(module)
    p = module.ring.prime
    is_ideal = module.rank == 1

    inputs = [(_as_vector(g, module), i) for i, g in enumerate(gens)]
    inputs = [(v, i) for v, i in inputs if v]

    reducer = _Reducer(order, p)
    origin: list[Optional[int]] = []
    degrees: list[int] = []
    G: set[int] = set()
    pairs: dict[tuple[int, int], tuple[int, int]] = {}  # pair -> (degree, serial)
    serial = 0

    def pair_degree(i: int, j: int) -> int:
        c, mi = reducer.leads[i]
        return sum(monomial_lcm(mi, reducer.leads[j][1])) + module.twists[c]

    def coprime(mi: Monomial, mj: Monomial) -> bool:
        return is_ideal and monomial_mul(mi, mj) == monomial_lcm(mi, mj)

    def update(ih: int) -> None:
        nonlocal serial, G, pairs
        ch, mh = reducer.leads[ih]
        same = [ig for ig in G if reducer.leads[ig][0] == ch]

        # new pairs (h, g)
        C = list(same)
        D: list[int] = []
        while C:
            ig = C.pop()
            mg = reducer.leads[ig][1]
            lcm_hg = monomial_lcm(mh, mg)

            if coprime(mh, mg) or not any(
                monomial_divides(monomial_lcm(mh, reducer.leads[ip][1]), lcm_hg)
                for ip in (*C, *D)
            ):
                D.append(ig)
        E = [ig for ig in D if not coprime(mh, reducer.leads[ig][1])]

        # old pairs
        kept = {}
        for (i1, i2), info in pairs.items():
            c1, m1 = reducer.leads[i1]
            if c1 != ch:
                kept[(i1, i2)] = info
                continue
            m2 = reducer.leads[i2][1]
            lcm12 = monomial_lcm(m1, m2)
            if (
                not monomial_divides(mh, lcm12)
                or monomial_lcm(m1, mh) == lcm12
                or monomial_lcm(m2, mh) == lcm12
            ):
                kept[(i1, i2)] = info
        for ig in sorted(E):
            kept[(ig, ih)] = (pair_degree(ig, ih), serial)
            serial += 1
        pairs = kept

        G = {
            ig
            for ig in G
            if not (reducer.leads[ig][0] == ch and monomial_divides(mh, reducer.leads[ig][1]))
        }
        G.add(ih)

    def insert(v: Vector, source: Optional[int]) -> bool:
        h = reducer.reduce(v, active=G)
        if not h:
            return False
        h, lead = _monic(h, order, p)
        ih = reducer.add(h, lead)
        origin.append(source)
        degrees.append(_degree(module, h))
        update(ih)
        return True

    def tail_reduce(indices: Iterable[int]) -> None:
        for idx in indices:
            lead = reducer.leads[idx]
            v = reducer.vectors[idx]
            tail = {t: c for t, c in v.items() if t != lead}
            rest = reducer.reduce(tail, active=G - {idx})
            rest[lead] = v[lead]
            reducer.replace(idx, rest)

    if strategy == "degree":
        pending = sorted(inputs, key=lambda vi: (_degree(module, vi[0]), vi[1]))
        while pending or pairs:
            check_deadline(deadline)
            pending_deg = _degree(module, pending[0][0]) if pending else None
            pair_deg = min(d for d, _ in pairs.values()) if pairs else None
            current = min(d for d in (pending_deg, pair_deg) if d is not None)
            while pending and _degree(module, pending[0][0]) == current:
                v, i = pending.pop(0)
                insert(v, i)
            while True:
                batch = sorted(
                    (info[1], pr) for pr, info in pairs.items() if info[0] == current
                )
                if not batch:
                    break
                _, (i1, i2) = batch[0]
                del pairs[(i1, i2)]
                check_deadline(deadline)
                s = _s_vector(
                    reducer.vectors[i1], reducer.leads[i1],
                    reducer.vectors[i2], reducer.leads[i2], p,
                )
                added = insert(s, None)
                logger.debug("pair (%d, %d) in degree %d: %s", i1, i2, current,
                             "new element" if added else "reduced to zero")
            tail_reduce(sorted(ig for ig in G if degrees[ig] == current))
            logger.info("degree %d done: basis size %d, %d pairs left", current, len(G), len(pairs))
    elif strategy == "fifo":
        for v, i in inputs:
            insert(v, i)
        while pairs:
            check_deadline(deadline)
            (i1, i2) = min(pairs, key=lambda pr: pairs[pr][1])
            del pairs[(i1, i2)]
            s = _s_vector(
                reducer.vectors[i1], reducer.leads[i1],
                reducer.vectors[i2], reducer.leads[i2], p,
            )
            added = insert(s, None)
            logger.debug("pair (%d, %d): %s", i1, i2, "new element" if added else "reduced to zero")
        tail_reduce(sorted(G))
        logger.info("fifo run done: basis size %d", len(G))
    else:
        raise ValueError(f"unknown S-pair strategy '{strategy}'")

    members = sorted(G)
    leads = [reducer.leads[i] for i in members]
    arranged = [members[i] for i in _arranged(leads)]
    return GroebnerBasis(
        module=module,
        order=order,
        elements=[
            ModuleElement.unchecked(module, reducer.vectors[i], degrees[i]) for i in arranged
        ],
        leads=[reducer.leads[i] for i in arranged],
        provenance=[origin[i] for i in arranged],
    )


def schreyer_basis(basis: GroebnerBasis, deadline: Optional[float] = None) -> GroebnerBasis:
    """Gröbner basis of the syzygies of ``basis`` under the induced order.

    One syzygy per minimal pair: for each i, the pairs (i, j), j > i, sharing
    the lead coordinate whose monomial lcm(M_i, M_j)/M_i is minimal. Every
    S-vector is reduced to zero and the quotients give the syzygy.

    Raises:
        GroebnerError: If leading terms are missing or an S-vector does not
            reduce to zero, i.e. the input is not a Gröbner basis.
        BudgetExceeded: If ``deadline`` passes.
    """
    module = basis.module
    ring = module.ring
    p = ring.prime
    if len(basis.leads) != len(basis.elements):
        raise GroebnerError("basis elements are missing their leading terms")
    source = GradedFreeModule(ring, basis.degrees)
    order = basis.order.induced(basis.leads)

    reducer = _Reducer(basis.order, p)
    lead_coeffs = []
    for e, lead in zip(basis.elements, basis.leads):
        v = dict(e.term_map)
        if basis.order.leading(v) != lead:
            raise GroebnerError(f"stored leading term {lead} is not the leading term")
        reducer.add(v, lead)
        lead_coeffs.append(v[lead])

    syzygies: list[Vector] = []
    for i, (ci, mi) in enumerate(basis.leads):
        candidates: list[tuple[Monomial, int]] = []
        for j in range(i + 1, len(basis.leads)):
            cj, mj = basis.leads[j]
            if cj == ci:
                candidates.append((monomial_div(monomial_lcm(mi, mj), mi), j))
        minimal: list[tuple[Monomial, int]] = []
        for q, j in candidates:
            if any(monomial_divides(q2, q) for q2, _ in minimal):
                continue
            if any(monomial_divides(q2, q) and q2 != q for q2, _ in candidates):
                continue
            minimal.append((q, j))
        for qi, j in minimal:
            check_deadline(deadline)
            mj = basis.leads[j][1]
            qj = monomial_div(monomial_lcm(mi, mj), mj)
            inv_i = pow(lead_coeffs[i], -1, p)
            inv_j = pow(lead_coeffs[j], -1, p)
            s: Vector = {}
            for (c, u), a in reducer.vectors[i].items():
                s[(c, monomial_mul(u, qi))] = a * inv_i % p
            for (c, u), a in reducer.vectors[j].items():
                key = (c, monomial_mul(u, qj))
                val = (s.get(key, 0) - a * inv_j) % p
                if val:
                    s[key] = val
                else:
                    s.pop(key, None)
            quotients: dict[int, dict[Monomial, int]] = {}
            rest = reducer.reduce(s, quotients=quotients)
            if rest:
                raise GroebnerError(f"S-vector of ({i}, {j}) does not reduce to zero")
            syz: Vector = {}
            syz[(i, qi)] = inv_i
            syz[(j, qj)] = (syz.get((j, qj), 0) - inv_j) % p
            for idx, bucket in quotients.items():
                for q, a in bucket.items():
                    key = (idx, q)
                    val = (syz.get(key, 0) - a) % p
                    if val:
                        syz[key] = val
                    else:
                        syz.pop(key, None)
            syzygies.append(syz)

    monic = [_monic(s, order, p) for s in syzygies]
    leads = [lead for _, lead in monic]
    arranged = _arranged(leads)
    logger.info("syzygies: %d from a basis of %d elements", len(monic), len(basis))
    return GroebnerBasis(
        module=source,
        order=order,
        elements=[
            ModuleElement.unchecked(source, monic[i][0], _degree(source, monic[i][0]))
            for i in arranged
        ],
        leads=[leads[i] for i in arranged],
        provenance=[None] * len(arranged),
    )


def schreyer_syzygies(basis: GroebnerBasis, deadline: Optional[float] = None) -> GradedMatrix:
    """Matrix whose columns generate the syzygies of ``basis``.

    The target is ``basis.matrix().source``.
    """
    return schreyer_basis(basis, deadline).matrix()


def ideal_basis(
    polys: Iterable[Polynomial],
    ring: Optional[RingContext] = None,
    strategy: Strategy = "degree",
    deadline: Optional[float] = None,
) -> GroebnerBasis:
    """Gröbner basis of the ideal generated by polynomials, as a rank-1 module."""
    polys = [f for f in polys if not f.is_zero()]
    if ring is None:
        if not polys:
            raise GroebnerError("ring must be given for an empty generator list")
        ring = polys[0].ring
    module = GradedFreeModule(ring, (0,))
    gens = [ModuleElement.from_entries(module, {0: f}) for f in polys]
    return buchberger(gens, module=module, strategy=strategy, deadline=deadline)


def reduce_polynomial(f: Polynomial, basis: GroebnerBasis) -> Polynomial:
    """Normal form of a polynomial modulo an ideal basis."""
    v = ModuleElement.from_entries(basis.module, {0: f})
    return normal_form(v, basis).entry(0)
